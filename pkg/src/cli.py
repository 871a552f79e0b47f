"""Command-line front end for the box distance toolkit.

Usage (from the repository root):
    python src/cli.py bounds sphere --m 2 --n 10
    python src/cli.py box --x a.json --y b.json --lam 1 --search exact
    python src/cli.py concentration --kind sphere --dims 2 8 32 128 --samples 3000
    python src/cli.py certify --x sphere:10 --y sphere:2
    python src/cli.py facts --kind sphere so --dims 2 3 4

Exit codes: 0 success, 2 configuration error, 3 size or precondition error,
4 I/O error.
"""
import os
import sys
import json
import logging
import argparse
import re
from typing import Any, Literal, Optional

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

# Add project root to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.boxdist import (
    BallVolumeFunction,
    best_volume_certificate,
    box_distance,
    box_lower_volume_certificate,
    codim1_coupling_curve,
)
from src.core import FiniteMMSpace, LipschitzSearch
from src.errors import (
    ConfigError,
    DimensionError,
    DomainError,
    PreconditionError,
    SizeLimitError,
    UnsupportedError,
)
from src.modelgeom import (
    asobisugi_bound,
    hyouka_max_c,
    kaotan_constant,
    kaotan_finite_k,
    model_spec,
    oosawa_constant,
    oosawa_finite_k,
)
from src.samplers import SampleConfig, concentration_curve, sample_space
from src.settings import DEFAULT_SEED, DEFAULT_TOL

logger = logging.getLogger(__name__)

BOUNDS_COLUMNS = ["kind", "m", "n", "k", "lower", "status", "asymptotic"]
FACTS_COLUMNS = ["kind", "n", "volume", "a_N", "ricci_lower", "diameter"]
GLOBAL_KEYS = {"command", "seed", "tol", "out", "format", "config", "verbose"}

SAMPLER_SPEC = re.compile(r"^(sphere|cp|so|hamming):(\d+)(?::(\d+))?$")


class ExperimentConfig(BaseModel):
    """Fully resolved run configuration, recorded in every output header."""

    model_config = ConfigDict(extra="forbid")

    command: str
    seed: int = Field(ge=0)
    tol: float = Field(gt=0.0)
    out: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None
    config: Optional[str] = None
    verbose: bool = False
    params: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentConfig":
        values = vars(args).copy()
        values.pop("handler", None)
        params = {key: values.pop(key) for key in list(values) if key not in GLOBAL_KEYS}
        return cls(params=params, **values)


# ---------------------------------------------------------------------------
# Input and output helpers
# ---------------------------------------------------------------------------

def load_space(source: str, seed: int) -> FiniteMMSpace:
    """A space file path, or a sampler spec ``kind:n:N`` drawn with ``seed``."""
    if os.path.exists(source):
        return FiniteMMSpace.load(source)
    match = SAMPLER_SPEC.match(source)
    if match is None or match.group(3) is None:
        raise FileNotFoundError(f"no space file or sampler spec named {source!r}")
    kind, n, N = match.group(1), int(match.group(2)), int(match.group(3))
    return sample_space(SampleConfig(kind=kind, n=n, N=N, seed=seed))


def load_ball_volumes(source: str, seed: int, tol: float) -> BallVolumeFunction:
    """Closed-form ``sphere:n`` / ``cp:n``, or empirical volumes of a loaded space."""
    match = SAMPLER_SPEC.match(source)
    if not os.path.exists(source) and match is not None and match.group(3) is None:
        return BallVolumeFunction.closed_form(match.group(1), int(match.group(2)))
    return BallVolumeFunction.from_space(load_space(source, seed), seed=seed, tol=tol)


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_output(result: Any, config: ExperimentConfig, default_format: str) -> None:
    """Write a DataFrame or a record as CSV (17 significant digits) or JSON."""
    fmt = config.format or default_format
    header = config.model_dump_json()
    if fmt == "csv":
        table = result if isinstance(result, pd.DataFrame) else pd.DataFrame([{
            k: v for k, v in _jsonable(result).items() if not isinstance(v, (dict, list))
        }])
        text = f"# config: {header}\n" + table.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    else:
        body = result.to_dict(orient="records") if isinstance(result, pd.DataFrame) else result
        key = "rows" if isinstance(result, pd.DataFrame) else "result"
        text = json.dumps({"config": json.loads(header), key: _jsonable(body)}, indent=2) + "\n"

    if config.out:
        with open(config.out, "w", encoding="utf-8") as f:
            f.write(text)
        rows = len(result) if isinstance(result, pd.DataFrame) else 1
        print(f"Wrote {rows} row{'s' if rows != 1 else ''} to {config.out}")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _hyouka_row(kind: str, m: int, n: int) -> float:
    if kind == "sphere":
        small, large = model_spec("sphere", m), model_spec("sphere", n)
    else:
        small, large = model_spec("cp", m), model_spec("cp", n)
    kappa1 = small.kappa1 if small.kappa1 is not None else 1.0
    return hyouka_max_c(small.dimension, large.dimension, kappa1, large.a_N)


def cmd_bounds(args: argparse.Namespace, config: ExperimentConfig) -> pd.DataFrame:
    """Certified lower-bound tables over (m, n) grids."""
    rows = []
    asymptotic = None
    if args.constants:
        C1, C2, C3 = args.constants
        asymptotic = oosawa_constant(C1, C2, C3) if args.kind == "so" else kaotan_constant(C1, C2, C3)

    for m in args.m:
        for n in args.n:
            row = {"kind": args.kind, "m": m, "n": n, "k": None, "lower": None, "status": "ok", "asymptotic": asymptotic}
            if args.kind == "so":
                if min(m, n) < 2:
                    row["status"] = "not-applicable"
                else:
                    row["lower"] = asobisugi_bound(n, m)
            elif n <= m:
                row["status"] = "not-applicable"
            else:
                row["lower"] = _hyouka_row(args.kind, m, n)
            rows.append(row)

            for k in args.k or []:
                if not args.constants:
                    raise ConfigError("finite-k rows need --constants C1 C2 C3")
                finite = {"kind": f"{args.kind}-finite-k", "m": m, "n": n, "k": k, "lower": None, "status": "ok", "asymptotic": asymptotic}
                try:
                    if args.kind == "so":
                        finite["lower"] = oosawa_finite_k(n, m, C1, C2, C3, k).bound
                    else:
                        finite["lower"] = kaotan_finite_k(n, m, C1, C2, C3, k, family=args.kind).threshold
                except (PreconditionError, DomainError) as e:
                    finite["status"] = "not-applicable"
                    logger.debug("finite-k row m=%d n=%d k=%d skipped: %s", m, n, k, e)
                rows.append(finite)

    table = pd.DataFrame(rows, columns=BOUNDS_COLUMNS)
    applicable = int((table["status"] == "ok").sum())
    logger.info("bounds %s: %d of %d cells applicable", args.kind, applicable, len(table))
    return table


def cmd_box(args: argparse.Namespace, config: ExperimentConfig):
    """Bounds on the box distance between two inputs, or a codimension-one coupling curve."""
    if args.codim1:
        return codim1_coupling_curve(args.dims, args.samples, args.eps, args.seeds or [config.seed], family=args.codim1, lam=args.lam)
    if not (args.x and args.y):
        raise ConfigError("box needs --x and --y (or --codim1)")
    X = load_space(args.x, config.seed)
    Y = load_space(args.y, config.seed)
    return box_distance(X, Y, lam=args.lam, search=args.search, seed=config.seed, restarts=args.restarts, tol=config.tol)


def cmd_concentration(args: argparse.Namespace, config: ExperimentConfig) -> pd.DataFrame:
    """Observable-diameter curve over a dimension grid, one row per (n, seed)."""
    seeds = args.seeds or [config.seed]
    configs = [
        SampleConfig(kind=args.kind, n=n, N=args.samples, seed=seed)
        for n in args.dims
        for seed in seeds
    ]
    strategy = LipschitzSearch(seed=config.seed, sweeps=args.sweeps)
    return concentration_curve(configs, args.kappa, eps=args.eps, strategy=strategy).table


def cmd_certify(args: argparse.Namespace, config: ExperimentConfig) -> dict:
    """Check the ball-volume premise; without --a/--c scan a grid for the best certificate."""
    vX = load_ball_volumes(args.x, config.seed, config.tol)
    vY = load_ball_volumes(args.y, config.seed, config.tol)
    for name, v in (("x", vX), ("y", vY)):
        if not v.uniformly_distributed:
            record = {
                "certified": False,
                "refused": True,
                "reason": f"ball volumes of {name} depend on the center",
                "center_std": v.center_std,
                "source": v.provenance,
            }
            write_output(record, config, "json")
            raise PreconditionError(f"ball volumes of {name} vary across centers (std {v.center_std:.3g})")

    if args.a is not None and args.c is not None:
        cert = box_lower_volume_certificate(vX, vY, args.a, args.c)
    elif args.a is None and args.c is None:
        cert = best_volume_certificate(vX, vY)
        if cert is None:
            return {"certified": False, "lower": 0.0, "reason": "no grid point satisfies the premise"}
    else:
        raise ConfigError("give both --a and --c, or neither to scan a grid")
    return cert.model_dump()


def cmd_facts(args: argparse.Namespace, config: ExperimentConfig) -> pd.DataFrame:
    """ModelSpaceSpec attributes for each requested kind and dimension."""
    rows = []
    for kind in args.kind:
        for n in args.dims:
            if kind == "so" and n < 2:
                continue
            rows.append(model_spec(kind, n).facts_row())
    return pd.DataFrame(rows, columns=FACTS_COLUMNS)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Compute, estimate and certify box distances between mm-spaces')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Master seed for sampling and search')
    parser.add_argument('--tol', type=float, default=DEFAULT_TOL, help='Absolute float tolerance')
    parser.add_argument('--out', type=str, help='Output file (stdout when omitted)')
    parser.add_argument('--format', choices=['json', 'csv'], help='Output format')
    parser.add_argument('--config', type=str, help='key=value config file; flags override it')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    bounds = sub.add_parser('bounds', help='Certified lower-bound tables')
    bounds.add_argument('kind', choices=['sphere', 'cp', 'so'])
    bounds.add_argument('--m', type=int, nargs='+', required=True)
    bounds.add_argument('--n', type=int, nargs='+', required=True)
    bounds.add_argument('--constants', type=float, nargs=3, metavar=('C1', 'C2', 'C3'))
    bounds.add_argument('--k', type=int, nargs='+', help='Finite-k rows (needs --constants)')
    bounds.set_defaults(handler=cmd_bounds, default_format='csv')

    box = sub.add_parser('box', help='Box distance bounds between two spaces')
    box.add_argument('--x', type=str, help='Space file or sampler spec kind:n:N')
    box.add_argument('--y', type=str, help='Space file or sampler spec kind:n:N')
    box.add_argument('--lam', type=float, default=1.0)
    box.add_argument('--search', choices=['exact', 'local', 'seeded-restart'], default='seeded-restart')
    box.add_argument('--restarts', type=int, default=8)
    box.add_argument('--codim1', choices=['sphere', 'cp'], help='Projection-coupling curve instead of two inputs')
    box.add_argument('--dims', type=int, nargs='+', default=[4, 16, 64])
    box.add_argument('--samples', type=int, default=1000)
    box.add_argument('--eps', type=float, default=0.3)
    box.add_argument('--seeds', type=int, nargs='+')
    box.set_defaults(handler=cmd_box, default_format='json')

    conc = sub.add_parser('concentration', help='Observable-diameter curves')
    conc.add_argument('--kind', choices=['sphere', 'cp', 'so', 'hamming'], default='sphere')
    conc.add_argument('--dims', type=int, nargs='*', default=[])
    conc.add_argument('--samples', type=int, default=3000)
    conc.add_argument('--kappa', type=float, default=0.1)
    conc.add_argument('--eps', type=float, help='Levy tail radius (default: half of each observable diameter)')
    conc.add_argument('--sweeps', type=int, default=200)
    conc.add_argument('--seeds', type=int, nargs='+')
    conc.set_defaults(handler=cmd_concentration, default_format='csv')

    cert = sub.add_parser('certify', help='Ball-volume lower-bound certificate')
    cert.add_argument('--x', type=str, required=True, help='sphere:n, cp:n, a space file or kind:n:N')
    cert.add_argument('--y', type=str, required=True, help='sphere:n, cp:n, a space file or kind:n:N')
    cert.add_argument('--a', type=float)
    cert.add_argument('--c', type=float)
    cert.set_defaults(handler=cmd_certify, default_format='json')

    facts = sub.add_parser('facts', help='Model space attribute table')
    facts.add_argument('--kind', choices=['sphere', 'cp', 'so', 'hamming'], nargs='+', default=['sphere', 'cp', 'so'])
    facts.add_argument('--dims', type=int, nargs='+', default=[2, 3, 4])
    facts.set_defaults(handler=cmd_facts, default_format='csv')
    parser.subcommands = sub.choices
    return parser


def _convert(action: argparse.Action, raw: str) -> Any:
    convert = action.type or str
    if isinstance(action, argparse._StoreTrueAction):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if action.nargs in ('+', '*') or isinstance(action.nargs, int):
        return [convert(part) for part in re.split(r"[,\s]+", raw.strip()) if part]
    return convert(raw)


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    """Parse flags, then re-parse with config-file values as defaults so flags win."""
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    tokens = sys.argv[1:] if argv is None else argv
    command = next((token for token in tokens if token in parser.subcommands), None)
    if not known.config or command is None:
        return parser.parse_args(argv)

    if not os.path.exists(known.config):
        raise FileNotFoundError(f"config file {known.config} not found")
    values = dotenv_values(known.config)
    subparser = parser.subcommands[command]
    actions = {a.dest: (parser, a) for a in parser._actions}
    actions.update({a.dest: (subparser, a) for a in subparser._actions})
    for key, raw in values.items():
        if key not in actions or key in ("help", "command", "config"):
            raise ConfigError(f"unknown config key {key!r}")
        owner, action = actions[key]
        try:
            owner.set_defaults(**{key: _convert(action, raw or "")})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key}: {raw!r} ({e})")
    for action in subparser._actions:
        if action.required and action.dest in values:
            action.required = False
    return parser.parse_args(argv)


def run(args: argparse.Namespace) -> None:
    handler = args.handler
    default_format = args.default_format
    del args.default_format
    config = ExperimentConfig.from_args(args)
    logger.info("running %s", config.command)
    result = handler(args, config)
    write_output(result, config, default_format)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        run(args)
    except (DomainError, DimensionError, ConfigError, ValidationError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    except (SizeLimitError, PreconditionError, UnsupportedError) as e:
        print(f"Cannot compute: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == '__main__':
    sys.exit(main())
