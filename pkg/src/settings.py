"""Runtime defaults for the box distance toolkit, overridable from .env."""
import os

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


# Absolute tolerance for float comparisons (masses, discrepancies, Lipschitz checks)
DEFAULT_TOL = _env_float("BOXDIST_TOL", 1e-9)

# Margin required on the volume-certificate premise so ties never certify
CERT_MARGIN = _env_float("BOXDIST_CERT_MARGIN", 1e-12)

# Exact vertex cover is exponential; beyond this many atoms use heuristic mode
EXACT_MAX_ATOMS = _env_int("BOXDIST_EXACT_MAX_ATOMS", 16)

# Largest refined cell count enumerated by exact bijection search (N! plans)
BIJECTION_MAX_CELLS = _env_int("BOXDIST_BIJECTION_MAX_CELLS", 8)

# Full distance matrices are only materialized up to this many atoms
MAX_DENSE_ATOMS = _env_int("BOXDIST_MAX_DENSE_ATOMS", 4096)

HAMMING_EXHAUSTIVE_MAX = _env_int("BOXDIST_HAMMING_EXHAUSTIVE_MAX", 16)

# Conflict graphs with more edges skip the LP lower bound
LP_EDGE_LIMIT = _env_int("BOXDIST_LP_EDGE_LIMIT", 20000)

# Largest center-to-center std of ball volumes accepted as "uniformly distributed"
UNIFORMITY_MAX_STD = _env_float("BOXDIST_UNIFORMITY_MAX_STD", 0.05)

DEFAULT_SEED = _env_int("BOXDIST_SEED", 0)
