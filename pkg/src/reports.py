"""Serializable two-sided bounds shared by the core and boxdist modules."""
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

from src.settings import DEFAULT_TOL


class BoundReport(BaseModel):
    """Certified interval [lower, upper] for a box-type distance.

    ``upper_witness`` holds whatever realizes the upper side (retained subset,
    transport plan); ``lower_witness`` holds the certificate for the lower side.
    """

    lower: float = Field(ge=0.0)
    upper: float = Field(ge=0.0)
    lower_witness: dict[str, Any] = Field(default_factory=dict)
    upper_witness: dict[str, Any] = Field(default_factory=dict)
    methods: list[str] = Field(default_factory=list)
    lam: Optional[float] = None
    tol: float = DEFAULT_TOL
    seed: Optional[int] = None
    exact: bool = False

    @model_validator(mode="after")
    def _ordered(self) -> "BoundReport":
        if self.lower > self.upper + max(self.tol, DEFAULT_TOL):
            raise ValueError(
                f"lower bound {self.lower!r} exceeds upper bound {self.upper!r}"
            )
        return self

    def shifted(self, term: float) -> "BoundReport":
        """Return the report with ``term`` added to both sides (mass normalization)."""
        return self.model_copy(update={
            "lower": self.lower + term,
            "upper": self.upper + term,
            "methods": [*self.methods, f"mass-term+{term!r}"],
        })

    def merged(self, other: "BoundReport") -> "BoundReport":
        """Intersect two reports for the same quantity: best lower, best upper."""
        lower_src, upper_src = (self if self.lower >= other.lower else other,
                                self if self.upper <= other.upper else other)
        return BoundReport(
            lower=lower_src.lower,
            upper=upper_src.upper,
            lower_witness=lower_src.lower_witness,
            upper_witness=upper_src.upper_witness,
            methods=sorted(set(self.methods) | set(other.methods)),
            lam=self.lam if self.lam is not None else other.lam,
            tol=max(self.tol, other.tol),
            seed=self.seed if self.seed is not None else other.seed,
            exact=upper_src.upper - lower_src.lower <= max(self.tol, other.tol),
        )
