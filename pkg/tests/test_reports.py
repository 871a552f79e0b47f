import pytest
from pydantic import ValidationError

from src.reports import BoundReport


def test_lower_may_not_exceed_upper():
    with pytest.raises(ValidationError):
        BoundReport(lower=0.6, upper=0.5)
    assert BoundReport(lower=0.5 + 1e-12, upper=0.5).lower > 0.5


def test_shifted_moves_both_sides():
    report = BoundReport(lower=0.1, upper=0.3, methods=["plan-search-exact"]).shifted(0.5)
    assert report.lower == pytest.approx(0.6)
    assert report.upper == pytest.approx(0.8)
    assert report.methods[-1].startswith("mass-term+")


def test_merged_keeps_the_tightest_sides():
    search = BoundReport(lower=0.0, upper=0.5, upper_witness={"plan": []}, methods=["plan-search-local"])
    certificate = BoundReport(lower=0.2, upper=0.9, lower_witness={"a": 1.0}, methods=["volume-certificate"])
    merged = search.merged(certificate)
    assert merged.lower == 0.2
    assert merged.upper == 0.5
    assert merged.lower_witness == {"a": 1.0}
    assert merged.upper_witness == {"plan": []}
    assert merged.methods == ["plan-search-local", "volume-certificate"]
    assert not merged.exact
    assert BoundReport(lower=0.5, upper=0.5).merged(search).exact
