from pathlib import Path

import numpy as np
import pytest

from gaugeflow.functionals import FunctionalSpec
from gaugeflow.verify import (
    REPORT_COLUMNS,
    gradient_audit,
    identity_catalog,
    run_catalog,
    run_identity,
)

MANIFEST = Path(__file__).with_name("catalog_manifest.txt")


def test_catalog_matches_manifest():
    ids = [c.id for c in identity_catalog()]
    assert ids == MANIFEST.read_text().split()
    assert len(set(ids)) == len(ids)


def test_catalog_kinds():
    for case in identity_catalog():
        assert case.exactness in ("exact", "order", "bound")
        assert case.description


EXACT = [c.id for c in identity_catalog() if c.exactness == "exact"]
ORDER = [c.id for c in identity_catalog() if c.exactness == "order"]


@pytest.mark.parametrize("case", EXACT)
def test_exact_cases_small(case):
    r = run_identity(case, [8, 16], m=2)
    assert r.passed, r.residuals


@pytest.mark.parametrize("case", ORDER)
def test_order_cases_small(case):
    r = run_identity(case, [16, 32])
    assert r.passed, (r.residuals, r.orders)


def test_kato_bound():
    r = run_identity("kato", [16])
    assert r.passed and max(r.residuals) < 1e-6


def test_run_identity_errors():
    with pytest.raises(KeyError):
        run_identity("nonexistent", [16])
    with pytest.raises(ValueError):
        run_identity("bianchi", [16])


def test_report_csv_and_summary():
    rep = run_catalog([8, 16], only=["hodge_involution", "jacobi"], dims=[2])
    text = rep.to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert len(lines) == 1 + 4
    assert lines[1].split(",")[3] == ""
    assert rep.passed and "2/2 cases passed" in rep.summary()
    assert rep.to_csv() == run_catalog([8, 16], only=["hodge_involution", "jacobi"], dims=[2]).to_csv()


def test_gradient_audit():
    audit = gradient_audit(FunctionalSpec("Yn", 3), [1], n_directions=2)
    assert audit.passed
    assert audit.max_error[1e-4] <= 1e-6
    zero = gradient_audit(FunctionalSpec("Zn", 3), [1], n_directions=2, zero=True)
    assert zero.passed
    assert all(row[3] == 0.0 and row[4] == 0.0 for row in zero.rows)


def test_cases_respect_their_minimum_dimension():
    with pytest.raises(ValueError):
        run_identity("bianchi", [16, 32], m=2)
    rep = run_catalog([16, 32], only=["bianchi", "hodge_involution"], dims=[2])
    assert [r.label for r in rep.results] == ["hodge_involution[m=2]"]
