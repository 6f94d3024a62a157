import gzip
import json
import math

import numpy as np
import pytest

from lhmaass import tables
from lhmaass.errors import DataError, DomainError
from lhmaass.lseries import (
    NewformData,
    check_admissible,
    expand_coeffs,
    export_coefficients,
    fixture_for_level,
    functional_equation_defect,
    ingest_coefficients,
    kronecker_table,
    load_fixture,
    twisted_L,
)
from lhmaass.ntkernel import factorize, kronecker

L7 = "7.4.a.a"


def test_q_expansions():
    for label, head in tables.load()["q_expansions"].items():
        assert expand_coeffs(load_fixture(label), 9)[1:].tolist() == head
    a = expand_coeffs(load_fixture(L7), 9)
    assert a[4] == a[2] ** 2 - 8
    assert a[6] == a[2] * a[3]
    assert a[9] == a[3] ** 2 - 27


def test_multiplicativity_and_hecke_recursion():
    data = load_fixture("15.4.a.b")
    a = expand_coeffs(data, 2000)
    for m, n in ((4, 9), (7, 11), (8, 125), (13, 17)):
        assert a[m * n] == a[m] * a[n]
    for p in (2, 7, 11):
        for r in range(1, 3):
            assert a[p ** (r + 1)] == a[p] * a[p**r] - p**3 * a[p ** (r - 1)]
    # p | N: a(p^r) = a_p^r
    assert a[9] == a[3] ** 2 and a[125] == a[5] ** 3


def test_fixture_sanity():
    for level in (7, 15, 22):
        data = fixture_for_level(level)
        assert data.level == level and data.weight == 4
        assert data.p_max >= 10**5
        data.validate()
    with pytest.raises(DataError):
        fixture_for_level(11)
    with pytest.raises(DataError):
        load_fixture("1.2.a.a")


def test_round_trip(tmp_path):
    data = load_fixture("22.4.a.b")
    for name in ("f.json", "f.json.gz"):
        path = tmp_path / name
        export_coefficients(data, path)
        back = ingest_coefficients(path)
        assert (back.label, back.level, back.weight, back.atkin_lehner) == (
            data.label, data.level, data.weight, data.atkin_lehner,
        )
        assert back.ap == data.ap


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_ingest_rejects_bad_files(tmp_path):
    good = {"label": "t", "level": 7, "weight": 4, "atkin_lehner": {"7": 1}, "ap": [[2, -1], [3, -2], [5, 16]]}
    assert ingest_coefficients(_write(tmp_path / "ok.json", good)).ap[5] == 16
    bad = dict(good, ap=[[2, -1], [3, 200]])
    with pytest.raises(DataError, match="Deligne"):
        ingest_coefficients(_write(tmp_path / "b1.json", bad))
    with pytest.raises(DataError, match="missing a_3"):
        ingest_coefficients(_write(tmp_path / "b2.json", dict(good, ap=[[2, -1], [5, 16]])))
    with pytest.raises(DataError, match="Atkin"):
        ingest_coefficients(_write(tmp_path / "b3.json", dict(good, atkin_lehner={})))
    with pytest.raises(DataError):
        ingest_coefficients(_write(tmp_path / "b4.json", {"label": "x"}))
    (tmp_path / "b5.json").write_text("{not json")
    with pytest.raises(DataError):
        ingest_coefficients(tmp_path / "b5.json")
    with pytest.raises(DataError):
        ingest_coefficients(tmp_path / "missing.json")


def test_expand_needs_data():
    data = NewformData("t", 7, 4, {7: 1}, {2: -1, 3: -2, 5: 16})
    with pytest.raises(DataError, match="a_7"):
        expand_coeffs(data, 10)


def test_kronecker_table():
    t = kronecker_table(-20, 100)
    assert t.tolist() == [kronecker(-20, n) for n in range(101)]


def test_admissibility():
    data = load_fixture(L7)
    check_admissible(data, 29)
    with pytest.raises(DomainError):
        check_admissible(data, 41)  # (41/7) = -1
    with pytest.raises(DomainError):
        check_admissible(data, -3)
    with pytest.raises(DomainError):
        check_admissible(data, 36)
    with pytest.raises(DomainError):
        check_admissible(data, 21)


@pytest.mark.parametrize("label,D", [(L7, 29), (L7, 57), ("15.4.a.b", 76), ("22.4.a.b", 97)])
def test_functional_equation(label, D):
    data = load_fixture(label)
    lv = twisted_L(data, D)
    assert functional_equation_defect(data, D) < max(lv.error, 1e-10)


def test_depth_monotonicity():
    data = load_fixture(L7)
    a = twisted_L(data, 44)
    b = twisted_L(data, 44, X=2 * a.terms)
    assert abs(a.value - b.value) <= a.error


def test_depth_errors():
    data = load_fixture(L7)
    with pytest.raises(DataError, match="need X"):
        twisted_L(data, 44, X=10)
    small = NewformData("s", 7, 4, dict(data.atkin_lehner), {p: v for p, v in data.ap.items() if p < 200})
    with pytest.raises(DataError, match="stops at"):
        twisted_L(small, 44)


def test_known_values():
    data = load_fixture(L7)
    assert twisted_L(data, 29).value == pytest.approx(3.009928487, abs=1e-6)
    assert abs(twisted_L(data, 37).value) < 1e-6
    assert abs(twisted_L(load_fixture("22.4.a.b"), 1985).value) < 1e-4
