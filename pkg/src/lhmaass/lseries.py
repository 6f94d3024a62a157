r"""
Twisted central L-values of newforms from bundled coefficient data.

With `Q = N D^2` and `\Lambda(s) = (\sqrt{Q}/2\pi)^s \Gamma(s) L(f \otimes \chi_D, s)`
the smoothed functional equation at a cutoff parameter ``t`` reads

.. math::

    \Lambda(s) = \sum_n a(n)\chi_D(n) \Big[ (\tfrac{\sqrt Q}{2\pi n})^{s} \Gamma(s, \tfrac{2\pi n t}{\sqrt Q})
        + \varepsilon (\tfrac{\sqrt Q}{2\pi n})^{2k-s} \Gamma(2k-s, \tfrac{2\pi n}{t\sqrt Q}) \Big].

The value must not depend on ``t``; the spread over a few ``t`` is the
reported error estimate.
"""
from __future__ import annotations

import gzip
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from .errors import DataError, DomainError
from .ntkernel import is_fundamental, is_prime, kronecker, prime_divisors

ZERO_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class NewformData:
    label: str
    level: int
    weight: int  # 2k
    atkin_lehner: dict[int, int]
    ap: dict[int, int] = field(repr=False)

    @property
    def k(self) -> int:
        return self.weight // 2

    @property
    def p_max(self) -> int:
        return max(self.ap) if self.ap else 1

    def validate(self) -> None:
        if self.weight % 2 or self.weight < 2:
            raise DataError(f"{self.label}: weight must be even")
        w = self.weight - 1
        last = 1
        for p in sorted(self.ap):
            if not is_prime(p):
                raise DataError(f"{self.label}: {p} is not prime")
            # Deligne, with slack for rounding in the bound itself
            if abs(self.ap[p]) > 2 * p ** (w / 2) + 1e-6:
                raise DataError(f"{self.label}: a_{p} = {self.ap[p]} violates the Deligne bound")
            last = p
        for p in range(2, last + 1):
            if p not in self.ap and is_prime(p):
                raise DataError(f"{self.label}: missing a_{p}")
        for ell in prime_divisors(self.level) if self.level > 1 else []:
            if self.atkin_lehner.get(ell) not in (1, -1):
                raise DataError(f"{self.label}: missing Atkin-Lehner sign for {ell}")


def _from_doc(doc: dict) -> NewformData:
    try:
        data = NewformData(
            label=str(doc["label"]),
            level=int(doc["level"]),
            weight=int(doc["weight"]),
            atkin_lehner={int(l): int(s) for l, s in doc["atkin_lehner"].items()},
            ap={int(p): int(a) for p, a in doc["ap"]},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed coefficient document: {exc!r}") from None
    data.validate()
    return data


def ingest_coefficients(path) -> NewformData:
    """Read a JSON (optionally gzip) fixture file."""
    path = Path(path)
    try:
        opener = gzip.open if path.suffix == ".gz" else open
        with opener(path, "rt") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return _from_doc(doc)


def export_coefficients(data: NewformData, path) -> None:
    doc = {
        "label": data.label,
        "level": data.level,
        "weight": data.weight,
        "atkin_lehner": {str(l): s for l, s in sorted(data.atkin_lehner.items())},
        "ap": [[p, data.ap[p]] for p in sorted(data.ap)],
    }
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wt") as fh:
        json.dump(doc, fh, separators=(",", ":"))


@lru_cache(maxsize=8)
def load_fixture(label: str) -> NewformData:
    """A bundled fixture by LMFDB label, e.g. ``"7.4.a.a"``."""
    res = resources.files("lhmaass").joinpath(f"data/fixtures/{label}.json.gz")
    if not res.is_file():
        raise DataError(f"no bundled fixture {label!r}")
    with res.open("rb") as raw, gzip.open(raw, "rt") as fh:
        return _from_doc(json.load(fh))


def fixture_for_level(level: int) -> NewformData:
    from .tables import load

    label = load()["newforms"].get(str(level))
    if label is None:
        raise DataError(f"no bundled newform for level {level}")
    return load_fixture(label)


def expand_coeffs(data: NewformData, X: int) -> np.ndarray:
    """
    ``a(n)`` for ``0 <= n <= X`` (``a(0) = 0``) as int64.

    EXAMPLES::

        >>> expand_coeffs(load_fixture("7.4.a.a"), 9)[1:].tolist()
        [1, -1, -2, -7, 16, 2, -7, 15, -23]
    """
    return _expand(data, X).copy()


@lru_cache(maxsize=16)
def _expand(data: NewformData, X: int) -> np.ndarray:
    if X > data.p_max and any(is_prime(p) for p in range(data.p_max + 1, X + 1)):
        p = next(p for p in range(data.p_max + 1, X + 1) if is_prime(p))
        raise DataError(f"{data.label}: coefficient a_{p} needed for X = {X} is not in the data")
    w = data.weight - 1
    a = np.ones(X + 1, dtype=np.int64)
    a[0] = 0
    for p in sorted(data.ap):
        if p > X:
            break
        ap = data.ap[p]
        prev, cur = 1, ap
        pe = p
        while pe <= X:
            idx = np.arange(pe, X + 1, pe)
            idx = idx[(idx // pe) % p != 0]
            a[idx] *= cur
            if data.level % p == 0:
                prev, cur = cur, cur * ap
            else:
                prev, cur = cur, ap * cur - p**w * prev
            pe *= p
    return a


def kronecker_table(D: int, X: int) -> np.ndarray:
    """``(D/n)`` for ``0 <= n <= X``, periodic mod ``|D|`` for fundamental ``D``."""
    f = abs(D)
    period = np.array([kronecker(D, n) for n in range(f)], dtype=np.int64)
    reps = (X + 1) // f + 1
    return np.tile(period, reps)[: X + 1]


@dataclass(frozen=True)
class LValue:
    value: float
    error: float
    terms: int
    conductor: int

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return abs(self.value) < max(tol, self.error)


def check_admissible(data: NewformData, D: int) -> None:
    if not is_fundamental(D):
        raise DomainError(f"D = {D} is not a fundamental discriminant")
    if math.gcd(D, data.level) != 1:
        raise DomainError(f"D = {D} is not coprime to N = {data.level}")
    if D * (-1) ** data.k <= 0:
        raise DomainError(f"D = {D} must have sign (-1)^k")
    for ell, w in data.atkin_lehner.items():
        if kronecker(D, ell) != w:
            raise DomainError(f"(D/{ell}) != w_{ell}: the twist has sign -1 and vanishes trivially")


def _lambda(coef, n, s, k, rootQ, t, eps):
    x = 2 * math.pi * n / rootQ
    s2 = 2 * k - s
    g1 = gammaincc(s, x * t) * gamma_fn(s) * (1 / x) ** s
    g2 = gammaincc(s2, x / t) * gamma_fn(s2) * (1 / x) ** s2
    return math.fsum((coef * (g1 + eps * g2)).tolist())


def completed_L(data: NewformData, D: int, s: float, t: float = 1.0, X: int | None = None) -> float:
    """``Lambda(s)`` for the twist by ``D`` (sign +1)."""
    check_admissible(data, D)
    k = data.k
    Q = data.level * D * D
    rootQ = math.sqrt(Q)
    X = X or required_terms(data, D, t)
    a = _expand(data, X)
    chi = kronecker_table(D, X)
    n = np.arange(1, X + 1, dtype=np.float64)
    coef = (a[1:] * chi[1:]).astype(np.float64)
    return _lambda(coef, n, s, k, rootQ, t, 1.0)


def required_terms(data: NewformData, D: int, t: float = 1.0, cutoff: float = 46.0) -> int:
    """Terms needed so that the incomplete-Gamma weights fall below e^-cutoff."""
    rootQ = math.sqrt(data.level * D * D)
    return int(math.ceil(cutoff * rootQ * max(t, 1 / t) / (2 * math.pi))) + 1


def twisted_L(data: NewformData, D: int, X: int | None = None) -> LValue:
    r"""
    `L(f \otimes \chi_D, k)` at the centre, with an error estimate.

    The estimate is the spread of the smoothed sum over three cutoff
    parameters plus a relative rounding floor.
    """
    check_admissible(data, D)
    k = data.k
    Q = data.level * D * D
    rootQ = math.sqrt(Q)
    ts = (1.0, 1.15, 1 / 1.15)
    need = max(required_terms(data, D, t) for t in ts)
    X = X or need
    if X < need:
        raise DataError(f"depth X = {X} is too small for D = {D}; need X >= {need}")
    if need > data.p_max:
        raise DataError(f"{data.label}: D = {D} needs coefficients up to {need}, data stops at {data.p_max}")
    a = _expand(data, X)
    chi = kronecker_table(D, X)
    n = np.arange(1, X + 1, dtype=np.float64)
    coef = (a[1:] * chi[1:]).astype(np.float64)
    scale = (2 * math.pi / rootQ) ** k / math.gamma(k)
    vals = [_lambda(coef, n, k, k, rootQ, t, 1.0) * scale for t in ts]
    v = vals[0]
    spread = max(abs(x - v) for x in vals)
    err = spread + 1e-12 * max(1.0, abs(v))
    return LValue(v, err, X, Q)


def functional_equation_defect(data: NewformData, D: int, delta: float = 0.1) -> float:
    """``|Lambda(k+delta) - Lambda(k-delta)|`` computed at different cutoffs, relative."""
    k = data.k
    x1 = completed_L(data, D, k + delta, t=1.0)
    x2 = completed_L(data, D, k - delta, t=1.2)
    return abs(x1 - x2) / max(1.0, abs(x1))
