r"""
Hecke operators of weight `2-2k` on translation invariant functions of a
rational argument, polynomials in them, and the constancy test for the
vanishing of twisted central L-values.

.. math::

    (T_p h)(x) = p^{1-2k} h(px) + \frac{1}{p} \sum_{b \bmod p} h\Big(\frac{x+b}{p}\Big).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DomainError
from .localpoly import LocalPolyParams, default_samples, eval_script_P
from .ntkernel import is_prime

RatFunc = Callable[[Fraction], Fraction]


@dataclass(frozen=True)
class HeckeFactor:
    """``sum_i coeffs[i] * T_p^i``; a linear factor ``T_p - lam`` has coeffs ``(-lam, 1)``."""

    p: int
    coeffs: tuple[Fraction, ...]

    @classmethod
    def linear(cls, p: int, lam) -> "HeckeFactor":
        return cls(p, (-Fraction(lam), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def on_constant(self, k: int) -> Fraction:
        """Scalar by which the factor acts on constant functions."""
        t = Fraction(1, self.p ** (2 * k - 1)) + 1
        return sum((c * t**i for i, c in enumerate(self.coeffs)), Fraction(0))

    def describe(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*T{self.p}^{i}" if i else f"{c}")
        return " + ".join(reversed(terms))


@dataclass(frozen=True)
class HeckePolynomial:
    """Ordered product of :class:`HeckeFactor` (the factors commute)."""

    factors: tuple[HeckeFactor, ...] = field(default_factory=tuple)
    name: str = "custom"

    def validate(self, N: int) -> None:
        for f in self.factors:
            if not is_prime(f.p):
                raise DomainError(f"{f.p} is not prime")
            if N % f.p == 0:
                raise DomainError(f"T_{f.p} with {f.p} | N = {N}")

    def on_constant(self, k: int) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f.on_constant(k)
        return out

    def fan_out(self) -> int:
        """Upper bound on base evaluations per point: prod (p+1)^deg."""
        n = 1
        for f in self.factors:
            n *= (f.p + 1) ** f.degree
        return n

    def permuted(self, order: Sequence[int]) -> "HeckePolynomial":
        return HeckePolynomial(tuple(self.factors[i] for i in order), self.name)


def _memo(fn: RatFunc) -> RatFunc:
    cache: dict[Fraction, Fraction] = {}

    def g(x):
        x = Fraction(x) % 1
        v = cache.get(x)
        if v is None:
            v = cache[x] = fn(x)
        return v

    g.cache = cache
    return g


def apply_Tp(h: RatFunc, p: int, k: int) -> RatFunc:
    """``T_p h`` in weight ``2 - 2k``; ``h`` must be translation invariant."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    w = Fraction(1, p ** (2 * k - 1))

    def th(x):
        x = Fraction(x)
        s = sum((h((x + b) / p) for b in range(p)), Fraction(0))
        return w * h(p * x) + s / p

    return _memo(th)


def _apply_factor(h: RatFunc, f: HeckeFactor, k: int) -> RatFunc:
    powers = [h]
    for _ in range(f.degree):
        powers.append(apply_Tp(powers[-1], f.p, k))
    coeffs = f.coeffs

    def g(x):
        return sum((c * hp(x) for c, hp in zip(coeffs, powers) if c), Fraction(0))

    return _memo(g)


def apply_polynomial(h: RatFunc, poly: HeckePolynomial, k: int) -> RatFunc:
    """Apply the factors right to left (the rightmost acts first)."""
    g = _memo(h)
    for f in reversed(poly.factors):
        g = _apply_factor(g, f, k)
    return g


def leaf_arguments(poly: HeckePolynomial, x) -> set[Fraction]:
    """Distinct reduced arguments at which the base function is evaluated."""
    pts = {Fraction(x) % 1}
    for f in poly.factors:
        for _ in range(f.degree):
            new = set()
            for y in pts:
                new.add((f.p * y) % 1)
                new.update(((y + b) / f.p) % 1 for b in range(f.p))
            pts |= new
    return pts


PRESETS: dict[str, HeckePolynomial] = {
    "level7-trivial": HeckePolynomial((), "level7-trivial"),
    "level15-paper": HeckePolynomial(
        (
            HeckeFactor.linear(11, Fraction(32, 11**3)),
            HeckeFactor.linear(7, Fraction(-24, 7**3)),
        ),
        "level15-paper",
    ),
    # (T13 - (40 + 20 sqrt 3)/13^3)(T13 - (40 - 20 sqrt 3)/13^3) expanded over Q
    "level22-paper": HeckePolynomial(
        (
            HeckeFactor(13, (Fraction(400, 13**6), Fraction(-80, 13**3), Fraction(1))),
            HeckeFactor.linear(3, Fraction(-7, 3**3)),
            HeckeFactor.linear(5, Fraction(-3, 5**3)),
        ),
        "level22-paper",
    ),
}

PRESET_FOR_LEVEL = {7: "level7-trivial", 15: "level15-paper", 22: "level22-paper"}


def get_preset(name: str) -> HeckePolynomial:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown Hecke preset {name!r}; choose from {sorted(PRESETS)}") from None


def parse_polynomial(spec: str) -> HeckePolynomial:
    """
    Parse a custom polynomial.

    ``"11:32/1331,7:-24/343"`` gives linear factors ``(T_p - lam)``;
    ``"13=400/4826809,-80/2197,1"`` is a polynomial in one ``T_p`` with
    coefficients listed from the constant term up. Factors are separated by
    ``;`` or ``,`` for the linear form.
    """
    spec = spec.strip()
    if not spec:
        return HeckePolynomial(())
    factors = []
    try:
        for part in spec.split(";"):
            part = part.strip()
            if "=" in part:
                p, cs = part.split("=", 1)
                coeffs = tuple(Fraction(c.strip()) for c in cs.split(","))
                factors.append(HeckeFactor(int(p), coeffs))
            else:
                for item in part.split(","):
                    p, lam = item.split(":")
                    factors.append(HeckeFactor.linear(int(p), Fraction(lam.strip())))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse Hecke polynomial {spec!r}: {exc}") from None
    return HeckePolynomial(tuple(factors))


@dataclass
class VanishingResult:
    verdict: str  # "vanishing" or "non-vanishing"
    values: dict[Fraction, Fraction]

    @property
    def vanishing(self) -> bool:
        return self.verdict == "vanishing"

    @property
    def common_value(self) -> Fraction | None:
        return next(iter(self.values.values())) if self.vanishing else None


def hecke_function(params: LocalPolyParams, poly: HeckePolynomial) -> RatFunc:
    poly.validate(params.N)
    return apply_polynomial(lambda x: eval_script_P(params, x), poly, params.k)


def detect_vanishing(
    params: LocalPolyParams,
    poly: HeckePolynomial,
    samples: Sequence | None = None,
) -> VanishingResult:
    """
    Exact constancy test: "vanishing" iff the transported sum takes one value
    at every sample.
    """
    samples = [Fraction(s) for s in (samples or default_samples(params))]
    if len(samples) < 2 * params.k - 1:
        raise DomainError(f"need at least {2 * params.k - 1} samples")
    if len({s % 1 for s in samples}) != len(samples):
        raise DomainError("samples must be pairwise inequivalent mod 1")
    h = hecke_function(params, poly)
    values = {s: h(s) for s in samples}
    verdict = "vanishing" if len(set(values.values())) == 1 else "non-vanishing"
    return VanishingResult(verdict, values)
