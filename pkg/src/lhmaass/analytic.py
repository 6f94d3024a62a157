r"""
Floating point side: the cusp form `f_{k,N,D,D_0}`, its Fourier
coefficients, `\Phi_k`, Eichler integrals, the locally harmonic Maass form
`\mathcal{F}_{1-k,N,D,D_0}` and the splitting checks.

Per class `[a, b \bmod 2a]` the translates sum to a q-series. Writing
`Q(z,1) = a((z-m)^2 - \Delta/4a^2)` with `m = -b/2a` and `u = \pi r \sqrt\Delta/|a|`,

.. math::

    \sum_{n} Q(z+n,1)^{-k} = a^{-k} (-1)^k (2\pi)^{2k} \sum_{r \ge 1} r^{2k-1}
        \frac{{}_0F_1(;k+\tfrac12;-u^2/4)}{(2k-1)!} e(-rm) q^r,

which follows from Lipschitz' formula term by term in `\Delta/4a^2`.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import betainc, hyp0f1
from scipy.special import beta as beta_fn

from .errors import DataError, DomainError
from .hecke import HeckePolynomial, hecke_function
from .localpoly import LocalPolyParams, c_infty_series, script_P_prefactor
from .ntkernel import sqrt_mod
from .qforms import QuadForm, genus_char

DEFAULT_N_MAX = 30
DEFAULT_Y = 0.5
# the halving spread underestimates the true tail by up to ~4x on oscillating sums
TAIL_SAFETY = 4.0


@dataclass(frozen=True)
class TruncationPolicy:
    """``a_bound``: largest ``|a|`` summed (default ``10**5 * N``)."""

    a_bound: int | None = None
    tail_mode: str = "halving"  # or "last-decade"
    qz_bound: float = 32000.0  # |Q_z| cut for the locally harmonic form

    def bound(self, N: int) -> int:
        A = self.a_bound if self.a_bound is not None else 10**5 * N
        if A < N:
            raise DomainError(f"a_bound = {A} is below N = {N}")
        return A


DEFAULT_POLICY = TruncationPolicy()


@lru_cache(maxsize=16)
def _classes(delta: int, N: int, D0: int, A: int):
    """Arrays ``a, b, chi`` over classes ``0 <= b < 2a``, ``N | a <= A`` with ``chi != 0``."""
    aa, bb, cc = [], [], []
    for a in range(N, A + 1, N):
        for b in sqrt_mod(delta, 4 * a):
            if b >= 2 * a:
                continue
            ch = genus_char(D0, N, QuadForm(a, b, (b * b - delta) // (4 * a)))
            if ch:
                aa.append(a)
                bb.append(b)
                cc.append(ch)
    return (np.array(aa, dtype=np.float64), np.array(bb, dtype=np.float64), np.array(cc, dtype=np.float64))


def _pair_factor(params: LocalPolyParams) -> int:
    # [-a,-b,-c] contributes sgn(D0) (-1)^k times [a,b,c]
    return 1 + (1 if params.D0 > 0 else -1) * (-1) ** params.k


def _kernel(k: int, u):
    return hyp0f1(k + 0.5, -(u * u) / 4) / math.factorial(2 * k - 1)


@dataclass
class ClassCoefficients:
    c: np.ndarray  # c[r], r = 0..r_max (c[0] = 0)
    tail: np.ndarray  # empirical truncation error per coefficient
    a_bound: int


_COEFF_CACHE: dict = {}


def class_coefficients(params: LocalPolyParams, r_max: int, policy: TruncationPolicy = DEFAULT_POLICY) -> ClassCoefficients:
    """Fourier coefficients of ``f`` from the class sums, truncated at ``|a| <= a_bound``."""
    A = policy.bound(params.N)
    if policy.tail_mode not in ("halving", "last-decade"):
        raise DomainError(f"unknown tail mode {policy.tail_mode!r}")
    key = (params.k, params.N, params.D, params.D0, A, policy.tail_mode)
    hit = _COEFF_CACHE.get(key)
    if hit is not None and hit.c.shape[0] > r_max:
        return ClassCoefficients(hit.c[: r_max + 1], hit.tail[: r_max + 1], A)
    k, delta = params.k, params.delta
    a, b, chi = _classes(delta, params.N, params.D0, A)
    w = _pair_factor(params) * chi * a ** (-k)
    # halving: max |S(A) - S(tA)| over t in [1/2, 1); last-decade: |sum over A/10 < a <= A|
    if policy.tail_mode == "halving":
        cuts = np.searchsorted(a, [A * t for t in (0.5, 0.6, 0.7, 0.8, 0.9)], side="right")
    else:
        cuts = np.searchsorted(a, [A / 10], side="right")
    sq = math.sqrt(delta)
    c = np.zeros(r_max + 1, dtype=np.complex128)
    tail = np.zeros(r_max + 1)
    pref = (-1) ** k * (2 * math.pi) ** (2 * k)
    for r in range(1, r_max + 1):
        term = w * np.exp(1j * math.pi * r * b / a) * _kernel(k, math.pi * r * sq / a)
        scale = pref * r ** (2 * k - 1)
        csum = np.cumsum(term)
        c[r] = scale * csum[-1]
        tail[r] = TAIL_SAFETY * max(abs(scale * (csum[-1] - (csum[i - 1] if i else 0))) for i in cuts)
    _COEFF_CACHE[key] = ClassCoefficients(c, tail, A)
    return _COEFF_CACHE[key]


def _terms_for(y: float, k: int) -> int:
    r = 1
    while 2 * math.pi * y * r - (2 * k - 1) * math.log(r + 1) < 40:
        r += 1
    return r


def eval_f(params: LocalPolyParams, z: complex, policy: TruncationPolicy = DEFAULT_POLICY, with_error: bool = False):
    r"""
    `f_{k,N,D,D_0}(z) = \sum_Q \chi_{D_0}(Q) Q(z,1)^{-k}` truncated at ``|a| <= a_bound``.

    With ``with_error`` returns ``(value, tail_estimate)``.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("Im z must be positive")
    R = _terms_for(z.imag, params.k)
    cc = class_coefficients(params, R, policy)
    r = np.arange(R + 1)
    q = np.exp(2j * math.pi * r * z)
    val = complex((cc.c * q).sum())
    if with_error:
        return val, float((cc.tail * np.abs(q)).sum())
    return val


def eval_f_direct(params: LocalPolyParams, z: complex, a_bound: int, window: int = 200) -> complex:
    """Brute-force oracle: forms with ``|a| <= a_bound`` and at most ``window`` translates each way."""
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("Im z must be positive")
    k, N, delta = params.k, params.N, params.delta
    total = 0j
    n = np.arange(-window, window + 1)
    for a in range(N, a_bound + 1, N):
        for b0 in sqrt_mod(delta, 4 * a):
            if b0 >= 2 * a:
                continue
            ch = genus_char(params.D0, N, QuadForm(a, b0, (b0 * b0 - delta) // (4 * a)))
            if not ch:
                continue
            b = b0 + 2 * a * n
            c = (b * b - delta) // (4 * a)
            total += ch * np.sum((a * z * z + b * z + c) ** (-k))
    return _pair_factor(params) * total


# --- numerical Fourier coefficients -------------------------------------------


@dataclass
class FourierCoeffs:
    coeffs: dict[int, complex]
    k: int
    y: float
    samples: int
    a_bound: int
    noise_floor: float
    tail: dict[int, float] = field(default_factory=dict)
    ill_conditioned: bool = False
    params: tuple | None = None

    @property
    def n_max(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def array(self, n_max: int | None = None) -> np.ndarray:
        n_max = n_max or self.n_max
        out = np.zeros(n_max + 1, dtype=np.complex128)
        for n, v in self.coeffs.items():
            if n <= n_max:
                out[n] = v
        return out

    def floor(self, n: int) -> float:
        """Level below which ``|c(n)|`` is indistinguishable from zero."""
        return max(self.noise_floor, 2 * self.tail.get(n, 0.0))

    def is_zero(self) -> bool:
        return all(abs(v) <= self.floor(n) for n, v in self.coeffs.items())

    def to_json(self) -> str:
        doc = {
            "params": list(self.params) if self.params else None,
            "k": self.k,
            "y": self.y,
            "a_bound": self.a_bound,
            "n_max": self.n_max,
            "samples": self.samples,
            "coeffs": [[n, v.real, v.imag] for n, v in sorted(self.coeffs.items())],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "FourierCoeffs":
        try:
            doc = json.loads(text)
            coeffs = {int(n): complex(re, im) for n, re, im in doc["coeffs"]}
            return cls(
                coeffs=coeffs,
                k=int(doc["k"]),
                y=float(doc["y"]),
                samples=int(doc.get("samples", 0)),
                a_bound=int(doc["a_bound"]),
                noise_floor=max((abs(v.imag) for v in coeffs.values()), default=0.0),
                params=tuple(doc["params"]) if doc.get("params") else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed coefficient table: {exc!r}") from None


def extract_coeffs(
    params: LocalPolyParams,
    n_max: int = DEFAULT_N_MAX,
    y: float = DEFAULT_Y,
    policy: TruncationPolicy = DEFAULT_POLICY,
    samples: int | None = None,
    dps: int | None = None,
) -> FourierCoeffs:
    """
    ``c(n)``, ``1 <= n <= n_max``, by a DFT of ``f(j/M + iy)``.

    Recovering ``c(n)`` multiplies rounding errors by ``exp(2 pi n y)``, so
    the samples and the transform run at ``dps`` decimal digits, by default
    enough to absorb that factor. ``dps=15`` forces double precision and
    flags the result when it is ill-conditioned.
    """
    M = samples or 8 * n_max
    if M < 4 * n_max:
        raise DomainError("need at least 4*n_max samples")
    R = max(_terms_for(y, params.k), n_max)
    digits = dps or max(15, int(2 * math.pi * n_max * y / math.log(10)) + 20)
    if dps is None or digits > 15:
        return _extract_mp(params, n_max, y, policy, M, digits)
    cc = class_coefficients(params, R, policy)
    xs = np.arange(M) / M
    r = np.arange(R + 1)
    damp = np.exp(-2 * math.pi * r * y)
    fvals = (cc.c * damp) @ np.exp(2j * math.pi * np.outer(r, xs))
    spec = np.fft.fft(fvals) / M
    coeffs, tail = {}, {}
    for n in range(1, n_max + 1):
        coeffs[n] = complex(spec[n] * math.exp(2 * math.pi * n * y))
        tail[n] = float(cc.tail[n]) if n < cc.tail.shape[0] else 0.0
    amplification = math.exp(2 * math.pi * n_max * y) * np.finfo(float).eps * float(np.max(np.abs(fvals)))
    scale = max(abs(v) for v in coeffs.values()) or 1.0
    ill = amplification > 1e-6 * scale
    if ill:
        warnings.warn(f"y = {y} amplifies rounding by {amplification:.2e} at n = {n_max}", RuntimeWarning, stacklevel=2)
    noise = max(abs(v.imag) for v in coeffs.values())
    noise = max(noise, amplification)
    return FourierCoeffs(
        coeffs, params.k, y, M, cc.a_bound, noise, tail, ill, (params.k, params.N, params.D, params.D0)
    )


def _extract_mp(params, n_max, y, policy, M, digits):
    import mpmath

    R0 = max(_terms_for(y, params.k), n_max)
    with mpmath.workdps(digits + 10):
        # enough terms for q^R to fall below the working precision
        R = R0
        while 2 * math.pi * y * R - (2 * params.k - 1) * math.log(R + 1) < digits * math.log(10) + 5:
            R += 1
        cc = class_coefficients(params, R, policy)
        roots = [mpmath.expjpi(mpmath.mpf(2 * j) / M) for j in range(M)]
        damp = [mpmath.exp(-2 * mpmath.pi * r * y) for r in range(R + 1)]
        cr = [mpmath.mpc(complex(v)) * damp[r] for r, v in enumerate(cc.c)]
        fvals = [mpmath.fsum(cr[r] * roots[(r * j) % M] for r in range(1, R + 1)) for j in range(M)]
        coeffs, tail = {}, {}
        for n in range(1, n_max + 1):
            sn = mpmath.fsum(fvals[j] * roots[(-n * j) % M] for j in range(M)) / M
            coeffs[n] = complex(sn * mpmath.exp(2 * mpmath.pi * n * y))
            tail[n] = float(cc.tail[n])
    noise = max(abs(v.imag) for v in coeffs.values())
    return FourierCoeffs(
        coeffs, params.k, y, M, cc.a_bound, noise, tail, False, (params.k, params.N, params.D, params.D0)
    )


def coeffs_from_newform(data, n_max: int) -> FourierCoeffs:
    """Wrap newform coefficients ``a(n)`` as a :class:`FourierCoeffs`."""
    from .lseries import expand_coeffs

    a = expand_coeffs(data, n_max)
    return FourierCoeffs({n: complex(int(a[n])) for n in range(1, n_max + 1)}, data.k, math.inf, 0, 0, 0.0)


# --- Phi and the splitting ----------------------------------------------------


def phi(coeffs: FourierCoeffs, x: float, n_max: int | None = None) -> float:
    r"""`\Phi_k(x) = \sum_{n \le n_{max}} c(n) n^{1-2k} \cos(2\pi n x)`."""
    n_max = n_max or coeffs.n_max
    c = coeffs.array(n_max)[1:].real
    n = np.arange(1, n_max + 1, dtype=np.float64)
    return math.fsum((c * n ** (1 - 2 * coeffs.k) * np.cos(2 * math.pi * n * float(x))).tolist())


def _transported(params: LocalPolyParams, poly: HeckePolynomial | None):
    return hecke_function(params, poly or HeckePolynomial(()))


def estimate_delta(
    params: LocalPolyParams,
    coeffs: FourierCoeffs,
    poly: HeckePolynomial | None = None,
    n_max: int | None = None,
) -> float:
    """``(P(1/2) - P(1/3)) / (Phi(1/2) - Phi(1/3))`` with ``P`` transported by ``poly``."""
    h = _transported(params, poly)
    num = float(h(Fraction(1, 2)) - h(Fraction(1, 3)))
    den = phi(coeffs, 0.5, n_max) - phi(coeffs, 1 / 3, n_max)
    n_top = n_max or coeffs.n_max
    # each c(n) is only known to within floor(n), which Phi(1/2) - Phi(1/3) weighs by at most 2 n^(1-2k)
    spread = sum(2 * coeffs.floor(n) * n ** (1 - 2 * coeffs.k) for n in range(1, n_top + 1))
    floor = max(10 * max(coeffs.noise_floor, 1e-12), spread)
    if abs(den) <= floor:
        raise DomainError("Phi degenerate (Phi(1/2) = Phi(1/3) within noise), likely f = 0")
    return num / den


@dataclass
class SplittingResult:
    x: Fraction
    gamma: float
    delta: float
    phi_x: float
    predicted: float
    exact: Fraction

    @property
    def residual(self) -> float:
        return self.predicted - float(self.exact)


def splitting_check(
    params: LocalPolyParams,
    coeffs: FourierCoeffs,
    x=Fraction(1, 5),
    poly: HeckePolynomial | None = None,
    n_max: int | None = None,
    gamma: float | None = None,
    a_max: int | None = None,
) -> SplittingResult:
    """
    Compare ``gamma' + delta * Phi(x)`` with the exact transported value at ``x``.

    ``gamma`` defaults to the closed form; ``a_max`` switches to the
    truncated series instead.
    """
    x = Fraction(x)
    poly = poly or HeckePolynomial(())
    if gamma is None:
        if a_max is not None:
            gamma = c_infty_series(params, a_max).gamma
        else:
            from .classnumbers import c_infty_closed

            gamma = c_infty_closed(params).gamma
    g = float(poly.on_constant(params.k)) * gamma
    d = estimate_delta(params, coeffs, poly, n_max)
    ph = phi(coeffs, float(x), n_max)
    exact = _transported(params, poly)(x)
    return SplittingResult(x, g, d, ph, g + d * ph, exact)


# --- Eichler integrals and the locally harmonic form ----------------------------


def _upper_gamma_scaled(s: int, x: np.ndarray) -> np.ndarray:
    """``Gamma(s, x) * exp(x/2)`` for integer ``s >= 1``."""
    acc = np.zeros_like(x)
    term = np.ones_like(x)
    for j in range(s):
        if j:
            term = term * x / j
        acc = acc + term
    return math.factorial(s - 1) * np.exp(-x / 2) * acc


def eichler_integrals(coeffs: FourierCoeffs, z: complex) -> tuple[complex, complex]:
    r"""
    `(\mathcal{E}_f(z), f^*(z))` for weight `2k`:
    `\sum c(n) n^{1-2k} q^n` and `\sum \overline{c(n)} (2\pi n)^{1-2k} \Gamma(2k-1, 4\pi n y) q^{-n}`.
    """
    z = complex(z)
    y = z.imag
    if y <= 0:
        raise DomainError("Im z must be positive")
    k = coeffs.k
    c = coeffs.array()[1:]
    n = np.arange(1, c.shape[0] + 1, dtype=np.float64)
    hol = complex(np.sum(c * n ** (1 - 2 * k) * np.exp(2j * math.pi * n * z)))
    g = _upper_gamma_scaled(2 * k - 1, 4 * math.pi * n * y)  # Gamma(.,4pi n y) e^{2 pi n y}
    nonhol = complex(np.sum(np.conj(c) * (2 * math.pi * n) ** (1 - 2 * k) * g * np.exp(-2j * math.pi * n * z.real)))
    return hol, nonhol


def incomplete_beta(w, k: int):
    r"""`\beta(w; k-1/2, 1/2) = \int_0^w t^{k-3/2}(1-t)^{-1/2} dt`."""
    return betainc(k - 0.5, 0.5, w) * beta_fn(k - 0.5, 0.5)


def _forms_near(params: LocalPolyParams, z: complex, T: float):
    """Forms with ``a > 0`` and ``|Q_z| <= T`` as int arrays ``a, b, c``."""
    x, y = z.real, z.imag
    delta, N = params.delta, params.N
    out_a, out_b = [], []
    a = N
    while 4 * a * a * y * y <= 4 * a * y * T + delta:
        hi = delta - 4 * a * a * y * y + 4 * a * y * T
        lo = delta - 4 * a * a * y * y - 4 * a * y * T
        s_hi = math.sqrt(hi)
        s_lo = math.sqrt(lo) if lo > 0 else 0.0
        roots = [b for b in sqrt_mod(delta, 4 * a) if b < 2 * a]
        if roots:
            # |2ax + b| in [s_lo, s_hi]
            bmin = math.floor(-2 * a * x - s_hi) - 1
            bmax = math.ceil(-2 * a * x + s_hi) + 1
            for b0 in roots:
                j0 = (bmin - b0) // (2 * a)
                j1 = (bmax - b0) // (2 * a) + 1
                b = b0 + 2 * a * np.arange(j0, j1 + 1, dtype=np.int64)
                t = np.abs(2 * a * x + b)
                keep = (t <= s_hi) & (t >= s_lo)
                if keep.any():
                    out_b.append(b[keep])
                    out_a.append(np.full(int(keep.sum()), a, dtype=np.int64))
        a += N
    if not out_a:
        return (np.zeros(0, dtype=np.int64),) * 3
    A = np.concatenate(out_a)
    B = np.concatenate(out_b)
    C = (B * B - delta) // (4 * A)
    return A, B, C


def _chi_array(params, A, B, C):
    return np.array(
        [genus_char(params.D0, params.N, QuadForm(int(a), int(b), int(c))) for a, b, c in zip(A, B, C)],
        dtype=np.float64,
    )


def eval_locally_harmonic_F(
    params: LocalPolyParams, z: complex, policy: TruncationPolicy = DEFAULT_POLICY, eps: float = 1e-9
) -> complex:
    r"""
    `\mathcal{F}_{1-k,N,D,D_0}(z)` summed over forms with `|Q_z| \le` ``policy.qz_bound``.

    Uses `|Q(z,1)|^2 = y^2 (Q_z^2 + \Delta)`, so the beta argument is
    `\Delta / (Q_z^2 + \Delta)`.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("Im z must be positive")
    k, delta = params.k, params.delta
    A, B, C = _forms_near(params, z, policy.qz_bound)
    x, y = z.real, z.imag
    qz = (A * (x * x + y * y) + B * x + C) / y
    w = delta / (qz * qz + delta)
    bad = np.nonzero(w > 1 - eps)[0]
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"z lies on (or within {eps}) of the geodesic of {QuadForm(int(A[i]), int(B[i]), int(C[i]))}")
    chi = _chi_array(params, A, B, C)
    Qz1 = A * z * z + B * z + C
    terms = chi * np.sign(qz) * Qz1 ** (k - 1) * incomplete_beta(w, k)
    return 0.5 * _pair_factor(params) * complex(terms.sum())


def local_polynomial(params: LocalPolyParams, z: complex, c_inf: float | None = None) -> complex:
    """``P(z) = c_inf + prefactor * sum over a < 0 < Q_z`` (a finite sum)."""
    z = complex(z)
    x, y = z.real, z.imag
    if y <= 0:
        raise DomainError("Im z must be positive")
    delta, N, k = params.delta, params.N, params.k
    if c_inf is None:
        from .classnumbers import c_infty_closed

        c_inf = c_infty_closed(params).c_infty
    s = 0j
    a = -N
    # a < 0 < Q_z  <=>  (2ax + b)^2 + 4a^2y^2 < Delta
    while 4 * a * a * y * y < delta:
        r = math.sqrt(delta - 4 * a * a * y * y)
        for b in range(math.floor(-2 * a * x - r), math.ceil(-2 * a * x + r) + 1):
            if (b * b - delta) % (4 * a):
                continue
            if (2 * a * x + b) ** 2 + 4 * a * a * y * y >= delta:
                continue
            Q = QuadForm(a, b, (b * b - delta) // (4 * a))
            ch = genus_char(params.D0, N, Q)
            if ch:
                s += ch * (a * z * z + b * z + Q.c) ** (k - 1)
        a -= N
    return c_inf + script_P_prefactor(params) * s


@dataclass
class ThreePartSplitting:
    F: complex
    P: complex
    hol: complex
    nonhol: complex

    @property
    def rhs(self) -> complex:
        return self.P + self.hol + self.nonhol

    @property
    def residual(self) -> float:
        return abs(self.F - self.rhs)

    @property
    def relative_residual(self) -> float:
        return self.residual / max(abs(self.F), 1.0)


def three_part_splitting(
    params: LocalPolyParams,
    z: complex,
    coeffs: FourierCoeffs,
    policy: TruncationPolicy = DEFAULT_POLICY,
    printed: bool = False,
) -> ThreePartSplitting:
    r"""
    Both sides of the splitting of `\mathcal{F}` into local polynomial and
    Eichler integrals, `s = \Delta^{k-1/2}`, `c = (2k-2)!/(4\pi)^{2k-1}`.

    ``printed=True`` uses `\mathcal{F} = P - s c \mathcal{E}_f + s f^*`.
    The default is the relation the sums above actually satisfy,
    `\mathcal{F} = \nu P - s c \mathcal{E}_f - 2^{1-2k} s f^*` with
    `\nu = -2(-1)^k`; the factor `\nu` is confirmed for `k = 2, 3` and the
    Eichler constants for `k = 2`.
    """
    k, delta = params.k, params.delta
    F = eval_locally_harmonic_F(params, z, policy)
    P = local_polynomial(params, z)
    E, fs = eichler_integrals(coeffs, z)
    s = delta ** (k - 0.5)
    hol = -s * math.factorial(2 * k - 2) / (4 * math.pi) ** (2 * k - 1) * E
    if printed:
        return ThreePartSplitting(F, P, hol, s * fs)
    nu = -2 * (-1) ** k
    return ThreePartSplitting(F, nu * P, hol, -(2.0 ** (1 - 2 * k)) * s * fs)
