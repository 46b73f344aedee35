"""Special functions needed by the wave kernels.

Everything here works in complex double precision. Series are summed
term by term with a relative tail criterion; the result carries an error
estimate so callers can compare two evaluation routes honestly.

Functions
---------
pochhammer, ln_gamma
    Rising factorial and principal-branch log-gamma.
gauss_2f1, gauss_quadratic_transform
    Gauss hypergeometric function and its quadratic-argument rewrite.
kummer_1f1
    Confluent hypergeometric function of one variable.
chebyshev_t, bessel_j0
    Chebyshev polynomials of the first kind and the order-zero Bessel function.
phi1
    Two-variable confluent (Humbert) function, by double series or by its
    Euler-type integral representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sps
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError, PoleError

SERIES_TOL = 1e-16
TAIL_SAFETY = 10.0
MAX_TERMS = 100_000
KUMMER_ARG_CAP = 500.0
KUMMER_INTEGRAL_FROM = 8.0
EPS = np.finfo(float).eps

_METHODS = ("series", "integral", "transform")


@dataclass(frozen=True)
class HypergeometricResult:
    """Value of a hypergeometric evaluation together with its error budget.

    ``est_error`` is the estimated absolute truncation error plus a
    floating-point cancellation allowance, never a rigorous bound.
    """

    value: complex
    est_error: float
    terms_used: int
    method: str

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.est_error >= 0:
            raise ValueError("est_error must be nonnegative")


@dataclass(frozen=True)
class Phi1Params:
    """Arguments ``(a, b; c; x, y)`` of the Humbert function Phi_1."""

    a: complex
    b: complex
    c: complex
    x: complex
    y: complex

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise PoleError(f"c = {self.c} is a non-positive integer")


def _is_nonpositive_integer(v, atol=0.0) -> bool:
    v = complex(v)
    if v.imag != 0:
        return False
    r = v.real
    return r <= 0 and abs(r - round(r)) <= atol


def _is_real(v) -> bool:
    return complex(v).imag == 0


# ---------------------------------------------------------------------------
# Elementary pieces
# ---------------------------------------------------------------------------

def pochhammer(a, n: int):
    """Rising factorial ``a (a+1) ... (a+n-1)``; equals 1 for ``n == 0``."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    out = 1
    for j in range(int(n)):
        out *= a + j
    return out


def ln_gamma(z) -> complex:
    """Principal branch of log Gamma(z)."""
    if _is_nonpositive_integer(z):
        raise PoleError(f"log-gamma has a pole at z = {z}")
    return complex(sps.loggamma(complex(z)))


def chebyshev_t(n: int, x: float) -> float:
    """Chebyshev polynomial T_n(x) from the three-term recurrence.

    The recurrence is used for every real ``x``: outside [-1, 1] it is
    still the polynomial, so no hyperbolic shortcut is taken.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    if n == 0:
        return 1.0
    t_prev, t_cur = 1.0, float(x)
    for _ in range(n - 1):
        t_prev, t_cur = t_cur, 2.0 * x * t_cur - t_prev
    return t_cur


# ---------------------------------------------------------------------------
# Single-variable series
# ---------------------------------------------------------------------------

def _sum_series(ratio, max_terms=MAX_TERMS, tol=SERIES_TOL):
    """Sum ``1 + t_1 + t_2 + ...`` where ``t_{n+1} = t_n * ratio(n)``.

    Stops once three consecutive terms each fall below ``tol * |partial sum|``.
    Returns ``(sum, est_error, terms_used)``.
    """
    total = 1.0 + 0j
    term = 1.0 + 0j
    abs_total = 1.0
    small_run = 0
    n = 0
    prev_abs = 1.0
    while True:
        term = term * ratio(n)
        n += 1
        a_term = abs(term)
        if a_term <= tol * abs(total):
            small_run += 1
            if small_run == 3:
                # term n is the first one left out
                r = a_term / prev_abs if prev_abs > 0 else 0.0
                factor = TAIL_SAFETY if r < 0.9 else max(TAIL_SAFETY, 1.0 / max(1.0 - r, 1e-6))
                est = factor * a_term + 2.0 * EPS * abs_total
                return total, est, n
        else:
            small_run = 0
        total += term
        abs_total += a_term
        prev_abs = a_term if a_term > 0 else prev_abs
        if n >= max_terms:
            raise ConvergenceError(f"series did not converge within {max_terms} terms")


def _series_2f1(a, b, c, z):
    def ratio(n):
        return (a + n) * (b + n) / ((c + n) * (n + 1)) * z

    return _sum_series(ratio)


def _exact_terminating_2f1(a, b, c, z):
    """Sum a terminating real series in exact rational arithmetic.

    Polynomial 2F1 values can sit far below the size of individual terms
    (about T_n(1 + 2|z|) for the Chebyshev case), so the floating sum
    loses digits that exact summation keeps.
    """
    fa, fb, fc, fz = (Fraction(float(v.real)) for v in (a, b, c, z))
    term = Fraction(1)
    total = Fraction(1)
    n = 0
    while term != 0:
        term = term * (fa + n) * (fb + n) / ((fc + n) * (n + 1)) * fz
        total += term
        n += 1
    return complex(float(total)), n


def _gamma_ratio(num, den) -> complex:
    """prod Gamma(num) / prod Gamma(den); a pole in ``den`` gives 0."""
    out = 1.0 + 0j
    for v in num:
        out *= sps.gamma(v.real) if _is_real(v) else complex(sps.gamma(complex(v)))
    for v in den:
        out *= sps.rgamma(v.real) if _is_real(v) else complex(sps.rgamma(complex(v)))
    return out


def _near_integer(v, tol: float = 1e-4) -> bool:
    """Within ``tol`` of an integer: the connection formula then cancels badly."""
    v = complex(v)
    return abs(v.imag) < tol and abs(v.real - round(v.real)) < tol


def _connection_2f1(a, b, c, z, one_minus_z=None):
    """``z -> 1 - z`` connection formula; needs ``c - a - b`` non-integral.

    ``one_minus_z`` may be supplied when it is known more accurately than
    the rounded difference.
    """
    if one_minus_z is not None:
        z = 1 - one_minus_z
    else:
        one_minus_z = 1 - z
    s = c - a - b
    A = _gamma_ratio((c, s), (c - a, c - b))
    B = _gamma_ratio((c, -s), (a, b))
    f1, e1, n1 = _series_2f1(a, b, 1 - s, one_minus_z)
    f2, e2, n2 = _series_2f1(c - a, c - b, 1 + s, one_minus_z)
    pw = one_minus_z ** s
    val = A * f1 + B * pw * f2
    err = abs(A) * e1 + abs(B * pw) * e2 + 4 * EPS * (abs(A * f1) + abs(B * pw * f2))
    return val, err, n1 + n2


def _finish_2f1(val, err, n, params):
    # real parameters with z < 1 give a real value; drop rounding residue
    if all(_is_real(v) for v in params) and params[3].real < 1:
        val = complex(val.real)
    return HypergeometricResult(val, err, n, "transform")


def gauss_2f1(a, b, c, z) -> HypergeometricResult:
    """Gauss hypergeometric function 2F1(a, b; c; z).

    Four routes are available and the one with the smallest series
    argument is taken: the direct series, the Pfaff transformation
    ``z -> z/(z-1)`` (maps the negative real axis into [0, 1)), the
    ``z -> 1 - z`` connection formula, and Pfaff followed by connection
    (argument ``1/(1-z)``, for large negative ``z``). Terminating series
    (non-positive integer ``a`` or ``b``) are valid for every ``z``.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_integer(c):
        raise PoleError(f"c = {c} is a non-positive integer")
    if z == 0:
        return HypergeometricResult(1.0 + 0j, 0.0, 1, "series")
    terminating = _is_nonpositive_integer(a) or _is_nonpositive_integer(b)
    if terminating:
        if all(_is_real(v) for v in (a, b, c, z)):
            val, n = _exact_terminating_2f1(a, b, c, z)
            return HypergeometricResult(val, 2 * EPS * abs(val), n, "series")
        s, err, n = _series_2f1(a, b, c, z)
        return HypergeometricResult(s, err, n, "series")

    if z == 1:
        raise DomainError("2F1 evaluated on the branch point z = 1")
    w = z / (z - 1)
    routes = []
    if abs(z) < 1:
        routes.append((abs(z), "direct"))
    if abs(w) < 1:
        routes.append((abs(w), "pfaff"))
    if not _near_integer(c - a - b) and abs(1 - z) < 1:
        routes.append((abs(1 - z), "connection"))
    if not _near_integer(b - a) and abs(1 / (1 - z)) < 1:
        routes.append((abs(1 / (1 - z)), "pfaff_connection"))
    if not routes:
        raise DomainError(f"2F1 argument z = {z} outside the supported region")
    # prefer the plain series unless another route is clearly faster
    best = min(routes, key=lambda r: r[0] + (0.0 if r[1] == "direct" else 0.05))[1]

    if best == "direct":
        s, err, n = _series_2f1(a, b, c, z)
        return HypergeometricResult(s, err, n, "series")
    if best == "connection":
        val, err, n = _connection_2f1(a, b, c, z)
        return _finish_2f1(val, err, n, (a, b, c, z))
    pref = (1 - z) ** (-a)
    if best == "pfaff_connection":
        val, err, n = _connection_2f1(a, c - b, c, w, one_minus_z=1 / (1 - z))
        return _finish_2f1(pref * val, abs(pref) * err, n, (a, b, c, z))
    # keep the prefactor on whichever upper parameter stays put
    if _is_nonpositive_integer(c - a):
        s, err, n = _series_2f1(c - a, b, c, w)
        pref = (1 - z) ** (-b)
    else:
        s, err, n = _series_2f1(a, c - b, c, w)
    return HypergeometricResult(pref * s, abs(pref) * err, n, "transform")


def gauss_quadratic_transform(a, b, z) -> complex:
    """Right-hand side ``F(2a, 2b; a+b+1/2; (1 - sqrt(1-z))/2)``.

    Equal to ``F(a, b; a+b+1/2; z)`` on the common domain; for real
    ``z < 1`` the two routes are independent evaluations of one value.
    """
    c = complex(a) + complex(b) + 0.5
    arg = (1 - cmath.sqrt(1 - complex(z))) / 2
    return gauss_2f1(2 * complex(a), 2 * complex(b), c, arg).value


def kummer_1f1(a, c, x) -> HypergeometricResult:
    """Confluent hypergeometric function 1F1(a; c; x).

    For ``Re x < 0`` Kummer's transformation is applied first so the
    summed series has no sign alternation. Beyond ``|x| = 8`` with real
    ``c > a > 0`` the Euler integral is used instead of the series.
    """
    a, c, x = complex(a), complex(c), complex(x)
    if _is_nonpositive_integer(c):
        raise PoleError(f"c = {c} is a non-positive integer")
    if abs(x) > KUMMER_ARG_CAP:
        raise DomainError(f"|x| = {abs(x):.3g} exceeds the 1F1 cap {KUMMER_ARG_CAP}")
    if x == 0:
        return HypergeometricResult(1.0 + 0j, 0.0, 1, "series")
    if abs(x) > KUMMER_INTEGRAL_FROM and _is_real(a) and _is_real(c) and c.real > a.real > 0:
        # large |x|: the series cancels badly, the Euler integral does not
        return _phi1_integral(Phi1Params(a, 0, c, x, 0))
    if x.real < 0 and not _is_nonpositive_integer(a):
        aa, xx = c - a, -x
        pref = cmath.exp(x)
        method = "transform"
    else:
        aa, xx, pref, method = a, x, 1.0, "series"

    def ratio(n):
        return (aa + n) / ((c + n) * (n + 1)) * xx

    s, err, n = _sum_series(ratio)
    return HypergeometricResult(pref * s, abs(pref) * err, n, method)


_J0_TRAPEZOID_CUTOFF = 40.0


def bessel_j0(x: float) -> float:
    """Bessel function J_0 of a real argument.

    Up to |x| = 40 the periodic integral (1/2pi) int cos(x sin th) dth is
    summed with the trapezoid rule, which is exact up to terms of size
    J_N(x) for N nodes; beyond that Hankel's asymptotic expansion is used.
    """
    x = abs(float(x))
    if x <= _J0_TRAPEZOID_CUTOFF:
        n = 2 * int(x) + 48
        th = np.arange(n) * (2 * math.pi / n)
        return float(np.cos(x * np.sin(th)).mean())
    # Hankel: b_k = prod_{j<=k} (2j-1)^2 / (k! 8^k); signs cycle +P, -Q, -P, +Q
    p_sum, q_sum = 0.0, 0.0
    term = 1.0
    k = 0
    while True:
        contrib = term / x**k
        if k % 4 == 0:
            p_sum += contrib
        elif k % 4 == 1:
            q_sum -= contrib
        elif k % 4 == 2:
            p_sum -= contrib
        else:
            q_sum += contrib
        nxt = term * (2 * k + 1) ** 2 / ((k + 1) * 8.0)
        if abs(nxt / x ** (k + 1)) > abs(contrib) or abs(contrib) < 1e-17:
            break
        term = nxt
        k += 1
    chi = x - math.pi / 4
    return math.sqrt(2.0 / (math.pi * x)) * (p_sum * math.cos(chi) - q_sum * math.sin(chi))


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, alpha: float, beta: float):
    """Nodes and weights for the weight (1-s)^alpha (1+s)^beta on [-1, 1].

    Golub-Welsch on the Jacobi matrix; noticeably more accurate than
    ``scipy.special.roots_jacobi`` for large ``n`` with ``beta`` near -1.
    """
    if not (alpha > -1 and beta > -1):
        raise DomainError("Jacobi exponents must exceed -1")
    ab = alpha + beta
    k = np.arange(n, dtype=float)
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2)
    kk = k[1:]
    diag[1:] = (beta**2 - alpha**2) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        kk = k[2:]
        off[1:] = (4 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
                   / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1)))
        off = np.sqrt(off)
    nodes, vecs = eigh_tridiagonal(diag, off)
    mu0 = math.exp((ab + 1) * math.log(2) + math.lgamma(alpha + 1)
                   + math.lgamma(beta + 1) - math.lgamma(ab + 2))
    weights = mu0 * vecs[0] ** 2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


# ---------------------------------------------------------------------------
# Humbert Phi_1
# ---------------------------------------------------------------------------

PHI1_SERIES_XCAP = 500.0
PHI1_AUTO_XMAX = 8.0


def _phi1_series(p: Phi1Params, tol=SERIES_TOL, max_diagonals=20_000) -> HypergeometricResult:
    a, b, c = complex(p.a), complex(p.b), complex(p.c)
    x, y = complex(p.x), complex(p.y)
    if not abs(y) < 1:
        raise DomainError(f"Phi1 series needs |y| < 1, got |y| = {abs(y):.6g}")
    if abs(x) > PHI1_SERIES_XCAP:
        raise DomainError(f"|x| = {abs(x):.3g} exceeds the Phi1 series cap")

    # X_m = x^m/m!, B_n = (b)_n y^n/n!; diagonal s sums X_{s-n} B_n
    xs = [1.0 + 0j]
    bs = [1.0 + 0j]
    coef = 1.0 + 0j  # (a)_s/(c)_s
    total = 1.0 + 0j
    abs_total = 1.0
    small_run = 0
    prev_abs = 1.0
    s = 0
    while True:
        coef *= (a + s) / (c + s)
        xs.append(xs[-1] * x / (s + 1))
        bs.append(bs[-1] * (b + s) * y / (s + 1))
        s += 1
        xv = np.asarray(xs)
        bv = np.asarray(bs)
        prods = coef * xv[::-1] * bv
        diag = prods.sum()
        diag_abs = float(np.abs(prods).sum())
        if diag_abs <= tol * abs(total):
            small_run += 1
            if small_run == 3:
                r = diag_abs / prev_abs if prev_abs > 0 else 0.0
                factor = TAIL_SAFETY if r < 0.9 else max(TAIL_SAFETY, 1.0 / max(1.0 - r, 1e-6))
                est = factor * diag_abs + 4.0 * EPS * abs_total
                return HypergeometricResult(total, est, s, "series")
        else:
            small_run = 0
        total += diag
        abs_total += diag_abs
        prev_abs = diag_abs if diag_abs > 0 else prev_abs
        if s >= max_diagonals:
            raise ConvergenceError("Phi1 double series did not converge")


def _log_beta_prefactor(a, c):
    # Gamma(c) / (Gamma(a) Gamma(c-a))
    return cmath.exp(ln_gamma(c) - ln_gamma(a) - ln_gamma(c - a))


def _phi1_integral(p: Phi1Params, rtol=1e-14) -> HypergeometricResult:
    a, b, c = complex(p.a), complex(p.b), complex(p.c)
    x, y = complex(p.x), complex(p.y)
    if not (c.real > a.real > 0):
        raise DomainError("Phi1 integral representation needs Re c > Re a > 0")
    if y.imag == 0 and y.real >= 1 and not _is_nonpositive_integer(-b):
        raise DomainError("Phi1 integrand is singular on [0, 1] for real y >= 1")

    pref = _log_beta_prefactor(a, c)

    def g(u):
        return (1 - u * y) ** (-b) * np.exp(u * x)

    if _is_real(a) and _is_real(c):
        alpha, beta = (c - a).real - 1, a.real - 1
        prev = None
        n = 16
        while n <= 2048:
            s, w = gauss_jacobi(n, alpha, beta)
            u = (1 + s) / 2
            vals = w * g(u)
            cur = vals.sum() * 2.0 ** (1 - c.real)
            if prev is not None:
                diff = abs(cur - prev)
                scale = float(np.abs(vals).sum()) * 2.0 ** (1 - c.real)
                if diff <= rtol * max(abs(cur), 1e-300) or diff <= 64 * EPS * scale:
                    est = abs(pref) * (diff + 16 * EPS * scale)
                    return HypergeometricResult(pref * cur, est, n, "integral")
            prev = cur
            n *= 2
        raise ConvergenceError("Gauss-Jacobi quadrature for Phi1 did not converge")

    import mpmath as mp

    with mp.workdps(25):
        f = lambda u: u ** (a - 1) * (1 - u) ** (c - a - 1) * (1 - u * y) ** (-b) * mp.exp(u * x)
        val, err = mp.quad(f, [0, 0.5, 1], error=True)
    val = complex(val)
    return HypergeometricResult(pref * val, abs(pref) * (float(err) + 4 * EPS * abs(val)), 0, "integral")


def phi1(params: Phi1Params, method: str = "auto") -> HypergeometricResult:
    """Humbert function Phi_1(a, b; c; x, y).

    Parameters
    ----------
    params : Phi1Params
    method : {"series", "integral", "auto"}
        ``series`` sums the double series along anti-diagonals (needs
        ``|y| < 1``). ``integral`` uses the Euler integral with
        Gauss-Jacobi nodes (needs ``Re c > Re a > 0``). ``auto`` takes the
        integral when it applies and the series would be slow or suffer
        cancellation.
    """
    if not isinstance(params, Phi1Params):
        params = Phi1Params(*params)
    if method == "series":
        return _phi1_series(params)
    if method == "integral":
        return _phi1_integral(params)
    if method != "auto":
        raise ValueError(f"unknown Phi1 method {method!r}")

    a, c = complex(params.a), complex(params.c)
    integral_ok = c.real > a.real > 0
    y_abs, x_abs = abs(complex(params.y)), abs(complex(params.x))
    # series terms peak near e^{|x|}/sqrt|x|, so cancellation grows with |x|
    if y_abs < 1 and (not integral_ok or (y_abs < 0.8 and x_abs < PHI1_AUTO_XMAX)):
        return _phi1_series(params)
    if integral_ok:
        return _phi1_integral(params)
    raise DomainError("no Phi1 method applies: need |y| < 1 or Re c > Re a > 0")

