"""Closed-form wave kernels and their independent numerical twins.

Kernel conventions
------------------
``V(t, w, w')`` is evaluated at the *target* ``w`` for initial velocity
concentrated at the *source* ``w'``; the Cauchy solution is
``u(t, w) = int V(t, w, w') u1(w') dmu(w')``.

The radial factor is ``(cosh^2(t/2) - cosh^2(d/2))_+^{-1/2}`` times
one of four equivalent profiles selected by ``form``:

========== ==================================================
gaussF     F(|k|, -|k|; 1/2; 1 - X^2)
quadratic  F(2|k|, -2|k|; 1/2; (1 - X)/2)
cosine     cos(2|k| arccos X), complex arccos for X > 1
chebyshev  T_{2|k|}(X), half-integral k only
========== ==================================================

with ``X = cosh(t/2)/cosh(d/2) >= 1`` inside the light cone.

The overall constant is ``1/(4 pi)``: with it the solution has
``u_t(0) = u1``, and the Morse kernel at ``k = 0`` reduces to
``J_0(|lambda| Z)/2``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate

from . import specialfn as sf
from .errors import ConvergenceError, DifferentiationError, DomainError, ParameterError
from .geometry import (
    DiscPoint,
    HalfPlanePoint,
    MagneticParameter,
    as_disc,
    as_halfplane,
    as_magnetic,
    disc_sinh2_half,
    halfplane_sinh2_half,
    phase_disc,
    phase_halfplane,
    phase_halfplane_array,
)

KERNEL_PREFACTOR = 1.0 / (4.0 * math.pi)
FORMS = ("gaussF", "quadratic", "cosine", "chebyshev")
CONE_TOL = 1e-13

Point = Union[complex, DiscPoint, HalfPlanePoint]


@dataclass(frozen=True)
class LightConeValue:
    value: complex
    inside_cone: bool

    def __post_init__(self):
        if not self.inside_cone and self.value != 0:
            raise ValueError("values outside the light cone must be exactly zero")

    def __complex__(self):
        return complex(self.value)


OUTSIDE = LightConeValue(0j, False)


@dataclass(frozen=True)
class KernelQuery:
    """One kernel evaluation: ``V(t, target, source)`` for field ``k``."""

    t: float
    source: Point
    target: Point
    k: MagneticParameter = field(default_factory=lambda: MagneticParameter(0.0))
    form: str = "gaussF"

    def __post_init__(self):
        object.__setattr__(self, "k", as_magnetic(self.k))
        object.__setattr__(self, "t", float(self.t))
        if not self.t > 0:
            raise DomainError("t must be positive")
        if self.form not in FORMS:
            raise ParameterError(f"unknown form {self.form!r}; expected one of {FORMS}")
        if self.form == "chebyshev" and not self.k.is_half_integral:
            raise ParameterError("chebyshev form needs integer or half-integer k")


@dataclass(frozen=True)
class MorseQuery:
    """``W_{lambda,k}(t, y, y2)`` with ``y = e^X`` the target, ``y2`` the source."""

    t: float
    y: float
    y2: float
    lam: float
    k: MagneticParameter = field(default_factory=lambda: MagneticParameter(0.0))

    def __post_init__(self):
        object.__setattr__(self, "k", as_magnetic(self.k))
        for name in ("t", "y", "y2", "lam"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.t > 0:
            raise DomainError("t must be positive")
        if not (self.y > 0 and self.y2 > 0):
            raise DomainError("y and y2 must be positive")
        if self.lam == 0:
            raise DomainError("lambda must be nonzero")
        if not self.k.is_half_integral:
            raise ParameterError("the Morse kernel needs integer or half-integer k")

    @property
    def inside_cone(self) -> bool:
        return abs(math.log(self.y) - math.log(self.y2)) < self.t

    @property
    def Z(self) -> float:
        """sqrt(4 y y2 cosh^2(t/2) - (y + y2)^2); NaN outside the support."""
        z2 = 4 * self.y * self.y2 * math.cosh(self.t / 2) ** 2 - (self.y + self.y2) ** 2
        return math.sqrt(z2) if z2 > 0 else float("nan")


# ---------------------------------------------------------------------------
# Radial profile
# ---------------------------------------------------------------------------

def radial_profile(t: float, sinh2_half_dist: float, k: float, form: str = "gaussF") -> float:
    """Profile factor multiplying the inverse square root, inside the cone."""
    ak = abs(float(k))
    ct2 = math.cosh(t / 2) ** 2
    cd2 = 1.0 + sinh2_half_dist
    if form == "gaussF":
        # 1 - X^2 written without cancellation: (sinh^2(d/2) - sinh^2(t/2)) / cosh^2(d/2)
        z = (sinh2_half_dist - math.sinh(t / 2) ** 2) / cd2
        return sf.gauss_2f1(ak, -ak, 0.5, z).value.real
    X = math.sqrt(ct2 / cd2)
    if form == "quadratic":
        z = (sinh2_half_dist - math.sinh(t / 2) ** 2) / cd2
        return sf.gauss_quadratic_transform(ak, -ak, z).real
    if form == "cosine":
        return cmath.cos(2 * ak * cmath.acos(X)).real
    if form == "chebyshev":
        return sf.chebyshev_t(int(round(2 * ak)), X)
    raise ParameterError(f"unknown form {form!r}")


def radial_profile_array(t: float, sinh2_half_dist, k: float) -> np.ndarray:
    """Vectorised cosine-form profile, for quadrature inside the cone."""
    s2 = np.asarray(sinh2_half_dist, dtype=float)
    X = np.cosh(t / 2) / np.sqrt(1.0 + s2)
    return np.cosh(2 * abs(float(k)) * np.arccosh(np.maximum(X, 1.0)))


def _cone_gap(t: float, sinh2_half_dist: float) -> float | None:
    """``cosh^2(t/2) - cosh^2(d/2)`` if strictly inside the cone, else None."""
    gap = math.sinh(t / 2) ** 2 - sinh2_half_dist
    if gap <= CONE_TOL * math.cosh(t / 2) ** 2:
        return None
    return gap


def _radial_value(t, s2, k, form) -> LightConeValue:
    gap = _cone_gap(t, s2)
    if gap is None:
        return OUTSIDE
    val = KERNEL_PREFACTOR * gap**-0.5 * radial_profile(t, s2, k, form)
    return LightConeValue(complex(val), True)


def disc_radial_kernel(t: float, r: float, k, form: str = "gaussF") -> LightConeValue:
    """Radial kernel ``v_k(t, r)`` centred at the origin of the disc."""
    k = as_magnetic(k)
    if not t > 0:
        raise DomainError("t must be positive")
    if r < 0:
        raise DomainError("r must be nonnegative")
    KernelQuery(t, 0j, 0j, k, form)  # validates form/k pairing
    return _radial_value(float(t), math.sinh(r / 2) ** 2, k.k, form)


def disc_kernel(q: KernelQuery) -> LightConeValue:
    """Translated disc kernel ``V_k(t, w, w')`` with ``w = q.target``."""
    w, wp = as_disc(q.target), as_disc(q.source)
    s2 = float(disc_sinh2_half(w, wp))
    radial = _radial_value(q.t, s2, q.k.k, q.form)
    if not radial.inside_cone:
        return radial
    return LightConeValue(phase_disc(q.k, w, wp) * radial.value, True)


def halfplane_kernel(q: KernelQuery) -> LightConeValue:
    """Half-plane kernel with the hyperbolic distance rho(z, z')."""
    z, zp = as_halfplane(q.target), as_halfplane(q.source)
    s2 = float(halfplane_sinh2_half(z, zp))
    radial = _radial_value(q.t, s2, q.k.k, q.form)
    if not radial.inside_cone:
        return radial
    return LightConeValue(phase_halfplane(q.k, z, zp) * radial.value, True)


# ---------------------------------------------------------------------------
# (1/sinh(t/2) d/dt)^n via u = cosh(t/2)
# ---------------------------------------------------------------------------

def fd_weights(order: int, offsets) -> np.ndarray:
    """Fornberg weights for the ``order``-th derivative at 0 on ``offsets``."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, x[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def _stencil_halfwidth(order: int) -> int:
    # smallest symmetric stencil with at least order + 5 points
    return (order + 5) // 2


def half_u_derivative(g: Callable[[float], complex], u0: float, order: int,
                      h: float | None = None, u_floor: float | None = None) -> complex:
    """``(1/2 d/du)^order g`` at ``u0`` by central differences + Richardson.

    ``u_floor`` is a hard lower limit for stencil nodes (e.g. ``u = 1``
    when ``g`` is only defined for ``t = 2 arccosh u`` real).
    """
    if order == 0:
        return complex(g(u0))
    m = _stencil_halfwidth(order)
    if h is None:
        h = 1e-2 * max(1.0, abs(u0))
    if u_floor is not None:
        room = (u0 - u_floor) / (m + 0.5)
        h = min(h, room)
        if h < 1e-6 * max(1.0, abs(u0)):
            raise DifferentiationError(
                f"stencil step {h:.3g} too small near u = {u0:.6g} (floor {u_floor:.6g})")
    offsets = np.arange(-m, m + 1)
    weights = fd_weights(order, offsets)
    p = 2 * m + 2 - 2 * ((order + 1) // 2)  # accuracy order of the symmetric stencil

    def central(step):
        vals = np.array([complex(g(u0 + o * step)) for o in offsets])
        return (weights @ vals) / step**order

    coarse, fine = central(h), central(h / 2)
    extrap = (2**p * fine - coarse) / (2**p - 1)
    return extrap / 2**order


def sinh_half_derivative(f: Callable[[float], complex], t0: float, order: int) -> complex:
    """Apply ``(1/sinh(t/2) d/dt)`` ``order`` times to ``f`` at ``t0``."""
    if not t0 > 0:
        raise DomainError("t0 must be positive")
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order == 0:
        return complex(f(t0))

    def g(u):
        return f(2 * math.acosh(u))

    return half_u_derivative(g, math.cosh(t0 / 2), order, u_floor=1.0)


# ---------------------------------------------------------------------------
# I_lambda^{alpha, beta}(Y, Z)
# ---------------------------------------------------------------------------

def _check_ilambda_args(alpha, beta, Y, Z):
    if not complex(beta).real > -1:
        raise DomainError("need Re beta > -1")
    if not Z > 0:
        raise DomainError("Z must be positive")
    Y = complex(Y)
    alpha_int = complex(alpha).imag == 0 and float(complex(alpha).real).is_integer()
    if Y.imag == 0 and -Z <= -Y.real <= Z and not (alpha_int and complex(alpha).real >= 0):
        raise DomainError("(x + Y)^alpha is not single valued / finite on [-Z, Z]")


def i_lambda_closed(alpha, beta, Y, Z: float, lam: float, variant: str = "z") -> complex:
    """Closed form of ``int e^{-i lam x} (x+Y)^alpha (Z^2-x^2)_+^beta dx``.

    ``variant="z"`` uses ``e^{-i lam Z}`` and the arguments
    ``(2 i lam Z, 2Z/(Y+Z))`` obtained from the substitution
    ``x = Z(1 - 2 xi)``. ``variant="y"`` puts ``Y`` in their place; it is
    kept for comparison and does not match quadrature.
    """
    _check_ilambda_args(alpha, beta, Y, Z)
    alpha, beta, Y = complex(alpha), complex(beta), complex(Y)
    pref = cmath.exp(2 * sf.ln_gamma(beta + 1) - sf.ln_gamma(2 * beta + 2))
    pref *= (2 * Z) ** (2 * beta + 1) * (Y + Z) ** alpha
    if variant == "z":
        shift, xarg, yarg = Z, 2j * lam * Z, 2 * Z / (Y + Z)
    elif variant == "y":
        shift, xarg, yarg = Y, 2j * lam * Y, 2 * Y / (Y + Z)
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    res = sf.phi1(sf.Phi1Params(beta + 1, -alpha, 2 * beta + 2, xarg, yarg))
    return pref * cmath.exp(-1j * lam * shift) * res.value


def i_lambda_quad(alpha, beta, Y, Z: float, lam: float, tol: float = 1e-12) -> complex:
    """Adaptive quadrature of the defining integral, ``x = Z sin(theta)``."""
    _check_ilambda_args(alpha, beta, Y, Z)
    alpha, beta, Y = complex(alpha), complex(beta), complex(Y)
    if beta.real > -0.5:
        def f(th):
            s, c = math.sin(th), math.cos(th)
            return (cmath.exp(-1j * lam * Z * s) * (Z * s + Y) ** alpha
                    * (Z * c) ** (2 * beta) * Z * c)

        a, b = -math.pi / 2, math.pi / 2
        kwargs = {}
    else:
        # (Z - x)^beta (Z + x)^beta handled exactly by QAWS weights
        be = beta.real
        if beta.imag != 0:
            raise DomainError("complex beta with Re beta <= -1/2 is not supported")

        def f(x):
            return cmath.exp(-1j * lam * x) * (x + Y) ** alpha

        a, b = -Z, Z
        kwargs = dict(weight="alg", wvar=(be, be))
    parts = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for part in (lambda v: f(v).real, lambda v: f(v).imag, lambda v: abs(f(v))):
            val, err = integrate.quad(part, a, b, epsabs=0.0, epsrel=tol, limit=500, **kwargs)
            parts.append((val, err))
    value = complex(parts[0][0], parts[1][0])
    err = math.hypot(parts[0][1], parts[1][1])
    scale = parts[2][0]
    if err > max(1e3 * tol * abs(value), 1e3 * sf.EPS * scale):
        raise ConvergenceError(f"quadrature error {err:.3g} exceeds tolerance")
    return value


# ---------------------------------------------------------------------------
# Morse kernel
# ---------------------------------------------------------------------------

def morse_constant(k, convention: str = "pde") -> complex:
    """Prefactor ``+-phase * Gamma(2|k|+1/2) / (2 Gamma(4|k|+1) sqrt(pi))``.

    ``convention="pde"`` carries the phase ``exp(-i pi k)`` matching the
    half-plane phase orientation used by :func:`halfplane_kernel`;
    ``"printed"`` carries ``exp(+i pi k)``.
    """
    k = as_magnetic(k)
    n = k.order
    mag = math.exp(math.lgamma(n + 0.5) - math.lgamma(2 * n + 1)) / (2 * math.sqrt(math.pi))
    sgn = -1 if convention == "pde" else 1
    if convention not in ("pde", "printed"):
        raise ParameterError(f"unknown convention {convention!r}")
    return cmath.exp(sgn * 1j * math.pi * k.k) * mag


def morse_profile(u: float, y: float, y2: float, lam: float, k, convention: str = "pde",
                  phi1_method: str = "auto") -> complex:
    """``(2Z)^{4|k|} (Z+Y)^{-2|k|} e^{-i lam Z} Phi1(...)`` as a function of ``u = cosh(t/2)``.

    Analytic in ``u``: below the light cone ``Z`` turns imaginary and the
    expression continues smoothly, so difference stencils may straddle it.
    """
    k = as_magnetic(k)
    n = k.order
    sgn = k.sign if convention == "printed" else -k.sign
    Y = 1j * sgn * (y + y2)
    Z = cmath.sqrt(4 * y * y2 * u * u - (y + y2) ** 2)
    p = sf.Phi1Params(n + 0.5, n, 2 * n + 1, 2j * lam * Z, 2 * Z / (Z + Y))
    return (2 * Z) ** (2 * n) / (Z + Y) ** n * cmath.exp(-1j * lam * Z) * sf.phi1(p, phi1_method).value


def morse_kernel(q: MorseQuery, convention: str = "pde") -> LightConeValue:
    """Closed-form Morse wave kernel ``W_{lambda,k}(t, y, y')``.

    ``convention="pde"`` (default) is the variant consistent with the
    half-plane kernel; ``"printed"`` reproduces the printed sign choices
    (``Y = +i sign(k)(y+y')``, phase ``exp(+i pi k)``) for comparison.
    """
    if not q.inside_cone:
        return OUTSIDE
    z2 = 4 * q.y * q.y2 * math.cosh(q.t / 2) ** 2 - (q.y + q.y2) ** 2
    if z2 <= CONE_TOL * 4 * q.y * q.y2 * math.cosh(q.t / 2) ** 2:
        return OUTSIDE
    n = q.k.order
    u0 = math.cosh(q.t / 2)

    def g(u):
        return morse_profile(u, q.y, q.y2, q.lam, q.k, convention)

    deriv = half_u_derivative(g, u0, n)
    val = morse_constant(q.k, convention) * (4 * q.y * q.y2) ** (-abs(q.k.k)) * deriv
    return LightConeValue(complex(val), True)


def morse_kernel_fourier_oracle(q: MorseQuery, rtol: float = 1e-12,
                                max_nodes: int = 4096) -> complex:
    """``(y y')^{-1/2} int e^{-i lam s} V~_k(t, s + i y, i y') ds`` numerically.

    The integrand lives on ``|s| < Z``. With ``s = Z sin(theta)`` the cone
    gap becomes ``Z^2 cos^2(theta) / (4 y y')``, so the inverse square root
    cancels the Jacobian exactly and the theta-integrand is smooth.
    Gauss-Legendre nodes are doubled until the relative change drops
    below ``rtol``.
    """
    Z = q.Z
    if not Z > 0:
        return 0j
    y, y2, t = q.y, q.y2, q.t
    root = 2 * math.sqrt(y * y2)

    def integral(n):
        x, w = np.polynomial.legendre.leggauss(n)
        s = Z * np.sin(x * (math.pi / 2))
        s2 = (s**2 + (y - y2) ** 2) / (4 * y * y2)
        z = s + 1j * y
        prof = radial_profile_array(t, s2, q.k.k)
        phase = phase_halfplane_array(q.k.k, z, 1j * y2)
        vals = np.exp(-1j * q.lam * s) * phase * prof
        # V ds = prefactor * phase * prof * root / (Z cos) * Z cos dtheta
        return KERNEL_PREFACTOR * root * (math.pi / 2) * (w @ vals) / math.sqrt(y * y2)

    prev = integral(16)
    n = 32
    while n <= max_nodes:
        cur = integral(n)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return complex(cur)
        prev = cur
        n *= 2
    raise ConvergenceError("Fourier oracle did not reach its tolerance")
