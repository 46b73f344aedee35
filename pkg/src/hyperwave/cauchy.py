"""Cauchy problems ``u_tt = D u``, ``u(0) = 0``, ``u_t(0) = u1`` by kernel quadrature.

Disc and half-plane solutions are computed in geodesic polar coordinates
``(r, phi)`` centred at the evaluation point. Writing
``sinh(r/2) = sinh(t/2) sin(theta)`` turns the inverse square root of the
kernel and the area element ``sinh r dr dphi`` into

    u(t, w) = (S/pi) int_0^{pi/2} sin(theta) R(X(theta))
              int_0^{2 pi} phase * u1(w'(theta, phi)) dphi dtheta,

with ``S = sinh(t/2)``, a smooth integrand and no edge singularity.
The theta-integral is Gauss-Legendre, the periodic phi-integral is the
trapezoid rule. Only the annulus meeting the support of ``u1`` is
integrated, so the data (a smooth bump) is resolved at full density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import geometry as geo
from .errors import ConvergenceError, DomainError, ParameterError
from .kernels import KERNEL_PREFACTOR, MorseQuery, morse_kernel, radial_profile_array

MODELS = ("disc", "halfplane", "morse")


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------

def _distance_array(model: str, p, center) -> np.ndarray:
    p = np.asarray(p)
    if model == "disc":
        s2 = geo.disc_sinh2_half(p, center)
        return 2 * np.arcsinh(np.sqrt(s2))
    if model == "halfplane":
        s2 = geo.halfplane_sinh2_half(p, center)
        return 2 * np.arcsinh(np.sqrt(s2))
    return np.abs(np.log(np.asarray(p, dtype=float)) - math.log(center))


def _validate_point(model: str, p):
    if model == "disc":
        return geo.as_disc(p)
    if model == "halfplane":
        return geo.as_halfplane(p)
    p = float(p)
    if not p > 0:
        raise DomainError("Morse points are positive reals y = e^X")
    return p


@dataclass(frozen=True)
class InitialData:
    """Compactly supported initial velocity.

    ``evaluator`` is vectorised: it maps an array of points (complex for
    disc/half-plane, positive reals ``y`` for Morse) to complex values and
    must vanish outside the ball of ``support_radius`` about
    ``support_center`` (hyperbolic distance, or ``|ln y - ln y0|``).
    """

    kind: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    support_center: complex
    model: str = "disc"
    peak: float = 1.0

    def __post_init__(self):
        if self.kind not in ("closed_form", "sampled"):
            raise ParameterError(f"unknown kind {self.kind!r}")
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}")
        if not self.support_radius > 0:
            raise DomainError("support_radius must be positive")
        object.__setattr__(self, "support_center", _validate_point(self.model, self.support_center))

    def __call__(self, p):
        return np.asarray(self.evaluator(np.asarray(p)), dtype=complex)

    def scaled(self, c: complex) -> "InitialData":
        f = self.evaluator
        return InitialData(self.kind, lambda p: c * np.asarray(f(p)), self.support_radius,
                           self.support_center, self.model, abs(c) * self.peak)

    def distance_to_support(self, p) -> float:
        """Distance from ``p`` to the support ball (0 if inside)."""
        d = float(_distance_array(self.model, np.asarray(p), self.support_center))
        return max(0.0, d - self.support_radius)


def bump_profile(rho: np.ndarray, radius: float) -> np.ndarray:
    """``exp(1 - 1/(1 - (rho/R)^2))`` on ``rho < R``; peak 1, C-infinity."""
    x = np.asarray(rho, dtype=float) / radius
    out = np.zeros_like(x)
    inside = x < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def bump(model: str, center, radius: float, amplitude: complex = 1.0) -> InitialData:
    """Smooth radial bump of hyperbolic (or log-line) radius ``radius``."""
    center = _validate_point(model, center)

    def f(p):
        return amplitude * bump_profile(_distance_array(model, p, center), radius)

    return InitialData("closed_form", f, radius, center, model, abs(amplitude))


def zero_data(model: str, center, radius: float = 1.0) -> InitialData:
    return bump(model, center, radius, 0.0)


def sampled(model: str, grid_x, grid_y, values, support_center, support_radius) -> InitialData:
    """Data from samples on a rectangular grid, interpolated bilinearly.

    ``grid_x``/``grid_y`` are the real coordinates (``X, Y`` on the disc,
    ``x, y`` on the half-plane). For the Morse model pass ``grid_y=None``
    and sample on ``X = ln y``; interpolation is then linear in ``X``.
    Values are forced to zero outside the declared support ball.
    """
    center = _validate_point(model, support_center)
    values = np.asarray(values, dtype=complex)
    if model == "morse":
        gx = np.asarray(grid_x, dtype=float)

        def f(p):
            X = np.log(np.asarray(p, dtype=float))
            v = np.interp(X, gx, values.real, left=0, right=0) + 1j * np.interp(
                X, gx, values.imag, left=0, right=0)
            return np.where(_distance_array(model, p, center) < support_radius, v, 0)
    else:
        interp = RegularGridInterpolator((np.asarray(grid_x), np.asarray(grid_y)), values,
                                         method="linear", bounds_error=False, fill_value=0)

        def f(p):
            p = np.asarray(p, dtype=complex)
            pts = np.stack([p.real.ravel(), p.imag.ravel()], axis=-1)
            v = interp(pts).reshape(p.shape)
            return np.where(_distance_array(model, p, center) < support_radius, v, 0)

    peak = float(np.max(np.abs(values))) if values.size else 0.0
    return InitialData("sampled", f, support_radius, center, model, peak)


def cayley_transport(u1: InitialData, k) -> InitialData:
    """``(U_k u1)(w) = ((1 - conj w)/(1 - w))^k u1(c^{-1} w)``, half-plane to disc."""
    if u1.model != "halfplane":
        raise ParameterError("cayley_transport expects half-plane data")
    kk = float(geo.as_magnetic(k).k)
    f = u1.evaluator

    def g(w):
        w = np.asarray(w, dtype=complex)
        return geo.cayley_gauge(kk, w) * np.asarray(f(geo.cayley_inv_array(w)))

    return InitialData(u1.kind, g, u1.support_radius, geo.cayley(u1.support_center).w,
                       "disc", u1.peak)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureConfig:
    radial_nodes: int = 48
    angular_nodes: int = 48
    singularity_substitution: str = "sin_sq"
    tolerance: float = 1e-10
    max_refinements: int = 4

    def __post_init__(self):
        if self.radial_nodes < 8 or self.angular_nodes < 8:
            raise ParameterError("radial_nodes and angular_nodes must be at least 8")
        if self.singularity_substitution not in ("sin_sq", "none"):
            raise ParameterError("singularity_substitution must be 'sin_sq' or 'none'")
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.max_refinements < 0:
            raise ParameterError("max_refinements must be nonnegative")

    def refined(self, factor: int = 2) -> "QuadratureConfig":
        return QuadratureConfig(self.radial_nodes * factor, self.angular_nodes * factor,
                                self.singularity_substitution, self.tolerance,
                                self.max_refinements)


def _gauss(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def _refine(compute: Callable[[QuadratureConfig], complex], cfg: QuadratureConfig) -> complex:
    """Double node counts until successive values agree to ``cfg.tolerance``.

    ``max_refinements = 0`` means a fixed rule: the first value is returned.
    """
    prev = compute(cfg)
    if cfg.max_refinements == 0:
        return prev
    cur_cfg = cfg
    for _ in range(cfg.max_refinements):
        cur_cfg = cur_cfg.refined()
        cur = compute(cur_cfg)
        if abs(cur - prev) <= cfg.tolerance * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError(
        f"quadrature did not settle to {cfg.tolerance:g} after {cfg.max_refinements} refinements")


def _annulus(t: float, d_center: float, radius: float):
    """Radial range ``[r_lo, r_hi]`` where the cone meets the support, or None."""
    r_lo = max(0.0, d_center - radius)
    r_hi = min(t, d_center + radius)
    if r_lo >= r_hi:
        return None
    return r_lo, r_hi


def _polar_integral(t, k, u1, cfg, to_model, phase_fn, d_center) -> complex:
    """Shared disc/half-plane polar quadrature, see module docstring."""
    ann = _annulus(t, d_center, u1.support_radius)
    if ann is None:
        return 0j
    r_lo, r_hi = ann
    S = math.sinh(t / 2)
    kk = float(k.k)

    def compute(c: QuadratureConfig) -> complex:
        phi = 2 * math.pi * np.arange(c.angular_nodes) / c.angular_nodes
        omega = np.exp(1j * phi)
        if c.singularity_substitution == "sin_sq":
            th_lo = math.asin(min(1.0, math.sinh(r_lo / 2) / S))
            th_hi = math.asin(min(1.0, math.sinh(r_hi / 2) / S))
            th, wt = _gauss(c.radial_nodes, th_lo, th_hi)
            sh = S * np.sin(th)
            weight = (S / math.pi) * np.sin(th) * wt
        else:
            r, wt = _gauss(c.radial_nodes, r_lo, r_hi)
            sh = np.sinh(r / 2)
            gap = np.maximum(S**2 - sh**2, 0.0)
            with np.errstate(divide="ignore"):
                inv = np.where(gap > 0, 1 / np.sqrt(gap), 0.0)
            weight = KERNEL_PREFACTOR * np.sinh(r) * inv * wt
        prof = radial_profile_array(t, sh**2, kk)
        rho = np.tanh(np.arcsinh(sh))  # tanh(r/2)
        local = rho[:, None] * omega[None, :]
        pts = to_model(local)
        vals = phase_fn(pts) * u1(pts)
        ang = vals.sum(axis=1) * (2 * math.pi / c.angular_nodes)
        return complex(np.sum(weight * prof * ang))

    return _refine(compute, cfg)


def solve_disc(t: float, w, u1: InitialData, k=0.0, cfg: Optional[QuadratureConfig] = None) -> complex:
    """``u(t, w)`` for the disc problem with operator D_k."""
    cfg = cfg or QuadratureConfig()
    if not t > 0:
        raise DomainError("t must be positive")
    if u1.model != "disc":
        raise ParameterError("solve_disc needs disc initial data")
    w = geo.as_disc(w)
    k = geo.as_magnetic(k)
    d_center = float(_distance_array("disc", w, u1.support_center))
    return _polar_integral(
        float(t), k, u1, cfg,
        to_model=lambda loc: geo.mobius_gw_array(w, loc),
        phase_fn=lambda pts: geo.phase_disc_array(k.k, w, pts),
        d_center=d_center)


def solve_halfplane(t: float, z, u1: InitialData, k=0.0, cfg: Optional[QuadratureConfig] = None) -> complex:
    """``u(t, z)`` for the half-plane problem with operator D~_k, measure dmu~."""
    cfg = cfg or QuadratureConfig()
    if not t > 0:
        raise DomainError("t must be positive")
    if u1.model != "halfplane":
        raise ParameterError("solve_halfplane needs half-plane initial data")
    z = geo.as_halfplane(z)
    k = geo.as_magnetic(k)
    wc = geo.cayley(z).w
    d_center = float(_distance_array("halfplane", z, u1.support_center))
    return _polar_integral(
        float(t), k, u1, cfg,
        to_model=lambda loc: geo.cayley_inv_array(geo.mobius_gw_array(wc, loc)),
        phase_fn=lambda pts: geo.phase_halfplane_array(k.k, z, pts),
        d_center=d_center)


def solve_morse(t: float, y: float, w1: InitialData, lam: float, k=0.0,
                cfg: Optional[QuadratureConfig] = None,
                kernel: Optional[Callable[[MorseQuery], complex]] = None) -> complex:
    """``w(t, y) = int W(t, y, y') w1(y') dy'/y'`` over ``|ln y - ln y'| < t``.

    With ``X' = ln y + t sin(theta)`` the cone edges sit at ``theta = +-pi/2``
    (this is the ``sin_sq`` choice) and only the part meeting the
    support is integrated. ``kernel`` overrides the closed-form kernel.
    """
    cfg = cfg or QuadratureConfig()
    if not t > 0:
        raise DomainError("t must be positive")
    if w1.model != "morse":
        raise ParameterError("solve_morse needs Morse initial data")
    k = geo.as_magnetic(k)
    if not k.is_half_integral:
        raise ParameterError("the Morse problem needs integer or half-integer k")
    y = _validate_point("morse", y)
    X = math.log(y)
    Xc = math.log(w1.support_center)
    lo = max(X - t, Xc - w1.support_radius)
    hi = min(X + t, Xc + w1.support_radius)
    if lo >= hi:
        return 0j
    if kernel is None:
        def kernel(q):
            return morse_kernel(q).value

    def compute(c: QuadratureConfig) -> complex:
        if c.singularity_substitution == "sin_sq":
            th_lo = math.asin(max(-1.0, (lo - X) / t))
            th_hi = math.asin(min(1.0, (hi - X) / t))
            th, wt = _gauss(c.radial_nodes, th_lo, th_hi)
            Xp = X + t * np.sin(th)
            wt = wt * t * np.cos(th)
        else:
            Xp, wt = _gauss(c.radial_nodes, lo, hi)
        yp = np.exp(Xp)
        data = w1(yp)
        total = 0j
        for ypi, di, wi in zip(yp, data, wt):
            if di == 0:
                continue
            total += wi * di * kernel(MorseQuery(t, y, float(ypi), lam, k))
        return complex(total)

    return _refine(compute, cfg)


# ---------------------------------------------------------------------------
# Small-time behaviour
# ---------------------------------------------------------------------------

PROBE_TIMES = (0.2, 0.1, 0.05, 0.025)


class ProbeResult(NamedTuple):
    value_limit: float
    derivative_limit_error: float


def _extrapolate_to_zero(ts, vals) -> complex:
    """Value at 0 of the interpolating polynomial through ``(ts, vals)``."""
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(vals, dtype=complex)
    V = np.vander(ts, len(ts))
    return complex(np.linalg.solve(V, vals)[-1])


def initial_condition_probe(solver, u1: InitialData, k=0.0, cfg: Optional[QuadratureConfig] = None,
                            point=None, times=PROBE_TIMES) -> ProbeResult:
    """Extrapolate ``u(t)`` and ``u(t)/t`` to ``t = 0`` at ``point``.

    ``solver(t, point, u1, k, cfg)`` is one of the solve functions.
    Returns ``|u(0+)|`` and the error of ``u_t(0+)`` against ``u1(point)``,
    relative to ``|u1(point)|`` when that is nonzero.
    """
    point = u1.support_center if point is None else point
    us = [solver(t, point, u1, k, cfg) for t in times]
    value = _extrapolate_to_zero(times, us)
    slope = _extrapolate_to_zero(times, [u / t for u, t in zip(us, times)])
    target = complex(u1(np.array([point]))[0])
    err = abs(slope - target)
    if target != 0:
        err /= abs(target)
    return ProbeResult(abs(value), err)
