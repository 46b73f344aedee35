"""Finite-difference application of the wave operators and identity checks.

Everything here is deliberately independent of the closed forms in
:mod:`hyperwave.kernels`: operators are applied by central differences,
Fourier transforms by trapezoid sums and evolutions by leapfrog time
stepping. Agreement with the closed forms is then evidence, not tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from . import geometry as geo
from .errors import DomainError, ParameterError, StencilError

# central-difference weights for the first and second derivative
_D1 = {2: ((1,), (0.5,)), 4: ((1, 2), (2 / 3, -1 / 12))}
_D2 = {2: ((0, 1), (-2.0, 1.0)), 4: ((0, 1, 2), (-5 / 2, 4 / 3, -1 / 12))}


@dataclass(frozen=True)
class StencilConfig:
    spatial_step: float = 1e-3
    temporal_step: float = 1e-3
    order: int = 2

    def __post_init__(self):
        if not (self.spatial_step > 0 and self.temporal_step > 0):
            raise ParameterError("steps must be positive")
        if self.order not in _D1:
            raise ParameterError(f"order must be one of {sorted(_D1)}")

    def halved(self) -> "StencilConfig":
        return StencilConfig(self.spatial_step / 2, self.temporal_step / 2, self.order)

    @property
    def reach(self) -> int:
        return self.order // 2


def _evaluate(f, pts) -> np.ndarray:
    """Evaluate ``f`` on an array, vectorised if possible, else pointwise."""
    pts = np.asarray(pts)
    try:
        out = np.asarray(f(pts), dtype=complex)
        if out.shape == pts.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(f(p)) for p in pts.ravel()]).reshape(pts.shape)


def _derivs_1d(f, x0, h, order, direction=1.0):
    """``(f, f', f'')`` at ``x0`` along ``direction`` (1 or 1j for complex points)."""
    m = order // 2
    offs = np.arange(-m, m + 1)
    vals = _evaluate(f, x0 + offs * (direction * h))
    c = vals[m]
    d1 = sum(w * (vals[m + j] - vals[m - j]) for j, w in zip(*_D1[order])) / h
    d2 = (_D2[order][1][0] * c
          + sum(w * (vals[m + j] + vals[m - j]) for j, w in zip(_D2[order][0][1:], _D2[order][1][1:])))
    return c, d1, d2 / h**2


def _partials_2d(f, p: complex, h: float, order: int):
    """Value, ``f_X, f_Y, f_XX + f_YY`` at ``p = X + iY`` for ``f`` of a complex point."""
    c, fx, fxx = _derivs_1d(f, p, h, order)
    _, fy, fyy = _derivs_1d(f, p, h, order, 1j)
    return c, fx, fy, fxx + fyy


def apply_disc_operator(f, w, k, cfg: StencilConfig = StencilConfig()) -> complex:
    """``D_k f`` at ``w`` in real coordinates ``w = X + iY``.

    ``D_k = (1-|w|^2)^2 (1/4)(d_X^2 + d_Y^2) + i k (1-|w|^2)(Y d_X - X d_Y)
    - k^2 |w|^2 + k^2 + 1/4``, the Wirtinger form with
    ``d_w = (d_X - i d_Y)/2``.
    """
    w = complex(w)
    k = float(geo.as_magnetic(k).k)
    h = cfg.spatial_step
    if abs(w) + cfg.reach * h * math.sqrt(2) >= 1:
        raise StencilError(f"stencil around {w} leaves the disc")
    c, fx, fy, lap = _partials_2d(f, w, h, cfg.order)
    s = 1 - abs(w) ** 2
    X, Y = w.real, w.imag
    return complex(0.25 * s**2 * lap + 1j * k * s * (Y * fx - X * fy)
                   + (k * k * s + 0.25) * c)


def apply_radial_operator(g, r: float, k, cfg: StencilConfig = StencilConfig()) -> complex:
    """``(d_r^2 + coth r d_r + k^2/cosh^2(r/2) + 1/4) g`` at ``r``."""
    k = float(geo.as_magnetic(k).k)
    h = cfg.spatial_step
    if not r > 3 * h:
        raise StencilError("r must exceed three stencil steps")
    c, d1, d2 = _derivs_1d(g, float(r), h, cfg.order)
    return complex(d2 + d1 / math.tanh(r) + (k * k / math.cosh(r / 2) ** 2 + 0.25) * c)


def apply_halfplane_operator(f, z, k, cfg: StencilConfig = StencilConfig()) -> complex:
    """``(y^2 (d_x^2 + d_y^2) + 2 i k y d_x + 1/4) f`` at ``z = x + iy``."""
    z = complex(z)
    k = float(geo.as_magnetic(k).k)
    h = cfg.spatial_step
    if z.imag - cfg.reach * h <= 0:
        raise StencilError(f"stencil around {z} leaves the half-plane")
    c, fx, _, lap = _partials_2d(f, z, h, cfg.order)
    y = z.imag
    return complex(y * y * lap + 2j * k * y * fx + 0.25 * c)


def morse_potential(X, lam: float, k: float):
    return -2 * k * lam * np.exp(X) - lam**2 * np.exp(2 * X)


def apply_morse_operator(g, X: float, lam: float, k, cfg: StencilConfig = StencilConfig()) -> complex:
    """``(d_X^2 - 2 k lam e^X - lam^2 e^{2X}) g`` at ``X``."""
    k = float(geo.as_magnetic(k).k)
    c, _, d2 = _derivs_1d(g, float(X), cfg.spatial_step, cfg.order)
    return complex(d2 + morse_potential(X, lam, k) * c)


def apply_morse_operator_y(g, y: float, lam: float, k, cfg: StencilConfig = StencilConfig()) -> complex:
    """Same operator written in ``y = e^X``: ``(y d_y)^2 - 2 k lam y - lam^2 y^2``."""
    k = float(geo.as_magnetic(k).k)
    h = cfg.spatial_step * y
    if y - cfg.reach * h <= 0:
        raise StencilError("stencil leaves y > 0")
    c, d1, d2 = _derivs_1d(g, float(y), h, cfg.order)
    return complex(y * y * d2 + y * d1 - (2 * k * lam * y + lam**2 * y * y) * c)


# ---------------------------------------------------------------------------
# Residuals and convergence orders
# ---------------------------------------------------------------------------

def pde_residual(solution: Callable, operator_apply: Callable, probe, cfg: StencilConfig) -> float:
    """``|d_t^2 u - A u|`` at ``probe = (t, point)``.

    ``solution(t, point)`` gives ``u``; ``operator_apply(f, point, cfg)``
    applies the spatial operator to ``f = u(t, .)``.
    """
    t, p = probe
    dt = cfg.temporal_step
    if not t - cfg.reach * dt > 0:
        raise StencilError("time stencil reaches t <= 0")
    c, _, utt = _derivs_1d(lambda s: _evaluate(lambda q: solution(q, p), s), float(t), dt, cfg.order)
    Au = operator_apply(lambda q: solution(t, q), p, cfg)
    return float(abs(utt - Au))


def convergence_order(measure: Callable[[StencilConfig], float], cfg: StencilConfig,
                      levels: int = 2) -> tuple[float, list[float]]:
    """Observed order ``log2(e(h)/e(h/2))`` for the last halving, and all errors."""
    errs = []
    c = cfg
    for _ in range(levels):
        errs.append(measure(c))
        c = c.halved()
    if errs[-1] == 0:
        return (math.inf if errs[-2] > 0 else 0.0), errs
    return math.log2(errs[-2] / errs[-1]), errs


def intertwining_check(f, w, k, cfg: StencilConfig = StencilConfig(),
                       halfplane_k: float | None = None) -> float:
    """``|U_k D~_{k'} U_k^{-1} f - D_k f|`` at ``w`` with ``k' = -k`` by default.

    ``U_k g(w) = ((1 - conj w)/(1 - w))^k g(c^{-1} w)`` and
    ``U_k^{-1} f(z) = ((i - conj z)/(z + i))^k f(c z)``. With this gauge
    the half-plane operator that corresponds to ``D_k`` carries ``-k``.
    """
    kk = float(geo.as_magnetic(k).k)
    kh = -kk if halfplane_k is None else float(halfplane_k)
    w = complex(w)
    z = geo.cayley_inv(w).z

    def pulled_back(zz):
        zz = np.asarray(zz, dtype=complex)
        return geo.cayley_gauge_inv(kk, zz) * _evaluate(f, geo.cayley_array(zz))

    # the half-plane stencil uses the same hyperbolic resolution as the disc one
    hz = cfg.spatial_step * 2 * z.imag / (1 - abs(w) ** 2)
    cfg_h = StencilConfig(hz, cfg.temporal_step, cfg.order)
    lhs = complex(geo.cayley_gauge(kk, w)) * apply_halfplane_operator(pulled_back, z, kh, cfg_h)
    rhs = apply_disc_operator(f, w, kk, cfg)
    return float(abs(lhs - rhs))


def fourier_transform_x(F: np.ndarray, xs: np.ndarray, lam: float) -> complex:
    """``(2 pi)^{-1/2} int e^{-i lam x} F(x) dx`` by the trapezoid rule."""
    dx = xs[1] - xs[0]
    vals = np.exp(-1j * lam * xs) * F
    return complex((vals.sum() - 0.5 * (vals[0] + vals[-1])) * dx / math.sqrt(2 * math.pi))


def fourier_connection_check(phi, y: float, lam: float, k, cfg: StencilConfig = StencilConfig(),
                             scale: float = 1.0, nodes: int = 257) -> float:
    """Discrepancy in ``F[y^{-1/2} D~_k y^{1/2} phi](lam) = Lambda^{lam,k} F[phi](lam)``.

    ``phi(z)`` must decay in ``x``; the transform uses ``x in [-L, L]`` with
    ``L = 8 scale``. The left side applies the half-plane operator by
    differences and transforms; the right side transforms and applies the
    Morse operator (in ``y``) by differences.
    """
    L = 8.0 * scale
    xs = np.linspace(-L, L, nodes)
    kk = float(geo.as_magnetic(k).k)

    def lifted(z):
        z = np.asarray(z, dtype=complex)
        return np.sqrt(z.imag) * _evaluate(phi, z)

    # transform-then-operate: one function of y
    def transformed(yy):
        yy = np.atleast_1d(np.asarray(yy, dtype=float))
        out = np.empty(yy.shape, dtype=complex)
        for i, yi in enumerate(yy):
            out[i] = fourier_transform_x(_evaluate(phi, xs + 1j * yi), xs, lam)
        return out

    rhs = apply_morse_operator_y(transformed, y, lam, kk,
                                 StencilConfig(cfg.spatial_step, cfg.temporal_step, cfg.order))
    scaled = StencilConfig(cfg.spatial_step * y, cfg.temporal_step, cfg.order)
    F = np.array([apply_halfplane_operator(lifted, x + 1j * y, kk, scaled) for x in xs])
    lhs = fourier_transform_x(F / math.sqrt(y), xs, lam)
    return float(abs(lhs - rhs))


# ---------------------------------------------------------------------------
# Exact substitution check on Laurent monomials
# ---------------------------------------------------------------------------

Laurent = dict  # exponent (Fraction) -> coefficient (Fraction)


def _lmul(p: Laurent, coeff, shift) -> Laurent:
    return {e + shift: c * coeff for e, c in p.items()}


def _ladd(*ps: Laurent) -> Laurent:
    out: Laurent = {}
    for p in ps:
        for e, c in p.items():
            out[e] = out.get(e, Fraction(0)) + c
    return {e: c for e, c in out.items() if c != 0}


def _lder(p: Laurent) -> Laurent:
    return {e - 1: c * e for e, c in p.items() if c * e != 0}


def radial_y_operator(p: Laurent, k) -> Laurent:
    """``[y(y-1) d^2 + (2y-1) d + k^2/y + 1/4] p``, exactly."""
    k = Fraction(k)
    d1, d2 = _lder(p), _lder(_lder(p))
    return _ladd(_lmul(d2, 1, 2), _lmul(d2, -1, 1), _lmul(d1, 2, 1), _lmul(d1, -1, 0),
                 _lmul(p, k * k, -1), _lmul(p, Fraction(1, 4), 0))


def reduced_y_operator(p: Laurent, k) -> Laurent:
    """``[y(y-1) d^2 + y d - (1 - 4k^2)/(4y)] p``, exactly."""
    k = Fraction(k)
    d1, d2 = _lder(p), _lder(_lder(p))
    return _ladd(_lmul(d2, 1, 2), _lmul(d2, -1, 1), _lmul(d1, 1, 1),
                 _lmul(p, -(1 - 4 * k * k) / 4, -1))


def substitution_check(n: int, k) -> tuple[Laurent, Laurent]:
    """Both sides of ``y^{1/2} l_y^k y^{-1/2} y^n = J_k y^n`` as exact Laurent polynomials."""
    half = Fraction(1, 2)
    mono = {Fraction(n): Fraction(1)}
    lhs = _lmul(radial_y_operator(_lmul(mono, 1, -half), k), 1, half)
    return lhs, reduced_y_operator(mono, k)


def eval_laurent(p: Laurent, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return sum(float(c) * y ** float(e) for e, c in p.items()) if p else np.zeros_like(y)


def substitution_check_float(n: int, k: float, ys: Sequence[float],
                             cfg: StencilConfig | None = None) -> float:
    """Max relative gap between both sides in floating point.

    By default ``l_y`` acts on ``y^{n-1/2}`` through the power rule, so the
    gap measures only rounding. With ``cfg`` the derivatives are taken by
    central differences instead (the gap then includes stencil error).
    """
    ys = np.asarray(ys, dtype=float)
    a = n - 0.5
    worst = 0.0
    for y in ys:
        if cfg is None:
            c, d1, d2 = y**a, a * y ** (a - 1), a * (a - 1) * y ** (a - 2)
        else:
            c, d1, d2 = _derivs_1d(lambda v: np.asarray(v, dtype=complex) ** a, y,
                                   cfg.spatial_step * y, cfg.order)
        ly = y * (y - 1) * d2 + (2 * y - 1) * d1 + (k * k / y + 0.25) * c
        lhs = math.sqrt(y) * ly
        rhs = (n * (n - 1) * y * (y - 1) * y ** (n - 2) + n * y ** n
               - (1 - 4 * k * k) / (4 * y) * y**n)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


# ---------------------------------------------------------------------------
# Leapfrog evolution oracles
# ---------------------------------------------------------------------------

def _leapfrog(u1: np.ndarray, apply_L: Callable[[np.ndarray], np.ndarray], dt: float, steps: int):
    """``u_tt = L u`` with ``u(0) = 0``, ``u_t(0) = u1``, returning ``u(steps * dt)``."""
    prev = np.zeros_like(u1)
    cur = dt * u1 + dt**3 / 6 * apply_L(u1)
    for _ in range(steps - 1):
        nxt = 2 * cur - prev + dt * dt * apply_L(cur)
        prev, cur = cur, nxt
    return cur


def fd_evolve_halfplane(u1, k, t_end: float, box, h: float, cfl: float = 0.25,
                        steps: int | None = None):
    """Leapfrog for ``u_tt = D~_k u`` on a Cartesian grid with zero boundary.

    ``box = (x0, x1, y0, y1)`` with ``y0 > 0``. The box should contain the
    ball of radius ``support + t_end`` about the data so the boundary sees
    nothing before ``t_end``. Returns ``(xs, ys, U)`` at ``t_end``.
    """
    x0, x1, y0, y1 = box
    if not y0 > 0:
        raise DomainError("the grid must stay in y > 0")
    nx = int(round((x1 - x0) / h))
    ny = int(round((y1 - y0) / h))
    xs = x0 + h * np.arange(nx + 1)
    ys = y0 + h * np.arange(ny + 1)
    Xg, Yg = np.meshgrid(xs, ys, indexing="ij")
    kk = float(geo.as_magnetic(k).k)
    U1 = _evaluate(u1, Xg + 1j * Yg)
    U1[0, :] = U1[-1, :] = U1[:, 0] = U1[:, -1] = 0
    y2 = Yg[1:-1, 1:-1] ** 2
    yy = Yg[1:-1, 1:-1]

    def apply_L(U):
        out = np.zeros_like(U)
        c = U[1:-1, 1:-1]
        lap = (U[2:, 1:-1] + U[:-2, 1:-1] + U[1:-1, 2:] + U[1:-1, :-2] - 4 * c) / h**2
        dx = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2 * h)
        out[1:-1, 1:-1] = y2 * lap + 2j * kk * yy * dx + 0.25 * c
        return out

    if steps is None:
        steps = max(1, int(math.ceil(t_end * y1 / (cfl * h))))
    elif t_end / steps > cfl * h / y1 * (1 + 1e-9):
        raise ParameterError("time step violates the CFL bound")
    return xs, ys, _leapfrog(U1, apply_L, t_end / steps, steps)


def fd_evolve_morse(w1, lam: float, k, t_end: float, X_range, h: float, cfl: float = 0.25,
                    steps: int | None = None):
    """Leapfrog for ``w_tt = Lambda^{lam,k} w`` on ``X_range`` with zero boundary."""
    X0, X1 = X_range
    n = int(round((X1 - X0) / h))
    Xs = X0 + h * np.arange(n + 1)
    kk = float(geo.as_magnetic(k).k)
    V = morse_potential(Xs[1:-1], lam, kk)
    W1 = _evaluate(w1, np.exp(Xs))
    W1[0] = W1[-1] = 0

    def apply_L(W):
        out = np.zeros_like(W)
        out[1:-1] = (W[2:] - 2 * W[1:-1] + W[:-2]) / h**2 + V * W[1:-1]
        return out

    vmax = float(np.max(np.abs(V))) if V.size else 0.0
    dt_max = cfl * h / math.sqrt(1 + h * h * vmax / 4)
    if steps is None:
        steps = max(1, int(math.ceil(t_end / dt_max)))
    elif t_end / steps > dt_max * (1 + 1e-9):
        raise ParameterError("time step violates the CFL bound")
    return Xs, _leapfrog(W1, apply_L, t_end / steps, steps)


def _halfplane_box(center: complex, reach: float, pad: float = 0.1):
    """Euclidean box around the hyperbolic ball of radius ``reach`` about ``center``."""
    x, y = center.real, center.imag
    return (x - y * math.sinh(reach) - pad, x + y * math.sinh(reach) + pad,
            y * math.exp(-reach) * 0.9, y * math.exp(reach) + pad)


def fd_checkpoint_halfplane(u1, k, t_end: float, probes, h: float, center: complex,
                            support_radius: float, margin: float = 0.3):
    """FD values at ``probes`` (half-plane points), Richardson over ``h, h/2``."""
    box = _halfplane_box(complex(center), support_radius + t_end + margin)
    # extend the box to whole multiples of h so both grids share nodes
    x0, x1, y0, y1 = box
    box = (x0, x0 + h * math.ceil((x1 - x0) / h), y0, y0 + h * math.ceil((y1 - y0) / h))
    steps = int(math.ceil(t_end * box[3] / (0.25 * h)))
    probes = np.asarray(probes, dtype=complex)
    pts = np.stack([probes.real, probes.imag], axis=-1)
    out = []
    for refine in (1, 2):
        xs, ys, U = fd_evolve_halfplane(u1, k, t_end, box, h / refine, steps=refine * steps)
        re = RegularGridInterpolator((xs, ys), U.real, method="cubic")(pts)
        im = RegularGridInterpolator((xs, ys), U.imag, method="cubic")(pts)
        out.append(re + 1j * im)
    return (4 * out[1] - out[0]) / 3


def fd_checkpoint_morse(w1, lam: float, k, t_end: float, probes_y, h: float, center_y: float,
                        support_radius: float, margin: float = 0.5):
    """FD values at ``probes_y``, Richardson over ``h, h/2``."""
    Xc = math.log(center_y)
    reach = support_radius + t_end + margin
    X_range = (Xc - reach, Xc - reach + h * math.ceil(2 * reach / h))
    Xp = np.log(np.asarray(probes_y, dtype=float))
    vmax = float(np.max(np.abs(morse_potential(np.array(X_range), lam, float(geo.as_magnetic(k).k)))))
    steps = int(math.ceil(t_end * math.sqrt(1 + h * h * vmax / 4) / (0.25 * h)))
    out = []
    for refine in (1, 2):
        Xs, W = fd_evolve_morse(w1, lam, k, t_end, X_range, h / refine, steps=refine * steps)
        out.append(CubicSpline(Xs, W.real)(Xp) + 1j * CubicSpline(Xs, W.imag)(Xp))
    return (4 * out[1] - out[0]) / 3
