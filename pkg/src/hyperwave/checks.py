"""Verification suites: each returns a list of named, thresholded checks.

These compose the library functions into the reports emitted by
``hyperwave verify``. Sample counts default to quick settings; the test
suite runs the same identities at full size.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import cauchy, geometry as geo, kernels as kn, specialfn as sf, verify as vf

STANDARD_BUMP_RADIUS = 0.8


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    passed: bool
    comparison: str = "<="

    def as_dict(self) -> dict:
        return asdict(self)


def _le(name, measured, threshold) -> CheckResult:
    measured = float(measured)
    return CheckResult(name, measured, threshold, bool(measured <= threshold), "<=")


def _ge(name, measured, threshold) -> CheckResult:
    measured = float(measured)
    return CheckResult(name, measured, threshold, bool(measured >= threshold), ">=")


def random_disc_query_points(rng: np.random.Generator, t: float):
    """Source and target in the disc at hyperbolic distance below ``t``."""
    while True:
        wp = complex(*rng.uniform(-0.6, 0.6, 2))
        if abs(wp) > 0.7:
            continue
        d = t * rng.uniform(0.02, 0.98)
        local = math.tanh(d / 2) * np.exp(2j * math.pi * rng.uniform())
        w = complex(geo.mobius_gw_array(wp, local))
        if abs(w) < 0.95:
            return wp, w


def form_values(t, source, target, k, model="disc") -> dict:
    fn = kn.disc_kernel if model == "disc" else kn.halfplane_kernel
    mk = geo.as_magnetic(k)
    forms = [f for f in kn.FORMS if f != "chebyshev" or mk.is_half_integral]
    return {f: fn(kn.KernelQuery(t, source, target, mk, f)).value for f in forms}


def max_relative_spread(values: dict) -> float:
    vals = list(values.values())
    ref = max(abs(v) for v in vals)
    return max(abs(a - b) for a in vals for b in vals) / ref if ref else 0.0


def suite_forms(samples=200, seed=7, ks=(0, 0.3, 0.5, 1, 1.5), tolerance=1e-9, **_):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(samples):
        k = ks[i % len(ks)]
        t = rng.uniform(0.2, 3.0)
        wp, w = random_disc_query_points(rng, t)
        worst = max(worst, max_relative_spread(form_values(t, wp, w, k)))
    return [_le("forms.max_relative_spread", worst, tolerance)]


def _kernel_solution(source=None, target=None, k=0.0):
    """``u(t, p)`` = kernel with one endpoint free, vectorised over ``p``."""
    def u(t, p):
        tt, pp = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(p, dtype=complex))
        out = np.empty(tt.shape, dtype=complex)
        for idx in np.ndindex(tt.shape):
            s = source if source is not None else complex(pp[idx])
            g = target if target is not None else complex(pp[idx])
            out[idx] = kn.disc_kernel(kn.KernelQuery(float(tt[idx]), s, g, k)).value
        return out
    return u


def kernel_pde_orders(wp, w, t, k, h=1e-2):
    """Observed residual orders in the target (D_k) and source (D_{-k}) variables."""
    op_w = lambda f, p, c: vf.apply_disc_operator(f, p, k, c)  # noqa: E731
    op_wp = lambda f, p, c: vf.apply_disc_operator(f, p, -k, c)  # noqa: E731
    cfg = vf.StencilConfig(h, h)
    uw = _kernel_solution(source=wp, k=k)
    uwp = _kernel_solution(target=w, k=k)
    o1, e1 = vf.convergence_order(lambda c: vf.pde_residual(uw, op_w, (t, w), c), cfg)
    o2, e2 = vf.convergence_order(lambda c: vf.pde_residual(uwp, op_wp, (t, wp), c), cfg)
    return o1, o2, e1, e2


def pde_probe_configs(n, seed=11):
    """Interior configurations: distance between 30% and 70% of t."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        t = rng.uniform(0.8, 1.5)
        wp = complex(*rng.uniform(-0.3, 0.3, 2))
        d = t * rng.uniform(0.3, 0.7)
        w = complex(geo.mobius_gw_array(wp, math.tanh(d / 2) * np.exp(2j * math.pi * rng.uniform())))
        out.append((wp, w, t))
    return out


def suite_pde(k=0.5, samples=3, seed=11, **_):
    results = []
    for i, (wp, w, t) in enumerate(pde_probe_configs(samples, seed)):
        o1, o2, _, _ = kernel_pde_orders(wp, w, t, k)
        results.append(_ge(f"pde.order_target[{i}]", o1, 1.8))
        results.append(_ge(f"pde.order_source[{i}]", o2, 1.8))
    return results


def standard_bump(model="disc", center=None, radius=STANDARD_BUMP_RADIUS, amplitude=1.0):
    if center is None:
        center = {"disc": 0j, "halfplane": 1j, "morse": 1.0}[model]
    return cauchy.bump(model, center, radius, amplitude)


def suite_limits(k=0.0, samples=5, **_):
    u1 = standard_bump("disc")
    rng = np.random.default_rng(3)
    results = []
    for i in range(samples):
        p = 0j if i == 0 else complex(*rng.uniform(-0.2, 0.2, 2))
        res = cauchy.initial_condition_probe(cauchy.solve_disc, u1, k, point=p)
        results.append(_le(f"limits.value[{i}]", res.value_limit / u1.peak, 1e-3))
        results.append(_le(f"limits.derivative[{i}]", res.derivative_limit_error, 1e-2))
    return results


def smooth_disc_field(center=0.1 + 0.05j, width=4.0):
    def f(w):
        w = np.asarray(w, dtype=complex)
        return np.exp(-width * np.abs(w - center) ** 2) * (1 + 0.3 * w)
    return f


def suite_intertwine(k=1.0, **_):
    f = smooth_disc_field()
    order, errs = vf.convergence_order(
        lambda c: vf.intertwining_check(f, 0.2 + 0.1j, k, c), vf.StencilConfig(1e-2, 1e-2), 3)
    return [_ge("intertwine.order", order, 1.8)]


def gaussian_bump_field(width=1.0, y0=1.0, ry=0.6):
    def phi(z):
        z = np.asarray(z, dtype=complex)
        prof = cauchy.bump_profile(np.abs(z.imag - y0), ry)
        return np.exp(-z.real**2 / (2 * width**2)) * prof * (1 + 0.2j * z.real)
    return phi


def suite_fourier(k=0.5, lambdas=(0.5, 1.0, 2.0), **_):
    phi = gaussian_bump_field()
    results = []
    for lam in lambdas:
        order, errs = vf.convergence_order(
            lambda c: vf.fourier_connection_check(phi, 1.1, lam, k, c),
            vf.StencilConfig(2e-3, 2e-3), 3)
        results.append(_le(f"fourier.discrepancy[lam={lam}]", errs[1], 1e-6))
        results.append(_ge(f"fourier.order[lam={lam}]", order, 1.8))
    return results


MORSE_PAIRS = ((1.0, 1.2), (1.0, 0.9), (2.0, 2.5), (0.5, 0.6), (1.3, 1.0))


def morse_sweep(k, ts=(0.5, 1.0, 2.0), pairs=MORSE_PAIRS, lambdas=(0.5, 1.0, 3.0)):
    """Closed form / oracle pairs over the sweep, plus ``Z`` per query."""
    rows = []
    for t in ts:
        for y, y2 in pairs:
            for lam in lambdas:
                q = kn.MorseQuery(t, y, y2, lam, k)
                if not q.inside_cone:
                    continue
                rows.append((q, kn.morse_kernel(q).value, kn.morse_kernel_fourier_oracle(q)))
    return rows


def constant_phase_diagnostic(rows) -> tuple[complex, float]:
    """Best constant ``c`` with closed ~ c * oracle, and the residual spread after it."""
    a = np.array([r[1] for r in rows])
    b = np.array([r[2] for r in rows])
    c = complex(np.vdot(b, a) / np.vdot(b, b))
    return c, float(np.max(np.abs(a - c * b) / np.abs(b)))


def suite_morse_oracle(k=0.0, tolerance=1e-6, **_):
    rows = morse_sweep(k)
    rel = max(abs(a - b) / abs(b) for _, a, b in rows)
    results = [_le("morse.closed_vs_oracle", rel, tolerance)]
    if kn.MagneticParameter(k).k == 0:
        jz = max(max(abs(a - 0.5 * sf.bessel_j0(abs(q.lam) * q.Z)),
                     abs(b - 0.5 * sf.bessel_j0(abs(q.lam) * q.Z))) for q, a, b in rows)
        results.append(_le("morse.half_j0", jz, 1e-8))
    if rel > tolerance:
        c, spread = constant_phase_diagnostic(rows)
        if spread <= tolerance:
            results.append(CheckResult(
                f"morse.constant_phase_mismatch[arg={math.degrees(np.angle(c)):.6g}deg,"
                f"abs={abs(c):.6g}]", spread, tolerance, False))
    return results


def ilambda_draws(samples, seed):
    """Admissible (alpha, beta, Y, Z, lam), every third from the Morse family."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(samples):
        if i % 3 == 0:
            k = float(rng.choice([0.5, 1.0, 1.5, 2.0]))
            y, y2 = rng.uniform(0.3, 3.0, 2)
            t = rng.uniform(0.2, 2.0)
            z2 = 4 * y * y2 * math.cosh(t / 2) ** 2 - (y + y2) ** 2
            Z = math.sqrt(max(z2, 1e-2))
            out.append((-2 * k, 2 * k - 0.5, 1j * (y + y2), Z, rng.uniform(-5, 5)))
        else:
            if i % 2:
                alpha = complex(rng.uniform(-3, 2), rng.uniform(-1, 1))
            else:
                alpha = float(rng.integers(-3, 3))
            beta = rng.uniform(-0.9, 3.0)
            Y = complex(rng.uniform(-2, 2), rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 3.0))
            out.append((alpha, beta, Y, rng.uniform(0.2, 3.0), rng.uniform(-5, 5)))
    return out


def suite_ilambda(samples=100, seed=7, tolerance=1e-8, **_):
    worst = 0.0
    for alpha, beta, Y, Z, lam in ilambda_draws(samples, seed):
        closed = kn.i_lambda_closed(alpha, beta, Y, Z, lam)
        quad = kn.i_lambda_quad(alpha, beta, Y, Z, lam)
        worst = max(worst, abs(closed - quad) / abs(quad))
    return [_le("ilambda.max_relative_error", worst, tolerance)]


SUITES: dict[str, Callable[..., list]] = {
    "forms": suite_forms,
    "pde": suite_pde,
    "limits": suite_limits,
    "intertwine": suite_intertwine,
    "fourier": suite_fourier,
    "morse-oracle": suite_morse_oracle,
    "ilambda": suite_ilambda,
}
