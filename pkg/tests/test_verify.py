import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from hyperwave import cauchy, checks, verify as vf
from hyperwave.errors import ParameterError, StencilError

CFG = vf.StencilConfig(1e-3, 1e-3)


def one(p):
    return np.ones_like(np.asarray(p, dtype=complex))


# -- operator examples ----------------------------------------------------------------

def test_disc_operator_on_constants():
    assert abs(vf.apply_disc_operator(one, 0.3 - 0.2j, 0, CFG) - 0.25) < 1e-12
    for k in (0.5, 1.3):
        w = 0.4 + 0.1j
        expected = -k * k * abs(w) ** 2 + k * k + 0.25
        assert abs(vf.apply_disc_operator(one, w, k, CFG) - expected) < 1e-12


def test_disc_operator_on_w_bar():
    # D_k conj(w): Laplacian vanishes, (Y d_X - X d_Y) conj(w) = Y + iX = i conj(w)
    w, k = 0.3 + 0.4j, 0.7
    s = 1 - abs(w) ** 2
    expected = 1j * k * s * 1j * np.conj(w) + (k * k * s + 0.25) * np.conj(w)
    got = vf.apply_disc_operator(lambda p: np.conj(p), w, k, CFG)
    assert abs(got - expected) < 1e-10


def test_radial_operator_examples():
    for k in (0, 0.5, 2):
        r = 0.9
        assert abs(vf.apply_radial_operator(lambda x: np.ones_like(x), r, k, CFG)
                   - (k * k / math.cosh(r / 2) ** 2 + 0.25)) < 1e-12
    # d_r^2 cosh^2(r/2) = cosh(r)/2 and coth(r) d_r cosh^2(r/2) = cosh(r)/2
    for r in (0.5, 1.0, 2.0):
        exact = math.cosh(r) + 0.25 * math.cosh(r / 2) ** 2
        got = vf.apply_radial_operator(lambda x: np.cosh(np.asarray(x) / 2) ** 2, r, 0, CFG)
        assert abs(got - exact) < 1e-6 * exact


def test_radial_operator_rejects_small_r():
    with pytest.raises(StencilError):
        vf.apply_radial_operator(lambda x: x, 2e-3, 0, CFG)


def test_disc_operator_restricted_to_radial_fields():
    g = lambda r: np.exp(-np.asarray(r) ** 2) * np.cos(np.asarray(r))  # noqa: E731

    def f(w):
        return g(2 * np.arctanh(np.abs(np.asarray(w, dtype=complex))))

    for k in (0.0, 0.8):
        diffs = []
        for h in (4e-3, 2e-3):
            c = vf.StencilConfig(h, h)
            r = 0.7
            w = math.tanh(r / 2) * cmath.exp(0.4j)
            # the disc step h corresponds to ~2h/(1 - |w|^2) in r
            cr = vf.StencilConfig(2 * h / (1 - abs(w) ** 2), h)
            diffs.append(abs(vf.apply_disc_operator(f, w, k, c) - vf.apply_radial_operator(g, r, k, cr)))
        assert diffs[1] < 1e-4
        assert diffs[0] / diffs[1] > 3.0


def test_halfplane_operator_examples():
    z = 0.3 + 1.4j
    assert abs(vf.apply_halfplane_operator(one, z, 0.7, CFG) - 0.25) < 1e-12
    lam, k = 1.3, 0.6
    f = lambda p: np.exp(1j * lam * np.asarray(p).real)  # noqa: E731
    y = z.imag
    expected = (-lam**2 * y**2 - 2 * k * lam * y + 0.25) * f(z)
    assert abs(vf.apply_halfplane_operator(f, z, k, CFG) - expected) < 1e-5
    sq = lambda p: np.sqrt(np.asarray(p).imag)  # noqa: E731
    assert abs(vf.apply_halfplane_operator(sq, z, 0.0, CFG)) < 1e-6


def test_halfplane_stencil_guard():
    with pytest.raises(StencilError):
        vf.apply_halfplane_operator(one, 1 + 5e-4j, 0, CFG)
    with pytest.raises(StencilError):
        vf.apply_disc_operator(one, 0.9995, 0, CFG)


def test_morse_operator_examples():
    X, lam = 0.3, 0.8
    got = vf.apply_morse_operator(lambda x: np.ones_like(x), X, lam, 0.5, CFG)
    assert abs(got - (-2 * 0.5 * lam * math.exp(X) - lam**2 * math.exp(2 * X))) < 1e-12
    g = lambda x: np.exp(-lam * np.exp(x))  # noqa: E731
    exact = -2 * lam * math.exp(X) * g(X)
    assert abs(vf.apply_morse_operator(g, X, lam, 0.5, CFG) - exact) < 1e-6


def test_morse_operator_y_form_agrees():
    lam, k = 1.1, 1.0
    G = lambda x: np.exp(-0.5 * np.asarray(x) ** 2) * (1 + 0.3j * np.asarray(x))  # noqa: E731
    for X in (-0.5, 0.2, 0.9):
        a = vf.apply_morse_operator(G, X, lam, k, CFG)
        b = vf.apply_morse_operator_y(lambda y: G(np.log(np.asarray(y, dtype=float))), math.exp(X), lam, k, CFG)
        assert abs(a - b) < 1e-5


def test_stencil_config_validation():
    with pytest.raises(ParameterError):
        vf.StencilConfig(0, 1e-3)
    with pytest.raises(ParameterError):
        vf.StencilConfig(1e-3, 1e-3, 3)
    assert vf.StencilConfig(1e-3, 1e-3).halved().spatial_step == 5e-4


def test_fourth_order_stencil_is_more_accurate():
    f = lambda p: np.exp(np.asarray(p).real * 0.7) * np.cos(np.asarray(p).imag)  # noqa: E731
    z = 0.2 + 1.1j
    exact = (1.1**2 * (0.49 - 1) + 0.25) * f(z)
    e2 = abs(vf.apply_halfplane_operator(f, z, 0, vf.StencilConfig(1e-2, 1e-2, 2)) - exact)
    e4 = abs(vf.apply_halfplane_operator(f, z, 0, vf.StencilConfig(1e-2, 1e-2, 4)) - exact)
    assert e4 < e2 / 100


# -- residuals -------------------------------------------------------------------------

def test_zero_solution_residual():
    zero = lambda t, p: 0j  # noqa: E731
    op = lambda f, p, c: vf.apply_disc_operator(f, p, 0.5, c)  # noqa: E731
    assert vf.pde_residual(zero, op, (1.0, 0.1), CFG) == 0


def test_exact_plane_wave_residual_converges():
    # u = sin(t) y^s solves u_tt = D~_0 u when y^2 d_y^2 y^s + 1/4 y^s = -y^s
    s = 0.5 + 1j  # s(s-1) + 1/4 = -1 gives s = 1/2 +- i
    def u(t, p):
        return np.sin(t) * np.asarray(p).imag ** s
    op = lambda f, p, c: vf.apply_halfplane_operator(f, p, 0.0, c)  # noqa: E731
    order, errs = vf.convergence_order(lambda c: vf.pde_residual(u, op, (0.7, 0.2 + 1.3j), c),
                                       vf.StencilConfig(2e-2, 2e-2))
    assert errs[-1] < 1e-4
    assert order > 1.8


@pytest.mark.parametrize("k", [0.0, 0.5, 1.0])
def test_kernel_pde_orders(k):
    for wp, w, t in checks.pde_probe_configs(3, seed=5):
        o1, o2, e1, e2 = checks.kernel_pde_orders(wp, w, t, k)
        assert o1 >= 1.8 and o2 >= 1.8


def test_kernel_fails_pde_in_wrong_source_operator():
    wp, w, t = checks.pde_probe_configs(1, seed=5)[0]
    k = 1.0
    u = checks._kernel_solution(target=w, k=k)
    op = lambda f, p, c: vf.apply_disc_operator(f, p, k, c)  # noqa: E731
    _, errs = vf.convergence_order(lambda c: vf.pde_residual(u, op, (t, wp), c),
                                   vf.StencilConfig(1e-2, 1e-2))
    assert errs[-1] > 1e-2


def test_solution_residual_second_order():
    # u from the solver for a smooth bump, k = 0, evaluated at an interior point
    u1 = cauchy.bump("disc", 0j, 0.5)
    cfg = cauchy.QuadratureConfig(tolerance=1e-12)
    sol = lambda t, p: np.vectorize(lambda q: cauchy.solve_disc(t, q, u1, 0.0, cfg))(p)  # noqa: E731
    op = lambda f, p, c: vf.apply_disc_operator(f, p, 0.0, c)  # noqa: E731
    order, errs = vf.convergence_order(lambda c: vf.pde_residual(sol, op, (0.3, 0.05), c),
                                       vf.StencilConfig(2e-2, 2e-2))
    assert 4 - 0.5 <= errs[0] / errs[1] <= 4 + 0.5


def test_convergence_order_helper():
    order, errs = vf.convergence_order(lambda c: 3 * c.spatial_step**2, vf.StencilConfig(0.1, 0.1), 3)
    assert abs(order - 2) < 1e-12 and len(errs) == 3


# -- intertwining ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,w", [(0.0, 0.1 + 0.2j), (1.0, 0.2 + 0.1j), (0.5, -0.3j)])
def test_intertwining_second_order(k, w):
    f = checks.smooth_disc_field()
    order, errs = vf.convergence_order(lambda c: vf.intertwining_check(f, w, k, c),
                                       vf.StencilConfig(1e-2, 1e-2), 3)
    assert order >= 1.8
    assert errs[-1] < 1e-4


def test_intertwining_zero_field():
    zero = lambda p: np.zeros_like(np.asarray(p, dtype=complex))  # noqa: E731
    assert vf.intertwining_check(zero, 0.3, 1.0, CFG) == 0


def test_intertwining_with_same_sign_fails():
    f = checks.smooth_disc_field()
    err = vf.intertwining_check(f, 0.2 + 0.1j, 1.0, vf.StencilConfig(1e-3, 1e-3), halfplane_k=1.0)
    assert err > 1e-2


# -- Fourier connection -----------------------------------------------------------------------

def test_fourier_transform_of_gaussian():
    xs = np.linspace(-12, 12, 801)
    for lam in (0.0, 0.7, 2.0):
        got = vf.fourier_transform_x(np.exp(-xs**2 / 2), xs, lam)
        assert abs(got - math.exp(-lam**2 / 2)) < 1e-13


def test_fourier_connection_zero_field():
    zero = lambda p: np.zeros_like(np.asarray(p, dtype=complex))  # noqa: E731
    assert vf.fourier_connection_check(zero, 1.0, 1.0, 0.5, CFG) == 0


@pytest.mark.parametrize("k", [0.0, 0.5])
def test_fourier_connection(k):
    phi = checks.gaussian_bump_field()
    for lam in (0.5, 1.0, 2.0):
        order, errs = vf.convergence_order(lambda c: vf.fourier_connection_check(phi, 1.1, lam, k, c),
                                           vf.StencilConfig(2e-3, 2e-3), 3)
        assert errs[1] <= 1e-6
        assert order >= 1.8


# -- substitution check ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [-3, 0, 1, 2, 5])
@pytest.mark.parametrize("k", [0, Fraction(1, 2), Fraction(3, 10), 2])
def test_substitution_exact(n, k):
    lhs, rhs = vf.substitution_check(n, k)
    assert lhs == rhs


def test_substitution_exact_detects_wrong_shift():
    # conjugating with y^{+1/2} instead of y^{-1/2} breaks the identity
    mono = {Fraction(2): Fraction(1)}
    wrong = vf._lmul(vf.radial_y_operator(vf._lmul(mono, 1, Fraction(1, 2)), 1), 1, -Fraction(1, 2))
    assert wrong != vf.reduced_y_operator(mono, 1)


@pytest.mark.parametrize("n,k", [(0, 0.0), (2, 0.5), (3, 1.3), (-1, 0.7)])
def test_substitution_float(n, k):
    assert vf.substitution_check_float(n, k, [0.3, 0.8, 1.5, 2.7]) <= 1e-10


def test_substitution_float_with_differences():
    cfg = vf.StencilConfig(1e-2, 1e-2, 4)
    assert vf.substitution_check_float(2, 0.5, [0.8, 1.5], cfg) <= 1e-7


def test_eval_laurent():
    p = {Fraction(2): Fraction(3), Fraction(-1, 2): Fraction(1)}
    assert vf.eval_laurent(p, 4.0) == pytest.approx(48.5)


# -- leapfrog oracles -----------------------------------------------------------------------------

def test_leapfrog_harmonic_oscillator():
    # u'' = -u, u(0) = 0, u'(0) = 1  ->  sin t
    u1 = np.array([1.0 + 0j])
    out = vf._leapfrog(u1, lambda u: -u, 1e-3, 1000)
    assert abs(out[0] - math.sin(1.0)) < 1e-6


def test_fd_evolve_rejects_cfl_violation():
    u1 = cauchy.bump("halfplane", 1j, 0.5)
    with pytest.raises(ParameterError):
        vf.fd_evolve_halfplane(u1, 0, 0.5, (-1, 1, 0.3, 2), 0.05, steps=2)


def test_fd_morse_checkpoint_small_matches_solver():
    w1 = checks.standard_bump("morse")
    probes = [1.0, 1.3]
    fd = vf.fd_checkpoint_morse(w1, 1.0, 0.0, 0.5, probes, 0.01, 1.0, checks.STANDARD_BUMP_RADIUS)
    qs = np.array([cauchy.solve_morse(0.5, y, w1, 1.0, 0.0) for y in probes])
    assert np.max(np.abs(fd - qs)) / np.max(np.abs(qs)) < 1e-3
