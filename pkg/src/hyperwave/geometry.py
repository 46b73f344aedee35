"""Poincare disc and upper half-plane: points, distances, measures, maps.

Distances are computed from the sinh form of the cosh^2 identities
(``sinh^2(d/2) = |w - w'|^2 / ((1-|w|^2)(1-|w'|^2))`` and the half-plane
analogue) so short distances keep full relative precision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

BOUNDARY_GUARD = 1e-8


@dataclass(frozen=True)
class DiscPoint:
    w: complex

    def __post_init__(self):
        w = complex(self.w)
        object.__setattr__(self, "w", w)
        if not abs(w) < 1:
            raise DomainError(f"{w} is not in the unit disc")
        if abs(w) > 1 - BOUNDARY_GUARD:
            raise DomainError(f"{w} is within {BOUNDARY_GUARD:g} of the disc boundary")

    def __complex__(self):
        return self.w


@dataclass(frozen=True)
class HalfPlanePoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if not z.imag > 0:
            raise DomainError(f"{z} is not in the upper half-plane")
        if z.imag < BOUNDARY_GUARD:
            raise DomainError(f"{z} is within {BOUNDARY_GUARD:g} of the real axis")

    def __complex__(self):
        return self.z


@dataclass(frozen=True)
class MagneticParameter:
    """Field strength ``k``; ``is_half_integral`` iff ``2k`` is an integer."""

    k: float

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))

    @property
    def is_half_integral(self) -> bool:
        return float(2 * self.k).is_integer()

    @property
    def order(self) -> int:
        """``2|k|`` as an integer; only defined for half-integral ``k``."""
        if not self.is_half_integral:
            raise ValueError(f"k = {self.k} is not half-integral")
        return int(round(2 * abs(self.k)))

    @property
    def sign(self) -> int:
        """sign(k) with the convention sign(0) = +1."""
        return -1 if self.k < 0 else 1

    def __float__(self):
        return self.k


def as_disc(w) -> complex:
    return w.w if isinstance(w, DiscPoint) else DiscPoint(w).w


def as_halfplane(z) -> complex:
    return z.z if isinstance(z, HalfPlanePoint) else HalfPlanePoint(z).z


def as_magnetic(k) -> MagneticParameter:
    return k if isinstance(k, MagneticParameter) else MagneticParameter(k)


# -- distances -------------------------------------------------------------

def disc_sinh2_half(w, w2):
    """``sinh^2(d/2)`` for disc points; accepts numpy arrays of complex."""
    w = np.asarray(w, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    return np.abs(w - w2) ** 2 / ((1 - np.abs(w) ** 2) * (1 - np.abs(w2) ** 2))


def halfplane_sinh2_half(z, z2):
    """``sinh^2(rho/2)`` for half-plane points; accepts numpy arrays."""
    z = np.asarray(z, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.abs(z - z2) ** 2 / (4 * z.imag * z2.imag)


def disc_distance(w, w2) -> float:
    """Hyperbolic distance for the metric ``4|dw|^2/(1-|w|^2)^2``."""
    s2 = float(disc_sinh2_half(as_disc(w), as_disc(w2)))
    return 2 * math.asinh(math.sqrt(s2))


def halfplane_distance(z, z2) -> float:
    """Hyperbolic distance for the metric ``(dx^2 + dy^2)/y^2``."""
    s2 = float(halfplane_sinh2_half(as_halfplane(z), as_halfplane(z2)))
    return 2 * math.asinh(math.sqrt(s2))


# -- maps ------------------------------------------------------------------

def cayley(z) -> DiscPoint:
    """``w = (z - i)/(z + i)``, half-plane to disc."""
    z = as_halfplane(z)
    return DiscPoint((z - 1j) / (z + 1j))


def cayley_inv(w) -> HalfPlanePoint:
    """``z = -i (w + 1)/(w - 1)``, disc to half-plane."""
    w = as_disc(w)
    return HalfPlanePoint(-1j * (w + 1) / (w - 1))


def cayley_array(z):
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def cayley_inv_array(w):
    w = np.asarray(w, dtype=complex)
    return -1j * (w + 1) / (w - 1)


def gw_matrix(base) -> np.ndarray:
    """SU(1,1) matrix of ``g_b``: [[1, b], [conj b, 1]] / sqrt(1 - |b|^2)."""
    b = as_disc(base)
    s = 1 / math.sqrt(1 - abs(b) ** 2)
    return np.array([[s, b * s], [np.conj(b) * s, s]], dtype=complex)


def mobius_gw(base, w) -> DiscPoint:
    """Apply ``g_base`` to ``w``; ``g_base(0) = base``."""
    return DiscPoint(mobius_gw_array(as_disc(base), as_disc(w)))


def mobius_gw_array(base: complex, w):
    w = np.asarray(w, dtype=complex)
    return (w + base) / (np.conj(base) * w + 1)


def mobius_gw_inv_array(base: complex, w):
    w = np.asarray(w, dtype=complex)
    return (w - base) / (1 - np.conj(base) * w)


# -- phases ----------------------------------------------------------------

def phase_disc(k, w, w2) -> complex:
    """``((1 - conj(w) w2) / (1 - w conj(w2)))^k``, principal branch.

    This orientation is the one under which the translated disc kernel
    solves the wave equation in ``w`` for D_k and in ``w2`` for D_{-k}.
    """
    k = as_magnetic(k).k
    return complex(phase_disc_array(k, as_disc(w), as_disc(w2)))


def phase_disc_array(k: float, w, w2):
    w = np.asarray(w, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    # 1 - conj(w) w2 from real parts, so that w == w2 gives an exactly real value
    num = (1 - (w.real * w2.real + w.imag * w2.imag)) - 1j * (w.real * w2.imag - w.imag * w2.real)
    # the denominator is conj(num), so the base is num^2/|num|^2
    return np.exp(1j * k * np.angle(num * num))


def phase_halfplane(k, z, z2) -> complex:
    """``((conj(z2) - z) / (conj(z) - z2))^k``, principal branch.

    Unimodular. The base is the reciprocal of the one printed next to the
    half-plane kernel in the source; only this orientation makes the
    kernel satisfy the half-plane wave equation (see tests).
    """
    k = as_magnetic(k).k
    return complex(phase_halfplane_array(k, as_halfplane(z), as_halfplane(z2)))


def phase_halfplane_array(k: float, z, z2):
    z = np.asarray(z, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    num = np.conj(z2) - z
    # conj(z) - z2 = -conj(num), so the base is -num^2/|num|^2
    return np.exp(1j * k * np.angle(-(num * num)))


def cayley_gauge(k, w):
    """Multiplier ``((1 - conj w)/(1 - w))^k`` of the Cayley unitary U_k."""
    w = np.asarray(w, dtype=complex)
    base = (1 - np.conj(w)) / (1 - w)
    return (base / np.abs(base)) ** float(k)


def cayley_gauge_inv(k, z):
    """Multiplier ``((i - conj z)/(z + i))^k`` of U_k^{-1}."""
    z = np.asarray(z, dtype=complex)
    base = (1j - np.conj(z)) / (z + 1j)
    return (base / np.abs(base)) ** float(k)


# -- measures --------------------------------------------------------------

def measure_density_disc(w) -> float:
    w = as_disc(w)
    return 4.0 / (1 - abs(w) ** 2) ** 2


def measure_density_halfplane(z) -> float:
    z = as_halfplane(z)
    return 1.0 / z.imag**2


# -- text form -------------------------------------------------------------

_COMPLEX_RE = re.compile(
    r"""^\s*
    (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
    (?:(?P<im>[+-]\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])?
    \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"`` (also ``"a"``, ``"bi"``, ``"a-bi"``, ``j`` for ``i``)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    m = _COMPLEX_RE.match(s)
    if m and (m.group("re") or m.group("im")):
        re_part = float(m.group("re")) if m.group("re") else 0.0
        im_txt = m.group("im")
        if im_txt is None:
            im_part = 0.0
        elif im_txt in ("+", "-"):
            im_part = 1.0 if im_txt == "+" else -1.0
        else:
            im_part = float(im_txt)
        return complex(re_part, im_part)
    # pure imaginary without sign, e.g. "2i" or "i"
    m = re.fullmatch(r"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij]", s)
    if m:
        return complex(0.0, float(m.group(1)) if m.group(1) else 1.0)
    raise ValueError(f"cannot parse complex literal {text!r}")


def format_complex(z: complex, digits: int = 17) -> str:
    z = complex(z)
    sign = "-" if (z.imag < 0 or (z.imag == 0 and math.copysign(1, z.imag) < 0)) else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"
