"""Special functions on the complex upper half plane.

Everything downstream evaluates Bessel-type kernels at arguments w * r where
w is the upper square root of a spectral parameter, so the functions here are
written for complex arguments with Im >= 0 and validated there.  Real negative
arguments of the regular Bessel functions are handled by parity reflection
(the functions are entire); the outgoing Hankel combinations are only ever
called off the negative real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sp

__all__ = [
    "ChannelIndex2",
    "ChannelIndex3",
    "SingularArgumentError",
    "sqrt_upper",
    "sph_bessel_j",
    "sph_hankel1",
    "bessel_j",
    "hankel1",
    "sph_harm",
    "equatorial_weight",
]

# Beyond this the Bessel factors overflow double precision; callers are expected
# to stay within |Im x| <= 50 or so, this is a hard backstop.
_IM_MAX = 600.0


class SingularArgumentError(ValueError):
    """Evaluation requested at a singular point of the function."""


@dataclass(frozen=True)
class ChannelIndex3:
    """Angular channel (l, m) on the sphere."""

    l: int
    m: int

    def __post_init__(self) -> None:
        if self.l < 0:
            raise ValueError(f"degree must be nonnegative, got l={self.l}")
        if abs(self.m) > self.l:
            raise ValueError(f"order out of range: |m|={abs(self.m)} > l={self.l}")


@dataclass(frozen=True)
class ChannelIndex2:
    """Angular channel n on the circle."""

    n: int


def sqrt_upper(z: complex) -> complex:
    """Square root with branch chosen in the closed upper half plane.

    For z on the nonnegative real axis the root is the nonnegative real one;
    everywhere else Im of the result is strictly positive.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"nonfinite argument {z!r}")
    w = cmath.sqrt(z)
    if w.imag < 0.0 or (w.imag == 0.0 and w.real < 0.0):
        w = -w
    return w


def _check_arg(x: complex) -> complex:
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise ValueError(f"nonfinite argument {x!r}")
    if abs(x.imag) > _IM_MAX:
        raise OverflowError(
            f"|Im x| = {abs(x.imag):.3g} exceeds supported bound {_IM_MAX:g}"
        )
    return x


def sph_bessel_j(l: int, x: complex) -> complex:
    """Spherical Bessel function j_l at complex argument.

    Entire in x; the principal-branch square roots in the half-integer
    reduction cancel, and the negative real axis is covered by the parity
    j_l(-x) = (-1)^l j_l(x).
    """
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got l={l}")
    x = _check_arg(x)
    if x == 0:
        return 1.0 + 0.0j if l == 0 else 0.0 + 0.0j
    if x.real < 0.0:
        return (-1.0) ** l * sph_bessel_j(l, -x)
    if x.imag == 0.0:
        return complex(sp.spherical_jn(l, x.real))
    return complex(cmath.sqrt(math.pi / 2.0 / x) * sp.jv(l + 0.5, x))


def sph_hankel1(l: int, x: complex) -> complex:
    """Outgoing spherical Hankel function h_l^(1) at complex argument.

    Singular at x = 0.  Intended for arguments in the closed upper half plane
    away from the negative real axis, which is where the resolvent kernels
    evaluate it.
    """
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got l={l}")
    x = _check_arg(x)
    if x == 0:
        raise SingularArgumentError("h_l^(1) is singular at x = 0")
    return complex(cmath.sqrt(math.pi / 2.0 / x) * sp.hankel1(l + 0.5, x))


def bessel_j(n: int, x: complex) -> complex:
    """Bessel function J_n of integer order at complex argument."""
    x = _check_arg(x)
    if x.imag == 0.0 and x.real >= 0.0:
        return complex(sp.jv(n, x.real))
    if x.real < 0.0:
        # J_n is entire with parity (-1)^n; avoid the principal branch cut.
        return (-1.0) ** (n % 2) * bessel_j(n, -x)
    return complex(sp.jv(n, x))


def hankel1(n: int, x: complex) -> complex:
    """Hankel function H_n^(1) of integer order at complex argument."""
    x = _check_arg(x)
    if x == 0:
        raise SingularArgumentError("H_n^(1) is singular at x = 0")
    return complex(sp.hankel1(n, x))


def sph_harm(l: int, m: int, theta: float, phi: float) -> complex:
    """Orthonormal spherical harmonic Y_l^m(theta, phi), physics convention.

    theta is the polar angle from the positive axis, phi the azimuth.
    """
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got l={l}")
    if abs(m) > l:
        raise ValueError(f"order out of range: |m|={abs(m)} > l={l}")
    return complex(sp.sph_harm_y(l, m, theta, phi))


def equatorial_weight(l: int, m: int) -> float:
    """|Y_l^m(pi/2, 0)|^2 via log-gamma, stable to large degree.

    Zero whenever l + m is odd (the equatorial node of the associated
    Legendre function).
    """
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got l={l}")
    if abs(m) > l:
        return 0.0
    if (l + m) % 2 != 0:
        return 0.0
    lg = (
        math.log((2 * l + 1) / (4.0 * math.pi))
        + sp.gammaln(l - m + 1)
        + sp.gammaln(l + m + 1)
        - 2.0 * sp.gammaln((l + m) / 2 + 1)
        - 2.0 * sp.gammaln((l - m) / 2 + 1)
        - 2.0 * l * math.log(2.0)
    )
    return float(np.exp(lg))
