"""Interaction supported on the circle through the source point.

A delta shell of coupling gamma on the circle (2D) or sphere latitude circle
(3D) of radius y0 resolves channel by channel.  Per-channel coefficients,
with the dimension's own bookkeeping convention,

    3D:  Gamma_m(z)  =  gamma - 2 pi sum_l |Y_l^m(eq)|^2 g_l(z; y0, y0),
    2D:  Gamma_n(z)  =  1/gamma - g_n(z; y0, y0),

enter the resolvent as correction weight 2 pi / Gamma.  gamma_from_alpha
computes the coupling whose circle operator reproduces, in the fast-rotation
limit, the point interaction of parameter alpha; beta_consistency measures
how far the two couplings are from each other at finite speed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._radial import radial_apply
from .greens import (
    KQuadrature,
    radial_kernel_2d,
    radial_kernel_3d,
    require_resolvent_energy,
)
from .pointint import KreinParam, RadialChannelFunction, ResonanceError, lambda_at
from .rotframe import PointSource, RotationSpec, Truncation
from .specfun import ChannelIndex2, ChannelIndex3, equatorial_weight

__all__ = [
    "CircleParam",
    "gamma_coeff_2d",
    "gamma_coeff_3d",
    "apply_circle_resolvent",
    "gamma_from_alpha",
    "beta_consistency",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CircleParam:
    """Circle interaction: coupling gamma on the radius-y0 circle."""

    gamma: float
    radius: float
    dim: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite and real, got {self.gamma}")
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")


def gamma_coeff_3d(
    m: int,
    cp: CircleParam,
    z: complex,
    l_max: int,
    q: KQuadrature | None = None,
    mode: str = "closed",
) -> complex:
    """Channel coefficient Gamma_m(z) of the 3D circle interaction."""
    if cp.dim != 3:
        raise ValueError("3D coefficient of a non-3D circle parameter")
    z = require_resolvent_energy(z)
    if l_max < abs(m):
        raise ValueError(f"l_max={l_max} below channel order |m|={abs(m)}")
    acc = 0.0 + 0.0j
    for l in range(abs(m), l_max + 1):
        wgt = equatorial_weight(l, m)
        if wgt == 0.0:
            continue
        acc += wgt * radial_kernel_3d(l, z, cp.radius, cp.radius, mode, q)
    return cp.gamma - 2.0 * math.pi * acc


def gamma_coeff_2d(
    n: int,
    cp: CircleParam,
    z: complex,
    q: KQuadrature | None = None,
    mode: str = "closed",
) -> complex:
    """Channel coefficient Gamma_n(z) of the 2D circle interaction."""
    if cp.dim != 2:
        raise ValueError("2D coefficient of a non-2D circle parameter")
    if cp.gamma == 0.0:
        raise ValueError("gamma = 0 has no 2D channel coefficient")
    z = require_resolvent_energy(z)
    return 1.0 / cp.gamma - radial_kernel_2d(n, z, cp.radius, cp.radius, mode, q)


def _gamma_for_channel(
    ch: ChannelIndex2 | ChannelIndex3,
    cp: CircleParam,
    z: complex,
    t: Truncation,
    mode: str,
) -> complex:
    if isinstance(ch, ChannelIndex2):
        return gamma_coeff_2d(ch.n, cp, z, t.quad, mode)
    return gamma_coeff_3d(ch.m, cp, z, t.require_l_max(), t.quad, mode)


def apply_circle_resolvent(
    dim: int,
    psi: RadialChannelFunction,
    cp: CircleParam,
    z: complex,
    t: Truncation,
    mode: str = "closed",
) -> RadialChannelFunction:
    """Apply the circle-interaction resolvent to a single-channel function.

    Returns the input channel's projection: the free part plus the channel's
    share of the shell correction, whose weight is exactly 2 pi / Gamma.  In
    3D the correction carries |Y_l0^m0(eq)|^2, so equatorially odd channels
    come back with the free part alone.
    """
    if dim != psi.dim or dim != cp.dim:
        raise ValueError("dimension mismatch between psi, circle parameter and dim")
    z = complex(z)
    if not z.imag > 0.0:
        raise ValueError("resolvent application needs Im z > 0")
    order = psi.order
    f = psi.interpolant()
    rmax = float(psi.grid[-1])
    free_vals = radial_apply(dim, order, z, psi.grid, f, rmax=rmax)
    gamma_ch = _gamma_for_channel(psi.channel, cp, z, t, mode)
    scale = max(abs(cp.gamma) if dim == 3 else abs(1.0 / cp.gamma), 1.0)
    if abs(gamma_ch) < 1e-12 * scale:
        raise ResonanceError(
            f"channel coefficient Gamma = {gamma_ch:.3g} vanishes at z={z}"
        )
    i_chi = complex(radial_apply(dim, order, z, np.array([cp.radius]), f, rmax=rmax)[0])
    if dim == 2:
        weight = 1.0 / gamma_ch  # (2 pi / Gamma) * (1/2 pi)
        corr = weight * i_chi * np.array(
            [radial_kernel_2d(order, z, r, cp.radius, mode, t.quad) for r in psi.grid]
        )
    else:
        wgt = equatorial_weight(psi.channel.l, psi.channel.m)
        weight = 2.0 * math.pi * wgt / gamma_ch
        corr = weight * i_chi * np.array(
            [radial_kernel_3d(order, z, r, cp.radius, mode, t.quad) for r in psi.grid]
        )
    return RadialChannelFunction(psi.channel, psi.grid, free_vals + corr, psi.weights)


def gamma_from_alpha(
    dim: int,
    alpha: float,
    y0: float,
    q: KQuadrature | None = None,
    l_max: int = 64,
    mode: str = "closed",
) -> float:
    """Circle coupling matched to a point interaction of parameter alpha.

    Real by construction: both dimensions reduce to
    tan(alpha/2) Im g + Re g evaluated at the reference parameter i on the
    circle radius, summed with equatorial weights in 3D.  alpha = pi has no
    finite matching coupling and is rejected.  The returned value slots into
    the dimension's own Gamma convention, so it can be used directly as
    CircleParam.gamma at the same truncation.
    """
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim}")
    if not (0.0 <= alpha < 2.0 * math.pi):
        raise ValueError(f"alpha must lie in [0, 2*pi), got {alpha}")
    if abs(alpha - math.pi) < 1e-12:
        raise ValueError("alpha = pi is the free case; no matching circle coupling")
    th = math.tan(0.5 * alpha)
    if dim == 2:
        g = radial_kernel_2d(0, 1j, y0, y0, mode, q)
        val = th * g.imag + g.real
        if abs(val) < 1e-300:
            raise ResonanceError("matching integral vanishes; coupling diverges")
        return 1.0 / val
    acc = 0.0
    for l in range(0, l_max + 1, 2):
        g = radial_kernel_3d(l, 1j, y0, y0, mode, q)
        acc += equatorial_weight(l, 0) * (th * g.imag + g.real)
    return 2.0 * math.pi * acc


def beta_consistency(
    dim: int,
    z: complex,
    alpha: float,
    rot: RotationSpec,
    src: PointSource,
    t: Truncation,
    channel: ChannelIndex2 | ChannelIndex3,
    mode: str = "closed",
) -> float:
    """Distance between the circle and point couplings on one channel.

    Compares 2 pi / Gamma_ch(z), with gamma matched to alpha at the same
    degree cap, against lambda(z - m0 omega, alpha) of the rotating point
    interaction.  Decays as the rotation speeds up.
    """
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim}")
    m0 = channel.n if isinstance(channel, ChannelIndex2) else channel.m
    l_cap = t.require_l_max() if dim == 3 else 64
    gam = gamma_from_alpha(dim, alpha, src.y0, t.quad, l_max=l_cap, mode=mode)
    cp = CircleParam(gam, src.y0, dim)
    gamma_ch = _gamma_for_channel(channel, cp, z, t, mode)
    beta = 2.0 * math.pi / gamma_ch
    lam = lambda_at(dim, z - m0 * rot.omega, KreinParam(alpha), rot, src, t, mode)
    return float(abs(beta - lam))
