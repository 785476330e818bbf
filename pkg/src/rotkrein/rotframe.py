"""Resolvent of the rotating frame operator, channel by channel.

Rotation at angular speed omega enters each angular channel of the free
resolvent as an energy shift: channel m is evaluated at z + m*omega.  All
operations here take an explicit channel window (Truncation); the windowed
object is the thing computed, and the norm and inner-product reductions below
are exact identities on that window.

    rot_green      kernel sum over |m| <= m_max at shifted energies
    rot_norm_sq    squared L2 norm of the kernel against a point source,
                   via Im of the channel diagonals (first-resolvent identity)
    rot_inner      inner product of two such kernels, via diagonal differences
    remainder_norm norm of the kernel minus its central channel
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .greens import (
    KQuadrature,
    Point2,
    Point3,
    TruncationError,
    radial_kernel_2d,
    radial_kernel_3d,
    require_off_axis_energy,
    require_resolvent_energy,
    SOURCE_ANGLES_3D,
    SOURCE_THETA_2D,
)
from .specfun import equatorial_weight, sph_harm

__all__ = [
    "PointSource",
    "RotationSpec",
    "Truncation",
    "rot_green",
    "rot_green_cutoff",
    "rot_norm_sq",
    "rot_inner",
    "remainder_norm",
    "channel_diag",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RotationSpec:
    """Rotation speed omega >= 0."""

    omega: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and self.omega >= 0.0):
            raise ValueError(f"omega must be finite and nonnegative, got {self.omega}")


@dataclass(frozen=True)
class Truncation:
    """Channel window and quadrature policy.

    m_max caps the azimuthal window |m| <= m_max; l_max (3D only) caps the
    degree sums and must dominate m_max.  tail_tol governs pointwise kernel
    sums; the norm and inner-product reductions treat the window as the
    definition of the object and do not police it.
    """

    m_max: int
    l_max: int | None = None
    quad: KQuadrature = field(default_factory=KQuadrature)
    tail_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.m_max < 0:
            raise ValueError(f"m_max must be nonnegative, got {self.m_max}")
        if self.l_max is not None and self.l_max < self.m_max:
            raise ValueError(
                f"l_max={self.l_max} must be at least m_max={self.m_max}"
            )
        if not self.tail_tol > 0.0:
            raise ValueError("tail_tol must be positive")

    def require_l_max(self) -> int:
        if self.l_max is None:
            raise ValueError("3D operation needs l_max in the truncation")
        return self.l_max


@dataclass(frozen=True)
class PointSource:
    """Point interaction site at radius y0 > 0 on the equator."""

    y0: float
    dim: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.y0) and self.y0 > 0.0):
            raise ValueError(
                f"source radius must be strictly positive, got {self.y0}"
            )
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")


def _check_dim(dim: int) -> None:
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim}")


def channel_diag(
    dim: int,
    m: int,
    zz: complex,
    src: PointSource,
    t: Truncation,
    mode: str = "closed",
) -> complex:
    """Channel diagonal d_m(zz) of the free resolvent at the source point.

    3D: sum over degrees of |Y_l^m(eq)|^2 g_l(zz; y0, y0) up to t.l_max.
    2D: g_m(zz; y0, y0) / (2 pi).
    """
    _check_dim(dim)
    q = t.quad if mode == "quadrature" else None
    if dim == 2:
        return radial_kernel_2d(m, zz, src.y0, src.y0, mode, q) / (2.0 * math.pi)
    acc = 0.0 + 0.0j
    for l in range(abs(m), t.require_l_max() + 1):
        wgt = equatorial_weight(l, m)
        if wgt == 0.0:
            continue
        acc += wgt * radial_kernel_3d(l, zz, src.y0, src.y0, mode, q)
    return acc


def _shell_term_3d(
    m: int, zz: complex, x: Point3, xp: Point3, l_max: int, mode: str, q
) -> complex:
    acc = 0.0 + 0.0j
    for l in range(abs(m), l_max + 1):
        acc += (
            radial_kernel_3d(l, zz, x.r, xp.r, mode, q)
            * sph_harm(l, m, x.theta, x.phi)
            * sph_harm(l, m, xp.theta, xp.phi).conjugate()
        )
    return acc


def _check_shell_tail(shells: dict[int, complex], total: complex, tail_tol: float) -> None:
    """Geometric tail estimate from the outermost window shells, per side.

    Per-shell magnitudes oscillate under the decay envelope, so each side is
    judged by the ratio of 3-shell block sums when the window allows it.
    """
    ms = sorted(shells)
    if len(ms) < 7:
        # Window too small for a sided estimate; the window is the object.
        return
    blocked = len(ms) >= 13
    est = 0.0
    for side in (ms[:6][::-1], ms[-6:]):
        # side runs inner to outer
        mags = [abs(shells[m]) for m in side]
        if blocked:
            inner, outer = sum(mags[:3]), sum(mags[3:])
            if outer == 0.0:
                continue
            if outer >= inner:
                est += math.inf
                continue
            ratio = outer / inner
            est += outer * ratio / (1.0 - ratio)
            continue
        mags = [m for m in mags[-3:] if m > 0.0]
        if not mags:
            continue
        if len(mags) < 3:
            est += max(mags)
            continue
        a, b, c = mags
        ratio = max(b / a, c / b)
        est += math.inf if ratio >= 1.0 else c * ratio / (1.0 - ratio)
    scale = max(abs(total), 1e-300)
    if est > tail_tol * scale:
        raise TruncationError(
            f"channel window tail estimate {est / scale:.3g} relative exceeds "
            f"{tail_tol:.3g}; widen m_max"
        )
    logger.debug("rot_green shell tail %.3g (relative %.3g)", est, est / scale)


def rot_green(
    dim: int,
    z: complex,
    rot: RotationSpec,
    x: Point3 | Point2,
    xp: Point3 | Point2,
    t: Truncation,
    mode: str = "closed",
) -> complex:
    """Rotating-frame resolvent kernel between two points.

    Channel m contributes at shifted energy z + m*omega; the window is
    |m| <= t.m_max with the geometric tail of the outer shells checked
    against t.tail_tol.
    """
    _check_dim(dim)
    z = require_resolvent_energy(z)
    q = t.quad if mode == "quadrature" else None
    shells: dict[int, complex] = {}
    if dim == 2:
        dtheta = x.theta - xp.theta
        for m in range(-t.m_max, t.m_max + 1):
            zz = z + m * rot.omega
            g = radial_kernel_2d(m, zz, x.r, xp.r, mode, q)
            shells[m] = cmath.exp(1j * m * dtheta) * g / (2.0 * math.pi)
    else:
        l_max = t.require_l_max()
        for m in range(-t.m_max, t.m_max + 1):
            zz = z + m * rot.omega
            shells[m] = _shell_term_3d(m, zz, x, xp, l_max, mode, q)
    total = sum(shells.values())
    _check_shell_tail(shells, total, t.tail_tol)
    return complex(total)


def rot_green_cutoff(
    dim: int,
    cap: int,
    z: complex,
    rot: RotationSpec,
    x: Point3 | Point2,
    xp: Point3 | Point2,
    t: Truncation,
    mode: str = "closed",
) -> complex:
    """Sharp-cutoff model of the rotating kernel: l <= cap (3D), |n| <= cap (2D).

    The 3D cutoff keeps all orders |m| <= l for each retained degree, so
    cap = 0 is the single (0, 0) term.  No tail policy applies; this is the
    model object whose distance to rot_green is the quantity of interest.
    """
    _check_dim(dim)
    if cap < 0:
        raise ValueError(f"cap must be nonnegative, got {cap}")
    z = require_resolvent_energy(z)
    q = t.quad if mode == "quadrature" else None
    acc = 0.0 + 0.0j
    if dim == 2:
        dtheta = x.theta - xp.theta
        for n in range(-cap, cap + 1):
            zz = z + n * rot.omega
            acc += (
                cmath.exp(1j * n * dtheta)
                * radial_kernel_2d(n, zz, x.r, xp.r, mode, q)
                / (2.0 * math.pi)
            )
        return complex(acc)
    for l in range(0, cap + 1):
        for m in range(-l, l + 1):
            zz = z + m * rot.omega
            acc += (
                radial_kernel_3d(l, zz, x.r, xp.r, mode, q)
                * sph_harm(l, m, x.theta, x.phi)
                * sph_harm(l, m, xp.theta, xp.phi).conjugate()
            )
    return complex(acc)


def _diag_profile_3d(
    z: complex, rot: RotationSpec, src: PointSource, t: Truncation, mode: str
):
    """Degree profile S_l of the windowed norm sum, Im-part by degree."""
    l_max = t.require_l_max()
    q = t.quad if mode == "quadrature" else None
    im_z = z.imag
    prof = np.zeros(l_max + 1)
    for l in range(l_max + 1):
        g_cache: dict[int, complex] = {}
        for m in range(-min(l, t.m_max), min(l, t.m_max) + 1):
            wgt = equatorial_weight(l, m)
            if wgt == 0.0:
                continue
            if m not in g_cache:
                g_cache[m] = radial_kernel_3d(
                    l, z + m * rot.omega, src.y0, src.y0, mode, q
                )
            prof[l] += wgt * g_cache[m].imag / im_z
    return prof


def _power_law_tail(prof: np.ndarray, n_fit: int = 17) -> float:
    """Complete a degree profile beyond its cap by a power-law fit.

    Fits the last n_fit entries against l^-2, l^-3, l^-4 and sums the fitted
    model over the remaining degrees with Hurwitz zeta values.  Falls back to
    zero when the window is too short for a meaningful fit.
    """
    import scipy.special as sp

    l_max = len(prof) - 1
    if l_max < n_fit + 6:
        return 0.0
    ls = np.arange(l_max - n_fit + 1, l_max + 1, dtype=float)
    ys = prof[l_max - n_fit + 1 :]
    basis = np.stack([ls**-2, ls**-3, ls**-4], axis=1)
    coef, *_ = np.linalg.lstsq(basis, ys, rcond=None)
    tail = sum(
        c * float(sp.zeta(p, l_max + 1)) for c, p in zip(coef, (2.0, 3.0, 4.0))
    )
    return float(tail)


def rot_norm_sq(
    dim: int,
    z: complex,
    rot: RotationSpec,
    src: PointSource,
    t: Truncation,
    mode: str = "closed",
) -> float:
    """Squared norm of the windowed rotating kernel against the source.

    Reduces exactly to the Im parts of the channel diagonals at their shifted
    energies divided by Im z.  In 3D the degree cap is completed by a
    power-law tail fit; the azimuthal window is taken as given.
    """
    _check_dim(dim)
    z = require_off_axis_energy(z)
    if dim == 2:
        total = 0.0
        for m in range(-t.m_max, t.m_max + 1):
            d = channel_diag(2, m, z + m * rot.omega, src, t, mode)
            total += d.imag / z.imag
        return total
    prof = _diag_profile_3d(z, rot, src, t, mode)
    tail = _power_law_tail(prof)
    logger.debug("rot_norm_sq degree tail %.3g of %.3g", tail, prof.sum())
    return float(prof.sum() + tail)


def rot_inner(
    dim: int,
    z: complex,
    zp: complex,
    rot: RotationSpec,
    src: PointSource,
    t: Truncation,
    mode: str = "closed",
) -> complex:
    """Inner product of windowed rotating kernels at parameters z and zp.

    Uses the first-resolvent identity channel by channel: the sum of
    [d_m(z + m w) - d_m(zp + m w)] / (z - zp).  Coincident parameters are
    rejected; use rot_norm_sq for the zp = conj(z) diagonal.
    """
    _check_dim(dim)
    z = require_off_axis_energy(z)
    zp = require_off_axis_energy(zp)
    if z == zp:
        raise ValueError("coincident spectral parameters; no difference quotient")
    acc = 0.0 + 0.0j
    for m in range(-t.m_max, t.m_max + 1):
        dz = channel_diag(dim, m, z + m * rot.omega, src, t, mode)
        dzp = channel_diag(dim, m, zp + m * rot.omega, src, t, mode)
        acc += dz - dzp
    return complex(acc / (z - zp))


def remainder_norm(
    dim: int,
    m0: int,
    z: complex,
    rot: RotationSpec,
    src: PointSource,
    t: Truncation,
    mode: str = "closed",
) -> float:
    """Norm of the windowed rotating kernel minus its central channel m0.

    The resolvent here sits at spectral parameter z - m0*omega, so side
    channel m contributes at z + (m - m0)*omega and the central channel
    cancels exactly.  Requires Im z > 0.
    """
    _check_dim(dim)
    z = complex(z)
    if not z.imag > 0.0:
        raise ValueError("remainder norm needs Im z > 0")
    acc = 0.0
    for m in range(-t.m_max, t.m_max + 1):
        if m == m0:
            continue
        d = channel_diag(dim, m, z + (m - m0) * rot.omega, src, t, mode)
        acc += d.imag / z.imag
    if acc < 0.0:
        # Roundoff at severe cancellation; the exact value is nonnegative.
        acc = 0.0
    return math.sqrt(acc)
