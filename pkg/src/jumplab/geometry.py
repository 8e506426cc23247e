"""Weight functions, level-set coordinates, interpolation regions, interface flattening.

Conventions: the transverse coordinate ``x`` is a scalar in 2-D; an array whose
last axis holds the n-1 transverse components is also accepted.  The normal
coordinate ``y`` is positive on the plus side.  In flattened coordinates the
interface is the hyperplane y = 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "AdmissibilityError",
    "OutsidePatchError",
    "WeightParams",
    "RegionTriple",
    "InterfaceGraph",
    "PhysicalRegions",
    "weight_phi",
    "level_z",
    "make_regions",
    "flatten",
    "unflatten",
    "pull_back_regions",
]


class AdmissibilityError(ValueError):
    """A weight or region parameter violates an admissibility constraint."""


class OutsidePatchError(ValueError):
    """A point falls outside the interface graph patch."""


def _transverse_sq(x, y):
    """|x|^2 broadcast against y: trailing axis of x = transverse components."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == y.ndim + 1:
        return np.sum(x * x, axis=-1)
    return x * x


@dataclass(frozen=True)
class WeightParams:
    """Slope/curvature parameters of the piecewise-quadratic weight.

    alpha_plus and alpha_minus are the one-sided slopes in y, beta the
    curvature, delta the length scale.  L, r0, delta0, tau0 are configuration
    constants; the admissibility radii r and R are derived.
    """

    alpha_plus: float
    alpha_minus: float
    beta: float = 1.0
    delta: float = 1.0
    L: float = 4.0
    r0: float = 1.0
    delta0: float = 1.0
    tau0: float = 1.0

    def __post_init__(self):
        for name in ("alpha_plus", "alpha_minus", "beta", "delta", "L",
                     "r0", "delta0", "tau0"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise AdmissibilityError(f"{name} must be a positive real, got {v!r}")
        if self.r0 > 1.0:
            raise AdmissibilityError(f"r0 must be <= 1, got {self.r0}")
        if self.alpha_plus <= self.L * self.alpha_minus:
            raise AdmissibilityError(
                f"slope jump too weak: alpha_plus={self.alpha_plus} must exceed "
                f"L*alpha_minus={self.L * self.alpha_minus}")
        if self.delta > self.delta0:
            raise AdmissibilityError(f"delta={self.delta} exceeds delta0={self.delta0}")

    @property
    def r(self) -> float:
        """Largest admissible patch radius: min(r0, 13a-/8b, 2d/(19a-+8b))."""
        return min(self.r0,
                   13.0 * self.alpha_minus / (8.0 * self.beta),
                   2.0 * self.delta / (19.0 * self.alpha_minus + 8.0 * self.beta))

    @property
    def R(self) -> float:
        """Region-size bound alpha_minus * r / 16; always <= 13 a-^2 / (128 b)."""
        return self.alpha_minus * self.r / 16.0


def weight_phi(p: WeightParams, x, y):
    """Piecewise-quadratic weight: slope alpha_plus for y >= 0, alpha_minus below.

    phi(x, y) = alpha_pm*y/delta + beta*y^2/(2 delta^2) - |x|^2/(2 delta).
    Both branches agree at y = 0.
    """
    y = np.asarray(y, dtype=float)
    xsq = _transverse_sq(x, y)
    alpha = np.where(y >= 0.0, p.alpha_plus, p.alpha_minus)
    val = alpha * y / p.delta + p.beta * y * y / (2.0 * p.delta**2) \
        - xsq / (2.0 * p.delta)
    return val if val.ndim else float(val)


def level_z(p: WeightParams, x, y):
    """Level-set coordinate: the lower-branch weight extended to all y."""
    y = np.asarray(y, dtype=float)
    xsq = _transverse_sq(x, y)
    val = p.alpha_minus * y / p.delta + p.beta * y * y / (2.0 * p.delta**2) \
        - xsq / (2.0 * p.delta)
    return val if val.ndim else float(val)


def _y_on_axis(p: WeightParams, zc: float) -> float:
    """Negative root of z(0, y) = zc, i.e. the lowest y on the level set zc < 0."""
    # (beta/2 delta^2) y^2 + (alpha_-/delta) y - zc = 0, root nearest zero
    disc = p.alpha_minus**2 + 2.0 * p.beta * zc
    if disc < 0.0:
        raise AdmissibilityError(f"level set z={zc} is empty on the axis")
    return p.delta * (-p.alpha_minus + np.sqrt(disc)) / p.beta


@dataclass(frozen=True)
class RegionTriple:
    """The three interpolation regions in flattened coordinates.

    U1 is a slab strictly above y = R1/(8a) on the plus side, U2 the band
    between the level sets z = -R2 and z = R1/(2a) below that line, U3 the
    enclosing set.  kappa1 + kappa2 = 1 exactly by construction.
    """

    R1: float
    R2: float
    a: float
    kappa1: float
    kappa2: float
    params: WeightParams = field(repr=False)

    def z(self, x, y):
        return level_z(self.params, x, y)

    def in_u1(self, x, y):
        y = np.asarray(y, dtype=float)
        return (self.z(x, y) >= -4.0 * self.R2) \
            & (y > self.R1 / (8.0 * self.a)) & (y < self.R1 / self.a)

    def in_u2(self, x, y):
        z = self.z(x, y)
        y = np.asarray(y, dtype=float)
        return (z >= -self.R2) & (z <= self.R1 / (2.0 * self.a)) \
            & (y < self.R1 / (8.0 * self.a))

    def in_u3(self, x, y):
        y = np.asarray(y, dtype=float)
        return (self.z(x, y) >= -4.0 * self.R2) & (y < self.R1 / self.a)

    def _xmax(self, zc: float, ytop: float) -> float:
        p = self.params
        zmax = p.alpha_minus * ytop / p.delta + p.beta * ytop**2 / (2 * p.delta**2)
        return float(np.sqrt(max(0.0, 2.0 * p.delta * (zmax - zc))))

    def bbox_u1(self):
        ytop = self.R1 / self.a
        xm = self._xmax(-4.0 * self.R2, ytop)
        return (-xm, xm, self.R1 / (8.0 * self.a), ytop)

    def bbox_u2(self):
        ytop = self.R1 / (8.0 * self.a)
        ybot = _y_on_axis(self.params, -self.R2)
        xm = self._xmax(-self.R2, ytop)
        return (-xm, xm, ybot, ytop)

    def bbox_u3(self):
        ytop = self.R1 / self.a
        ybot = _y_on_axis(self.params, -4.0 * self.R2)
        xm = self._xmax(-4.0 * self.R2, ytop)
        return (-xm, xm, ybot, ytop)


def make_regions(p: WeightParams, R1: float, R2: float) -> RegionTriple:
    """Build the region triple for admissible radii 0 < R1, R2 <= p.R."""
    for name, val in (("R1", R1), ("R2", R2)):
        if not (np.isfinite(val) and val > 0.0):
            raise AdmissibilityError(f"{name} must be positive, got {val!r}")
        if val > p.R:
            raise AdmissibilityError(
                f"{name}={val} exceeds the admissible bound R={p.R} "
                f"(= alpha_minus*r/16 with r={p.r})")
    if R1 >= R2:
        warnings.warn(
            f"R1={R1} >= R2={R2}: the interpolation-exponent derivation assumes "
            "R1 < R2; proceeding per the theorem statement", RuntimeWarning,
            stacklevel=2)
    kappa1 = R2 / (2.0 * R1 + 3.0 * R2)
    return RegionTriple(R1=float(R1), R2=float(R2), a=p.alpha_plus / p.delta,
                        kappa1=kappa1, kappa2=1.0 - kappa1, params=p)


@dataclass(frozen=True)
class InterfaceGraph:
    """A C^2 interface given as a graph y = psi(x) on the patch |x| < patch_radius.

    anchor = (x0, y0) embeds the patch into physical coordinates: the interface
    is {(x, y): y = y0 + psi(x - x0)}.  dpsi/d2psi are analytic derivatives
    when available; validation falls back to central differences otherwise.
    s0 and L0 are outer-boundary regularity constants, stored for validation.
    """

    psi: Callable
    patch_radius: float
    K0: float
    d0: float
    s0: Optional[float] = None
    L0: Optional[float] = None
    anchor: tuple = (0.0, 0.0)
    dpsi: Optional[Callable] = field(default=None, repr=False)
    d2psi: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        if self.patch_radius <= 0:
            raise ValueError("patch_radius must be positive")
        if abs(float(self.psi(0.0))) > 1e-12:
            raise ValueError("psi(0) must vanish (interface through the patch origin)")

    def validate(self, n_samples: int = 201) -> dict:
        """Sample value/gradient/Hessian of psi and check the C^2 bound K0."""
        xs = np.linspace(-self.patch_radius, self.patch_radius, n_samples)
        vals = np.asarray(self.psi(xs), dtype=float)
        if self.dpsi is not None:
            d1 = np.asarray(self.dpsi(xs), dtype=float)
        else:
            d1 = np.gradient(vals, xs)
        if self.d2psi is not None:
            d2 = np.asarray(self.d2psi(xs), dtype=float)
        else:
            d2 = np.gradient(d1, xs)
        c2 = max(np.max(np.abs(vals)), np.max(np.abs(d1)), np.max(np.abs(d2)))
        return {"c2_norm": float(c2), "ok": bool(c2 <= self.K0 + 1e-9)}

    def _local(self, x, y):
        x0, y0 = self.anchor
        return np.asarray(x, dtype=float) - x0, np.asarray(y, dtype=float) - y0

    def inside_patch(self, x):
        xl = np.asarray(x, dtype=float) - self.anchor[0]
        return np.abs(xl) <= self.patch_radius

    def height(self, x):
        """Physical interface height y0 + psi(x - x0)."""
        xl = np.asarray(x, dtype=float) - self.anchor[0]
        return self.anchor[1] + np.asarray(self.psi(xl), dtype=float)


def flatten(interface: InterfaceGraph, point):
    """Map a physical point to flattened coordinates (x', y') = (x, y - psi(x)).

    Coordinates are relative to the interface anchor; raises OutsidePatchError
    beyond the patch.
    """
    x, y = point
    xl, yl = interface._local(x, y)
    if np.any(np.abs(xl) > interface.patch_radius):
        raise OutsidePatchError(
            f"x beyond the psi patch (|x - x0| > {interface.patch_radius})")
    return xl, yl - np.asarray(interface.psi(xl), dtype=float)


def unflatten(interface: InterfaceGraph, point):
    """Inverse of flatten: (x', y') back to physical (x, y)."""
    xp, yp = point
    xp = np.asarray(xp, dtype=float)
    if np.any(np.abs(xp) > interface.patch_radius):
        raise OutsidePatchError(
            f"x beyond the psi patch (|x'| > {interface.patch_radius})")
    x0, y0 = interface.anchor
    return xp + x0, np.asarray(yp, dtype=float) + np.asarray(interface.psi(xp), dtype=float) + y0


@dataclass(frozen=True)
class PhysicalRegions:
    """The region triple pulled back through the interface flattening.

    Membership of a physical point: flatten, then test the flattened triple.
    Points outside the psi patch are simply not members (the regions are
    contained in the patch by admissibility).
    """

    interface: InterfaceGraph
    triple: RegionTriple

    def _flat(self, x, y):
        xl, yl = self.interface._local(x, y)
        ok = np.abs(xl) <= self.interface.patch_radius
        yf = yl - np.asarray(self.interface.psi(np.where(ok, xl, 0.0)), dtype=float)
        return xl, yf, ok

    def in_u1(self, x, y):
        xl, yf, ok = self._flat(x, y)
        return ok & self.triple.in_u1(xl, yf)

    def in_u2(self, x, y):
        xl, yf, ok = self._flat(x, y)
        return ok & self.triple.in_u2(xl, yf)

    def in_u3(self, x, y):
        xl, yf, ok = self._flat(x, y)
        return ok & self.triple.in_u3(xl, yf)

    def _pull_bbox(self, bb):
        xlo, xhi, ylo, yhi = bb
        x0, y0 = self.interface.anchor
        xs = np.linspace(max(xlo, -self.interface.patch_radius),
                         min(xhi, self.interface.patch_radius), 101)
        ps = np.asarray(self.interface.psi(xs), dtype=float)
        return (xlo + x0, xhi + x0,
                ylo + y0 + float(ps.min()), yhi + y0 + float(ps.max()))

    def bbox_u1(self):
        return self._pull_bbox(self.triple.bbox_u1())

    def bbox_u2(self):
        return self._pull_bbox(self.triple.bbox_u2())

    def bbox_u3(self):
        return self._pull_bbox(self.triple.bbox_u3())

    @property
    def kappa1(self):
        return self.triple.kappa1

    @property
    def kappa2(self):
        return self.triple.kappa2


def pull_back_regions(interface: InterfaceGraph, rt: RegionTriple) -> PhysicalRegions:
    """Physical-coordinate predicates for the flattened region triple."""
    return PhysicalRegions(interface=interface, triple=rt)
