"""Model geometry: smooth cutoffs, coefficient profiles, grids.

The domain is a capped cone ``(r_min, r_max) x S^1`` carrying the volume
density ``G = r^(dim-1) * H(theta)``, plus a reference tube
``(tube_r_min, r_max) x S^1`` with the r-independent density ``H(theta)``.
Coefficient fields are built from a small closed family: trigonometric
polynomials in the angle and analytic radial tails, so every derivative
an assembler needs is available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConfigError,
    GridMismatch,
    GridTooCoarse,
    NonPositiveDefinite,
    NonPositiveDensity,
    TooManyCritical,
)

__all__ = [
    "smoothstep",
    "smoothstep_d1",
    "cutoff_j",
    "cutoff_j_d1",
    "cutoff_j_tilde",
    "TrigPoly",
    "PowerTail",
    "GaussianBump",
    "ModelTerm",
    "Coefficients",
    "ManifoldModel",
    "critical_values",
    "critical_points",
    "Grid",
    "GridSpec",
    "default_model",
    "flat_free_model",
    "flat_short_range_model",
    "seeded_well_model",
]


# ----------------------------------------------------------------------
# smooth cutoffs
# ----------------------------------------------------------------------

def _exp_glue(x: np.ndarray) -> np.ndarray:
    """exp(-1/x) for x > 0, identically 0 otherwise (C-infinity glue)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-1.0 / x[pos])
    return out


def _exp_glue_d1(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-1.0 / x[pos]) / x[pos] ** 2
    return out


def _maybe_scalar(out: np.ndarray, scalar_in: bool):
    return float(out) if scalar_in else out


def smoothstep(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly monotone between."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g, g1 = _exp_glue(x), _exp_glue(1.0 - x)
    out = g / (g + g1)
    return _maybe_scalar(out if not scalar else out[0], scalar)


def smoothstep_d1(x):
    """Derivative of :func:`smoothstep`."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g, g1 = _exp_glue(x), _exp_glue(1.0 - x)
    gp, g1p = _exp_glue_d1(x), _exp_glue_d1(1.0 - x)
    out = (gp * g1 + g * g1p) / (g + g1) ** 2
    return _maybe_scalar(out if not scalar else out[0], scalar)


def cutoff_j(r):
    """Radial cutoff: 0 for |r| <= 1/2, 1 for |r| >= 1, smooth and even."""
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = smoothstep(2.0 * np.abs(r) - 1.0)
    return _maybe_scalar(out if not scalar else out[0], scalar)


def cutoff_j_d1(r):
    """Derivative of :func:`cutoff_j`; supported on 1/2 <= |r| <= 1."""
    scalar = np.isscalar(r)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = 2.0 * np.sign(r) * smoothstep_d1(2.0 * np.abs(r) - 1.0)
    return _maybe_scalar(out if not scalar else out[0], scalar)


def cutoff_j_tilde(r):
    """Strictly positive weight: 1 for |r| <= 1/2, 1/r^2 for |r| >= 1.

    The transition is the log-linear blend ``|r| ** (-2 * s(2|r|-1))``.  Any
    smooth glue between the two branches must exceed 1 just left of
    ``|r| = 1`` (the outer branch approaches 1 with slope -2); this profile
    overshoots by at most ~37% near ``|r| = 0.82``.
    """
    scalar = np.isscalar(r)
    r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
    s = smoothstep(2.0 * r - 1.0)
    safe = np.where(r > 0.5, r, 1.0)
    out = np.where(r > 0.5, np.exp(-2.0 * s * np.log(safe)), 1.0)
    return _maybe_scalar(out if not scalar else out[0], scalar)


# ----------------------------------------------------------------------
# angular and radial profile primitives
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TrigPoly:
    """Real trigonometric polynomial ``c0 + sum a_k cos(k t) + b_k sin(k t)``."""

    const: float = 0.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def _modes(self):
        kmax = max(len(self.cos_coeffs), len(self.sin_coeffs))
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        return np.arange(1, kmax + 1), a, b

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self.const, dtype=float)
        if self.cos_coeffs or self.sin_coeffs:
            k, a, b = self._modes()
            kt = np.multiply.outer(theta, k)
            out = out + np.cos(kt) @ a + np.sin(kt) @ b
        return out

    def d1(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta, dtype=float)
        if self.cos_coeffs or self.sin_coeffs:
            k, a, b = self._modes()
            kt = np.multiply.outer(theta, k)
            out = out - np.sin(kt) @ (k * a) + np.cos(kt) @ (k * b)
        return out

    def d2(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta, dtype=float)
        if self.cos_coeffs or self.sin_coeffs:
            k, a, b = self._modes()
            kt = np.multiply.outer(theta, k)
            out = out - np.cos(kt) @ (k**2 * a) - np.sin(kt) @ (k**2 * b)
        return out

    @property
    def is_constant(self) -> bool:
        return not any(self.cos_coeffs) and not any(self.sin_coeffs)

    def coeff_scale(self) -> float:
        return abs(self.const) + sum(map(abs, self.cos_coeffs)) + sum(
            map(abs, self.sin_coeffs)
        )


@dataclass(frozen=True)
class PowerTail:
    """Radial profile ``amp * r^(-mu) * j(r)``: short-range tail, cut at r <= 1/2."""

    amp: float
    mu: float = 2.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        j = cutoff_j(r)
        safe = np.where(np.abs(r) > 0.25, np.abs(r), 1.0)
        return np.where(j > 0.0, self.amp * safe ** (-self.mu) * j, 0.0)

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        j = cutoff_j(r)
        jp = cutoff_j_d1(r)
        safe = np.where(np.abs(r) > 0.25, np.abs(r), 1.0)
        live = (j > 0.0) | (jp != 0.0)
        sgn = np.sign(r)
        return np.where(
            live,
            self.amp * (-self.mu * sgn * safe ** (-self.mu - 1.0) * j
                        + safe ** (-self.mu) * jp),
            0.0,
        )

    def decay_rate(self) -> float:
        return self.mu

    def decay_const(self) -> float:
        return abs(self.amp)


@dataclass(frozen=True)
class GaussianBump:
    """Radial profile ``amp * exp(-((r - center)/width)^2)``."""

    amp: float
    center: float
    width: float

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.amp * np.exp(-(((r - self.center) / self.width) ** 2))

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        z = (r - self.center) / self.width
        return self.amp * np.exp(-(z**2)) * (-2.0 * z / self.width)

    def decay_rate(self) -> float:
        return 4.0  # decays faster than any configured power

    def decay_const(self) -> float:
        grid = np.geomspace(1.0, 1e4, 400)
        return float(np.max(np.abs(self.value(grid)) * grid**self.decay_rate()))


@dataclass(frozen=True)
class ModelTerm:
    """Separable perturbation ``radial(r) * angular(theta)``."""

    radial: object
    angular: TrigPoly | None = None

    def value(self, r, theta):
        v = self.radial.value(r)
        if self.angular is not None:
            v = v * self.angular.value(theta)
        return v

    def dr(self, r, theta):
        v = self.radial.d1(r)
        if self.angular is not None:
            v = v * self.angular.value(theta)
        return v

    def dth(self, r, theta):
        if self.angular is None:
            return np.zeros(np.broadcast(np.asarray(r), np.asarray(theta)).shape)
        return self.radial.value(r) * self.angular.d1(theta)


def _zeros_like_pair(r, theta):
    return np.zeros(np.broadcast(np.asarray(r, dtype=float),
                                 np.asarray(theta, dtype=float)).shape)


# ----------------------------------------------------------------------
# manifold model
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Coefficients:
    """Pointwise coefficient bundle: metric block, potential, density."""

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    v: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class ManifoldModel:
    """Capped cone model: boundary metric, density, potential, short-range tails.

    ``angular_potential`` is the r-independent angular part of the potential;
    the full potential on the cone is ``j(2r) * angular_potential(theta) +
    short_range(r, theta)`` so that it agrees with the asymptotic form for
    r >= 1/2 and switches off smoothly inside the cap.
    """

    dim: int = 2
    boundary_metric: TrigPoly = field(default_factory=lambda: TrigPoly(const=1.0))
    density_profile: TrigPoly = field(default_factory=lambda: TrigPoly(const=1.0))
    angular_potential: TrigPoly = field(default_factory=TrigPoly)
    short_range: ModelTerm | None = None
    radial_metric_pert: ModelTerm | None = None
    mixed_metric_pert: ModelTerm | None = None
    angular_metric_pert: ModelTerm | None = None
    name: str = "custom"

    # -- coefficient fields ------------------------------------------------

    def a1(self, r, theta):
        out = np.ones(np.broadcast(np.asarray(r), np.asarray(theta)).shape)
        if self.radial_metric_pert is not None:
            out = out + self.radial_metric_pert.value(r, theta)
        return out

    def a2(self, r, theta):
        if self.mixed_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.mixed_metric_pert.value(r, theta)

    def a3(self, r, theta):
        out = self.boundary_metric.value(theta) * np.ones(
            np.broadcast(np.asarray(r), np.asarray(theta)).shape
        )
        if self.angular_metric_pert is not None:
            out = out + self.angular_metric_pert.value(r, theta)
        return out

    def potential(self, r, theta):
        r_arr = np.asarray(r, dtype=float)
        out = cutoff_j(2.0 * r_arr) * self.angular_potential.value(theta)
        if self.short_range is not None:
            out = out + self.short_range.value(r, theta)
        return out

    def density(self, r, theta):
        """Cone volume density G = r^(dim-1) * H(theta)."""
        r_arr = np.asarray(r, dtype=float)
        return r_arr ** (self.dim - 1) * self.density_profile.value(theta)

    def tube_density(self, theta):
        return self.density_profile.value(theta)

    # -- partial derivatives (for symbol-level cross-checks) ---------------

    def da1_dr(self, r, theta):
        if self.radial_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.radial_metric_pert.dr(r, theta)

    def da1_dth(self, r, theta):
        if self.radial_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.radial_metric_pert.dth(r, theta)

    def da2_dr(self, r, theta):
        if self.mixed_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.mixed_metric_pert.dr(r, theta)

    def da2_dth(self, r, theta):
        if self.mixed_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.mixed_metric_pert.dth(r, theta)

    def da3_dr(self, r, theta):
        if self.angular_metric_pert is None:
            return _zeros_like_pair(r, theta)
        return self.angular_metric_pert.dr(r, theta)

    def da3_dth(self, r, theta):
        out = self.boundary_metric.d1(theta) * np.ones(
            np.broadcast(np.asarray(r), np.asarray(theta)).shape
        )
        if self.angular_metric_pert is not None:
            out = out + self.angular_metric_pert.dth(r, theta)
        return out

    def dV_dr(self, r, theta):
        r_arr = np.asarray(r, dtype=float)
        out = 2.0 * cutoff_j_d1(2.0 * r_arr) * self.angular_potential.value(theta)
        if self.short_range is not None:
            out = out + self.short_range.dr(r, theta)
        return out

    def dV_dth(self, r, theta):
        r_arr = np.asarray(r, dtype=float)
        out = cutoff_j(2.0 * r_arr) * self.angular_potential.d1(theta)
        if self.short_range is not None:
            out = out + self.short_range.dth(r, theta)
        return out

    # -- validation ---------------------------------------------------------

    def eval_coefficients(self, r, theta) -> Coefficients:
        """Evaluate (a1, a2, a3, V, G) at nodes; validates positivity.

        Raises :class:`NonPositiveDensity` if G <= 0 anywhere and
        :class:`NonPositiveDefinite` if the metric block fails positive
        definiteness at any node.
        """
        a1 = self.a1(r, theta)
        a2 = self.a2(r, theta)
        a3 = self.a3(r, theta)
        v = self.potential(r, theta)
        g = self.density(r, theta)
        if np.any(g <= 0.0):
            raise NonPositiveDensity(
                f"volume density must be positive; min G = {np.min(g):.3e}"
            )
        if np.any(a1 <= 0.0) or np.any(a1 * a3 - a2**2 <= 0.0):
            worst = float(np.min(a1 * a3 - a2**2))
            raise NonPositiveDefinite(
                f"metric coefficient block not positive definite (min det = {worst:.3e})"
            )
        return Coefficients(a1=a1, a2=a2, a3=a3, v=v, g=g)

    def perturbation_terms(self):
        """(name, term, decay_rate) for every configured short-range tail."""
        named = [
            ("radial_metric_pert", self.radial_metric_pert),
            ("mixed_metric_pert", self.mixed_metric_pert),
            ("angular_metric_pert", self.angular_metric_pert),
            ("short_range", self.short_range),
        ]
        return [
            (name, term, term.radial.decay_rate())
            for name, term in named
            if term is not None
        ]

    def with_(self, **kwargs) -> "ManifoldModel":
        return replace(self, **kwargs)


# ----------------------------------------------------------------------
# critical structure of the angular potential
# ----------------------------------------------------------------------

def critical_points(model: ManifoldModel, n_samples: int = 4096,
                    cap: int = 64, tol: float = 1e-10) -> np.ndarray:
    """Angles in [0, 2pi) where the angular potential is stationary.

    Sign-change bracketing of the derivative on a dense sample grid followed
    by bisection refinement.  A constant angular potential is stationary
    everywhere; the convention is to return the single angle 0.

    Raises :class:`TooManyCritical` if more than ``cap`` points are found.
    """
    vt = model.angular_potential
    if vt.is_constant:
        return np.array([0.0])
    ts = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
    dv = vt.d1(np.append(ts, ts[0] + 2.0 * math.pi))
    scale = max(1.0, vt.coeff_scale())
    if np.max(np.abs(dv)) < 1e-12 * scale:
        return np.array([0.0])

    roots = []
    for i in range(n_samples):
        lo, hi = dv[i], dv[i + 1]
        t_lo = ts[i]
        t_hi = ts[i] + 2.0 * math.pi / n_samples
        if lo == 0.0:
            roots.append(t_lo)
        elif lo * hi < 0.0:
            roots.append(brentq(lambda t: float(vt.d1(np.array([t]))[0]),
                                t_lo, t_hi, xtol=tol))
        if len(roots) > cap:
            raise TooManyCritical(
                f"more than {cap} stationary angles detected"
            )
    out = np.sort(np.mod(np.asarray(roots, dtype=float), 2.0 * math.pi))
    if out.size > 1:
        keep = np.concatenate([[True], np.diff(out) > 1e-8])
        # wrap-around duplicate (root at ~0 and ~2pi)
        if out[-1] > 2.0 * math.pi - 1e-8 and out[0] < 1e-8:
            keep[-1] = False
        out = out[keep]
    return out


def critical_values(model: ManifoldModel, n_samples: int = 4096,
                    cap: int = 64, tol: float = 1e-10) -> np.ndarray:
    """Sorted distinct stationary values of the angular potential.

    Values closer than 1e-8 are merged.  A constant potential has the single
    stationary value equal to the constant.
    """
    vt = model.angular_potential
    pts = critical_points(model, n_samples=n_samples, cap=cap, tol=tol)
    vals = np.sort(vt.value(pts))
    keep = np.concatenate([[True], np.diff(vals) > 1e-8])
    return vals[keep]


# ----------------------------------------------------------------------
# grids
# ----------------------------------------------------------------------

@dataclass
class Grid:
    """Uniform tensor grid; radial Dirichlet nodes are interior-only.

    ``r`` holds the interior radial nodes (the Dirichlet endpoints are ghost
    values, identically zero); ``theta`` is periodic.  Flattened index
    convention: ``i_r * n_theta + i_theta``.
    """

    kind: str  # "cone" | "tube"
    r: np.ndarray
    theta: np.ndarray
    dr: float
    dtheta: float
    r_lo: float  # Dirichlet endpoint below r[0]
    r_hi: float  # Dirichlet endpoint above r[-1]

    @property
    def n_r(self) -> int:
        return self.r.size

    @property
    def n_theta(self) -> int:
        return self.theta.size

    @property
    def size(self) -> int:
        return self.r.size * self.theta.size

    def meshes(self):
        """(R, TH) arrays of shape (n_r, n_theta)."""
        return np.meshgrid(self.r, self.theta, indexing="ij")

    def flat_meshes(self):
        rr, tt = self.meshes()
        return rr.ravel(), tt.ravel()

    def weights(self, model: ManifoldModel) -> np.ndarray:
        """Quadrature weights of the volume density at the nodes."""
        rr, tt = self.flat_meshes()
        if self.kind == "cone":
            dens = model.density(rr, tt)
        else:
            dens = model.tube_density(tt) * np.ones_like(rr)
        if np.any(dens <= 0.0):
            raise NonPositiveDensity("volume density must be positive on the grid")
        return dens * self.dr * self.dtheta

    def far_mask(self, r_core: float, outer_collar: float = 0.0) -> np.ndarray:
        """Boolean node mask: outside the core and outside the outer collar."""
        rr, _ = self.flat_meshes()
        mask = rr > r_core
        if outer_collar > 0.0:
            mask &= rr < self.r_hi - outer_collar
        return mask


@dataclass(frozen=True)
class GridSpec:
    """Discretization contract for a matched cone/tube grid pair.

    The tube shares the radial lattice of the cone (same spacing, aligned
    nodes, same upper Dirichlet endpoint) so that identification operators
    are pure node-to-node maps.
    """

    r_min: float = 0.25
    r_max: float = 16.0
    n_r: int = 62
    n_theta: int = 16
    tube_r_min: float = -4.0
    e_max: float | None = None
    allow_reduced: bool = False

    def __post_init__(self):
        if not (0.0 < self.r_min < 0.5):
            raise ConfigError(f"grid.r_min must lie in (0, 1/2); got {self.r_min}")
        if self.r_max <= 1.0:
            raise ConfigError(f"grid.r_max must exceed 1; got {self.r_max}")
        if self.tube_r_min >= 0.0:
            raise ConfigError(
                f"grid.tube_r_min must be negative; got {self.tube_r_min}"
            )
        min_rad = 8 if not self.allow_reduced else 2
        if self.n_r < min_rad:
            raise ConfigError(f"grid.n_r must be at least {min_rad}; got {self.n_r}")
        if self.n_theta < 8 and not (self.allow_reduced and self.n_theta == 1):
            raise ConfigError(
                f"grid.n_theta must be at least 8 (or exactly 1 for a reduced "
                f"radial model); got {self.n_theta}"
            )
        if self.e_max is not None:
            limit = math.pi / (4.0 * math.sqrt(2.0 * self.e_max))
            if self.dr > limit:
                raise GridTooCoarse(
                    f"dr = {self.dr:.4g} exceeds the resolution bound "
                    f"{limit:.4g} for e_max = {self.e_max}"
                )

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r + 1)

    @property
    def dtheta(self) -> float:
        return 2.0 * math.pi / self.n_theta

    def cone_grid(self) -> Grid:
        r = self.r_min + self.dr * np.arange(1, self.n_r + 1)
        theta = self.dtheta * np.arange(self.n_theta)
        return Grid(kind="cone", r=r, theta=theta, dr=self.dr,
                    dtheta=self.dtheta, r_lo=self.r_min, r_hi=self.r_max)

    def tube_grid(self) -> Grid:
        # snap the lower tube endpoint onto the cone lattice
        m = max(2, round((self.r_min - self.tube_r_min) / self.dr))
        r_lo = self.r_min - m * self.dr
        n_tube = m + self.n_r
        r = r_lo + self.dr * np.arange(1, n_tube + 1)
        theta = self.dtheta * np.arange(self.n_theta)
        return Grid(kind="tube", r=r, theta=theta, dr=self.dr,
                    dtheta=self.dtheta, r_lo=r_lo, r_hi=self.r_max)

    def refine(self) -> "GridSpec":
        """Halve both grid spacings (n_r -> 2 n_r + 1, n_theta doubles)."""
        n_th = self.n_theta if self.n_theta == 1 else 2 * self.n_theta
        return replace(self, n_r=2 * self.n_r + 1, n_theta=n_th)

    @classmethod
    def reduced_radial(cls, r_min=0.25, r_max=16.0, n_r=62,
                       tube_r_min=-4.0, e_max=None) -> "GridSpec":
        """Radial-only reduction: a single angular node (angular terms drop)."""
        return cls(r_min=r_min, r_max=r_max, n_r=n_r, n_theta=1,
                   tube_r_min=tube_r_min, e_max=e_max, allow_reduced=True)


def check_aligned(cone: Grid, tube: Grid) -> np.ndarray:
    """Indices of tube radial nodes matching cone radial nodes, in cone order.

    Raises :class:`GridMismatch` when spacing, angular count, or node
    alignment disagree beyond 1e-12.
    """
    if cone.n_theta != tube.n_theta:
        raise GridMismatch(
            f"angular node counts differ: cone {cone.n_theta}, tube {tube.n_theta}"
        )
    if abs(cone.dr - tube.dr) > 1e-12:
        raise GridMismatch(
            f"radial spacings differ: cone {cone.dr}, tube {tube.dr}"
        )
    offs = (cone.r[0] - tube.r[0]) / tube.dr
    if abs(offs - round(offs)) > 1e-9:
        raise GridMismatch("radial lattices are not aligned")
    base = int(round(offs))
    if base < 0 or base + cone.n_r > tube.n_r:
        raise GridMismatch("cone radial range is not contained in the tube range")
    idx = base + np.arange(cone.n_r)
    if np.max(np.abs(tube.r[idx] - cone.r)) > 1e-9 * max(1.0, cone.r_hi):
        raise GridMismatch("radial nodes do not coincide")
    return idx


# ----------------------------------------------------------------------
# builtin model family
# ----------------------------------------------------------------------

def default_model() -> ManifoldModel:
    """Flat boundary metric, cos(2t) angular potential, mild short-range tails."""
    return ManifoldModel(
        angular_potential=TrigPoly(cos_coeffs=(0.0, 1.0)),
        short_range=ModelTerm(PowerTail(amp=0.2)),
        radial_metric_pert=ModelTerm(PowerTail(amp=0.1)),
        mixed_metric_pert=ModelTerm(PowerTail(amp=0.05)),
        angular_metric_pert=ModelTerm(PowerTail(amp=0.1)),
        name="default",
    )


def flat_free_model() -> ManifoldModel:
    """Exactly flat and free: the closed-form reference configuration."""
    return ManifoldModel(name="flat_free")


def flat_short_range_model(amp: float = 0.2, mu: float = 2.0) -> ManifoldModel:
    """Flat metric with a single short-range potential tail."""
    return ManifoldModel(
        short_range=ModelTerm(PowerTail(amp=amp, mu=mu)),
        name="flat_short_range",
    )


def seeded_well_model(depth: float = 1.5, center: float = 3.0,
                      width: float = 0.8) -> ManifoldModel:
    """Flat model with an attractive radial well that binds localized states."""
    return ManifoldModel(
        short_range=ModelTerm(GaussianBump(amp=-depth, center=center, width=width)),
        name="seeded_well",
    )
