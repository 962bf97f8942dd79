"""Spectral tools: windows, filters, eigenpairs, resolvents, LAP scans.

Energy windows carry their exclusion lists (stationary values of the angular
potential, detected localized eigenvalues) so that downstream positivity and
resolvent-limit runs only ever see admissible intervals.  Functions of an
operator go through a dense eigendecomposition at desk scale, or a Chebyshev
polynomial route matrix-free above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.fft import dct

from .errors import (
    ConfigError,
    DenseCapExceeded,
    NearSingular,
    NotConverged,
    WindowNotClean,
    WindowTooWide,
)
from .geometry import smoothstep
from .operators import LinearOperatorMatrix

__all__ = [
    "SpectralWindow",
    "FilterProfile",
    "spectral_bounds",
    "eigenpairs",
    "dense_eig",
    "level_spacing",
    "spectral_filter",
    "filter_apply",
    "ResolventSolver",
    "resolvent_apply",
    "weighted_resolvent_norm",
    "lap_scan",
    "LapScanResult",
    "inner_mass_fraction",
    "localized_states",
]

FILTER_DENSE_CAP = 6000


# ----------------------------------------------------------------------
# windows and filter profiles
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralWindow:
    """Open energy interval with exclusion points and a safety margin."""

    lo: float
    hi: float
    exclusions: tuple = ()
    margin: float = 0.0

    def __post_init__(self):
        if not (self.hi > self.lo):
            raise ConfigError(f"window must have hi > lo; got ({self.lo}, {self.hi})")
        if self.margin < 0.0:
            raise ConfigError("window margin must be nonnegative")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, e) -> np.ndarray | bool:
        e = np.asarray(e, dtype=float)
        out = (e > self.lo) & (e < self.hi)
        return bool(out) if out.ndim == 0 else out

    def validate_clean(self) -> "SpectralWindow":
        """Raise WindowNotClean if any fattened exclusion meets the interval."""
        for x in self.exclusions:
            if self.lo - self.margin < x < self.hi + self.margin:
                raise WindowNotClean(
                    f"window ({self.lo}, {self.hi}) meets excluded point {x} "
                    f"within margin {self.margin}"
                )
        return self

    def with_exclusions(self, points, margin=None) -> "SpectralWindow":
        pts = tuple(sorted(set(self.exclusions) | set(float(p) for p in points)))
        return SpectralWindow(self.lo, self.hi, pts,
                              self.margin if margin is None else margin)


@dataclass(frozen=True)
class FilterProfile:
    """Smooth bump adapted to a window: 1 on the plateau, 0 outside.

    ``rise`` is the width of each smooth shoulder; the plateau is
    [lo + rise, hi - rise] and must be nonempty.
    """

    window: SpectralWindow
    rise: float

    def __post_init__(self):
        if not (0.0 < self.rise <= 0.5 * self.window.width):
            raise ConfigError(
                f"rise must lie in (0, width/2]; got {self.rise} for width "
                f"{self.window.width}"
            )

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        up = smoothstep((e - self.window.lo) / self.rise)
        down = smoothstep((self.window.hi - e) / self.rise)
        return up * down

    @classmethod
    def for_window(cls, window: SpectralWindow,
                   rise_fraction: float = 0.25) -> "FilterProfile":
        return cls(window=window, rise=rise_fraction * window.width)


# ----------------------------------------------------------------------
# eigensolvers
# ----------------------------------------------------------------------

def _start_vector(n: int) -> np.ndarray:
    # fixed, nowhere-zero start vector keeps ARPACK runs bit-reproducible
    v = np.sin(np.linspace(1.0, 7.0, n)) + 1.5
    return v / np.linalg.norm(v)


def spectral_bounds(op: LinearOperatorMatrix, margin_frac: float = 1e-3):
    """(lower, upper) bounds on the spectrum, padded by a small margin."""
    cached = op.meta.get("spectral_bounds")
    if cached is not None:
        return cached
    S = op.sym
    n = S.shape[0]
    try:
        lo = spla.eigsh(S, k=1, which="SA", v0=_start_vector(n),
                        return_eigenvectors=False)[0]
        hi = spla.eigsh(S, k=1, which="LA", v0=_start_vector(n),
                        return_eigenvectors=False)[0]
    except (spla.ArpackNoConvergence, RuntimeError):
        # Gershgorin fallback: crude but safe
        d = S.diagonal()
        radius = np.asarray(np.abs(S).sum(axis=1)).ravel() - np.abs(d)
        lo, hi = float(np.min(d - radius)), float(np.max(d + radius))
    pad = margin_frac * max(hi - lo, 1.0)
    bounds = (float(lo) - pad, float(hi) + pad)
    op.meta["spectral_bounds"] = bounds
    return bounds


def dense_eig(op: LinearOperatorMatrix, cap: int = None):
    """Cached dense eigendecomposition of the symmetric frame matrix.

    Returns (evals ascending, frame eigenvectors as columns).  Divide columns
    by sqrt(weights) to obtain weight-orthonormal eigenvectors.
    """
    cached = op.meta.get("dense_eig")
    if cached is not None:
        return cached
    dense = op.dense_sym() if cap is None else op.dense_sym(cap=cap)
    evals, evecs = np.linalg.eigh(dense)
    op.meta["dense_eig"] = (evals, evecs)
    return evals, evecs


def eigenpairs(op: LinearOperatorMatrix, window: SpectralWindow,
               max_count: int = 64, residual_tol: float = 1e-8):
    """Eigenpairs inside the window via shift-invert at the window center.

    Returns (evals, evecs) with evecs weight-orthonormal columns.  Raises
    WindowTooWide when the window holds more than ``max_count`` eigenvalues
    and NotConverged when a residual misses ``residual_tol``.
    """
    n = op.size
    k = min(max(8, max_count + 2), n - 2)
    inside_prev = -1
    while True:
        if k >= n - 2 or n <= 600:
            evals, evecs = dense_eig(op, cap=max(n, 1))
            mask = window.contains(evals)
            evals, evecs = evals[mask], evecs[:, mask]
            break
        try:
            evals, evecs = spla.eigsh(op.sym, k=k, sigma=window.center,
                                      v0=_start_vector(n))
        except spla.ArpackNoConvergence as exc:
            raise NotConverged(f"shift-invert iteration stalled: {exc}") from exc
        except RuntimeError:
            # shift landed on an eigenvalue; nudge it off by a sliver
            evals, evecs = spla.eigsh(op.sym, k=k,
                                      sigma=window.center + 1e-9 * window.width,
                                      v0=_start_vector(n))
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        mask = window.contains(evals)
        inside = int(np.sum(mask))
        if inside > max_count:
            raise WindowTooWide(
                f"window ({window.lo}, {window.hi}) holds at least {inside} "
                f"eigenvalues, above the cap {max_count}"
            )
        # an extreme Ritz value inside the window means the window may not be
        # exhausted — but only retry while enlarging k still finds new
        # in-window eigenvalues (a spectral edge can sit inside the window,
        # leaving the extreme there no matter how many pairs are computed)
        boundary_risk = bool(mask[0]) or bool(mask[-1])
        if boundary_risk and inside > inside_prev and k < n - 2:
            inside_prev = inside
            k = min(2 * k, n - 2)
            continue
        evals, evecs = evals[mask], evecs[:, mask]
        break
    if evals.size > max_count:
        raise WindowTooWide(
            f"window ({window.lo}, {window.hi}) holds {evals.size} eigenvalues, "
            f"above the cap {max_count}"
        )
    # residual check in the weighted norm = frame 2-norm
    for i in range(evals.size):
        res = np.linalg.norm(op.sym @ evecs[:, i] - evals[i] * evecs[:, i])
        if res > residual_tol:
            raise NotConverged(f"eigenpair residual {res:.2e} above "
                               f"{residual_tol:.0e}")
    vecs_w = evecs / np.sqrt(op.weights)[:, None]
    return evals, vecs_w


def level_spacing(op: LinearOperatorMatrix, e: float, k: int = 40) -> float:
    """Mean gap between eigenvalues adjacent to energy e."""
    n = op.size
    if n <= 600:
        evals, _ = dense_eig(op, cap=max(n, 1))
    else:
        kk = min(k, n - 2)
        try:
            evals = spla.eigsh(op.sym, k=kk, sigma=e, v0=_start_vector(n),
                               return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise NotConverged(f"level-spacing solve near {e} stalled") from exc
        evals = np.sort(evals)
    idx = np.searchsorted(evals, e)
    lo = max(idx - 5, 0)
    hi = min(idx + 5, evals.size)
    local = evals[lo:hi]
    if local.size < 2:
        raise NotConverged(f"too few eigenvalues found near {e}")
    return float(np.mean(np.diff(local)))


# ----------------------------------------------------------------------
# functions of an operator
# ----------------------------------------------------------------------

def spectral_filter(op: LinearOperatorMatrix, profile: FilterProfile,
                    cap: int = FILTER_DENSE_CAP) -> LinearOperatorMatrix:
    """chi(op) via dense eigendecomposition (desk scale)."""
    if op.size > cap:
        raise DenseCapExceeded(
            f"{op.size} nodes exceeds the dense filter cap {cap}; "
            "use filter_apply for matrix-free application"
        )
    evals, evecs = dense_eig(op, cap=cap)
    chi = profile(evals)
    F = (evecs * chi) @ evecs.T
    F = 0.5 * (F + F.T)
    return LinearOperatorMatrix(sym=F, weights=op.weights, grid=op.grid,
                                kind="selfadjoint",
                                meta={"filter": profile, "mode": "dense"})


def _chebyshev_coefficients(profile, bounds, tol):
    """Chebyshev coefficients of the profile on the spectral range."""
    lo, hi = bounds
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    # degree scales with how sharp the shoulders are relative to the range
    degree = int(min(20000, max(64, 8.0 * half / profile.rise)))
    for _ in range(4):
        m = 2 * degree
        x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
        vals = profile(mid + half * x)
        c = dct(vals, type=2) / m
        c[0] *= 0.5
        c = c[: degree + 1]
        # verify sup error on a dense probe grid
        probe = np.linspace(-1.0, 1.0, 4001)
        approx = np.polynomial.chebyshev.chebval(probe, c)
        err = np.max(np.abs(approx - profile(mid + half * probe)))
        if err <= tol:
            return c, mid, half, float(err)
        degree *= 2
    raise NotConverged(f"chebyshev fit stalled at sup error {err:.2e}")


def filter_apply(op: LinearOperatorMatrix, profile: FilterProfile,
                 v: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """chi(op) v matrix-free via a Chebyshev expansion (Clenshaw recurrence)."""
    bounds = spectral_bounds(op)
    key = ("cheb", profile.window.lo, profile.window.hi, profile.rise, tol)
    cached = op.meta.get(key)
    if cached is None:
        cached = _chebyshev_coefficients(profile, bounds, tol)
        op.meta[key] = cached
    c, mid, half, _ = cached
    S = op.sym
    sqw = np.sqrt(op.weights)
    u = sqw * v

    def scaled(x):
        return (S @ x - mid * x) / half

    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    for k in range(len(c) - 1, 0, -1):
        b1, b2 = c[k] * u + 2.0 * scaled(b1) - b2, b1
    out = c[0] * u + scaled(b1) - b2
    return out / sqw


# ----------------------------------------------------------------------
# resolvents
# ----------------------------------------------------------------------

class ResolventSolver:
    """Factorized (op - z)^(-1); reusable across right-hand sides.

    The factorization also serves z-conjugate solves: for real symmetric S,
    (S - conj(z))^(-1) u = conj((S - z)^(-1) conj(u)).
    """

    def __init__(self, op: LinearOperatorMatrix, z: complex):
        self.op = op
        self.z = complex(z)
        A = (op.sym - self.z * sp.identity(op.size, format="csr")).tocsc()
        try:
            self._lu = spla.splu(A.astype(np.complex128))
        except RuntimeError as exc:
            raise NearSingular(f"factorization at z = {z} failed: {exc}") from exc
        self._sqw = np.sqrt(op.weights)

    def solve_frame(self, u: np.ndarray, conjugate: bool = False) -> np.ndarray:
        if conjugate:
            return np.conj(self._lu.solve(np.conj(u)))
        return self._lu.solve(u.astype(np.complex128))

    def apply(self, rhs: np.ndarray) -> np.ndarray:
        x = self.solve_frame(self._sqw * rhs)
        return x / self._sqw


def resolvent_apply(op: LinearOperatorMatrix, z: complex, rhs: np.ndarray,
                    detected_eigs=(), residual_tol: float = 1e-10) -> np.ndarray:
    """(op - z)^(-1) rhs with residual verification."""
    z = complex(z)
    if z.imag == 0.0 and detected_eigs is not None and len(detected_eigs):
        dist = np.min(np.abs(np.asarray(detected_eigs, dtype=float) - z.real))
        if dist <= 1e-8:
            raise NearSingular(
                f"real shift {z.real} within 1e-8 of a detected eigenvalue"
            )
    solver = ResolventSolver(op, z)
    x = solver.apply(rhs)
    res = op.apply(x) - z * x - rhs
    rel = op.norm(res) / max(op.norm(rhs), 1e-300)
    if rel > residual_tol:
        raise NearSingular(f"resolvent residual {rel:.2e} above "
                           f"{residual_tol:.0e}; shift too close to spectrum")
    return x


def angle_weight(grid, s: float) -> np.ndarray:
    """Node values of <r>^(-s) = (1 + r^2)^(-s/2)."""
    rr, _ = grid.flat_meshes()
    return (1.0 + rr**2) ** (-0.5 * s)


def weighted_resolvent_norm(op: LinearOperatorMatrix, z: complex, s: float = 0.7,
                            tol: float = 1e-3, max_iter: int = 400,
                            solver: ResolventSolver = None) -> float:
    """Operator norm of <r>^(-s) (op - z)^(-1) <r>^(-s) by power iteration.

    Each iteration costs two triangular solves on one cached factorization
    (the adjoint solve reuses it through complex conjugation).
    """
    if not (0.0 < s):
        raise ConfigError(f"weight exponent must be positive; got {s}")
    if solver is None:
        solver = ResolventSolver(op, z)
    w = angle_weight(op.grid, s)
    n = op.size
    rng = np.random.default_rng(1234)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    x /= np.linalg.norm(x)
    est_prev = 0.0
    for it in range(max_iter):
        y = w * solver.solve_frame(w * x)               # B x
        y = w * solver.solve_frame(w * y, conjugate=True)  # B* (B x)
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        est = math.sqrt(nrm)  # ||B|| ~ sqrt(largest eig of B*B)
        x = y / nrm
        if it >= 2 and abs(est - est_prev) <= tol * est:
            return float(est)
        est_prev = est
    raise NotConverged(
        f"power iteration for the weighted resolvent norm at z = {z} did not "
        f"settle within {max_iter} iterations (last estimate {est_prev:.4g})"
    )


# ----------------------------------------------------------------------
# LAP scan
# ----------------------------------------------------------------------

@dataclass
class LapScanResult:
    e_values: np.ndarray
    eps_values: np.ndarray
    norms: np.ndarray            # shape (n_E, n_eps)
    verdicts: list
    slopes: np.ndarray           # fitted d log n / d log(1/eps), last decade
    plateau_deltas: np.ndarray   # relative change over the last decade
    eps_floor: float
    spacing: float
    s: float
    window: SpectralWindow
    field_rows: list = field(default_factory=list)

    def rows(self):
        """(E, eps, norm, flag) rows for CSV export."""
        out = []
        for i, e in enumerate(self.e_values):
            for jj, eps in enumerate(self.eps_values):
                out.append((float(e), float(eps), float(self.norms[i, jj]),
                            self.verdicts[i]))
        return out


def _last_decade_fit(eps: np.ndarray, norms: np.ndarray):
    """Growth diagnostics on the last eps decade of a scan column.

    Returns (slope, delta, flattening) where slope fits
    d log(norm) / d log(1/eps) over the decade, delta is the relative norm
    change across it, and flattening is slope_small_eps - slope_large_eps
    over the two half-decades (negative = the curve levels off).
    """
    lo = eps[-1]
    mask = eps <= 10.0 * lo * (1 + 1e-12)
    x = np.log(1.0 / eps[mask])
    y = np.log(norms[mask])
    slope = float(np.polyfit(x, y, 1)[0]) if x.size >= 2 else 0.0
    delta = float(abs(norms[-1] - norms[mask][0]) / norms[-1])
    mid = 0.5 * (x[0] + x[-1])
    lo_half = x >= mid  # larger x = smaller eps
    hi_half = x <= mid
    if np.sum(lo_half) >= 2 and np.sum(hi_half) >= 2:
        s_lo = float(np.polyfit(x[lo_half], y[lo_half], 1)[0])
        s_hi = float(np.polyfit(x[hi_half], y[hi_half], 1)[0])
        flattening = s_lo - s_hi
    else:
        flattening = 0.0
    return slope, delta, flattening


def lap_scan(op: LinearOperatorMatrix, window: SpectralWindow, s: float = 0.7,
             eps_grid=None, n_e: int = 10, eps_floor: float = None,
             spacing: float = None, plateau_tol: float = 0.05,
             blowup_slope: float = 0.8, plateau_slope: float = 0.4,
             e_points_extra=()) -> LapScanResult:
    """Weighted-resolvent norms over (E, eps); flags PLATEAU/BLOWUP per E.

    BLOWUP: fitted growth exponent at least ``blowup_slope`` over the last
    eps decade — the 1/eps signature of a point-spectrum energy.

    PLATEAU: the column is consistent with a bounded eps -> 0 limit.  Either
    the relative change over the last decade is already below ``plateau_tol``,
    or the fitted exponent stays below ``plateau_slope`` while the slope also
    decreases toward small eps (a curve leveling off).  The second clause is
    needed because a bounded limit with a slowly decaying weight is approached
    like eps^(2s-1) — a tail whose per-decade change dwarfs ``plateau_tol``
    at any floor a finite grid can reach, while its exponent (<= 2s-1 = 0.4
    at s = 0.7) stays far below the blowup signature.  ``plateau_deltas``
    reports the raw per-decade change so the trust region stays documented.

    The eps floor defaults to 10x the measured level spacing at the window
    center — below that the discrete spectrum is resolved individually and
    the scan would only report grid artifacts.  ``e_points_extra`` appends
    energies (detected localized eigenvalues, say) to the scanned grid.
    """
    window.validate_clean()
    if eps_grid is None:
        if spacing is None:
            spacing = level_spacing(op, window.center)
        if eps_floor is None:
            eps_floor = 10.0 * spacing
        if eps_floor <= 0.0 or eps_floor >= 1.0:
            raise ConfigError(
                f"eps floor {eps_floor} outside (0, 1); the grid is too "
                "coarse for a meaningful scan at this energy"
            )
        n_pts = max(6, int(math.ceil(4 * math.log10(1.0 / eps_floor))) + 1)
        eps_grid = np.geomspace(1.0, eps_floor, n_pts)
    eps_grid = np.asarray(sorted(eps_grid, reverse=True), dtype=float)
    if eps_floor is None:
        eps_floor = float(eps_grid[-1])
    if spacing is None:
        spacing = float("nan")
    e_values = np.linspace(window.lo, window.hi, n_e + 2)[1:-1]
    if len(e_points_extra):
        e_values = np.concatenate([e_values,
                                   np.asarray(e_points_extra, dtype=float)])
    norms = np.zeros((e_values.size, eps_grid.size))
    for i, e in enumerate(e_values):
        for jj, eps in enumerate(eps_grid):
            solver = ResolventSolver(op, complex(e, eps))
            norms[i, jj] = weighted_resolvent_norm(op, complex(e, eps), s=s,
                                                   solver=solver)
    verdicts, slopes, deltas = [], [], []
    for i in range(e_values.size):
        slope, delta, flattening = _last_decade_fit(eps_grid, norms[i])
        slopes.append(slope)
        deltas.append(delta)
        if slope >= blowup_slope:
            verdicts.append("BLOWUP")
        elif delta < plateau_tol:
            verdicts.append("PLATEAU")
        elif slope <= plateau_slope and flattening <= 0.05:
            verdicts.append("PLATEAU")
        else:
            verdicts.append("UNDECIDED")
    return LapScanResult(e_values=e_values, eps_values=eps_grid, norms=norms,
                         verdicts=verdicts, slopes=np.asarray(slopes),
                         plateau_deltas=np.asarray(deltas),
                         eps_floor=float(eps_floor), spacing=float(spacing),
                         s=s, window=window)


# ----------------------------------------------------------------------
# localized-state detection
# ----------------------------------------------------------------------

def inner_mass_fraction(op: LinearOperatorMatrix, vec: np.ndarray,
                        r_core: float) -> float:
    rr, _ = op.grid.flat_meshes()
    mass = op.weights * np.abs(vec) ** 2
    total = float(np.sum(mass))
    return float(np.sum(mass[rr <= r_core]) / total)


def localized_states(op: LinearOperatorMatrix, window: SpectralWindow = None,
                     r_core: float = 2.0, frac: float = 0.25):
    """Eigenvalues whose eigenvectors hold > frac of their mass in r <= r_core.

    These are the discrete-spectrum surrogates: states that do not escape to
    large r.  Classifies the full dense eigenbasis (restricted to ``window``
    when given) and returns (evals, fractions) for the localized subset.
    """
    evals, evecs = dense_eig(op)
    if window is not None:
        mask = window.contains(evals)
        evals, evecs = evals[mask], evecs[:, mask]
    vecs_w = evecs / np.sqrt(op.weights)[:, None]
    keep_e, keep_f = [], []
    for i in range(evals.size):
        f = inner_mass_fraction(op, vecs_w[:, i], r_core)
        if f > frac:
            keep_e.append(float(evals[i]))
            keep_f.append(f)
    return np.asarray(keep_e), np.asarray(keep_f)
