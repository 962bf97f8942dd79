"""Discrete operators on cone and tube grids.

Every self-adjoint operator is stored in its symmetrized frame: for an
operator M that is symmetric with respect to the node weights W, the stored
matrix is S = W^(1/2) M W^(-1/2), which is exactly symmetric.  Skew-frame
generators (class "skew") store the real antisymmetric matrix K of the
operator A = -i K, so that A itself is self-adjoint and the commutator
i[P, A] = P K - K P stays real.

Kinetic terms are assembled from a corner-quadrature form: each grid cell
contributes, at each of its four corners, the one-sided gradient energy
(dr dth / 4) * G * [c11 fr^2 + 2 c12 fr ft + c22 ft^2].  The resulting form
matrix is symmetric positive semidefinite by construction whenever the
coefficient block is pointwise PSD, and reduces to the standard flux scheme
with arithmetic-mean midpoint coefficients when the block is diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DenseCapExceeded, InvalidLambda
from .geometry import (
    Grid,
    ManifoldModel,
    check_aligned,
    cutoff_j,
    cutoff_j_d1,
    cutoff_j_tilde,
)

__all__ = [
    "LinearOperatorMatrix",
    "build_cone_operator",
    "build_tube_operator",
    "build_conjugate_operator",
    "commutator",
    "identification_matrices",
    "radial_difference",
    "angular_difference",
    "transfer_defect_product",
    "transfer_defect_termwise",
    "action_norm",
    "poisson_prediction",
    "poisson_apply",
]

DENSE_CAP = 4000  # largest node count eligible for dense eigendecomposition


# ----------------------------------------------------------------------
# operator container
# ----------------------------------------------------------------------

@dataclass
class LinearOperatorMatrix:
    """Weighted-frame matrix operator.

    ``sym`` is W^(1/2) M W^(-1/2): exactly symmetric for kind "selfadjoint",
    exactly antisymmetric (the generator K of A = -iK) for kind "skew".
    """

    sym: sp.spmatrix
    weights: np.ndarray
    grid: Grid
    kind: str = "selfadjoint"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._sqw = np.sqrt(self.weights)

    @property
    def size(self) -> int:
        return self.weights.size

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Apply the mathematical operator (complex-safe)."""
        out = (self.sym @ (self._sqw * v)) / self._sqw
        if self.kind == "skew":
            return -1j * out
        return out

    def generator_apply(self, v: np.ndarray) -> np.ndarray:
        """Apply the real generator K (kind "skew"); equals apply for others."""
        return (self.sym @ (self._sqw * v)) / self._sqw

    def matrix(self):
        """Plain-frame matrix of the real generator (M, or K for skew)."""
        if isinstance(self.sym, np.ndarray):
            return (self.sym / self._sqw[:, None]) * self._sqw[None, :]
        d_inv = sp.diags(1.0 / self._sqw)
        d = sp.diags(self._sqw)
        return (d_inv @ self.sym @ d).tocsr()

    def dense_sym(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.size > cap:
            raise DenseCapExceeded(
                f"grid has {self.size} nodes, above the dense cap {cap}"
            )
        if isinstance(self.sym, np.ndarray):
            return self.sym
        return np.asarray(self.sym.todense())

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return np.sum(self.weights * np.conj(u) * v)

    def norm(self, v: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(v) ** 2).real))

    def expectation(self, v: np.ndarray) -> float:
        """<v, Op v> / <v, v> in the weighted inner product (real part)."""
        num = self.inner(v, self.apply(v))
        den = self.inner(v, v).real
        return float(num.real / den)


# ----------------------------------------------------------------------
# corner-quadrature form assembly
# ----------------------------------------------------------------------

def _corner_form(c11, c12, c22, g, dr, dth):
    """Form matrix B on the extended grid: f^T B f = sum of corner energies.

    Coefficient arrays have shape (n_r_ext, n_theta) including both radial
    Dirichlet endpoint rows; theta is periodic.  Returns CSR of the full
    extended size; restriction to interior happens in the caller.
    """
    nre, nth = c11.shape
    rows, cols, vals = [], [], []
    base_i = np.arange(nre)
    for sr in (1, -1):
        ivalid = base_i[(base_i + sr >= 0) & (base_i + sr < nre)]
        for st in (1, -1):
            ii, ll = np.meshgrid(ivalid, np.arange(nth), indexing="ij")
            c = (ii * nth + ll).ravel()
            u = ((ii + sr) * nth + ll).ravel()
            w = (ii * nth + (ll + st) % nth).ravel()
            s = 0.25 * dr * dth * g[ii, ll].ravel()
            al = s * c11[ii, ll].ravel() / dr**2
            ga = s * c22[ii, ll].ravel() / dth**2
            be = s * c12[ii, ll].ravel() * (sr * st) / (dr * dth)
            # (u - c)^2 term
            rows += [u, c, u, c]
            cols += [u, c, c, u]
            vals += [al, al, -al, -al]
            # (w - c)^2 term
            rows += [w, c, w, c]
            cols += [w, c, c, w]
            vals += [ga, ga, -ga, -ga]
            # cross term 2 be (u - c)(w - c)
            rows += [u, w, u, c, w, c, c]
            cols += [w, u, c, u, c, w, c]
            vals += [be, be, -be, -be, -be, -be, 2.0 * be]
    B = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nre * nth, nre * nth),
    ).tocsr()
    B.sum_duplicates()
    return B


def _restrict_interior(B: sp.csr_matrix, nre: int, nth: int) -> sp.csr_matrix:
    keep = np.arange(nth, (nre - 1) * nth)  # drop first/last radial rows
    return B[keep][:, keep]


def _assemble(grid: Grid, c11, c12, c22, g_ext, v_int, weights) -> LinearOperatorMatrix:
    """Shared kinetic + potential assembly in the symmetrized frame."""
    nre = grid.n_r + 2
    nth = grid.n_theta
    B = _restrict_interior(_corner_form(c11, c12, c22, g_ext, grid.dr, grid.dtheta),
                           nre, nth)
    d_inv = sp.diags(1.0 / np.sqrt(weights))
    S = (d_inv @ (0.5 * B) @ d_inv).tocsr()
    if v_int is not None:
        S = S + sp.diags(v_int)
    defect = float(abs(S - S.T).max()) if S.nnz else 0.0
    S = ((S + S.T) * 0.5).tocsr()
    op = LinearOperatorMatrix(sym=S, weights=weights, grid=grid,
                              kind="selfadjoint",
                              meta={"symmetry_defect": defect})
    return op


def _extended_nodes(grid: Grid):
    r_ext = np.concatenate([[grid.r_lo], grid.r, [grid.r_hi]])
    rr, tt = np.meshgrid(r_ext, grid.theta, indexing="ij")
    return rr, tt


def build_cone_operator(model: ManifoldModel, grid: Grid,
                        include_potential: bool = True,
                        coeff_block=None) -> LinearOperatorMatrix:
    """Hamiltonian on the cone grid.

    ``coeff_block`` overrides the kinetic coefficient block with explicit
    (c11, c12, c22) arrays on the extended grid (used for defect operators);
    no positivity is enforced for overrides.
    """
    rr, tt = _extended_nodes(grid)
    if coeff_block is None:
        c11 = model.a1(rr, tt)
        c12 = model.a2(rr, tt) / rr
        c22 = model.a3(rr, tt) / rr**2
    else:
        c11, c12, c22 = coeff_block
    g_ext = model.density(rr, tt)
    weights = grid.weights(model)
    v_int = None
    if include_potential:
        ri, ti = grid.flat_meshes()
        v_int = model.potential(ri, ti)
    op = _assemble(grid, c11, c12, c22, g_ext, v_int, weights)
    op.meta.update(side="cone", model=model.name)
    return op


def build_tube_operator(model: ManifoldModel, grid: Grid,
                        include_potential: bool = True) -> LinearOperatorMatrix:
    """Reference Hamiltonian on the tube grid.

    Flat radial part; angular part carries the radial weight that matches the
    cone's 1/r^2 far out and flattens to 1 through the cap region.
    """
    rr, tt = _extended_nodes(grid)
    c11 = np.ones_like(rr)
    c12 = np.zeros_like(rr)
    c22 = cutoff_j_tilde(rr) * model.boundary_metric.value(tt)
    g_ext = model.tube_density(tt) * np.ones_like(rr)
    weights = grid.weights(model)
    v_int = None
    if include_potential:
        _, ti = grid.flat_meshes()
        v_int = model.angular_potential.value(ti)
    op = _assemble(grid, c11, c12, c22, g_ext, v_int, weights)
    op.meta.update(side="tube", model=model.name)
    return op


# ----------------------------------------------------------------------
# first-order difference matrices
# ----------------------------------------------------------------------

def _radial_shift(grid: Grid, k: int) -> sp.csr_matrix:
    n_r, nth, n = grid.n_r, grid.n_theta, grid.size
    i = np.arange(n_r)
    ok = (i + k >= 0) & (i + k < n_r)
    ii = i[ok]
    rows = (np.repeat(ii, nth) * nth + np.tile(np.arange(nth), ii.size))
    cols = (np.repeat(ii + k, nth) * nth + np.tile(np.arange(nth), ii.size))
    return sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()


def _angular_shift(grid: Grid, k: int) -> sp.csr_matrix:
    n_r, nth, n = grid.n_r, grid.n_theta, grid.size
    ll = np.arange(nth)
    rows = (np.repeat(np.arange(n_r), nth) * nth + np.tile(ll, n_r))
    cols = (np.repeat(np.arange(n_r), nth) * nth + np.tile((ll + k) % nth, n_r))
    return sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()


def radial_difference(grid: Grid) -> sp.csr_matrix:
    """Central radial derivative; Dirichlet ghosts drop out."""
    return ((_radial_shift(grid, 1) - _radial_shift(grid, -1)) / (2.0 * grid.dr)).tocsr()


def angular_difference(grid: Grid) -> sp.csr_matrix:
    """Central periodic angular derivative (zero matrix when n_theta == 1)."""
    if grid.n_theta == 1:
        return sp.csr_matrix((grid.size, grid.size))
    return ((_angular_shift(grid, 1) - _angular_shift(grid, -1))
            / (2.0 * grid.dtheta)).tocsr()


# ----------------------------------------------------------------------
# conjugate operator
# ----------------------------------------------------------------------

def build_conjugate_operator(model: ManifoldModel, grid: Grid, lam: float,
                             pure_dilation: bool = False) -> LinearOperatorMatrix:
    """Energy-adapted conjugate operator A = -i K at spectral scale ``lam``.

    K is the weighted antisymmetrization of the transport field
    ``j r d_r - (1/lam) j V_ang' h d_theta`` (pure dilation drops the cutoff
    and the angular drift).  ``lam`` must be positive and is recorded in meta.
    """
    if not (lam > 0.0) or not np.isfinite(lam):
        raise InvalidLambda(f"spectral scale must be positive; got {lam}")
    rr, tt = grid.flat_meshes()
    if pure_dilation:
        rho_c = rr
        omega_c = np.zeros_like(rr)
    else:
        # one-sided cutoff: on the tube the identification region is the
        # positive axis, so the flow must vanish for r <= 1/2 on both grids
        j = np.where(rr > 0.0, cutoff_j(rr), 0.0)
        rho_c = j * rr
        omega_c = -(1.0 / lam) * j * model.angular_potential.d1(tt) \
            * model.boundary_metric.value(tt)
    X = sp.diags(rho_c) @ radial_difference(grid)
    if np.any(omega_c != 0.0):
        X = X + sp.diags(omega_c) @ angular_difference(grid)
    weights = grid.weights(model)
    sqw = np.sqrt(weights)
    Xs = sp.diags(sqw) @ X @ sp.diags(1.0 / sqw)
    Ks = ((Xs - Xs.T) * 0.5).tocsr()
    return LinearOperatorMatrix(sym=Ks, weights=weights, grid=grid, kind="skew",
                                meta={"lam": lam, "pure_dilation": pure_dilation})


def commutator(p_op: LinearOperatorMatrix,
               a_op: LinearOperatorMatrix) -> LinearOperatorMatrix:
    """i[P, A] for self-adjoint P and skew-stored A = -iK: equals PK - KP."""
    if a_op.kind != "skew":
        raise ValueError("second argument must be a skew-frame generator")
    C = (p_op.sym @ a_op.sym - a_op.sym @ p_op.sym).tocsr()
    defect = float(abs(C - C.T).max()) if C.nnz else 0.0
    C = ((C + C.T) * 0.5).tocsr()
    return LinearOperatorMatrix(sym=C, weights=p_op.weights, grid=p_op.grid,
                                kind="selfadjoint",
                                meta={"symmetry_defect": defect,
                                      "lam": a_op.meta.get("lam")})


# ----------------------------------------------------------------------
# identification maps and transfer defect
# ----------------------------------------------------------------------

def identification_matrices(model: ManifoldModel, cone: Grid, tube: Grid):
    """(J, J_slope): node maps tube -> cone.

    J multiplies by r^(-(dim-1)/2) j(r) on matched nodes; J_slope carries the
    radial slope j'(r) instead (the first transfer-defect coefficient).  The
    radial cutoff is taken on the positive axis, so tube nodes at r <= 0
    are annihilated.
    """
    idx = check_aligned(cone, tube)
    half = (model.dim - 1) / 2.0
    amp_j = cone.r**-half * cutoff_j(cone.r)
    amp_js = cone.r**-half * cutoff_j_d1(cone.r)
    nth = cone.n_theta
    rows = np.repeat(np.arange(cone.n_r), nth) * nth + np.tile(np.arange(nth),
                                                               cone.n_r)
    cols = np.repeat(idx, nth) * nth + np.tile(np.arange(nth), cone.n_r)
    shape = (cone.size, tube.size)
    J = sp.coo_matrix((np.repeat(amp_j, nth), (rows, cols)), shape=shape).tocsr()
    Js = sp.coo_matrix((np.repeat(amp_js, nth), (rows, cols)), shape=shape).tocsr()
    return J, Js


def weighted_adjoint(M: sp.spmatrix, w_rows: np.ndarray,
                     w_cols: np.ndarray) -> sp.csr_matrix:
    """Adjoint of M: (cols-space) <- (rows-space) w.r.t. the two weights."""
    return (sp.diags(1.0 / w_cols) @ M.T @ sp.diags(w_rows)).tocsr()


def transfer_defect_product(p_cone: LinearOperatorMatrix,
                            p_tube: LinearOperatorMatrix,
                            J: sp.spmatrix) -> sp.csr_matrix:
    """P J - J P_ref as assembled, the product route."""
    return (p_cone.matrix() @ J - J @ p_tube.matrix()).tocsr()


def transfer_defect_termwise(model: ManifoldModel, cone: Grid,
                             tube: Grid) -> sp.csr_matrix:
    """P J - J P_ref expanded term by term.

    Radial part: -(1/2)(J_s d_r + d_r J_s) + kappa/r^2 J - c_n/r J_s with
    kappa = ((dim-1)^2 - 2(dim-1))/8 and c_n = (dim-1)/4.  Metric
    perturbations enter through a kinetic defect block on the cone side, the
    potential through its short-range tail.
    """
    n = model.dim
    kappa = ((n - 1) ** 2 - 2.0 * (n - 1)) / 8.0
    c_n = (n - 1) / 4.0
    J, Js = identification_matrices(model, cone, tube)
    dr_c = radial_difference(cone)
    dr_t = radial_difference(tube)
    rr, tt = cone.flat_meshes()
    radial = (-0.5 * (Js @ dr_t + dr_c @ Js)
              + sp.diags(kappa / rr**2) @ J
              - sp.diags(c_n / rr) @ Js)
    # kinetic defect: cone block minus the flat/tube reference block
    rre, tte = _extended_nodes(cone)
    c11 = model.a1(rre, tte) - 1.0
    c12 = model.a2(rre, tte) / rre
    c22 = model.a3(rre, tte) / rre**2 \
        - cutoff_j_tilde(rre) * model.boundary_metric.value(tte)
    defect_op = build_cone_operator(model, cone, include_potential=False,
                                    coeff_block=(c11, c12, c22))
    short = model.short_range.value(rr, tt) if model.short_range is not None \
        else np.zeros_like(rr)
    return (radial + defect_op.matrix() @ J + sp.diags(short) @ J).tocsr()


def action_norm(D: sp.spmatrix, phi: np.ndarray, w_out: np.ndarray,
                w_in: np.ndarray) -> float:
    """||D phi||_out / ||phi||_in for a matrix mapping between weighted spaces."""
    num = np.sqrt(np.sum(w_out * np.abs(D @ phi) ** 2))
    den = np.sqrt(np.sum(w_in * np.abs(phi) ** 2))
    return float(num / den)


# ----------------------------------------------------------------------
# classical bracket prediction
# ----------------------------------------------------------------------

def poisson_prediction(model: ManifoldModel, grid: Grid, lam: float) -> dict:
    """Classical-bracket coefficient fields of i[P, A] on the cone grid.

    Returns node arrays (rho2, rhow, w2, zero) such that the bracket symbol
    is rho2 * rho^2 + rhow * rho * w + w2 * w^2 + zero, with rho dual to r
    and w dual to theta.  Valid as an operator prediction away from the cap
    (the quantization drops subprincipal curvature corrections supported in
    the cutoff zone).
    """
    if not (lam > 0.0):
        raise InvalidLambda(f"spectral scale must be positive; got {lam}")
    rr, tt = grid.flat_meshes()
    j = cutoff_j(rr)
    jp = cutoff_j_d1(rr)
    a1 = model.a1(rr, tt)
    a2 = model.a2(rr, tt)
    a3 = model.a3(rr, tt)
    vth_p = model.angular_potential.d1(tt)
    vth_pp = model.angular_potential.d2(tt)
    h = model.boundary_metric.value(tt)
    h_p = model.boundary_metric.d1(tt)
    drift = j * vth_p * h / lam                # angular transport speed
    drift_th = j * (vth_pp * h + vth_p * h_p) / lam
    drift_r = jp * vth_p * h / lam
    da1_r, da1_t = model.da1_dr(rr, tt), model.da1_dth(rr, tt)
    da2_r, da2_t = model.da2_dr(rr, tt), model.da2_dth(rr, tt)
    da3_r, da3_t = model.da3_dr(rr, tt), model.da3_dth(rr, tt)
    dv_r, dv_t = model.dV_dr(rr, tt), model.dV_dth(rr, tt)

    rho2 = a1 * (j + rr * jp) - 0.5 * j * rr * da1_r + 0.5 * drift * da1_t
    rhow = (a2 * (j + rr * jp) / rr - a1 * drift_r - a2 * drift_th / rr
            - j * da2_r + j * a2 / rr + drift * da2_t / rr)
    w2 = (-a2 * drift_r / rr - a3 * drift_th / rr**2
          - 0.5 * j * da3_r / rr + j * a3 / rr**2
          + 0.5 * drift * da3_t / rr**2)
    zero = -j * rr * dv_r + drift * dv_t
    return {"rho2": rho2, "rhow": rhow, "w2": w2, "zero": zero,
            "lam": lam}


def poisson_apply(pred: dict, grid: Grid, phi: np.ndarray) -> np.ndarray:
    """Quantize the bracket symbol and apply it to a node vector.

    Symmetric (Weyl-like) ordering: quadratic terms are applied as
    -d_x c d_x with the coefficient sandwiched, cross terms split evenly.
    Adequate at O(dx^2) for the smooth packets used in cross-checks.
    """
    dr = radial_difference(grid)
    dt = angular_difference(grid)
    out = pred["zero"] * phi
    out = out - dr @ (pred["rho2"] * (dr @ phi))
    out = out - dt @ (pred["w2"] * (dt @ phi))
    cross = dr @ (pred["rhow"] * (dt @ phi)) + dt @ (pred["rhow"] * (dr @ phi))
    out = out - 0.5 * cross
    return out
