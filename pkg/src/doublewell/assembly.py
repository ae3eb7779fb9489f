"""Sparse operator assembly for the two-boson problem.

One-dimensional pieces are standard P1 finite elements. The two-dimensional
one-body operator and mass are composed as Kronecker products of 1D factors
with trapezoidal (lumped) node weights: on the diagonal-split tensor mesh this
reproduces the P1 triangle stiffness exactly and makes the noninteracting
spectrum exactly separable into pairwise sums of 1D levels, which the test
suite exploits as a machine-precision oracle.

Interaction matrices are genuine triangle/edge quadratures on the 2D mesh:
the contact kind is a line integral along the diagonal edges (arclength
measure), the Coulomb kinds are triangle quadratures with strictly interior
points so the hard-core integrand is never sampled on x1 = x2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError
from .mesh import Mesh1D, Mesh2D
from .model import InteractionKind, InteractionSpec, PotentialSpec, potential_eval

SQRT2 = np.sqrt(2.0)

# Strictly interior degree-2 rule: barycentric (2/3, 1/6, 1/6) cyclic.
_TRI_Q3_POINTS = np.array([
    [2 / 3, 1 / 6, 1 / 6],
    [1 / 6, 2 / 3, 1 / 6],
    [1 / 6, 1 / 6, 2 / 3],
])
_TRI_Q3_WEIGHTS = np.array([1 / 3, 1 / 3, 1 / 3])

# Degree-5 seven-point rule, all points strictly interior.
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_W1, _W2 = 0.132394152788506, 0.125939180544827
_TRI_Q7_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
_TRI_Q7_WEIGHTS = np.array([0.225, _W1, _W1, _W1, _W2, _W2, _W2])

# 3-point Gauss-Legendre on [0, 1].
_EDGE_Q3_POINTS = np.array([0.5 - np.sqrt(15) / 10, 0.5, 0.5 + np.sqrt(15) / 10])
_EDGE_Q3_WEIGHTS = np.array([5 / 18, 8 / 18, 5 / 18])


# ---------------------------------------------------------------------------
# 1D assembly (full grid, no boundary conditions applied)

def stiffness_matrix_1d(mesh: Mesh1D) -> sp.csr_matrix:
    """P1 stiffness for -d2/dx2 over all nodes."""
    h = mesh.spacings
    n = mesh.n_nodes
    e = np.arange(n - 1)
    rows = np.concatenate([e, e + 1, e, e + 1])
    cols = np.concatenate([e, e + 1, e + 1, e])
    vals = np.concatenate([1 / h, 1 / h, -1 / h, -1 / h])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def mass_matrix_1d(mesh: Mesh1D) -> sp.csr_matrix:
    """Consistent P1 mass over all nodes (row sums give a partition of unity)."""
    h = mesh.spacings
    n = mesh.n_nodes
    e = np.arange(n - 1)
    rows = np.concatenate([e, e + 1, e, e + 1])
    cols = np.concatenate([e, e + 1, e + 1, e])
    vals = np.concatenate([h / 3, h / 3, h / 6, h / 6])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def lumped_weights_1d(mesh: Mesh1D) -> np.ndarray:
    """Trapezoidal node weights (diagonal lumped mass)."""
    h = mesh.spacings
    w = np.zeros(mesh.n_nodes)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def potential_matrix_1d(mesh: Mesh1D, spec: PotentialSpec) -> sp.csr_matrix:
    """Element-exact potential matrix; V is constant per element because the
    mesh carries the potential breakpoints as nodes."""
    h = mesh.spacings
    n = mesh.n_nodes
    mids = 0.5 * (mesh.nodes[:-1] + mesh.nodes[1:])
    v = potential_eval(mids, spec)
    e = np.arange(n - 1)
    rows = np.concatenate([e, e + 1, e, e + 1])
    cols = np.concatenate([e, e + 1, e + 1, e])
    vals = np.concatenate([v * h / 3, v * h / 3, v * h / 6, v * h / 6])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def assemble_1d(mesh: Mesh1D, spec: PotentialSpec, lumped_mass: bool = False):
    """Single-particle operator H1 = stiffness + potential and mass M1 with
    the Dirichlet boundary rows/columns eliminated.

    The consistent mass is the default; ``lumped_mass`` selects the trapezoidal
    diagonal mass, which is the 1D factor of the 2D assembly (pairwise sums of
    its eigenvalues reproduce the U = 0 two-body spectrum exactly).
    """
    keep = np.arange(1, mesh.n_nodes - 1)
    h1 = (stiffness_matrix_1d(mesh) + potential_matrix_1d(mesh, spec)).tocsc()
    h1 = h1[np.ix_(keep, keep)].tocsr()
    if lumped_mass:
        m1 = sp.diags(lumped_weights_1d(mesh)[keep]).tocsr()
    else:
        m1 = mass_matrix_1d(mesh).tocsc()[np.ix_(keep, keep)].tocsr()
    return h1, m1


# ---------------------------------------------------------------------------
# Bosonic (exchange-symmetric) basis

@dataclass(frozen=True)
class BosonicBasis:
    """Symmetrized pair basis over retained grid nodes.

    Column k of ``symmetrizer`` holds the full-grid expansion of the k-th
    basis function: node (a, b) and its mirror (b, a) with weight 1/sqrt(2),
    or the diagonal node (a, a) alone with weight 1. Outer-boundary nodes are
    always excluded; diagonal nodes are excluded for the hard-core kind, which
    imposes the wavefunction node on x1 = x2 exactly.
    """

    mesh: Mesh2D
    hard_core: bool
    pairs: np.ndarray            # (n_sym, 2) 1D node index pairs, a <= b
    symmetrizer: sp.csr_matrix   # (n_full, n_sym)

    @classmethod
    def from_mesh(cls, mesh: Mesh2D, hard_core: bool) -> "BosonicBasis":
        n = mesh.grid.n_nodes
        a, b = np.triu_indices(n)
        inner = (a > 0) & (a < n - 1) & (b > 0) & (b < n - 1)
        if hard_core:
            inner &= a != b
        a, b = a[inner], b[inner]
        pairs = np.column_stack([a, b])
        k = np.arange(len(pairs))
        diag = a == b
        rows = np.concatenate([a * n + b, (b * n + a)[~diag]])
        cols = np.concatenate([k, k[~diag]])
        vals = np.concatenate([
            np.where(diag, 1.0, 1 / SQRT2),
            np.full((~diag).sum(), 1 / SQRT2),
        ])
        s = sp.csr_matrix((vals, (rows, cols)), shape=(n * n, len(pairs)))
        return cls(mesh=mesh, hard_core=hard_core, pairs=pairs, symmetrizer=s)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def reduce(self, a_full: sp.spmatrix) -> sp.csr_matrix:
        """Project a full-grid operator onto the symmetric subspace and
        re-symmetrize so storage is symmetric to the last bit."""
        s = self.symmetrizer
        a = (s.T @ a_full @ s).tocsr()
        return (0.5 * (a + a.T)).tocsr()

    def reduce_diagonal(self, d_full: np.ndarray) -> sp.csr_matrix:
        """Reduce a diagonal full-grid operator; the result stays diagonal."""
        n = self.mesh.grid.n_nodes
        a, b = self.pairs[:, 0], self.pairs[:, 1]
        vals = np.where(
            a == b, d_full[a * n + b], 0.5 * (d_full[a * n + b] + d_full[b * n + a])
        )
        return sp.diags(vals).tocsr()

    def pair_indices(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Indices of canonical pairs (a <= b) in this basis; -1 if absent."""
        n = self.mesh.grid.n_nodes
        keys = self.pairs[:, 0] * n + self.pairs[:, 1]
        want = np.minimum(a, b) * n + np.maximum(a, b)
        pos = np.searchsorted(keys, want)
        pos = np.clip(pos, 0, len(keys) - 1)
        ok = keys[pos] == want
        return np.where(ok, pos, -1)

    def expand(self, coefficients: np.ndarray) -> np.ndarray:
        """Full-grid nodal values of a symmetric-basis coefficient vector."""
        return self.symmetrizer @ coefficients

    def mirror_permutation(self) -> np.ndarray:
        """Permutation realizing the left-right mirror on the pair basis.

        Requires a mirror-symmetric 1D mesh; raises ConfigurationError
        otherwise.
        """
        x = self.mesh.grid.nodes
        total = x[0] + x[-1]
        if not np.allclose(x + x[::-1], total, atol=1e-9 * max(1.0, abs(total))):
            raise ConfigurationError("mesh is not mirror-symmetric")
        n = self.mesh.grid.n_nodes
        ma = n - 1 - self.pairs[:, 1]
        mb = n - 1 - self.pairs[:, 0]
        perm = self.pair_indices(ma, mb)
        if np.any(perm < 0):
            raise ConfigurationError("mirror image leaves the basis")
        return perm


# ---------------------------------------------------------------------------
# Interaction matrices (full grid)

def _triangle_quadrature_matrix(mesh: Mesh2D, kernel, hard_core: bool) -> sp.csr_matrix:
    """Assemble integral of phi_i phi_j kernel(x1 - x2) over all triangles.

    Triangles touching the diagonal get the 7-point rule, the rest the 3-point
    rule; both rules sample strictly inside the triangle. For the hard-core
    kind, contributions involving diagonal nodes are dropped (those basis
    functions are excluded) so every stored entry is a convergent integral.
    """
    n2 = mesh.n_nodes
    tris = mesh.triangles
    coords = mesh.nodes[tris]           # (T, 3, 2)
    x1 = coords[:, :, 0]
    x2 = coords[:, :, 1]
    area = mesh.triangle_areas()
    touches = mesh.is_diagonal[tris].any(axis=1)

    rows, cols, vals = [], [], []
    for sel, (pts, wts) in (
        (~touches, (_TRI_Q3_POINTS, _TRI_Q3_WEIGHTS)),
        (touches, (_TRI_Q7_POINTS, _TRI_Q7_WEIGHTS)),
    ):
        if not np.any(sel):
            continue
        t = tris[sel]
        xq = x1[sel] @ pts.T            # (T_sel, q)
        yq = x2[sel] @ pts.T
        r = xq - yq
        if hard_core and np.any(r == 0.0):
            raise RuntimeError(
                "internal invariant violation: quadrature point on the diagonal"
            )
        f = kernel(r)
        a_sel = area[sel]
        drop = mesh.is_diagonal[t] if hard_core else np.zeros_like(t, dtype=bool)
        for ia in range(3):
            for ib in range(3):
                if hard_core:
                    keep = ~(drop[:, ia] | drop[:, ib])
                    if not np.any(keep):
                        continue
                else:
                    keep = slice(None)
                loc = a_sel[keep] * (f[keep] @ (wts * pts[:, ia] * pts[:, ib]))
                rows.append(t[keep, ia])
                cols.append(t[keep, ib])
                vals.append(loc)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n2, n2))


def _contact_matrix(mesh: Mesh2D) -> sp.csr_matrix:
    """Line integral of phi_i phi_j along the diagonal edges, in arclength.

    Only the diagonal nodes' hats are nonzero on x1 = x2, and along an edge
    they are the two linear edge shape functions.
    """
    n2 = mesh.n_nodes
    edges = mesh.diagonal_edges
    p = mesh.nodes[edges[:, 0]]
    q = mesh.nodes[edges[:, 1]]
    lengths = np.linalg.norm(q - p, axis=1)
    t = _EDGE_Q3_POINTS
    w = _EDGE_Q3_WEIGHTS
    m00 = lengths * np.sum(w * (1 - t) * (1 - t))
    m11 = lengths * np.sum(w * t * t)
    m01 = lengths * np.sum(w * (1 - t) * t)
    rows = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 1], edges[:, 0]])
    vals = np.concatenate([m00, m11, m01, m01])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n2, n2))


def interaction_matrix(mesh: Mesh2D, int_spec: InteractionSpec) -> sp.csr_matrix:
    """Full-grid interaction shape matrix (strength U not applied).

    Hard-core rows and columns at diagonal nodes are identically zero; those
    degrees of freedom leave the problem together with the basis exclusion.
    """
    kind = int_spec.kind
    if kind is InteractionKind.CONTACT:
        return _contact_matrix(mesh)
    if kind is InteractionKind.SOFT_COULOMB:
        delta2 = int_spec.softening**2
        return _triangle_quadrature_matrix(
            mesh, lambda r: 1.0 / np.sqrt(r * r + delta2), hard_core=False
        )
    return _triangle_quadrature_matrix(
        mesh, lambda r: 1.0 / np.abs(r), hard_core=True
    )


# ---------------------------------------------------------------------------
# Region overlaps

def region_node_weights(mesh: Mesh1D, split: float):
    """Split the trapezoidal node weights into left/right parts at ``split``.

    The split must be a mesh node so that the halves of its own weight are the
    adjacent half-elements; every other node contributes wholly to its side.
    """
    x = mesh.nodes
    k = int(np.argmin(np.abs(x - split)))
    if abs(x[k] - split) > 1e-9:
        raise ConfigurationError(
            f"region split at {split} is not resolved by the mesh "
            "(build it with include_region_split=True)"
        )
    if k == 0 or k == mesh.n_nodes - 1:
        raise ConfigurationError("region split coincides with the domain boundary")
    w = lumped_weights_1d(mesh)
    wl = np.where(np.arange(len(x)) < k, w, 0.0)
    wr = np.where(np.arange(len(x)) > k, w, 0.0)
    wl[k] = 0.5 * (x[k] - x[k - 1])
    wr[k] = 0.5 * (x[k + 1] - x[k])
    return wl, wr


def region_diagonals(mesh: Mesh2D, spec: PotentialSpec):
    """Full-grid diagonal weights of the three region overlap operators."""
    wl, wr = region_node_weights(mesh.grid, spec.midpoint)
    d_i = np.outer(wl, wl).ravel()
    d_ii = (np.outer(wl, wr) + np.outer(wr, wl)).ravel()
    d_iii = np.outer(wr, wr).ravel()
    return d_i, d_ii, d_iii


def assemble_region_overlaps(mesh: Mesh2D, spec: PotentialSpec, basis: BosonicBasis | None = None):
    """Region overlap matrices S_I, S_II, S_III (full grid, or reduced onto
    ``basis`` when given). They tile the mass exactly: S_I + S_II + S_III = M."""
    d_i, d_ii, d_iii = region_diagonals(mesh, spec)
    if basis is None:
        return sp.diags(d_i).tocsr(), sp.diags(d_ii).tocsr(), sp.diags(d_iii).tocsr()
    return (
        basis.reduce_diagonal(d_i),
        basis.reduce_diagonal(d_ii),
        basis.reduce_diagonal(d_iii),
    )


# ---------------------------------------------------------------------------
# Operator bundle

@dataclass(frozen=True)
class OperatorBundle:
    """All U-independent operators of one configuration, reduced to the
    bosonic basis. The Hamiltonian at strength U is h0 + U * v_int."""

    h0: sp.csr_matrix
    v_int: sp.csr_matrix
    mass: sp.csr_matrix
    s_i: sp.csr_matrix | None
    s_ii: sp.csr_matrix | None
    s_iii: sp.csr_matrix | None
    basis: BosonicBasis

    def hamiltonian(self, u: float) -> sp.csr_matrix:
        return (self.h0 + u * self.v_int).tocsr()

    @property
    def regions(self):
        return self.s_i, self.s_ii, self.s_iii


def dump_matrix_coo(matrix: sp.spmatrix, path) -> None:
    """Write a matrix in coordinate text format (row, col, value) for external
    verification; one entry per line, full round-trip float precision."""
    coo = matrix.tocoo()
    with open(path, "w") as f:
        f.write(f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{r} {c} {float(v)!r}\n")


def assemble_2d(
    mesh: Mesh2D,
    spec: PotentialSpec,
    int_spec: InteractionSpec,
    regions: bool = True,
) -> OperatorBundle:
    """Assemble the full operator bundle on a 2D mesh.

    ``regions=False`` skips the region overlaps (used for the isolated-well
    problem, whose domain does not contain the barrier midpoint).
    """
    grid = mesh.grid
    a1 = (stiffness_matrix_1d(grid) + potential_matrix_1d(grid, spec)).tocsr()
    w = lumped_weights_1d(grid)
    m1 = sp.diags(w)
    h0_full = sp.kron(a1, m1) + sp.kron(m1, a1)
    basis = BosonicBasis.from_mesh(mesh, int_spec.kind is InteractionKind.HARD_COULOMB)
    h0 = basis.reduce(h0_full)
    mass = basis.reduce_diagonal(np.outer(w, w).ravel())
    v_int = basis.reduce(interaction_matrix(mesh, int_spec))
    if regions:
        s_i, s_ii, s_iii = assemble_region_overlaps(mesh, spec, basis)
    else:
        s_i = s_ii = s_iii = None
    return OperatorBundle(
        h0=h0, v_int=v_int, mass=mass, s_i=s_i, s_ii=s_ii, s_iii=s_iii, basis=basis
    )
