"""Quench protocol: isolated-well ground state, spectral decomposition, and
the time evolution of the left-well occupation probabilities.

The dynamics is exact in the truncated eigenbasis: probabilities are cosine
sums over eigenvalue differences, so any time grid is a sampling convenience,
not an integration step size.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .assembly import BosonicBasis, OperatorBundle, assemble_2d
from .eigensolve import EigenPair, solve_lowest
from .mesh import build_1d_mesh, build_2d_mesh
from .model import InteractionSpec, PotentialSpec


@dataclass(frozen=True)
class InitialState:
    """Isolated-left-well two-particle ground state embedded in the full
    double-well basis; exactly zero outside [0, well_length]^2."""

    coefficients: np.ndarray = field(repr=False)
    energy: float
    basis: BosonicBasis = field(repr=False)


@dataclass
class SpectralDecomposition:
    """Overlaps c_n of the initial state with the double-well eigenstates."""

    coefficients: np.ndarray
    energies: np.ndarray
    captured_norm: float
    norm_floor: float
    norm_warning: bool


@dataclass(frozen=True)
class TimeSeries:
    """Left-well occupation probabilities over time; N_L = P2 + P1/2."""

    times: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    n_left: np.ndarray


def isolated_bundle(
    spec: PotentialSpec, int_spec: InteractionSpec, h: float
) -> OperatorBundle:
    """Operators of the isolated left well (infinite barrier) at mesh size h."""
    mesh1 = build_1d_mesh(spec, h, isolated_left=True)
    return assemble_2d(build_2d_mesh(mesh1), spec, int_spec, regions=False)


def initial_state(
    spec: PotentialSpec,
    int_spec: InteractionSpec,
    u: float,
    h: float,
    full_basis: BosonicBasis | None = None,
    tol: float = 1e-8,
) -> InitialState:
    """Ground state of the isolated left well at strength ``u``, embedded
    node-for-node into the full-domain basis.

    The isolated mesh reuses the full mesh's subdivision of [0, well_length],
    so the embedding is an exact coefficient copy. ``full_basis`` defaults to
    a freshly built full-domain basis at the same h (with the region split).
    """
    iso = isolated_bundle(spec, int_spec, h)
    ground = solve_lowest(iso.hamiltonian(u), iso.mass, k=1, tol=tol)[0]
    if full_basis is None:
        mesh1 = build_1d_mesh(spec, h, include_region_split=True)
        kind_hard = iso.basis.hard_core
        full_basis = BosonicBasis.from_mesh(build_2d_mesh(mesh1), kind_hard)
    target = full_basis.pair_indices(iso.basis.pairs[:, 0], iso.basis.pairs[:, 1])
    if np.any(target < 0):
        raise ValueError("isolated-well basis does not embed into the full basis")
    coeff = np.zeros(full_basis.size)
    coeff[target] = ground.coefficients
    return InitialState(coefficients=coeff, energy=ground.energy, basis=full_basis)


def mirror_state(state: InitialState) -> InitialState:
    """The same state prepared in the right well (left-right mirror image)."""
    perm = state.basis.mirror_permutation()
    mirrored = np.zeros_like(state.coefficients)
    mirrored[perm] = state.coefficients
    return InitialState(
        coefficients=mirrored, energy=state.energy, basis=state.basis
    )


def decompose(
    state: InitialState,
    pairs: list[EigenPair],
    m: sp.spmatrix,
    norm_floor: float = 0.999,
) -> SpectralDecomposition:
    """Overlap coefficients c_n = <phi_n|g> and the captured norm sum c_n^2.

    Emits a warning (and sets the flag) when the computed eigenpairs capture
    less than ``norm_floor`` of the state.
    """
    phi = np.column_stack([p.coefficients for p in pairs])
    if phi.shape[0] != len(state.coefficients):
        raise ValueError(
            f"basis mismatch: eigenvectors have {phi.shape[0]} coefficients, "
            f"state has {len(state.coefficients)}"
        )
    c = phi.T @ (m @ state.coefficients)
    captured = float(c @ c)
    low = captured < norm_floor
    if low:
        warnings.warn(
            f"spectral decomposition captures only {captured:.6f} "
            f"of the initial state (floor {norm_floor})",
            stacklevel=2,
        )
    return SpectralDecomposition(
        coefficients=c,
        energies=np.array([p.energy for p in pairs]),
        captured_norm=captured,
        norm_floor=norm_floor,
        norm_warning=low,
    )


def region_forms(pairs: list[EigenPair], *regions: sp.spmatrix) -> list[np.ndarray]:
    """Dense K x K matrices of <phi_m|S_R|phi_n> for each region operator."""
    phi = np.column_stack([p.coefficients for p in pairs])
    return [phi.T @ (s @ phi) for s in regions]


def evolve_probabilities(
    decomposition: SpectralDecomposition,
    pairs: list[EigenPair],
    s_i: sp.spmatrix,
    s_ii: sp.spmatrix,
    s_iii: sp.spmatrix,
    times: np.ndarray,
) -> TimeSeries:
    """P2, P1, P0 and N_L over the given times.

    P_R(t) = sum_{m,n} c_m c_n cos((E_m - E_n) t) <phi_m|S_R|phi_n>, with
    region I giving P2 (both particles left), II giving P1, III giving P0.
    Raw values are reported without renormalizing away the truncation deficit.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("times must be nonempty")
    q_i, q_ii, q_iii = region_forms(pairs, s_i, s_ii, s_iii)
    c = decomposition.coefficients
    e = decomposition.energies
    z = c[:, None] * np.exp(-1j * np.outer(e, times))
    series = []
    for q in (q_iii, q_ii, q_i):
        series.append(np.real(np.einsum("kt,kl,lt->t", z.conj(), q, z)))
    p0, p1, p2 = series
    return TimeSeries(times=times, p0=p0, p1=p1, p2=p2, n_left=p2 + 0.5 * p1)
