"""Shared fixtures.

Unit tests run on a shrunk double well (short wells, coarse mesh) so each
module's contracts are exercised in milliseconds; the full benchmark geometry
is reserved for the acceptance suite.
"""

import numpy as np
import pytest

from doublewell import (
    InteractionKind,
    InteractionSpec,
    PotentialSpec,
    assemble_2d,
    build_1d_mesh,
    build_2d_mesh,
    solve_lowest,
)

SMALL_SPEC = PotentialSpec(well_length=6.0, barrier_width=2.0, barrier_height=1.0)
SMALL_H = 0.5


@pytest.fixture(scope="session")
def small_spec():
    return SMALL_SPEC


@pytest.fixture(scope="session")
def small_mesh():
    return build_2d_mesh(build_1d_mesh(SMALL_SPEC, SMALL_H, include_region_split=True))


def _bundle(kind, mesh):
    return assemble_2d(mesh, SMALL_SPEC, InteractionSpec(kind))


@pytest.fixture(scope="session")
def small_bundles(small_mesh):
    return {kind: _bundle(kind, small_mesh) for kind in InteractionKind}


@pytest.fixture(scope="session")
def small_contact_pairs(small_bundles):
    bundle = small_bundles[InteractionKind.CONTACT]
    return solve_lowest(bundle.hamiltonian(0.4), bundle.mass, 12, 1e-8)


def rng():
    return np.random.default_rng(99)
