"""Physical configuration: double-well geometry, interaction potentials, regions.

Everything here is a pure evaluator over plain numbers. Units follow the
natural-units convention (hbar = 1, m = 1/2): lengths in L, energies in 1/L^2,
times in L^2, interaction strengths in 1/L.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DomainError


class InteractionKind(Enum):
    CONTACT = "contact"
    SOFT_COULOMB = "soft_coulomb"
    HARD_COULOMB = "hard_coulomb"

    @classmethod
    def from_string(cls, name: str) -> "InteractionKind":
        key = name.strip().lower().replace("-", "_")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ConfigurationError(
            f"unknown interaction kind {name!r}; expected one of "
            f"{[k.value for k in cls]}"
        )


class Region(Enum):
    """Configuration-space partition: I = both left, III = both right, II = split."""

    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class PotentialSpec:
    """Symmetric double well: two flat wells of width ``well_length`` separated
    by a rectangular barrier of width ``barrier_width`` and height
    ``barrier_height``, hard walls outside."""

    well_length: float = 50.0
    barrier_width: float = 3.0
    barrier_height: float = 0.3

    def __post_init__(self):
        if self.well_length <= 0:
            raise ConfigurationError("well_length must be positive")
        if self.barrier_width < 0:
            raise ConfigurationError("barrier_width must be nonnegative")
        if self.barrier_height < 0:
            raise ConfigurationError("barrier_height must be nonnegative")

    @property
    def total_length(self) -> float:
        return 2.0 * self.well_length + self.barrier_width

    @property
    def midpoint(self) -> float:
        """Center of the barrier; left/right split line for the region partition."""
        return self.well_length + 0.5 * self.barrier_width


@dataclass(frozen=True)
class InteractionSpec:
    """Pair interaction shape. ``strength`` is the multiplier U applied on top
    of the shape; evaluators return the shape only. Operations that sweep or
    override U take it as an explicit argument."""

    kind: InteractionKind = InteractionKind.HARD_COULOMB
    softening: float = 1.0
    strength: float = 0.0

    def __post_init__(self):
        if self.kind is InteractionKind.SOFT_COULOMB and self.softening <= 0:
            raise ConfigurationError("softening must be positive for soft_coulomb")


def potential_eval(x, spec: PotentialSpec):
    """One-body potential V(x): barrier_height on the barrier, 0 in the wells.

    Accepts scalars or arrays. Raises DomainError outside [0, 2*well+barrier];
    the hard walls are a boundary condition, not a potential value.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > spec.total_length):
        raise DomainError(f"coordinate outside [0, {spec.total_length}]")
    inside = (arr >= spec.well_length) & (arr <= spec.well_length + spec.barrier_width)
    out = np.where(inside, spec.barrier_height, 0.0)
    return float(out) if np.isscalar(x) else out


def interaction_eval(r, spec: InteractionSpec):
    """Interaction shape V_int(r) before multiplication by the strength U.

    Only the Coulomb kinds are pointwise functions. The contact kind is a
    measure concentrated on r = 0 and is handled by the assembly as a line
    integral; asking for its pointwise value is an error.
    """
    if spec.kind is InteractionKind.CONTACT:
        raise ValueError("contact interaction is a measure, not pointwise-evaluable")
    arr = np.asarray(r, dtype=float)
    if spec.kind is InteractionKind.SOFT_COULOMB:
        out = 1.0 / np.sqrt(arr * arr + spec.softening**2)
    else:
        if np.any(arr == 0.0):
            raise ZeroDivisionError("hard-core Coulomb is singular at r = 0")
        out = 1.0 / np.abs(arr)
    return float(out) if np.isscalar(r) else out


def region_of(x1: float, x2: float, spec: PotentialSpec) -> Region:
    """Region label of a configuration-space point, splitting at the barrier
    midpoint so the three regions tile the square exactly."""
    mid = spec.midpoint
    for x in (x1, x2):
        if x < 0 or x > spec.total_length:
            raise DomainError(f"coordinate {x} outside [0, {spec.total_length}]")
    left1, left2 = x1 <= mid, x2 <= mid
    if left1 and left2:
        return Region.I
    if not left1 and not left2:
        return Region.III
    return Region.II
