"""Exact beat-frequency decomposition of the left-well occupation N_L(t).

Every pair of populated eigenstates (m, n) contributes one cosine at the beat
frequency |E_m - E_n| with amplitude 2 c_m c_n <phi_m|N_L|phi_n>, where the
N_L form is the region-I overlap plus half the region-II overlap. With the
full pair set the reconstruction reproduces the evolved N_L identically; the
dominant few components already approximate it well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .eigensolve import EigenPair
from .quench import SpectralDecomposition, region_forms

DOMINANT_THRESHOLD = 0.01


@dataclass(frozen=True)
class FrequencyComponent:
    """One beat: frequency omega = |E_m - E_n|, amplitude A = 2 c_m c_n
    <phi_m|N_L|phi_n>, between eigenpair indices m < n."""

    omega: float
    amplitude: float
    m: int
    n: int

    @property
    def negative(self) -> bool:
        return self.amplitude < 0


def nl_form(pairs: list[EigenPair], s_i: sp.spmatrix, s_ii: sp.spmatrix) -> np.ndarray:
    """Dense K x K matrix of <phi_m|N_L|phi_n> = <.|.>_I + <.|.>_II / 2."""
    q_i, q_ii = region_forms(pairs, s_i, s_ii)
    return q_i + 0.5 * q_ii


def components_from_arrays(
    c: np.ndarray,
    energies: np.ndarray,
    q_nl: np.ndarray,
    coeff_floor: float = 1e-6,
    merge_tol: float = 1e-12,
) -> list[FrequencyComponent]:
    """Beat components from raw overlap coefficients, energies, and the dense
    N_L form matrix; see :func:`frequency_components`."""
    keep = np.flatnonzero(c * c >= coeff_floor) if coeff_floor > 0 else np.arange(len(c))
    comps: list[FrequencyComponent] = []
    for ii, m in enumerate(keep):
        for n in keep[ii + 1:]:
            a = 2.0 * c[m] * c[n] * q_nl[m, n]
            if a == 0.0:
                continue
            comps.append(FrequencyComponent(
                omega=abs(energies[m] - energies[n]),
                amplitude=float(a),
                m=int(m),
                n=int(n),
            ))
    comps.sort(key=lambda comp: comp.omega)
    merged: list[FrequencyComponent] = []
    for comp in comps:
        if merged and abs(comp.omega - merged[-1].omega) <= merge_tol:
            prev = merged[-1]
            keep_ids = prev if abs(prev.amplitude) >= abs(comp.amplitude) else comp
            merged[-1] = FrequencyComponent(
                omega=prev.omega,
                amplitude=prev.amplitude + comp.amplitude,
                m=keep_ids.m,
                n=keep_ids.n,
            )
        else:
            merged.append(comp)
    merged.sort(key=lambda comp: -abs(comp.amplitude))
    return merged


def frequency_components(
    decomposition: SpectralDecomposition,
    pairs: list[EigenPair],
    s_i: sp.spmatrix,
    s_ii: sp.spmatrix,
    coeff_floor: float = 1e-6,
    merge_tol: float = 1e-12,
) -> list[FrequencyComponent]:
    """All beat components over eigenstates with weight c_n^2 >= coeff_floor,
    sorted by descending |amplitude|.

    Components whose frequencies coincide within ``merge_tol`` (physically one
    beat from a degenerate pair) are merged by amplitude addition. Pass
    ``coeff_floor=0`` for the complete pair set.
    """
    return components_from_arrays(
        decomposition.coefficients,
        decomposition.energies,
        nl_form(pairs, s_i, s_ii),
        coeff_floor=coeff_floor,
        merge_tol=merge_tol,
    )


def constant_term(
    decomposition: SpectralDecomposition,
    pairs: list[EigenPair],
    s_i: sp.spmatrix,
    s_ii: sp.spmatrix,
) -> float:
    """Time-independent part of N_L for the truncated state: sum over the
    diagonal terms c_n^2 <phi_n|N_L|phi_n>. Equals 1/2 up to the truncation
    deficit (each eigenstate of the mirror-symmetric well carries 1/2)."""
    c = decomposition.coefficients
    q = nl_form(pairs, s_i, s_ii)
    return float(np.sum(c * c * np.diag(q)))


def dominant(
    components: list[FrequencyComponent],
    threshold: float = DOMINANT_THRESHOLD,
) -> list[FrequencyComponent]:
    """Components with amplitude at or above the threshold.

    Negative amplitudes of at least the threshold magnitude are retained (the
    ``negative`` property flags them) rather than silently dropped.
    """
    return [comp for comp in components if abs(comp.amplitude) >= threshold]


def reconstruct_nl(
    components: list[FrequencyComponent],
    times: np.ndarray,
    offset: float = 0.5,
) -> np.ndarray:
    """N_L(t) = offset + sum_k A_k cos(omega_k t).

    The default offset 1/2 is the untruncated constant term; pass the value of
    :func:`constant_term` to reproduce the evolved (truncated) N_L exactly.
    """
    times = np.asarray(times, dtype=float)
    out = np.full(times.shape, float(offset))
    for comp in components:
        out += comp.amplitude * np.cos(comp.omega * times)
    return out


def tunneling_period(dominant_components: list[FrequencyComponent]) -> float:
    """Period set by the smallest dominant frequency, 2*pi / min omega."""
    omegas = [comp.omega for comp in dominant_components if comp.omega > 0]
    if not omegas:
        raise ValueError("no dominant component with nonzero frequency; "
                         "N_L is essentially constant")
    return 2.0 * np.pi / min(omegas)
