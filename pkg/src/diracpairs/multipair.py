"""Pair content of the out-state: amplitudes, sector probabilities, observables.

From the propagator blocks the relative single-pair amplitude matrix is

    omega = -G_pm  G_mm^{-1}

and the vacuum amplitude is C_v = det(G_mm), phase retained.  The
amplitude of a canonical multi-pair state (both label lists strictly
ascending) is C_v times the determinant of the corresponding omega
submatrix; non-canonical orderings pick up the product of the two
permutation parities, and any repeated label gives exactly zero (Pauli).

Sector probabilities c_N are sums of |amplitude|^2 over canonical subset
pairs drawn from the retained single-pair support; enumeration is
explicit and vectorized, with a hard work budget.  Electron/positron
labels are half-basis indices (band plus / band minus, momentum ascending,
spin up before down).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import EnumerationBudgetError, IllConditionedError
from .dynamics import GBlocks
from .modebasis import ModeBasis
from .physconfig import NumericsParams

DEFAULT_COND_CAP = 1e12
DEFAULT_DET_BUDGET = 5_000_000
# chunk size for batched determinant evaluation
_CHUNK = 200_000


@dataclass(frozen=True)
class PairAmplitudes:
    """Relative single-pair amplitudes over (electron, positron) half-indices."""

    omega: np.ndarray
    cond_mm: float


@dataclass(frozen=True)
class VacuumAmplitude:
    c_v: complex
    log_abs: float

    @property
    def probability(self) -> float:
        return float(abs(self.c_v) ** 2)


@dataclass(frozen=True)
class MultiPairAmplitude:
    electrons: tuple
    positrons: tuple
    amplitude: complex
    pauli_excluded: bool = False


@dataclass
class SectorReport:
    """Per-sector probabilities and averaged observables.

    ``c[N]`` is the probability of exactly N pairs (c[0] the vacuum);
    observables are dicts keyed by N and omitted where c_N vanishes.
    ``discarded_mass_bound`` is 1 - sum(c), the exact probability mass not
    captured by the enumeration (pruned labels plus N > n_sector_max).
    """

    n_sector_max: int
    c: np.ndarray
    s_plus: dict = field(default_factory=dict)
    s_minus: dict = field(default_factory=dict)
    h_plus: dict = field(default_factory=dict)
    h_minus: dict = field(default_factory=dict)
    discarded_mass_bound: float = 0.0
    pruning_flags: dict = field(default_factory=dict)
    retained_electrons: tuple = ()
    retained_positrons: tuple = ()
    n_retained_pairs: int = 0


def pair_amplitudes(g: GBlocks, cond_cap: float = DEFAULT_COND_CAP) -> PairAmplitudes:
    """omega = -G_pm G_mm^{-1} with a conditioning guard on the inverse."""
    cond = float(np.linalg.cond(g.g_mm))
    if not np.isfinite(cond) or cond > cond_cap:
        raise IllConditionedError(
            f"G_mm condition number {cond:.3e} exceeds cap {cond_cap:.1e}; "
            "increase n_cut or reduce the field strength")
    omega = -np.linalg.solve(g.g_mm.T, g.g_pm.T).T
    return PairAmplitudes(omega=omega, cond_mm=cond)


def vacuum_amplitude(g: GBlocks) -> VacuumAmplitude:
    """C_v = det(G_mm), accumulated through the log-determinant."""
    sign, log_abs = np.linalg.slogdet(g.g_mm)
    return VacuumAmplitude(c_v=complex(sign * np.exp(log_abs)),
                           log_abs=float(log_abs))


def _parity(perm_to_sorted) -> int:
    """Parity of the permutation mapping the input tuple onto sorted order."""
    perm = list(perm_to_sorted)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def multi_pair_amplitude(pairs: PairAmplitudes, vac: VacuumAmplitude,
                         electrons, positrons) -> MultiPairAmplitude:
    """Amplitude of the multi-pair state with the given mode labels.

    Repeated labels give a bitwise-zero amplitude rather than an error;
    unsorted label lists contribute the corresponding fermionic sign.
    """
    electrons = tuple(int(m) for m in electrons)
    positrons = tuple(int(n) for n in positrons)
    if len(electrons) != len(positrons) or not electrons:
        raise ValueError("need equally many electron and positron labels, N >= 1")
    if len(set(electrons)) != len(electrons) or len(set(positrons)) != len(positrons):
        return MultiPairAmplitude(electrons=electrons, positrons=positrons,
                                  amplitude=complex(0.0), pauli_excluded=True)

    sign = 1
    for labels in (electrons, positrons):
        order = sorted(range(len(labels)), key=labels.__getitem__)
        rank = [0] * len(labels)
        for pos, idx in enumerate(order):
            rank[idx] = pos
        sign *= _parity(rank)

    e_sorted = tuple(sorted(electrons))
    p_sorted = tuple(sorted(positrons))
    sub = pairs.omega[np.ix_(e_sorted, p_sorted)]
    amp = vac.c_v * sign * np.linalg.det(sub)
    return MultiPairAmplitude(electrons=electrons, positrons=positrons,
                              amplitude=complex(amp))


def retained_support(pairs: PairAmplitudes, numerics: NumericsParams):
    """(electron labels, positron labels, pair count) above the prune threshold."""
    keep = np.abs(pairs.omega) ** 2 >= numerics.prune_threshold
    electrons = tuple(np.flatnonzero(keep.any(axis=1)))
    positrons = tuple(np.flatnonzero(keep.any(axis=0)))
    return electrons, positrons, int(keep.sum())


def single_pair_list(pairs: PairAmplitudes, vac: VacuumAmplitude,
                     numerics: NumericsParams, top: int | None = None):
    """Retained single-pair amplitudes, sorted by probability, descending."""
    keep = np.abs(pairs.omega) ** 2 >= numerics.prune_threshold
    rows, cols = np.nonzero(keep)
    amps = vac.c_v * pairs.omega[rows, cols]
    order = np.argsort(-np.abs(amps) ** 2, kind="stable")
    out = [MultiPairAmplitude(electrons=(int(rows[i]),),
                              positrons=(int(cols[i]),),
                              amplitude=complex(amps[i]))
           for i in order]
    return out if top is None else out[:top]


def _sector_pass(pairs: PairAmplitudes, vac: VacuumAmplitude, basis: ModeBasis,
                 numerics: NumericsParams, budget: int,
                 with_observables: bool) -> SectorReport:
    electrons, positrons, n_pairs = retained_support(pairs, numerics)
    k_max = numerics.n_sector_max
    report = SectorReport(n_sector_max=k_max, c=np.zeros(k_max + 1),
                          retained_electrons=electrons,
                          retained_positrons=positrons,
                          n_retained_pairs=n_pairs)
    report.c[0] = vac.probability

    total_work = 0
    e_arr = np.array(electrons, dtype=int)
    p_arr = np.array(positrons, dtype=int)
    cv2 = vac.probability

    spin_e = basis.spin_z_plus
    spin_p = basis.spin_z_minus
    hel_e = basis.helicity_plus
    hel_p = basis.helicity_minus

    for n in range(1, k_max + 1):
        if n > len(e_arr) or n > len(p_arr):
            break
        e_subsets = np.array(list(combinations(e_arr, n)), dtype=int)
        p_subsets = np.array(list(combinations(p_arr, n)), dtype=int)
        work = len(e_subsets) * len(p_subsets)
        total_work += work
        if total_work > budget:
            raise EnumerationBudgetError(
                f"sector enumeration needs > {budget} determinants at N={n}; "
                "raise prune_threshold or lower n_sector_max")

        se = spin_e[e_subsets].sum(axis=1)
        he = hel_e[e_subsets].sum(axis=1)
        sp = spin_p[p_subsets].sum(axis=1)
        hp = hel_p[p_subsets].sum(axis=1)

        c_n = 0.0
        acc = np.zeros(4)  # sums of prob * (se, he, sp, hp)
        rows_per_chunk = max(1, _CHUNK // max(1, len(p_subsets)))
        for i0 in range(0, len(e_subsets), rows_per_chunk):
            e_chunk = e_subsets[i0:i0 + rows_per_chunk]
            sub = pairs.omega[e_chunk[:, None, :, None], p_subsets[None, :, None, :]]
            dets = np.linalg.det(sub)
            probs = cv2 * np.abs(dets) ** 2
            c_n += float(probs.sum())
            if with_observables:
                row_mass = probs.sum(axis=1)
                col_mass = probs.sum(axis=0)
                acc[0] += float(se[i0:i0 + rows_per_chunk] @ row_mass)
                acc[1] += float(he[i0:i0 + rows_per_chunk] @ row_mass)
                acc[2] += float(sp @ col_mass)
                acc[3] += float(hp @ col_mass)

        report.c[n] = c_n
        if with_observables and c_n > 0.0:
            report.s_plus[n] = float(acc[0] / c_n)
            report.h_plus[n] = float(acc[1] / c_n)
            report.s_minus[n] = float(acc[2] / c_n)
            report.h_minus[n] = float(acc[3] / c_n)

    report.discarded_mass_bound = float(max(0.0, 1.0 - report.c.sum()))
    for n in range(1, k_max + 1):
        report.pruning_flags[n] = bool(
            report.discarded_mass_bound > 0.01 * max(report.c[n], 1e-300))
    return report


def sector_probabilities(pairs: PairAmplitudes, vac: VacuumAmplitude,
                         basis: ModeBasis, numerics: NumericsParams,
                         budget: int = DEFAULT_DET_BUDGET) -> SectorReport:
    """c_N for N up to n_sector_max by subset enumeration."""
    return _sector_pass(pairs, vac, basis, numerics, budget,
                        with_observables=False)


def sector_observables(pairs: PairAmplitudes, vac: VacuumAmplitude,
                       basis: ModeBasis, numerics: NumericsParams,
                       budget: int = DEFAULT_DET_BUDGET) -> SectorReport:
    """Full report: c_N plus averaged spin and helicity per sector.

    Per-mode spin_z/helicity expectations are taken from the mode table for
    electron and positron labels alike; sectors with zero probability have
    their observables omitted.
    """
    return _sector_pass(pairs, vac, basis, numerics, budget,
                        with_observables=True)
