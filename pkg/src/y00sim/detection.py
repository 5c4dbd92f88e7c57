"""Quantum detection bounds: binary Helstrom limits, the square-root
measurement for M-ary ensembles, and the equal-prior minimax game.

Mixed-state computations embed the participating kets via the Gram matrix
square root, which is exact on the span of the ensemble.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coherent_algebra import (
    MultiModeState,
    StateEnsemble,
    gram_matrix,
    inner_product,
    psd_matrix_sqrt,
)
from .errors import ParameterError


@dataclass(eq=False)
class DiscriminationProblem:
    """An ensemble to discriminate, either state-by-state or as two
    hypothesis mixtures given by an index partition."""

    ensemble: StateEnsemble
    hypothesis_0: Optional[tuple[int, ...]] = None
    hypothesis_1: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if (self.hypothesis_0 is None) != (self.hypothesis_1 is None):
            raise ParameterError("set both hypothesis index sets or neither")
        if self.hypothesis_0 is not None:
            self.hypothesis_0 = tuple(self.hypothesis_0)
            self.hypothesis_1 = tuple(self.hypothesis_1)
            if not self.hypothesis_0 or not self.hypothesis_1:
                raise ParameterError("both hypotheses need at least one state")
            combined = sorted(self.hypothesis_0 + self.hypothesis_1)
            if combined != list(range(len(self.ensemble))):
                raise ParameterError("hypotheses must partition the ensemble indices exactly")

    @property
    def mode(self) -> str:
        return "pure_ensemble" if self.hypothesis_0 is None else "two_mixtures"

    @classmethod
    def pure_ensemble(cls, ensemble: StateEnsemble) -> "DiscriminationProblem":
        return cls(ensemble)

    @classmethod
    def two_mixtures(cls, ensemble, idx0, idx1) -> "DiscriminationProblem":
        return cls(ensemble, tuple(idx0), tuple(idx1))


@dataclass(frozen=True)
class DetectionReport:
    """Error probability plus how it was obtained.

    ``exact`` is False when the number is only a bound (e.g. an SRM value
    standing in for an M-ary minimax optimum).
    """

    error_probability: float
    method: str
    per_state_correct: Optional[tuple[float, ...]] = None
    exact: bool = True

    def __post_init__(self):
        if not 0.0 <= self.error_probability <= 1.0:
            raise ParameterError("error probability must lie in [0, 1]")
        if self.per_state_correct is not None:
            if any(not 0.0 <= c <= 1.0 for c in self.per_state_correct):
                raise ParameterError("per-state success probabilities must lie in [0, 1]")


def helstrom_pure_pair(overlap_sq: float, p1: float = 0.5) -> float:
    """Minimum error for two pure states with squared overlap ``overlap_sq``
    and prior p1 on the first: (1 - sqrt(1 - 4 p1 (1-p1) overlap_sq)) / 2."""
    if not 0.0 <= overlap_sq <= 1.0:
        raise ParameterError(f"overlap_sq must lie in [0, 1], got {overlap_sq}")
    if not 0.0 <= p1 <= 1.0:
        raise ParameterError(f"p1 must lie in [0, 1], got {p1}")
    inner = 1.0 - 4.0 * p1 * (1.0 - p1) * overlap_sq
    return 0.5 * (1.0 - math.sqrt(max(inner, 0.0)))


def helstrom_mixed_pair(problem: DiscriminationProblem) -> DetectionReport:
    """Minimum error between two mixtures: (1 - ||p1 rho1 - p0 rho0||_1) / 2.

    The signed operator is assembled in the span of the union ensemble;
    exactly identical kets are merged first (their signed weights add),
    which keeps degenerate problems such as identical mixtures exact.
    """
    if problem.mode != "two_mixtures":
        raise ParameterError("helstrom_mixed_pair needs a two_mixtures problem")
    ens = problem.ensemble
    signs = np.zeros(len(ens))
    signs[list(problem.hypothesis_1)] = 1.0
    signs[list(problem.hypothesis_0)] = -1.0
    merged: dict[MultiModeState, float] = {}
    for state, prior, sign in zip(ens.states, ens.priors, signs):
        merged[state] = merged.get(state, 0.0) + sign * prior
    states = tuple(merged.keys())
    coeffs = np.array(list(merged.values()))
    if len(states) == 1 or np.all(coeffs == 0.0):
        trace_norm = abs(coeffs.sum())
    else:
        v = psd_matrix_sqrt(gram_matrix(StateEnsemble.uniform(states)).entries)
        delta = (v * coeffs) @ v.conj().T
        trace_norm = float(np.abs(np.linalg.eigvalsh(delta)).sum())
    error = 0.5 * (1.0 - min(trace_norm, 1.0))
    return DetectionReport(error_probability=max(error, 0.0), method="helstrom_mixed")


def srm_error(ensemble: StateEnsemble) -> DetectionReport:
    """Square-root-measurement error for an equal-prior ensemble.

    With S the Hermitian square root of the Gram matrix, state i is
    identified with probability (S_ii)^2, so the average error is
    1 - (1/N) sum_i (S_ii)^2. For two symmetric pure states this equals the
    Helstrom limit; for N identical states it degrades to pure guessing.
    """
    n = len(ensemble)
    if np.max(np.abs(ensemble.priors - 1.0 / n)) > 1e-12:
        raise ParameterError("the square-root measurement here is defined for uniform priors")
    s = psd_matrix_sqrt(gram_matrix(ensemble).entries)
    per_state = np.abs(np.diag(s)) ** 2
    error = 1.0 - float(per_state.mean())
    return DetectionReport(
        error_probability=min(max(error, 0.0), 1.0),
        method="srm",
        per_state_correct=tuple(float(c) for c in per_state),
    )


def srm_confusion(ensemble: StateEnsemble) -> np.ndarray:
    """Outcome distribution of the square-root measurement.

    Returns P with P[i, j] = probability of outcome j when state i was
    sent, i.e. |S_ji|^2. Rows are renormalized to sum to exactly 1 to
    absorb the rounding lost with near-singular Gram matrices.
    """
    s = psd_matrix_sqrt(gram_matrix(ensemble).entries)
    p = np.abs(s.T) ** 2
    return p / p.sum(axis=1, keepdims=True)


def minimax_pair(psi0: MultiModeState, psi1: MultiModeState) -> tuple[float, float]:
    """Worst-case-prior error for two pure states.

    The prior-dependent Helstrom value is maximized at the equalizing prior
    1/2, so the game value is the symmetric Helstrom error. Returns
    (worst_prior, value).
    """
    overlap_sq = abs(inner_product(psi0, psi1)) ** 2
    return 0.5, helstrom_pure_pair(min(overlap_sq, 1.0), 0.5)


def minimax_srm_bound(ensemble: StateEnsemble) -> DetectionReport:
    """Equal-prior SRM error standing in for the M-ary minimax value.

    Beyond the binary pure case no closed-form optimum is available, so the
    report is flagged as a bound, not an exact game value.
    """
    report = srm_error(ensemble)
    return DetectionReport(
        error_probability=report.error_probability,
        method="minimax_srm_bound",
        per_state_correct=report.per_state_correct,
        exact=False,
    )


def guess_baseline(n_states: int) -> float:
    """Error probability of guessing uniformly among n states: (n-1)/n."""
    if n_states < 1:
        raise ParameterError(f"need at least one state, got {n_states}")
    return (n_states - 1) / n_states
