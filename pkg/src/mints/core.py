"""Shared domain types: datasets of (decision, feedback) pairs and discrete
beliefs over candidate optima, plus the generic log-domain reweighting step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import BeliefError, FeedbackKindError
from .rng import RngStream

SCALAR_KIND = "scalar"
VECTOR_KIND = "vector"


def _feedback_kind(phi) -> str:
    if np.isscalar(phi) or isinstance(phi, (int, float, np.floating, np.integer)):
        return SCALAR_KIND
    return VECTOR_KIND


@dataclass(frozen=True)
class Observation:
    """One round of interaction: the decision taken and the feedback received.

    Feedback is either a real number (reward, purchase indicator, function
    value) or a real vector (subgradient). The kind is fixed per dataset.
    """

    decision: Any
    feedback: Any

    @property
    def kind(self) -> str:
        return _feedback_kind(self.feedback)


@dataclass(frozen=True)
class Dataset:
    """Append-only ordered history of observations (value semantics)."""

    observations: tuple[Observation, ...] = ()

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    @property
    def kind(self) -> str | None:
        return self.observations[0].kind if self.observations else None


def append_observation(d: Dataset, decision, feedback) -> Dataset:
    """Return a new dataset with (decision, feedback) appended.

    The input dataset is left unchanged. Mixing scalar and vector feedback
    within one dataset raises FeedbackKindError.
    """
    obs = Observation(decision, feedback)
    if d.kind is not None and obs.kind != d.kind:
        raise FeedbackKindError(
            f"dataset holds {d.kind} feedback, got {obs.kind}"
        )
    return Dataset(d.observations + (obs,))


@dataclass(frozen=True)
class Belief:
    """Normalized nonnegative weights over a finite list of candidate optima."""

    support: tuple
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.support) != w.shape[-1] or w.ndim != 1:
            raise BeliefError("support and weights must have equal length")
        if w.size == 0:
            raise BeliefError("empty belief")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise BeliefError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise BeliefError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, support: Sequence) -> "Belief":
        n = len(support)
        return cls(tuple(support), np.full(n, 1.0 / n))

    @classmethod
    def from_weights(cls, support: Sequence, raw_weights) -> "Belief":
        """Normalize raw nonnegative weights into a Belief."""
        w = np.asarray(raw_weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise BeliefError("weights must have positive sum")
        return cls(tuple(support), w / total)

    def entropy(self) -> float:
        """Shannon entropy in nats."""
        w = self.weights[self.weights > 0]
        return float(-(w * np.log(w)).sum())


def posterior_from_log_weights(log_profile_lik, log_prior, support=None) -> Belief:
    """Reweight a log-prior by a log profile likelihood and normalize.

    Uses max-subtraction so inputs with magnitude up to ~1e6 cannot
    overflow. Entries of -inf mark impossible candidates; if every
    candidate is impossible the posterior is empty and an error is raised.
    """
    lpl = np.asarray(log_profile_lik, dtype=float)
    lpr = np.asarray(log_prior, dtype=float)
    if lpl.shape != lpr.shape or lpl.ndim != 1 or lpl.size == 0:
        raise BeliefError("log weight lists must be 1-d and of equal length")
    if np.any(np.isnan(lpl)) or np.any(np.isnan(lpr)):
        raise BeliefError("log weights must not contain NaN")
    total = lpl + lpr
    peak = np.max(total)
    if peak == -np.inf:
        raise BeliefError("empty posterior: all candidates have -inf log weight")
    w = np.exp(total - peak)
    w /= w.sum()
    if support is None:
        support = range(len(w))
    return Belief(tuple(support), w)


def sample_from_belief(b: Belief, rng: RngStream):
    """Draw one candidate from the belief; consumes one categorical draw."""
    return b.support[rng.categorical(b.weights)]
