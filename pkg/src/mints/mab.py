"""Gaussian-likelihood posterior-sampling agent for finite-armed bandits,
simulation environments, and regret bookkeeping.

The agent keeps a belief over which arm is best. Each round it reweights
the prior by the profile likelihood of the hypothesis "arm j is best"
(a constrained weighted least-squares value), samples an arm from that
belief, and updates the per-arm statistics. The per-arm value is solved
exactly by the breakpoint scan in :mod:`mints.solvers`; an optional
Lipschitz structure on the arm means routes through the generic QP.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import Belief, posterior_from_log_weights
from .errors import SolverError
from .rng import RngStream
from .solvers import (
    ConstraintSet,
    QuadObjective,
    min_profile_ssq,
    profile_ssq_batch,
    solve_qp,
)


@dataclass(frozen=True)
class ArmStats:
    """Per-arm pull counts and streaming empirical means (0 when unpulled)."""

    pulls: np.ndarray
    means: np.ndarray

    @classmethod
    def empty(cls, n_arms: int) -> "ArmStats":
        return cls(np.zeros(n_arms, dtype=np.int64), np.zeros(n_arms))

    def __post_init__(self):
        p = np.asarray(self.pulls, dtype=np.int64)
        m = np.asarray(self.means, dtype=float)
        if p.shape != m.shape or p.ndim != 1:
            raise ValueError("pulls and means must be 1-d of equal length")
        if np.any(p < 0):
            raise ValueError("pull counts must be nonnegative")
        object.__setattr__(self, "pulls", p)
        object.__setattr__(self, "means", m)

    @property
    def n_arms(self) -> int:
        return self.pulls.shape[0]

    def update(self, arm: int, reward: float) -> "ArmStats":
        """New stats with one more pull of ``arm``; streaming-mean update."""
        p = self.pulls.copy()
        m = self.means.copy()
        p[arm] += 1
        m[arm] += (reward - m[arm]) / p[arm]
        return ArmStats(p, m)


@dataclass(frozen=True)
class MabModel:
    """Likelihood scale and optional Lipschitz structure on the arm means.

    ``sigma`` is a modeling knob distinct from the environment noise; the
    regret theory wants sigma > 1 for 1-sub-Gaussian rewards, hence the
    default 1.2 used throughout the harness.
    """

    sigma: float = 1.2
    lipschitz_m: float | None = None
    distances: np.ndarray | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if (self.lipschitz_m is None) != (self.distances is None):
            raise ValueError("lipschitz_m and distances must be given together")
        if self.distances is not None:
            if not self.lipschitz_m > 0:
                raise ValueError("lipschitz_m must be positive")
            d = np.asarray(self.distances, dtype=float)
            if d.ndim != 2 or d.shape[0] != d.shape[1]:
                raise ValueError("distance matrix must be square")
            if np.any(d < 0) or np.max(np.abs(np.diag(d))) > 0:
                raise ValueError("distances must be nonnegative with zero diagonal")
            if np.max(np.abs(d - d.T)) > 1e-9:
                raise ValueError("distance matrix must be symmetric")
            tri = d[:, :, None] + d[None, :, :] - d[:, None, :]
            if np.min(tri) < -1e-9:
                raise ValueError("distance matrix violates the triangle inequality")
            object.__setattr__(self, "distances", d)

    @property
    def has_lipschitz(self) -> bool:
        return self.distances is not None


@dataclass(frozen=True)
class BanditEnv:
    """Reward distributions per arm: gaussian, bernoulli, or bounded-uniform."""

    kind: str
    true_means: np.ndarray
    noise_sd: float = 1.0
    half_width: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.true_means, dtype=float)
        object.__setattr__(self, "true_means", m)
        if self.kind not in ("gaussian", "bernoulli", "bounded"):
            raise ValueError(f"unknown environment kind {self.kind!r}")
        if self.kind == "bernoulli" and np.any((m < 0) | (m > 1)):
            raise ValueError("bernoulli means must lie in [0, 1]")
        if self.kind == "gaussian" and self.noise_sd > 1.0:
            warnings.warn("noise_sd > 1 breaks the 1-sub-Gaussian assumption",
                          stacklevel=2)
        if self.kind == "bounded" and self.half_width > 1.0:
            warnings.warn("half_width > 1 breaks the 1-sub-Gaussian assumption",
                          stacklevel=2)

    @property
    def n_arms(self) -> int:
        return self.true_means.shape[0]

    @property
    def gaps(self) -> np.ndarray:
        return np.max(self.true_means) - self.true_means

    def draw(self, arm: int, rng: RngStream) -> float:
        """One reward; consumes exactly one draw from the stream."""
        if self.kind == "gaussian":
            return float(self.true_means[arm] + self.noise_sd * rng.normal())
        if self.kind == "bernoulli":
            return float(rng.uniform() < self.true_means[arm])
        u = rng.uniform()
        return float(self.true_means[arm] + self.half_width * (2.0 * u - 1.0))


@dataclass
class EpisodeRecord:
    """Per-round decisions, feedback, instantaneous regret, and the belief
    entropy of the distribution each decision was sampled from."""

    decisions: np.ndarray
    feedbacks: np.ndarray
    inst_regret: np.ndarray
    entropies: np.ndarray

    @property
    def horizon(self) -> int:
        return self.decisions.shape[0]

    @property
    def cumulative_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_regret)

    @property
    def final_regret(self) -> float:
        return float(self.inst_regret.sum())

    def pull_counts(self, n_arms: int) -> np.ndarray:
        return np.bincount(self.decisions, minlength=n_arms)

    def regret_at(self, t: int) -> float:
        """Cumulative regret after round t (1-based)."""
        return float(self.inst_regret[:t].sum())


# ----------------------------------------------------------------------------
# Profile likelihood and posterior
# ----------------------------------------------------------------------------

def _lipschitz_rows(cons: ConstraintSet, model: MabModel) -> ConstraintSet:
    K = cons.dimension
    d = model.distances
    for i in range(K):
        for k in range(i + 1, K):
            a = np.zeros(K)
            a[i], a[k] = 1.0, -1.0
            bound = model.lipschitz_m * d[i, k]
            cons.add(a.copy(), bound)
            cons.add(-a, bound)
    return cons


def _best_arm_polytope(K: int, j: int) -> ConstraintSet:
    cons = ConstraintSet(K)
    for k in range(K):
        if k == j:
            continue
        a = np.zeros(K)
        a[k], a[j] = 1.0, -1.0
        cons.add(a, 0.0)
    return cons


def profile_neg_loglik(stats: ArmStats, arm: int, model: MabModel,
                       method: str = "auto") -> float:
    """Negative log profile likelihood of "arm is best", up to the constant.

    Equals min over the best-arm polytope of sum_k N_k (theta_k - mean_k)^2,
    divided by 2 sigma^2. Without Lipschitz structure the exact scan is
    used and an unpulled arm scores exactly 0; with it the generic QP runs
    (the structure couples unpulled arms, so no shortcut there).
    ``method`` forces "scan" or "qp"; "auto" picks scan when unstructured.
    """
    K = stats.n_arms
    w = stats.pulls.astype(float)
    if method == "auto":
        method = "qp" if model.has_lipschitz else "scan"
    if method == "scan":
        if model.has_lipschitz:
            raise ValueError("scan path cannot handle Lipschitz structure")
        if w[arm] == 0:
            return 0.0
        value, _ = min_profile_ssq(QuadObjective(w, stats.means), arm)
        return value / (2.0 * model.sigma**2)
    if method != "qp":
        raise ValueError(f"unknown method {method!r}")

    if not np.any(w > 0):
        return 0.0
    # Center targets at the best pulled mean: every constraint row has zero
    # sum, so the polytope is translation invariant and values match the
    # uncentered problem exactly.
    center = float(np.max(stats.means[w > 0]))
    targets = np.where(w > 0, stats.means - center, 0.0)
    cons = _best_arm_polytope(K, arm)
    if model.has_lipschitz:
        _lipschitz_rows(cons, model)
    res = solve_qp(QuadObjective(w, targets), cons, start=np.zeros(K))
    if not res.ok:
        raise SolverError(f"profile QP for arm {arm} ended with {res.status}")
    return res.value / (2.0 * model.sigma**2)


def mab_posterior(stats: ArmStats, prior: Belief, model: MabModel,
                  method: str = "auto") -> Belief:
    """Belief over the best arm: prior reweighted by exp(-Lambda)."""
    K = stats.n_arms
    if len(prior.support) != K:
        raise ValueError("prior support must match the arm count")
    if method == "auto" and not model.has_lipschitz:
        lam = profile_ssq_batch(stats.pulls.astype(float), stats.means)
        lam = lam / (2.0 * model.sigma**2)
    else:
        lam = np.array([profile_neg_loglik(stats, j, model, method)
                        for j in range(K)])
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.weights)
    return posterior_from_log_weights(-lam, log_prior, support=prior.support)


def two_arm_closed_form(stats: ArmStats, sigma: float, prior: Belief) -> Belief:
    """Analytical two-arm posterior; both arms must have been pulled."""
    if stats.n_arms != 2 or len(prior.support) != 2:
        raise ValueError("closed form requires exactly two arms")
    if np.any(stats.pulls == 0):
        raise ValueError("closed form requires both arms pulled")
    n1, n2 = stats.pulls.astype(float)
    m1, m2 = stats.means
    alpha = (m1 - m2) ** 2 / (2.0 * sigma**2 * (1.0 / n1 + 1.0 / n2))
    # exp(alpha) boosts whichever arm has the larger empirical mean
    log_lik = np.array([alpha, 0.0]) if m1 >= m2 else np.array([0.0, alpha])
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.weights)
    return posterior_from_log_weights(log_lik, log_prior, support=prior.support)


# ----------------------------------------------------------------------------
# Episode loops
# ----------------------------------------------------------------------------

def _pick(cum_row: np.ndarray, u: float) -> int:
    """Categorical index from one uniform; must match RngStream.categorical."""
    return int(min(np.searchsorted(cum_row, u * cum_row[-1], side="right"),
                   cum_row.shape[0] - 1))


def mints_step(stats: ArmStats, prior: Belief, model: MabModel,
               env: BanditEnv, rng: RngStream):
    """One round: sample an arm from the current belief, observe, update.

    Returns (updated stats, arm played, feedback).
    """
    post = mab_posterior(stats, prior, model)
    arm = post.support[rng.categorical(post.weights)]
    phi = env.draw(arm, rng)
    return stats.update(arm, phi), arm, phi


def run_episode(K: int, T: int, prior: Belief, model: MabModel,
                env: BanditEnv, rng: RngStream) -> EpisodeRecord:
    """Run T rounds of posterior sampling and record the regret trace."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if K != env.n_arms or len(prior.support) != K:
        raise ValueError("K, env, and prior disagree on the arm count")
    return run_episode_batch(T, prior, model, env, [rng])[0]


def run_episode_batch(T: int, prior: Belief, model: MabModel, env: BanditEnv,
                      streams: list[RngStream]) -> list[EpisodeRecord]:
    """Lockstep episodes, one per stream, vectorized across replications.

    Every per-replication quantity depends only on that replication's own
    stream and data, so results are bit-identical to running each stream
    alone; only the wall clock changes with the batch size.
    """
    R = len(streams)
    K = env.n_arms
    sig2 = 2.0 * model.sigma**2
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.weights)

    pulls = np.zeros((R, K))
    means = np.zeros((R, K))
    decisions = np.empty((R, T), dtype=np.int64)
    feedbacks = np.empty((R, T))
    entropies = np.empty((R, T))
    gaps = env.gaps
    slow = model.has_lipschitz

    for t in range(T):
        if slow:
            lam = np.empty((R, K))
            for r in range(R):
                st = ArmStats(pulls[r].astype(np.int64), means[r])
                lam[r] = [profile_neg_loglik(st, j, model) for j in range(K)]
        else:
            lam = profile_ssq_batch(pulls, means) / sig2
        logw = log_prior[None, :] - lam
        logw -= logw.max(axis=1, keepdims=True)
        post = np.exp(logw)
        post /= post.sum(axis=1, keepdims=True)
        plogp = np.where(post > 0, post * np.log(np.maximum(post, 1e-300)), 0.0)
        entropies[:, t] = -plogp.sum(axis=1)
        cum = np.cumsum(post, axis=1)
        for r in range(R):
            arm = _pick(cum[r], streams[r].uniform())
            y = env.draw(arm, streams[r])
            decisions[r, t] = arm
            feedbacks[r, t] = y
            pulls[r, arm] += 1.0
            means[r, arm] += (y - means[r, arm]) / pulls[r, arm]

    return [
        EpisodeRecord(decisions[r], feedbacks[r], gaps[decisions[r]], entropies[r])
        for r in range(R)
    ]


# ----------------------------------------------------------------------------
# Conjugate-normal Thompson sampling baseline
# ----------------------------------------------------------------------------

def baseline_posterior_params(stats: ArmStats, sigma: float):
    """Per-arm conjugate posterior (mean, variance) under a N(0, 1) prior."""
    n = stats.pulls.astype(float)
    precision = 1.0 + n / sigma**2
    mean = (n * stats.means / sigma**2) / precision
    return mean, 1.0 / precision


def baseline_gaussian_ts_step(stats: ArmStats, model: MabModel,
                              env: BanditEnv, rng: RngStream):
    """One round of standard Thompson sampling: sample each arm's mean from
    its conjugate normal posterior and play the argmax (lowest index wins).

    Returns (updated stats, arm played, feedback)."""
    mean, var = baseline_posterior_params(stats, model.sigma)
    index = mean + np.sqrt(var) * rng.normal(stats.n_arms)
    arm = int(np.argmax(index))
    phi = env.draw(arm, rng)
    return stats.update(arm, phi), arm, phi


def run_baseline_batch(T: int, model: MabModel, env: BanditEnv,
                       streams: list[RngStream]) -> list[EpisodeRecord]:
    """Lockstep baseline Thompson sampling episodes (same contract as
    run_episode_batch; entropy of the argmax index rule is reported as 0)."""
    R = len(streams)
    K = env.n_arms
    pulls = np.zeros((R, K))
    means = np.zeros((R, K))
    decisions = np.empty((R, T), dtype=np.int64)
    feedbacks = np.empty((R, T))
    gaps = env.gaps
    for t in range(T):
        precision = 1.0 + pulls / model.sigma**2
        post_mean = (pulls * means / model.sigma**2) / precision
        post_sd = np.sqrt(1.0 / precision)
        for r in range(R):
            z = streams[r].normal(K)
            arm = int(np.argmax(post_mean[r] + post_sd[r] * z))
            y = env.draw(arm, streams[r])
            decisions[r, t] = arm
            feedbacks[r, t] = y
            pulls[r, arm] += 1.0
            means[r, arm] += (y - means[r, arm]) / pulls[r, arm]
    return [
        EpisodeRecord(decisions[r], feedbacks[r], gaps[decisions[r]],
                      np.zeros(T))
        for r in range(R)
    ]
