"""Continuum-armed Lipschitz bandit over the unit cube.

The belief over the optimum is never materialized: candidate optima are
drawn from the prior and accepted or rejected. With exact feedback the
acceptance test is a closed-form feasibility check (an M-Lipschitz
interpolant peaking at the candidate exists); with Gaussian noise the
acceptance probability is exp(Vmin - V(x)), where V(x) is a small
constrained least-squares value computed by the shared QP solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InconsistentDataError, RejectionLimitError, SolverError
from .rng import RngStream
from .solvers import ConstraintSet, QuadObjective, solve_qp


@dataclass(frozen=True)
class ContinuumDataset:
    """Query points in [0,1]^d with their observed values."""

    points: np.ndarray          # (t, d)
    values: np.ndarray          # (t,)
    dim: int

    @classmethod
    def empty(cls, dim: int) -> "ContinuumDataset":
        return cls(np.zeros((0, dim)), np.zeros(0), dim)

    def __post_init__(self):
        x = np.asarray(self.points, dtype=float).reshape(-1, self.dim)
        v = np.asarray(self.values, dtype=float)
        if x.shape[0] != v.shape[0]:
            raise ValueError("points and values must have equal length")
        if x.size and (x.min() < 0.0 or x.max() > 1.0):
            raise ValueError("points must lie in the unit cube")
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.points.shape[0]

    def append(self, x, value: float) -> "ContinuumDataset":
        x = np.asarray(x, dtype=float).reshape(1, self.dim)
        return ContinuumDataset(np.vstack([self.points, x]),
                                np.append(self.values, value), self.dim)


@dataclass(frozen=True)
class LipschitzSpec:
    """Lipschitz constant of the unknown objective; sigma is the noise
    scale of the Gaussian-feedback model."""

    M: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.M > 0 or not self.sigma > 0:
            raise ValueError("M and sigma must be positive")


def _pairwise_dist(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def data_consistent(data: ContinuumDataset, M: float) -> bool:
    """True iff some M-Lipschitz function interpolates the data."""
    if len(data) < 2:
        return True
    d = _pairwise_dist(data.points)
    gap = np.abs(data.values[:, None] - data.values[None, :])
    return bool(np.all(gap <= M * d + 1e-12))


def s_feasible_noiseless(x, data: ContinuumDataset, M: float) -> bool:
    """Can an M-Lipschitz interpolant of the data attain its max at x?

    With the interpolated values pinned to the observations this reduces
    to max_i phi_i <= min_i (phi_i + M ||x - x_i||): the candidate's value
    must be able to sit above every observation.
    """
    if not data_consistent(data, M):
        raise InconsistentDataError(
            "no M-Lipschitz function interpolates the data")
    if len(data) == 0:
        return True
    x = np.asarray(x, dtype=float).reshape(data.dim)
    dist = np.sqrt(((data.points - x) ** 2).sum(axis=1))
    return bool(np.max(data.values) <= np.min(data.values + M * dist) + 1e-12)


def sample_noiseless(prior_sampler: Callable[[RngStream], np.ndarray],
                     data: ContinuumDataset, M: float, rng: RngStream,
                     max_attempts: int = 10**6):
    """Draw a candidate optimum from the prior until one is feasible.

    Returns (x, attempts). Raises RejectionLimitError with an acceptance
    rate estimate when the budget runs out.
    """
    if not data_consistent(data, M):
        raise InconsistentDataError(
            "zero likelihood everywhere: data is not M-Lipschitz consistent")
    for attempt in range(1, max_attempts + 1):
        x = prior_sampler(rng)
        if s_feasible_noiseless(x, data, M):
            return x, attempt
    raise RejectionLimitError(max_attempts)


def _s_constraints(x, data: ContinuumDataset, spec: LipschitzSpec,
                   with_candidate: bool) -> ConstraintSet:
    """Rows of the candidate-peak polytope over (v, v_1..v_t).

    Variable 0 is the candidate's value v; with_candidate=False drops the
    rows tying v to the observations (used for the global minimum).
    """
    t = len(data)
    cons = ConstraintSet(t + 1)
    dmat = _pairwise_dist(data.points)
    if with_candidate:
        x = np.asarray(x, dtype=float).reshape(data.dim)
        dx = np.sqrt(((data.points - x) ** 2).sum(axis=1))
        for i in range(t):
            row = np.zeros(t + 1)
            row[1 + i], row[0] = 1.0, -1.0
            cons.add(row, 0.0)                        # v_i <= v
            cons.add(-row, spec.M * dx[i])            # v <= v_i + M d(x, x_i)
    for i in range(t):
        for j in range(i + 1, t):
            row = np.zeros(t + 1)
            row[1 + i], row[1 + j] = 1.0, -1.0
            bound = spec.M * dmat[i, j]
            cons.add(row.copy(), bound)
            cons.add(-row, bound)
    return cons


def _fitted_qp(data: ContinuumDataset, spec: LipschitzSpec,
               cons: ConstraintSet) -> float:
    t = len(data)
    w = np.full(t + 1, 1.0 / (2.0 * spec.sigma**2))
    w[0] = 0.0                                        # candidate value is free
    targets = np.concatenate([[0.0], data.values])
    start = np.full(t + 1, float(np.mean(data.values)) if t else 0.0)
    res = solve_qp(QuadObjective(w, targets), cons, start=start)
    if not res.ok:
        raise SolverError(f"candidate-peak QP ended with {res.status}")
    return res.value


def v_value(x, data: ContinuumDataset, spec: LipschitzSpec) -> float:
    """Least-squares misfit of the best M-Lipschitz explanation peaking at x.

    Optimal value of min (1/2 sigma^2) sum (v_i - phi_i)^2 over the
    candidate-peak polytope; zero when the data can be interpolated with
    the peak at x. The free candidate value is reported at the midpoint of
    its feasible interval, which does not affect the optimum.
    """
    if len(data) == 0:
        return 0.0
    return _fitted_qp(data, spec, _s_constraints(x, data, spec, True))


def v_min(data: ContinuumDataset, spec: LipschitzSpec) -> float:
    """Global minimum of v_value: the same program without the rows tying
    the candidate to the observations."""
    if len(data) == 0:
        return 0.0
    return _fitted_qp(data, spec, _s_constraints(None, data, spec, False))


def sample_gaussian(prior_sampler: Callable[[RngStream], np.ndarray],
                    data: ContinuumDataset, spec: LipschitzSpec,
                    rng: RngStream, max_attempts: int = 10**6):
    """Rejection sampler for the noisy-feedback belief.

    Candidates from the prior are accepted with probability
    exp(Vmin - V(x)), which lies in (0, 1] because Vmin <= V(x).
    Returns (x, attempts).
    """
    vmin = v_min(data, spec)
    for attempt in range(1, max_attempts + 1):
        x = prior_sampler(rng)
        accept_logp = vmin - v_value(x, data, spec)
        if np.log(max(rng.uniform(), 1e-300)) <= accept_logp:
            return x, attempt
    raise RejectionLimitError(max_attempts)


def uniform_cube_sampler(dim: int) -> Callable[[RngStream], np.ndarray]:
    """Prior sampler: uniform on [0,1]^dim (consumes dim uniforms)."""

    def draw(rng: RngStream) -> np.ndarray:
        return np.array([rng.uniform() for _ in range(dim)])

    return draw
