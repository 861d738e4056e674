"""Dynamic pricing over a finite price grid with binary demand.

The demand curve is monotone nonincreasing in price and Lipschitz in the
price gaps; the agent holds a belief over which grid price maximizes
expected revenue. Each hypothesis "price j is revenue-optimal" adds the
linear rows p_j theta_j >= p_k theta_k to the shared demand polytope, and
its profile log likelihood is a constrained Bernoulli MLE.

``run_pricing_batch`` is the episode engine: it keeps one warm iterate per
(replication, hypothesis) pair and re-converges all of them after every
observation with a vectorized projected-gradient loop, which is what makes
horizon-20000 sweeps affordable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .core import Belief, posterior_from_log_weights
from .errors import SolverError
from .mab import EpisodeRecord
from .rng import RngStream
from .solvers import (
    BERNOULLI_EDGE,
    ConstraintSet,
    bernoulli_loglik,
    max_bernoulli_loglik,
)

REVENUE = "revenue"
LITERAL = "literal"


@dataclass(frozen=True)
class PriceGrid:
    """Strictly increasing positive prices plus the demand Lipschitz bound
    (demand change per unit of price)."""

    prices: np.ndarray
    lipschitz_m: float

    def __post_init__(self):
        p = np.asarray(self.prices, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("prices must be a nonempty 1-d list")
        if np.any(p <= 0):
            raise ValueError("prices must be positive")
        if np.any(np.diff(p) <= 0):
            raise ValueError("prices must be strictly increasing")
        if not self.lipschitz_m > 0:
            raise ValueError("lipschitz_m must be positive")
        object.__setattr__(self, "prices", p)

    @property
    def n_prices(self) -> int:
        return self.prices.shape[0]


@dataclass(frozen=True)
class ValuationModel:
    """Buyer valuation distribution; a sale happens iff price <= valuation.

    kind "uniform": valuations uniform on [a, b].
    kind "piecewise": continuous piecewise-linear CDF through (x, F) knots.
    """

    kind: str
    a: float = 0.0
    b: float = 1.0
    knots_x: np.ndarray | None = None
    knots_f: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.b > self.a:
                raise ValueError("uniform valuation needs b > a")
        elif self.kind == "piecewise":
            x = np.asarray(self.knots_x, dtype=float)
            f = np.asarray(self.knots_f, dtype=float)
            if x.ndim != 1 or x.shape != f.shape or x.size < 2:
                raise ValueError("piecewise CDF needs matching knot lists")
            if np.any(np.diff(x) <= 0):
                raise ValueError("knot locations must be strictly increasing")
            if np.any(np.diff(f) < 0) or abs(f[0]) > 0 or abs(f[-1] - 1) > 1e-12:
                raise ValueError("knot CDF values must rise from 0 to 1")
            object.__setattr__(self, "knots_x", x)
            object.__setattr__(self, "knots_f", f)
        else:
            raise ValueError(f"unknown valuation kind {self.kind!r}")

    def survival(self, price: float) -> float:
        """P(valuation >= price): the expected demand at this price."""
        if self.kind == "uniform":
            return float(np.clip((self.b - price) / (self.b - self.a), 0.0, 1.0))
        return float(1.0 - np.interp(price, self.knots_x, self.knots_f))

    def draw(self, rng: RngStream) -> float:
        """One valuation; consumes one uniform."""
        u = rng.uniform()
        if self.kind == "uniform":
            return float(self.a + (self.b - self.a) * u)
        return float(np.interp(u, self.knots_f, self.knots_x))

    def revenue(self, price: float) -> float:
        return price * self.survival(price)


@dataclass(frozen=True)
class PricingStats:
    """Per-price trial counts and purchase frequencies."""

    counts: np.ndarray
    freqs: np.ndarray

    @classmethod
    def empty(cls, n_prices: int) -> "PricingStats":
        return cls(np.zeros(n_prices, dtype=np.int64), np.zeros(n_prices))

    def __post_init__(self):
        n = np.asarray(self.counts, dtype=np.int64)
        f = np.asarray(self.freqs, dtype=float)
        if n.shape != f.shape or n.ndim != 1:
            raise ValueError("counts and freqs must be 1-d of equal length")
        if np.any(n < 0) or np.any((f < 0) | (f > 1)):
            raise ValueError("counts must be >= 0 and freqs within [0, 1]")
        object.__setattr__(self, "counts", n)
        object.__setattr__(self, "freqs", f)

    def update(self, j: int, sale: int) -> "PricingStats":
        n = self.counts.copy()
        f = self.freqs.copy()
        n[j] += 1
        f[j] += (sale - f[j]) / n[j]
        return PricingStats(n, f)


def pricing_constraint_set(grid: PriceGrid) -> ConstraintSet:
    """Demand polytope: 0 <= theta_K <= ... <= theta_1 <= 1 with adjacent
    drops capped at lipschitz_m times the price gap."""
    K = grid.n_prices
    cons = ConstraintSet(K)
    top = np.zeros(K)
    top[0] = 1.0
    cons.add(top, 1.0)                       # theta_1 <= 1
    bottom = np.zeros(K)
    bottom[K - 1] = -1.0
    cons.add(bottom, 0.0)                    # theta_K >= 0
    for j in range(K - 1):
        a = np.zeros(K)
        a[j + 1], a[j] = 1.0, -1.0
        cons.add(a, 0.0)                     # theta_{j+1} <= theta_j
        gap = grid.lipschitz_m * (grid.prices[j + 1] - grid.prices[j])
        cons.add(-a, gap)                    # theta_j - theta_{j+1} <= gap
    return cons


def hypothesis_rows(grid: PriceGrid, j: int, hypothesis: str = REVENUE) -> list:
    """Rows declaring price j optimal: revenue ties compare p theta, the
    literal variant compares theta components directly."""
    K = grid.n_prices
    p = grid.prices
    rows = []
    for k in range(K):
        if k == j:
            continue
        a = np.zeros(K)
        if hypothesis == REVENUE:
            a[k], a[j] = p[k], -p[j]
        elif hypothesis == LITERAL:
            a[k], a[j] = 1.0, -1.0
        else:
            raise ValueError(f"unknown hypothesis form {hypothesis!r}")
        rows.append((a, 0.0))
    return rows


def pricing_profile_loglik(stats: PricingStats, grid: PriceGrid, j: int,
                           hypothesis: str = REVENUE,
                           tol: float = 1e-9) -> float:
    """Max Bernoulli log likelihood subject to demand shape plus optimality
    of price j. Zero data gives 0 (the empty product)."""
    if not 0 <= j < grid.n_prices:
        raise IndexError(f"price index {j} out of range")
    if stats.counts.shape[0] != grid.n_prices:
        raise ValueError("stats and grid disagree on the price count")
    if stats.counts.sum() == 0:
        return 0.0
    cons = pricing_constraint_set(grid)
    for a, b in hypothesis_rows(grid, j, hypothesis):
        cons.add(a, b)
    res = max_bernoulli_loglik(stats.counts, stats.freqs, cons, tol=tol)
    if res.status == "infeasible":
        raise SolverError(f"hypothesis {j} polytope reported infeasible")
    return res.value


def pricing_posterior(stats: PricingStats, grid: PriceGrid, prior: Belief,
                      hypothesis: str = REVENUE) -> Belief:
    """Prior over grid prices reweighted by each hypothesis's profile
    likelihood."""
    K = grid.n_prices
    if len(prior.support) != K:
        raise ValueError("prior support must match the price count")
    logl = np.array([pricing_profile_loglik(stats, grid, j, hypothesis)
                     for j in range(K)])
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.weights)
    return posterior_from_log_weights(logl, log_prior, support=prior.support)


def simulate_demand(model: ValuationModel, price: float, rng: RngStream) -> int:
    """Draw one valuation and return the purchase indicator."""
    return int(price <= model.draw(rng))


# ----------------------------------------------------------------------------
# Batched episode engine
# ----------------------------------------------------------------------------


@njit(cache=True)
def _pav_nonincreasing(z, out):
    """Stack PAV: Euclidean projection of z onto the nonincreasing cone."""
    K = z.shape[0]
    v = np.empty(K)
    w = np.empty(K)
    ln = np.empty(K, dtype=np.int64)
    m = 0
    for i in range(K):
        cv = z[i]
        cw = 1.0
        cl = 1
        while m > 0 and v[m - 1] < cv:
            cv = (v[m - 1] * w[m - 1] + cv * cw) / (w[m - 1] + cw)
            cw += w[m - 1]
            cl += ln[m - 1]
            m -= 1
        v[m] = cv
        w[m] = cw
        ln[m] = cl
        m += 1
    pos = 0
    for b in range(m):
        for _ in range(ln[b]):
            out[pos] = v[b]
            pos += 1


@njit(cache=True)
def _peak_project(x, scale, h, out):
    """Project x onto {scale_h x_h >= scale_k x_k} in the Euclidean metric.

    Works in r = scale * x coordinates, where the metric weight of r_k is
    1/scale_k^2 and the set is "coordinate h is largest"; the optimum pools
    every r above a level t down to it, found by a breakpoint scan.
    """
    K = x.shape[0]
    s = np.empty(K - 1)
    u = np.empty(K - 1)
    m = 0
    for k in range(K):
        if k != h:
            s[m] = x[k] * scale[k]
            u[m] = 1.0 / (scale[k] * scale[k])
            m += 1
    # insertion sort, descending
    for i in range(1, m):
        sv = s[i]
        uv = u[i]
        j = i - 1
        while j >= 0 and s[j] < sv:
            s[j + 1] = s[j]
            u[j + 1] = u[j]
            j -= 1
        s[j + 1] = sv
        u[j + 1] = uv
    rh = x[h] * scale[h]
    wh = 1.0 / (scale[h] * scale[h])
    num = wh * rh
    den = wh
    t = rh
    found = False
    for r in range(m + 1):
        if r > 0:
            num += u[r - 1] * s[r - 1]
            den += u[r - 1]
        cand = num / den
        lo = s[r] if r < m else -np.inf
        hi = s[r - 1] if r > 0 else np.inf
        if lo <= cand <= hi:
            t = cand
            found = True
            break
    if not found:                                    # pragma: no cover
        t = num / den
    for k in range(K):
        rk = x[k] * scale[k]
        if k == h or rk > t:
            out[k] = t / scale[k]
        else:
            out[k] = x[k]


@njit(cache=True)
def _project_polytope(x, scale, caps, lo, hi, h, cycles, buf, corr):
    """Budgeted Dykstra projection onto chain + caps + box + peak sets."""
    K = x.shape[0]
    corr[:] = 0.0
    for _ in range(cycles):
        # chain (nonincreasing) with the unit box
        for k in range(K):
            buf[0, k] = x[k] + corr[0, k]
        _pav_nonincreasing(buf[0], x)
        for k in range(K):
            if x[k] > hi:
                x[k] = hi
            elif x[k] < lo:
                x[k] = lo
            corr[0, k] = buf[0, k] - x[k]
        # Lipschitz caps, even then odd pairs
        for par in range(2):
            for k in range(K):
                buf[0, k] = x[k] + corr[1 + par, k]
                x[k] = buf[0, k]
            for j in range(par, K - 1, 2):
                d = 0.5 * (x[j] - x[j + 1] - caps[j])
                if d > 0.0:
                    x[j] -= d
                    x[j + 1] += d
            for k in range(K):
                corr[1 + par, k] = buf[0, k] - x[k]
        # peak (optimality of coordinate h)
        for k in range(K):
            buf[0, k] = x[k] + corr[3, k]
        _peak_project(buf[0], scale, h, x)
        for k in range(K):
            corr[3, k] = buf[0, k] - x[k]
    return x


@njit(cache=True)
def _violation(x, scale, caps, lo, hi, h):
    """Max constraint violation of one iterate."""
    K = x.shape[0]
    v = 0.0
    for k in range(K):
        if x[k] - hi > v:
            v = x[k] - hi
        if lo - x[k] > v:
            v = lo - x[k]
        if k + 1 < K:
            if x[k + 1] - x[k] > v:
                v = x[k + 1] - x[k]
            if x[k] - x[k + 1] - caps[k] > v:
                v = x[k] - x[k + 1] - caps[k]
        d = x[k] * scale[k] - x[h] * scale[h]
        if d > v:
            v = d
    return v


@njit(cache=True)
def _solve_one(succ, fail, theta, scale, caps, h, pg_iters, cycles,
               esc_cap, move_tol, lo, hi, buf, corr, grad, cand):
    """Warm projected-gradient MLE for one hypothesis; returns log lik.

    The Dykstra budget escalates whenever the iterate stalls while still
    infeasible (thin intersections of the optimality and Lipschitz faces
    converge slowly), so stopping implies both stationarity and
    feasibility at tolerance.
    """
    K = theta.shape[0]
    cyc = cycles
    for _ in range(pg_iters):
        gmax = 0.0
        cmax = 1.0
        for k in range(K):
            th = theta[k]
            g = 0.0
            c = 0.0
            if succ[k] > 0.0:
                g += succ[k] / th
                c += succ[k] / (th * th)
            if fail[k] > 0.0:
                g -= fail[k] / (1.0 - th)
                c += fail[k] / ((1.0 - th) * (1.0 - th))
            grad[k] = g
            ag = abs(g)
            if ag > gmax:
                gmax = ag
            if c > cmax:
                cmax = c
        step = 1.0 / max(cmax, 5.0 * gmax)
        for k in range(K):
            v = theta[k] + step * grad[k]
            if v > hi:
                v = hi
            elif v < lo:
                v = lo
            cand[k] = v
        _project_polytope(cand, scale, caps, lo, hi, h, cyc, buf, corr)
        move = 0.0
        for k in range(K):
            v = cand[k]
            if v > hi:
                v = hi
            elif v < lo:
                v = lo
            d = abs(v - theta[k])
            if d > move:
                move = d
            theta[k] = v
        if move <= move_tol:
            if _violation(theta, scale, caps, lo, hi, h) <= 1e-9:
                break
            if cyc < esc_cap:
                cyc = cyc * 4
            else:
                break
    val = 0.0
    for k in range(K):
        if succ[k] > 0.0:
            val += succ[k] * np.log(theta[k])
        if fail[k] > 0.0:
            val += fail[k] * np.log(1.0 - theta[k])
    return val


@njit(cache=True, parallel=True)
def _solve_all(succ, fail, theta, scale, caps, hyp, pg_iters, cycles,
               esc_cap, move_tol, lo, hi, vals):
    N, K = theta.shape
    for n in prange(N):
        buf = np.empty((1, K))
        corr = np.empty((4, K))
        grad = np.empty(K)
        cand = np.empty(K)
        vals[n] = _solve_one(succ[n], fail[n], theta[n], scale, caps,
                             hyp[n], pg_iters, cycles, esc_cap, move_tol,
                             lo, hi, buf, corr, grad, cand)


def pricing_log_profile_batch(counts: np.ndarray, freqs: np.ndarray,
                              grid: PriceGrid, hypothesis: str = REVENUE,
                              theta0: np.ndarray | None = None,
                              pg_iters: int = 4000, cycles: int = 10,
                              esc_cap: int = 4096, move_tol: float = 1e-11):
    """Profile log likelihoods for all hypotheses of many replications.

    counts/freqs have shape (R, K). Returns (values (R, K), iterates
    (R, K, K)) where iterates[r, j] is the constrained MLE for hypothesis
    j; pass it back as ``theta0`` to warm start the next round. Each
    (replication, hypothesis) problem is solved independently with its own
    stopping rule, so results never depend on what shares the batch.
    """
    R, K = counts.shape
    succ = np.ascontiguousarray(
        np.broadcast_to((counts * freqs)[:, None, :], (R, K, K))).reshape(R * K, K)
    fail = np.ascontiguousarray(
        np.broadcast_to((counts * (1.0 - freqs))[:, None, :], (R, K, K))).reshape(R * K, K)
    hyp = np.tile(np.arange(K), R)

    if theta0 is None:
        # Constant-revenue start: feasible for every hypothesis at once.
        c = min(0.4, float(grid.lipschitz_m * np.min(grid.prices[:-1] * grid.prices[1:])
                           / grid.prices[0])) if K > 1 else 0.4
        base = np.clip(c * grid.prices[0] / grid.prices,
                       BERNOULLI_EDGE, 1.0 - BERNOULLI_EDGE)
        theta = np.tile(base, (R * K, 1))
    else:
        theta = theta0.reshape(R * K, K).copy()

    scale = grid.prices if hypothesis == REVENUE else np.ones(K)
    if hypothesis not in (REVENUE, LITERAL):
        raise ValueError(f"unknown hypothesis form {hypothesis!r}")
    caps = grid.lipschitz_m * np.diff(grid.prices)
    vals = np.empty(R * K)
    _solve_all(succ, fail, theta, scale, caps, hyp, pg_iters, cycles,
               esc_cap, move_tol, BERNOULLI_EDGE, 1.0 - BERNOULLI_EDGE, vals)
    return vals.reshape(R, K), theta.reshape(R, K, K)


def run_pricing_batch(grid: PriceGrid, valuation: ValuationModel,
                      prior: Belief, T: int, streams: list[RngStream],
                      hypothesis: str = REVENUE) -> list[EpisodeRecord]:
    """Lockstep pricing episodes, one per stream; regret in expected revenue
    against the best grid price, computed exactly from the valuation CDF."""
    if T < 1:
        raise ValueError("T must be >= 1")
    R = len(streams)
    K = grid.n_prices
    if len(prior.support) != K:
        raise ValueError("prior support must match the price count")
    revenue = np.array([valuation.revenue(p) for p in grid.prices])
    gaps = revenue.max() - revenue
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.weights)

    counts = np.zeros((R, K))
    freqs = np.zeros((R, K))
    theta = None
    logl = np.zeros((R, K))
    decisions = np.empty((R, T), dtype=np.int64)
    feedbacks = np.empty((R, T))
    entropies = np.empty((R, T))

    for t in range(T):
        logw = log_prior[None, :] + logl
        logw -= logw.max(axis=1, keepdims=True)
        post = np.exp(logw)
        post /= post.sum(axis=1, keepdims=True)
        plogp = np.where(post > 0, post * np.log(np.maximum(post, 1e-300)), 0.0)
        entropies[:, t] = -plogp.sum(axis=1)
        cum = np.cumsum(post, axis=1)
        for r in range(R):
            u = streams[r].uniform()
            j = int(min(np.searchsorted(cum[r], u * cum[r, -1], side="right"), K - 1))
            sale = simulate_demand(valuation, grid.prices[j], streams[r])
            decisions[r, t] = j
            feedbacks[r, t] = sale
            counts[r, j] += 1.0
            freqs[r, j] += (sale - freqs[r, j]) / counts[r, j]
        logl, theta = pricing_log_profile_batch(
            counts, freqs, grid, hypothesis, theta0=theta,
            pg_iters=2000 if t == 0 else 10, esc_cap=64)

    return [
        EpisodeRecord(decisions[r], feedbacks[r], gaps[decisions[r]], entropies[r])
        for r in range(R)
    ]


def run_pricing_episode(grid: PriceGrid, valuation: ValuationModel,
                        prior: Belief, T: int, rng: RngStream,
                        hypothesis: str = REVENUE) -> EpisodeRecord:
    """Single pricing episode (batch engine with one stream)."""
    return run_pricing_batch(grid, valuation, prior, T, [rng], hypothesis)[0]
