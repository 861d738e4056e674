"""Convex kernels shared by every problem family.

Four callables live here:

* ``min_profile_ssq``   exact 1-d breakpoint scan for the best-arm weighted
  sum of squares (the hot inner problem of the Gaussian bandit agent);
* ``solve_qp``          small dense diagonal QP over linear inequalities,
  solved by a deterministic primal active-set method;
* ``feasible``          phase-1 feasibility of a linear inequality system;
* ``max_bernoulli_loglik``  concave Bernoulli likelihood maximization by
  projected gradient ascent with backtracking.

All instances are desk scale (dimension up to a few thousand, usually far
less), so everything is plain numpy with no sparse machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
MAX_ITERATIONS = "max_iterations"

FEAS_TOL = 1e-8          # constraint satisfaction at a reported optimum
KKT_TOL = 1e-7           # stationarity residual at a reported optimum
DEFAULT_TOL = 1e-9       # working tolerance of the iterative paths
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True)
class QuadObjective:
    """Diagonal weighted least squares: sum_k weights[k] * (v_k - targets[k])^2."""

    weights: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.targets, dtype=float)
        if w.shape != m.shape or w.ndim != 1:
            raise ValueError("weights and targets must be 1-d of equal length")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "targets", m)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def value(self, v) -> float:
        d = np.asarray(v, dtype=float) - self.targets
        return float(np.dot(self.weights, d * d))

    def gradient(self, v) -> np.ndarray:
        return 2.0 * self.weights * (np.asarray(v, dtype=float) - self.targets)


@dataclass
class ConstraintSet:
    """Linear inequality system a . v <= b, one (a, b) pair per row."""

    dimension: int
    rows: list = field(default_factory=list)

    def add(self, a, b: float) -> "ConstraintSet":
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dimension,):
            raise ValueError(f"row has length {a.shape}, expected ({self.dimension},)")
        self.rows.append((a, float(b)))
        return self

    def stack(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.rows:
            return np.zeros((0, self.dimension)), np.zeros(0)
        A = np.stack([a for a, _ in self.rows])
        b = np.array([b for _, b in self.rows])
        return A, b

    def __len__(self) -> int:
        return len(self.rows)

    def max_violation(self, v) -> float:
        if not self.rows:
            return 0.0
        A, b = self.stack()
        return float(np.max(A @ np.asarray(v, dtype=float) - b, initial=0.0))


@dataclass(frozen=True)
class SolveResult:
    value: float
    argmin: np.ndarray
    status: str
    iterations: int = 0
    max_violation: float = 0.0
    kkt_residual: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


# ----------------------------------------------------------------------------
# Exact breakpoint scan
# ----------------------------------------------------------------------------

def min_profile_ssq(obj: QuadObjective, arm: int) -> tuple[float, float]:
    """Minimize w_a (t - m_a)^2 + sum_{k != a} w_k (m_k - t)_+^2 over t.

    This equals the minimum of the full weighted sum of squares over the
    polytope where coordinate ``arm`` is largest: all other coordinates
    optimally sit at min(m_k, t). Solved exactly by sorting the remaining
    targets and checking each quadratic segment's stationary point; when the
    stationary point lands on a breakpoint the lower segment is reported.

    Returns (minimum value, minimizing t).
    """
    w = obj.weights
    m = obj.targets
    if not 0 <= arm < obj.dim:
        raise IndexError(f"arm {arm} out of range for dimension {obj.dim}")
    if not np.any(w > 0):
        raise SolverError("all weights are zero")

    # Center targets at the largest weighted one: values are translation
    # invariant and this keeps the arithmetic stable for large offsets.
    center = float(np.max(m[w > 0]))
    mj = float(m[arm]) - center
    wj = float(w[arm])

    mask = np.ones(obj.dim, dtype=bool)
    mask[arm] = False
    mask &= w > 0
    mo = m[mask] - center
    wo = w[mask]

    if mo.size == 0:
        # Only the hypothesis arm carries weight (or none besides it).
        return 0.0, (mj if wj > 0 else 0.0) + center

    order = np.argsort(mo, kind="stable")
    mo = mo[order]
    wo = wo[order]
    p = mo.size

    # Suffix sums over "others still above t" for segment s: indices s..p-1.
    sw = np.concatenate([np.cumsum((wo)[::-1])[::-1], [0.0]])
    swm = np.concatenate([np.cumsum((wo * mo)[::-1])[::-1], [0.0]])
    swm2 = np.concatenate([np.cumsum((wo * mo * mo)[::-1])[::-1], [0.0]])

    lo = -np.inf
    for s in range(p + 1):
        hi = mo[s] if s < p else np.inf
        denom = wj + sw[s]
        if denom > 0:
            t = (wj * mj + swm[s]) / denom
        else:
            # Flat segment: everything with weight lies below; minimum is 0
            # at the segment's lower end (smallest minimizer).
            t = lo
        if lo <= t <= hi:
            val = wj * (t - mj) ** 2 + (swm2[s] - 2 * t * swm[s] + t * t * sw[s])
            return max(float(val), 0.0), float(t) + center
        lo = hi

    raise SolverError("breakpoint scan failed to locate a segment")  # pragma: no cover


def profile_ssq_batch(weights: np.ndarray, means: np.ndarray) -> np.ndarray:
    """Vectorized min_profile_ssq values for every arm of every row.

    ``weights`` and ``means`` have shape (..., K); the result has the same
    shape. Rows with all-zero weight get all-zero values. Used by the
    episode loops, which need all K values each round; agreement with the
    scalar scan is pinned by tests.
    """
    w = np.asarray(weights, dtype=float)
    m = np.asarray(means, dtype=float)
    squeeze = w.ndim == 1
    if squeeze:
        w = w[None, :]
        m = m[None, :]
    shape = w.shape
    K = shape[-1]
    w = w.reshape(-1, K)
    m = m.reshape(-1, K)
    R = w.shape[0]

    pulled = w > 0
    any_pulled = pulled.any(axis=1)
    centered = np.where(pulled, m, -np.inf)
    center = np.max(centered, axis=1)
    center = np.where(any_pulled, center, 0.0)
    mc = m - center[:, None]

    # Sort descending by centered target; zero-weight entries contribute
    # nothing to the sums but still occupy segment slots (harmless).
    order = np.argsort(-mc, axis=1, kind="stable")
    s = np.take_along_axis(mc, order, axis=1)           # (R, K) descending
    u = np.take_along_axis(w, order, axis=1)

    U = np.concatenate([np.zeros((R, 1)), np.cumsum(u, axis=1)], axis=1)
    P = np.concatenate([np.zeros((R, 1)), np.cumsum(u * s, axis=1)], axis=1)
    Q = np.concatenate([np.zeros((R, 1)), np.cumsum(u * s * s, axis=1)], axis=1)

    up = u[:, :, None]                                   # hypothesis weight
    sp = s[:, :, None]                                   # hypothesis target
    r = np.arange(K + 1)[None, None, :]
    pos = np.arange(K)[None, :, None]
    inside = pos < r                                     # hypothesis within top-r

    num = P[:, None, :] - np.where(inside, up * sp, 0.0) + up * sp
    den = U[:, None, :] - np.where(inside, up, 0.0) + up
    lam = np.where(den > 0, num / np.maximum(den, 1e-300), 0.0)

    hi = np.concatenate([np.full((R, 1), np.inf), s], axis=1)[:, None, :]
    lo = np.concatenate([s, np.full((R, 1), -np.inf)], axis=1)[:, None, :]
    valid = (lam >= lo) & (lam <= hi) & (den > 0)

    seg = np.argmax(valid, axis=2)                       # first valid segment
    lam_star = np.take_along_axis(lam, seg[:, :, None], axis=2)[:, :, 0]
    idx = seg[:, :, None]
    Ur = np.take_along_axis(np.broadcast_to(U[:, None, :], den.shape), idx, axis=2)[:, :, 0]
    Pr = np.take_along_axis(np.broadcast_to(P[:, None, :], den.shape), idx, axis=2)[:, :, 0]
    Qr = np.take_along_axis(np.broadcast_to(Q[:, None, :], den.shape), idx, axis=2)[:, :, 0]
    ins = np.take_along_axis(inside.astype(float) * np.ones_like(lam), idx, axis=2)[:, :, 0]

    Ue = Ur - ins * u
    Pe = Pr - ins * u * s
    Qe = Qr - ins * u * s * s
    val = Qe - 2 * lam_star * Pe + lam_star**2 * Ue + u * (lam_star - s) ** 2
    val = np.maximum(val, 0.0)
    val = np.where(u > 0, val, 0.0)                      # unpulled arms: exactly 0
    val = np.where(valid.any(axis=2), val, 0.0)

    out = np.empty_like(val)
    np.put_along_axis(out, order, val, axis=1)
    out[~any_pulled] = 0.0
    out = out.reshape(shape)
    return out[0] if squeeze else out


# ----------------------------------------------------------------------------
# Phase 1 / feasibility
# ----------------------------------------------------------------------------

def _normalized_rows(cons: ConstraintSet):
    """Unit-norm rows; zero rows are resolved immediately (vacuous or absurd)."""
    A, b = cons.stack()
    if A.shape[0] == 0:
        return A, b, True
    norms = np.linalg.norm(A, axis=1)
    zero = norms < 1e-300
    if np.any(zero) and np.any(b[zero] < -FEAS_TOL):
        return A[~zero], b[~zero] / 1.0, False
    A, b, norms = A[~zero], b[~zero], norms[~zero]
    return A / norms[:, None], b / norms, True


def _phase1(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
            max_iter: int = 20_000, target: float = 0.5 * FEAS_TOL):
    """Minimize sum((A x - b)_+^2) by accelerated gradient; returns (x, maxviol)."""
    if A.shape[0] == 0:
        return x0, 0.0
    L = 2.0 * np.linalg.norm(A, 2) ** 2
    step = 1.0 / max(L, 1e-300)
    x = x0.astype(float).copy()
    y = x.copy()
    tk = 1.0
    h_prev = np.inf
    for _ in range(max_iter):
        viol = A @ y - b
        if np.max(viol, initial=0.0) <= target:
            x = y
            break
        g = 2.0 * (A.T @ np.maximum(viol, 0.0))
        x_new = y - step * g
        tk_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        y = x_new + ((tk - 1.0) / tk_new) * (x_new - x)
        x, tk = x_new, tk_new
        h = float(np.sum(np.maximum(A @ x - b, 0.0) ** 2))
        if h > h_prev:          # restart momentum when it overshoots
            y = x.copy()
            tk = 1.0
        h_prev = h
    return x, float(np.max(A @ x - b, initial=0.0))


def feasible(cons: ConstraintSet, tol: float = FEAS_TOL) -> bool:
    """True iff some point satisfies every row within ``tol``.

    Implemented as phase-1 minimization of the violation; the reported
    answer is the max violation at the minimizer compared against tol.
    """
    A, b, ok = _normalized_rows(cons)
    if not ok:
        return False
    if A.shape[0] == 0:
        return True
    _, maxviol = _phase1(A, b, np.zeros(cons.dimension))
    return maxviol <= tol


# ----------------------------------------------------------------------------
# Diagonal QP by primal active set
# ----------------------------------------------------------------------------

def _kkt_solve(w: np.ndarray, m: np.ndarray, A_w: np.ndarray, b_w: np.ndarray):
    """Equality-constrained minimizer of sum w (v - m)^2 s.t. A_w v = b_w.

    The KKT system may be singular (zero weights, dependent rows); lstsq
    returns the deterministic minimum-norm solution.
    """
    d = w.shape[0]
    na = A_w.shape[0]
    if na == 0:
        return m.copy(), np.zeros(0)
    K = np.zeros((d + na, d + na))
    K[:d, :d] = np.diag(2.0 * w)
    K[:d, d:] = A_w.T
    K[d:, :d] = A_w
    rhs = np.concatenate([2.0 * w * m, b_w])
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    return sol[:d], sol[d:]


def solve_qp(obj: QuadObjective, cons: ConstraintSet,
             tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
             start: np.ndarray | None = None) -> SolveResult:
    """Minimize the diagonal quadratic over the inequality polytope.

    Primal active-set iteration with lowest-index pivoting (deterministic):
    solve the equality-constrained subproblem on the working set, step to
    the first blocking row, drop the most negative multiplier when the
    subproblem stalls. A dual feasibility certificate (KKT residual and
    multiplier signs) is checked at exit. Coordinates with zero weight are
    kept in the constraints; the minimum-norm KKT solve pins them.
    """
    if cons.dimension != obj.dim:
        raise ValueError("constraint dimension does not match objective")
    A, b, ok = _normalized_rows(cons)
    w, m = obj.weights, obj.targets
    if not ok:
        return SolveResult(np.inf, m.copy(), INFEASIBLE)

    n_rows = A.shape[0]
    if n_rows == 0:
        return SolveResult(0.0, m.copy(), OPTIMAL)

    # Feasible start: caller hint, targets, or phase 1.
    x = None
    for cand in (start, m):
        if cand is not None and np.max(A @ np.asarray(cand, float) - b, initial=0.0) <= FEAS_TOL:
            x = np.asarray(cand, dtype=float).copy()
            break
    if x is None:
        x0 = np.asarray(start, float).copy() if start is not None else m.copy()
        x, maxviol = _phase1(A, b, x0)
        if maxviol > FEAS_TOL:
            return SolveResult(np.inf, x, INFEASIBLE, max_violation=maxviol)

    act_tol = 1e-9
    working = list(np.flatnonzero(A @ x - b >= -act_tol))
    lam_w = np.zeros(len(working))
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        A_w = A[working] if working else np.zeros((0, obj.dim))
        b_w = b[working] if working else np.zeros(0)
        x_eq, lam_w = _kkt_solve(w, m, A_w, b_w)
        p = x_eq - x

        if np.max(np.abs(p), initial=0.0) <= tol:
            neg = np.flatnonzero(lam_w < -tol)
            if neg.size == 0:
                x = x_eq
                break
            drop = neg[int(np.argmin(lam_w[neg]))]
            working.pop(drop)
            continue

        # Largest feasible step toward the subproblem solution.
        others = np.setdiff1d(np.arange(n_rows), working, assume_unique=False)
        alpha, block = 1.0, -1
        if others.size:
            Ap = A[others] @ p
            slack = b[others] - A[others] @ x
            movers = Ap > 1e-13
            if np.any(movers):
                ratios = slack[movers] / Ap[movers]
                k = int(np.argmin(ratios))
                if ratios[k] < alpha:
                    alpha = max(ratios[k], 0.0)
                    block = int(others[movers][k])
        x = x + alpha * p
        if block >= 0:
            working.append(block)
            working.sort()
        # alpha == 1 with no block: subproblem solution reached; loop once
        # more to examine multipliers.

    maxviol = float(np.max(A @ x - b, initial=0.0))
    grad = obj.gradient(x)
    if working:
        kkt = float(np.max(np.abs(grad + A[working].T @ lam_w)))
        dual_ok = bool(np.all(lam_w >= -1e-7))
    else:
        kkt = float(np.max(np.abs(grad), initial=0.0))
        dual_ok = True
    status = OPTIMAL
    if iterations >= max_iter:
        status = MAX_ITERATIONS
    elif maxviol > FEAS_TOL or kkt > KKT_TOL or not dual_ok:
        status = MAX_ITERATIONS
    return SolveResult(max(obj.value(x), 0.0), x, status,
                       iterations=iterations, max_violation=maxviol,
                       kkt_residual=kkt)


# ----------------------------------------------------------------------------
# Constrained Bernoulli maximum likelihood
# ----------------------------------------------------------------------------

BERNOULLI_EDGE = 1e-12   # safeguard box [edge, 1 - edge]


def _dykstra(x0: np.ndarray, A: np.ndarray, b: np.ndarray,
             lo: float, hi: float, cycles: int = 400, tol: float = 1e-12):
    """Project onto {lo <= x <= hi} intersect {A x <= b} (Dykstra, Euclidean)."""
    x = np.clip(x0, lo, hi)
    n = A.shape[0]
    if n == 0:
        return x
    corr = np.zeros((n + 1, x.size))
    for _ in range(cycles):
        x_prev = x.copy()
        z = x + corr[0]
        x = np.clip(z, lo, hi)
        corr[0] = z - x
        for i in range(n):
            z = x + corr[i + 1]
            viol = float(A[i] @ z - b[i])
            x = z - max(viol, 0.0) * A[i]
            corr[i + 1] = z - x
        if float(np.max(np.abs(x - x_prev))) <= tol and \
                float(np.max(A @ x - b, initial=0.0)) <= tol * 10 and \
                float(np.max([lo - x.min(), x.max() - hi])) <= tol * 10:
            break
    return x


def bernoulli_loglik(counts, means, theta) -> float:
    """sum_k n_k [mu_k log t_k + (1 - mu_k) log(1 - t_k)], with 0 log 0 = 0."""
    n = np.asarray(counts, dtype=float)
    mu = np.asarray(means, dtype=float)
    t = np.asarray(theta, dtype=float)
    succ = n * mu
    fail = n * (1.0 - mu)
    out = np.where(succ > 0, succ * np.log(np.maximum(t, 1e-300)), 0.0)
    out = out + np.where(fail > 0, fail * np.log(np.maximum(1.0 - t, 1e-300)), 0.0)
    return float(out.sum())


def _bernoulli_polish(succ, fail, x0, A, b, lo, hi, val0):
    """Newton refinement of the constrained Bernoulli MLE.

    Guesses the active rows at the projected-gradient point, solves the
    equality-KKT system by damped Newton, and repairs the guess (dropping
    negative multipliers, adding newly violated rows) a few times. Returns
    the refined point only when it is feasible and at least as good.
    """
    n_rows = A.shape[0]
    K = x0.shape[0]
    eye = np.eye(K)
    A_all = np.vstack([A, eye, -eye])
    b_all = np.concatenate([b, np.full(K, hi), np.full(K, -lo)])
    act = set(np.flatnonzero(A_all @ x0 - b_all >= -1e-6).tolist())

    def F(x):
        return bernoulli_loglik_parts(succ, fail, x)

    for _ in range(12):
        x = x0.copy()
        rows = sorted(act)
        Aw = A_all[rows]
        bw = b_all[rows]
        lam = np.zeros(len(rows))
        ok = False
        for _ in range(60):
            g = np.where(succ > 0, succ / x, 0.0) - np.where(fail > 0, fail / (1 - x), 0.0)
            H = succ / x**2 + fail / (1 - x) ** 2 + 1e-12
            r1 = g - (Aw.T @ lam if rows else 0.0)
            r2 = Aw @ x - bw if rows else np.zeros(0)
            if max(np.max(np.abs(r1), initial=0.0),
                   np.max(np.abs(r2), initial=0.0)) <= 1e-11 * (1 + np.max(np.abs(g))):
                ok = True
                break
            KKT = np.zeros((K + len(rows), K + len(rows)))
            KKT[:K, :K] = np.diag(H)
            if rows:
                KKT[:K, K:] = Aw.T
                KKT[K:, :K] = Aw
            rhs = np.concatenate([r1, -r2])
            sol, *_ = np.linalg.lstsq(KKT, rhs, rcond=None)
            dx, dlam = sol[:K], sol[K:]
            tau = 1.0
            pos = dx > 0
            neg = dx < 0
            if np.any(pos):
                tau = min(tau, 0.999 * np.min((hi - x)[pos] / dx[pos] + 1e-300))
            if np.any(neg):
                tau = min(tau, 0.999 * np.min((lo - x)[neg] / dx[neg] + 1e-300))
            if tau <= 1e-14:
                break
            x = np.clip(x + tau * dx, lo, hi)
            lam = lam + tau * dlam
        if not ok:
            return None
        worst = float(np.max(A_all @ x - b_all, initial=0.0))
        if worst > 1e-9:
            add = int(np.argmax(A_all @ x - b_all))
            if add in act:
                return None
            act.add(add)
            continue
        if rows and np.min(lam, initial=0.0) < -1e-8:
            drop = rows[int(np.argmin(lam))]
            act.discard(drop)
            continue
        if F(x) >= val0 - 1e-10:
            return x
        return None
    return None


def bernoulli_loglik_parts(succ, fail, theta) -> float:
    out = np.where(succ > 0, succ * np.log(np.maximum(theta, 1e-300)), 0.0)
    out = out + np.where(fail > 0, fail * np.log(np.maximum(1.0 - theta, 1e-300)), 0.0)
    return float(out.sum())


def max_bernoulli_loglik(counts, means, cons: ConstraintSet,
                         tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER) -> SolveResult:
    """Maximize the Bernoulli log likelihood over cons within the unit box.

    Projected gradient ascent with backtracking line search; the feasible
    set is cons intersected with [edge, 1-edge]^K so the gradient stays
    bounded. Returns the maximum value (not negated) in ``value``.
    """
    n = np.asarray(counts, dtype=float)
    mu = np.asarray(means, dtype=float)
    K = n.shape[0]
    if cons.dimension != K:
        raise ValueError("constraint dimension does not match counts")
    if np.any(n < 0) or np.any((mu < 0) | (mu > 1)):
        raise ValueError("counts must be >= 0 and means within [0, 1]")
    A, b, ok = _normalized_rows(cons)
    lo, hi = BERNOULLI_EDGE, 1.0 - BERNOULLI_EDGE
    if not ok:
        return SolveResult(-np.inf, np.full(K, 0.5), INFEASIBLE)

    succ = n * mu
    fail = n * (1.0 - mu)

    x = _dykstra(np.clip(mu, 1e-3, 1.0 - 1e-3), A, b, lo, hi)
    if A.shape[0] and float(np.max(A @ x - b, initial=0.0)) > FEAS_TOL:
        eye = np.eye(K)
        all_A = np.vstack([A, eye, -eye])
        all_b = np.concatenate([b, np.full(K, hi), np.full(K, -lo)])
        x1, maxviol = _phase1(all_A, all_b, x)
        if maxviol > FEAS_TOL:
            return SolveResult(-np.inf, x1, INFEASIBLE, max_violation=maxviol)
        x = _dykstra(x1, A, b, lo, hi)

    val = bernoulli_loglik(n, mu, x)
    iterations = 0
    status = MAX_ITERATIONS
    while iterations < max_iter:
        iterations += 1
        g = np.where(succ > 0, succ / np.maximum(x, lo), 0.0) \
            - np.where(fail > 0, fail / np.maximum(1.0 - x, lo), 0.0)
        curv = succ / np.maximum(x, lo) ** 2 + fail / np.maximum(1.0 - x, lo) ** 2
        step = 1.0 / max(float(np.max(curv, initial=0.0)), 1.0)
        d = _dykstra(x + step * g, A, b, lo, hi) - x
        dn = float(np.max(np.abs(d), initial=0.0))
        if dn / step <= tol * (1.0 + float(np.max(np.abs(g), initial=0.0))):
            status = OPTIMAL
            break
        gd = float(g @ d)
        if gd <= 0:
            status = OPTIMAL
            break
        tau = 1.0
        for _ in range(60):
            cand = np.clip(x + tau * d, lo, hi)
            cval = bernoulli_loglik(n, mu, cand)
            if cval >= val + 1e-4 * tau * gd or tau < 1e-16:
                break
            tau *= 0.5
        x = np.clip(x + tau * d, lo, hi)
        new_val = bernoulli_loglik(n, mu, x)
        if abs(new_val - val) <= 1e-15 * (1.0 + abs(val)) and dn <= 1e-10:
            val = new_val
            status = OPTIMAL
            break
        val = new_val

    if n.sum() > 0:
        polished = _bernoulli_polish(succ, fail, x, A, b, lo, hi, val)
        if polished is not None:
            x = polished
            val = bernoulli_loglik(n, mu, x)
            status = OPTIMAL
    maxviol = float(np.max(A @ x - b, initial=0.0)) if A.shape[0] else 0.0
    return SolveResult(val, x, status, iterations=iterations,
                       max_violation=maxviol)
