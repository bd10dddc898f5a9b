"""Worst-case stability measures and Lipschitz constants of the magnitude maps.

Computes Delta, omega, tau, Lambda_F, the local radii eps0/delta_x, the ratio
families U and V, the stability measure Q_eps(x) with its theory brackets, and
the extremal witnesses that make the bounds tight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    NotAFrameError,
    ValidationError,
    VerdictConflictError,
)
from .frame_core import (
    Frame,
    SubsetMask,
    _check_vector,
    analysis_map,
    analysis_map_sq,
    dist_d,
    dist_d1,
    gram,
    matrix_rank,
    null_vector,
    subset_lower_bound,
    sym_eig,
    frame_bounds,
)
from .injectivity import A0Config, a0 as a0_search, full_spark

EXACT_SUBSET_BUDGET = 1 << 18  # cap on 2^(m-1) for exhaustive Delta
DEFAULT_SAMPLE_BUDGET = 512


@dataclass
class StabilityConstants:
    Delta: float
    omega: float
    tau: float
    lambdaF: float
    sqrtA: float
    sqrtB: float
    mu0: float
    exact: dict = field(default_factory=dict)       # per-constant exactness flags
    witnesses: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        wit = {}
        for key, val in self.witnesses.items():
            if isinstance(val, SubsetMask):
                wit[key] = val.bits
            elif isinstance(val, np.ndarray):
                wit[key] = val.tolist()
            else:
                wit[key] = val
        return {
            "A": self.sqrtA**2,
            "B": self.sqrtB**2,
            "a0": self.mu0**2,
            "Delta": self.Delta,
            "omega": self.omega,
            "tau": self.tau,
            "lambdaF": self.lambdaF,
            "mu0": self.mu0,
            "exact_flags": dict(self.exact),
            "witnesses": wit,
        }


@dataclass
class StabilityReport:
    x: np.ndarray
    eps: float
    Q_estimate: float
    bracket: tuple[float, float]
    witness: tuple[np.ndarray, np.ndarray, np.ndarray]  # (w1, w2, y)
    Q_theory: float | None = None

    def to_json_dict(self) -> dict:
        w1, w2, y = self.witness
        return {
            "x": self.x.tolist(),
            "eps": self.eps,
            "Q_estimate": self.Q_estimate,
            "Q_theory": self.Q_theory,
            "bracket": [self.bracket[0], self.bracket[1]],
            "witness": {"w1": w1.tolist(), "w2": w2.tolist(), "y": y.tolist()},
        }


# ---------------------------------------------------------------------------
# Subset-spectral constants: Delta, omega, tau.
# ---------------------------------------------------------------------------

def _all_lower_bounds(frame: Frame) -> np.ndarray:
    """A[S] for every bitmask S, via incremental Gram updates, batched eigh."""
    n, m = frame.dim, frame.count
    outers = np.einsum("ij,kj->jik", frame.matrix, frame.matrix)  # (m, n, n)
    grams = np.zeros((1 << m, n, n))
    for bits in range(1, 1 << m):
        low = bits & -bits
        grams[bits] = grams[bits ^ low] + outers[low.bit_length() - 1]
    evals = np.linalg.eigvalsh(grams)
    return np.maximum(evals[:, 0], 0.0)


def delta(
    frame: Frame,
    mode: str = "exact",
    budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
) -> tuple[float, SubsetMask, bool]:
    """Delta = min over partitions (S, S^c) of sqrt(A[S] + A[S^c]).

    Exact mode enumerates all 2^(m-1) partitions.  Sampled mode minimizes over
    seeded random subsets, thin subsets, and a Hamming-distance-1 local descent
    from the incumbent; the result is then an upper bound (exact=False).
    """
    n, m = frame.dim, frame.count
    full = (1 << m) - 1
    if mode == "exact":
        if 1 << (m - 1) > max(budget, EXACT_SUBSET_BUDGET):
            raise BudgetExceededError(f"exact Delta infeasible for m={m}")
        lows = _all_lower_bounds(frame)
        sums = lows[: 1 << (m - 1)] + lows[full ^ np.arange(1 << (m - 1))]
        best = int(np.argmin(sums))
        return float(np.sqrt(sums[best])), SubsetMask(best, m), True
    if mode != "sampled":
        raise ValidationError(f"unknown delta mode {mode!r}")

    rng = np.random.default_rng(np.random.Philox(key=[seed, 0xDE_17A]))

    def value(bits: int) -> float:
        s = SubsetMask(bits, m)
        return subset_lower_bound(frame, s) + subset_lower_bound(frame, s.complement())

    candidates: set[int] = {0}
    # Thin subsets: singletons and complements of (n-1)-subsets of nearby sizes.
    candidates.update(1 << i for i in range(m))
    for _ in range(budget // 4):
        size = int(rng.integers(max(1, n - 1), n + 1))
        idx = rng.choice(m, size=min(size, m), replace=False)
        bits = 0
        for i in idx:
            bits |= 1 << int(i)
        candidates.add(full ^ bits)
    for _ in range(2 * budget):
        if len(candidates) >= budget:
            break
        draw = np.nonzero(rng.random(m) < 0.5)[0]
        bits = 0
        for i in draw:
            bits |= 1 << int(i)
        candidates.add(bits)

    best_bits, best_val = None, np.inf
    for bits in sorted(candidates):
        v = value(bits)
        if v < best_val - 1e-15 or best_bits is None:
            best_bits, best_val = bits, v
    # Local descent: flip one index at a time while it improves.
    for _ in range(20):
        improved = False
        for i in range(m):
            cand = best_bits ^ (1 << i)
            v = value(cand)
            if v < best_val - 1e-15:
                best_bits, best_val, improved = cand, v, True
        if not improved:
            break
    return float(np.sqrt(best_val)), SubsetMask(best_bits, m), False


def _sigma_n(frame: Frame, bits: int) -> float:
    cols = [i for i in range(frame.count) if bits >> i & 1]
    if not cols:
        return 0.0
    sub = frame.matrix[:, cols]
    evals = np.linalg.eigvalsh(sub @ sub.T)
    return float(np.sqrt(max(evals[0], 0.0)))


def omega(
    frame: Frame,
    mode: str = "exact",
    budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
) -> tuple[float, SubsetMask, bool]:
    """omega = min sigma_n(F_S) over S whose complement does not span R^n.

    Exact mode: under full spark only complements of size n-1 need checking
    (sigma_n grows with S, so the minimum sits at maximal deficient S^c);
    otherwise all 2^m subsets are enumerated up to the budget.
    """
    n, m = frame.dim, frame.count
    full = (1 << m) - 1
    if mode == "exact":
        is_spark, _ = full_spark(frame)
        if is_spark and m >= n:
            best_bits, best_val = None, np.inf
            for subset in combinations(range(m), n - 1):
                comp_bits = 0
                for i in subset:
                    comp_bits |= 1 << i
                bits = full ^ comp_bits
                v = _sigma_n(frame, bits)
                if v < best_val - 1e-15 or best_bits is None:
                    best_bits, best_val = bits, v
            return best_val, SubsetMask(best_bits, m), True
        if 1 << m > EXACT_SUBSET_BUDGET:
            raise BudgetExceededError(
                f"exact omega infeasible for non-full-spark frame with m={m}"
            )
        mat = frame.matrix
        best_bits, best_val = None, np.inf
        for bits in range(1 << m):
            comp = full ^ bits
            comp_cols = [i for i in range(m) if comp >> i & 1]
            if comp_cols and matrix_rank(mat[:, comp_cols]) >= n:
                continue
            v = _sigma_n(frame, bits)
            if v < best_val - 1e-15 or best_bits is None:
                best_bits, best_val = bits, v
        if best_bits is None:
            raise NotAFrameError("no rank-deficient complement found")
        return best_val, SubsetMask(best_bits, m), True
    if mode != "sampled":
        raise ValidationError(f"unknown omega mode {mode!r}")

    rng = np.random.default_rng(np.random.Philox(key=[seed, 0x03E_6A]))
    best_bits, best_val = None, np.inf
    for _ in range(budget):
        idx = rng.choice(m, size=n - 1, replace=False)
        comp_bits = 0
        for i in idx:
            comp_bits |= 1 << int(i)
        bits = full ^ comp_bits
        v = _sigma_n(frame, bits)
        if v < best_val - 1e-15 or best_bits is None:
            best_bits, best_val = bits, v
    return best_val, SubsetMask(best_bits, m), False


def tau(frame: Frame) -> float:
    """tau = min sigma_n(F_S) over rank-n subsets; attained at size-n subsets."""
    n, m = frame.dim, frame.count
    if m < n or frame.rank() < n:
        raise NotAFrameError("no rank-n subset exists: the columns do not span R^n")
    if comb(m, n) > EXACT_SUBSET_BUDGET:
        raise BudgetExceededError(f"tau enumeration infeasible: C({m},{n}) too large")
    best = np.inf
    mat = frame.matrix
    for subset in combinations(range(m), n):
        sub = mat[:, subset]
        if matrix_rank(sub) < n:
            continue
        evals = np.linalg.eigvalsh(sub @ sub.T)
        best = min(best, float(np.sqrt(max(evals[0], 0.0))))
    if not np.isfinite(best):
        raise NotAFrameError("no full-rank size-n subset found")
    return best


# ---------------------------------------------------------------------------
# Lambda_F: operator norm of the analysis map into l^4.
# ---------------------------------------------------------------------------

@dataclass
class LambdaConfig:
    restarts: int = 32
    grid_density: float = 1e-3
    max_iters: int = 200
    tol: float = 1e-12
    seed: int = 0


def _quartic_sum(frame: Frame, x: np.ndarray) -> float:
    return float(np.sum((frame.matrix.T @ x) ** 4))


def lambdaF(frame: Frame, cfg: LambdaConfig | None = None) -> tuple[float, np.ndarray]:
    """Lambda_F = (max over unit x of sum_k |<x,f_k>|^4)^(1/4).

    Cross-checked against Lambda_F^2 = max over unit x of lambda_max(R(x));
    the two routes must agree within 1e-6 relative.
    """
    cfg = cfg or LambdaConfig()
    mat = frame.matrix
    n = frame.dim

    if n == 2:
        phis = np.arange(0.0, np.pi, cfg.grid_density)
        xs = np.vstack([np.cos(phis), np.sin(phis)])
        vals = np.sum((mat.T @ xs) ** 4, axis=0)
        best = int(np.argmax(vals))
        center, width = phis[best], cfg.grid_density
        for _ in range(12):
            local = np.linspace(center - width, center + width, 65)
            lx = np.vstack([np.cos(local), np.sin(local)])
            lvals = np.sum((mat.T @ lx) ** 4, axis=0)
            k = int(np.argmax(lvals))
            center, width = local[k], width / 16.0
        x_star = np.array([np.cos(center), np.sin(center)])
        best_val = _quartic_sum(frame, x_star)
    else:
        rng = np.random.default_rng(np.random.Philox(key=[cfg.seed, 0x1A_4F]))
        starts = list(np.eye(n)) + [mat[:, j] for j in range(frame.count)]
        starts += [rng.standard_normal(n) for _ in range(cfg.restarts)]
        best_val, x_star = -np.inf, None
        for x0 in starts:
            norm = np.linalg.norm(x0)
            if norm == 0:
                continue
            x = x0 / norm
            val = _quartic_sum(frame, x)
            step = 1.0
            for _ in range(cfg.max_iters):
                grad = 4.0 * mat @ ((mat.T @ x) ** 3)
                rgrad = grad - np.dot(grad, x) * x
                gnorm = np.linalg.norm(rgrad)
                if gnorm < cfg.tol:
                    break
                t, moved = step, False
                for _ in range(40):
                    cand = x + t * rgrad
                    cand /= np.linalg.norm(cand)
                    cand_val = _quartic_sum(frame, cand)
                    if cand_val > val + 0.25 * t * gnorm**2:
                        x, val, moved = cand, cand_val, True
                        step = min(2.0 * t, 1.0)
                        break
                    t *= 0.5
                if not moved:
                    break
            if val > best_val:
                best_val, x_star = val, x

    # Cross-route: Lambda_F^2 must equal max lambda_max(R(x)) at the argmax.
    evals, _ = sym_eig((mat * (mat.T @ x_star) ** 2) @ mat.T)
    cross = float(evals[0])
    scale = max(best_val, cross, 1e-300)
    if abs(cross - best_val) > 1e-6 * scale:
        raise VerdictConflictError(
            f"Lambda_F routes disagree: quartic {best_val!r} vs lambda_max(R) {cross!r}"
        )
    return float(best_val ** 0.25), x_star


# ---------------------------------------------------------------------------
# Local radii and ratio families.
# ---------------------------------------------------------------------------

def eps0(frame: Frame, x: np.ndarray) -> float:
    """eps0(x) = min nonzero |<f_k,x>| / max ||f_k|| over the active set."""
    x = _check_vector(frame, x)
    coeffs = frame.matrix.T @ x
    norms = np.linalg.norm(frame.matrix, axis=0)
    active = np.abs(coeffs) > 1e-12 * norms * np.linalg.norm(x)
    if not np.any(active):
        raise ValidationError("all frame coefficients vanish at x")
    return float(np.min(np.abs(coeffs[active])) / np.max(norms[active]))


def delta_x(frame: Frame, x: np.ndarray) -> float:
    """delta_x = (2 tau / (max ||f_j|| + tau)) * min nonzero |<f_j,x>|."""
    x = _check_vector(frame, x)
    coeffs = frame.matrix.T @ x
    norms = np.linalg.norm(frame.matrix, axis=0)
    active = np.abs(coeffs) > 1e-12 * norms * np.linalg.norm(x)
    if not np.any(active):
        raise ValidationError("all frame coefficients vanish at x")
    t = tau(frame)
    lmax = frame.max_column_norm()
    return float(2.0 * t / (lmax + t) * np.min(np.abs(coeffs[active])))


def u_ratio(frame: Frame, x: np.ndarray, y: np.ndarray) -> float:
    """U(x,y) = ||alpha(x) - alpha(y)|| / d(x,y)."""
    d = dist_d(x, y)
    if d == 0.0:
        raise ValidationError("u_ratio undefined: d(x,y) = 0")
    return float(np.linalg.norm(analysis_map(frame, x) - analysis_map(frame, y)) / d)


def v_ratio(frame: Frame, x: np.ndarray, y: np.ndarray) -> float:
    """V(x,y) = ||alpha^2(x) - alpha^2(y)|| / d1(x,y), two routes cross-checked."""
    d1 = dist_d1(x, y)
    if d1 == 0.0:
        raise ValidationError("v_ratio undefined: d1(x,y) = 0")
    direct = float(
        np.linalg.norm(analysis_map_sq(frame, x) - analysis_map_sq(frame, y)) / d1
    )
    w1, w2 = np.asarray(x, float) - np.asarray(y, float), np.asarray(x, float) + np.asarray(y, float)
    coeffs = (frame.matrix.T @ w1) * (frame.matrix.T @ w2)
    via_lemma = float(
        np.sqrt(np.sum(coeffs**2)) / (np.linalg.norm(w1) * np.linalg.norm(w2))
    )
    if abs(direct - via_lemma) > 1e-9 * max(direct, via_lemma, 1.0):
        raise VerdictConflictError(
            f"V routes disagree: {direct!r} vs {via_lemma!r}"
        )
    return direct


def u_ratios_batch(frame: Frame, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized U over rows of xs, ys (pairs with d = 0 yield nan)."""
    ax = np.abs(xs @ frame.matrix)
    ay = np.abs(ys @ frame.matrix)
    num = np.linalg.norm(ax - ay, axis=1)
    d = np.minimum(
        np.linalg.norm(xs - ys, axis=1), np.linalg.norm(xs + ys, axis=1)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(d > 0, num / d, np.nan)


def v_ratios_batch(frame: Frame, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized V over rows of xs, ys via the rank-two product form."""
    w1, w2 = xs - ys, xs + ys
    coeffs = (w1 @ frame.matrix) * (w2 @ frame.matrix)
    num = np.linalg.norm(coeffs, axis=1)
    den = np.linalg.norm(w1, axis=1) * np.linalg.norm(w2, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, np.nan)


# ---------------------------------------------------------------------------
# Q_eps(x): feasible-witness maximization and the theory brackets.
# ---------------------------------------------------------------------------

@dataclass
class QepsConfig:
    restarts: int = 128
    grid_points: int = 400
    refine_rounds: int = 60
    max_iters: int = 200
    seed: int = 0
    t_cap: float = 1e6


def _min_eigvec(mat: np.ndarray) -> np.ndarray:
    evals, evecs = sym_eig(mat)
    return evecs[:, -1]


def _structured_directions(frame: Frame) -> list[np.ndarray]:
    """Eigenvector/kernel directions from the extremal constructions."""
    n, m = frame.dim, frame.count
    dirs = [_min_eigvec(gram(frame))]
    try:
        _, s_delta, _ = delta(frame, mode="exact")
    except BudgetExceededError:
        _, s_delta, _ = delta(frame, mode="sampled")
    for mask in (s_delta, s_delta.complement()):
        if 0 < mask.size():
            dirs.append(_min_eigvec(gram(frame, mask)))
    try:
        _, s_omega, _ = omega(frame, mode="exact")
    except BudgetExceededError:
        _, s_omega, _ = omega(frame, mode="sampled")
    comp = s_omega.complement()
    if comp.size() > 0:
        sub = frame.columns_for(comp)
        if matrix_rank(sub) < n:
            # kernel of F_{S^c}^T: direction invisible to the deficient block
            _, _, vt = np.linalg.svd(sub.T, full_matrices=True)
            dirs.append(vt[-1])
    dirs.append(_min_eigvec(gram(frame, s_omega)))
    return dirs


def _best_t_along(
    frame: Frame,
    x: np.ndarray,
    u: np.ndarray,
    eps: float,
    t_max: float,
    grid: int,
    t_floor: float = 0.0,
) -> tuple[float, float]:
    """Best feasible step along y = x + t u: returns (d(x,y), t).

    t_floor is a step known to be feasible (eps / sqrt(B) always is, by the
    upper Lipschitz bound); a geometric sub-grid anchored there keeps tiny
    feasible regions visible when eps << t_max.
    """
    ax = np.abs(frame.matrix.T @ x)
    ts = np.linspace(0.0, t_max, grid)[1:]
    if 0.0 < t_floor < t_max:
        ts = np.concatenate([ts, np.geomspace(t_floor * 1e-2, t_max, grid)])
    ys = x[None, :] + ts[:, None] * u[None, :]
    ays = np.abs(ys @ frame.matrix)
    feas = np.linalg.norm(ays - ax[None, :], axis=1) <= eps
    if not np.any(feas):
        return 0.0, 0.0
    dvals = np.minimum(
        np.linalg.norm(ys - x[None, :], axis=1), np.linalg.norm(ys + x[None, :], axis=1)
    )
    dvals = np.where(feas, dvals, -np.inf)
    k = int(np.argmax(dvals))
    best_d, best_t = float(dvals[k]), float(ts[k])
    # zoom around the winner; cover the neighbor gap of either sub-grid
    width = max(t_max / (grid - 1), 0.05 * best_t)
    for _ in range(6):
        local = np.linspace(max(best_t - width, 0.0), best_t + width, 33)[1:]
        ys = x[None, :] + local[:, None] * u[None, :]
        ays = np.abs(ys @ frame.matrix)
        feas = np.linalg.norm(ays - ax[None, :], axis=1) <= eps
        if np.any(feas):
            dv = np.minimum(
                np.linalg.norm(ys - x[None, :], axis=1),
                np.linalg.norm(ys + x[None, :], axis=1),
            )
            dv = np.where(feas, dv, -np.inf)
            k = int(np.argmax(dv))
            if dv[k] > best_d:
                best_d, best_t = float(dv[k]), float(local[k])
        width /= 16.0
    return best_d, best_t


def q_eps_estimate(
    frame: Frame,
    x: np.ndarray,
    eps: float,
    cfg: QepsConfig | None = None,
    constants: "StabilityConstants | None" = None,
) -> StabilityReport:
    """Lower-bound estimate of Q_eps(x) by multi-start feasible line searches.

    Searches directions u and steps t for y = x + t u keeping
    ||alpha(x) - alpha(y)|| <= eps; structured starts (lowest-eigenvector and
    kernel directions from the extremal constructions) make the theory values
    reachable.  Every reported witness is verified feasible, so the estimate
    is a true lower bound.
    """
    cfg = cfg or QepsConfig()
    x = _check_vector(frame, x)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if not np.any(x):
        raise ValidationError("x must be nonzero")

    if constants is not None:
        a_lower = constants.sqrtA**2
        b_upper = constants.sqrtB**2
        delta_val, omega_val = constants.Delta, constants.omega
    else:
        a_lower, b_upper = frame_bounds(frame)
        try:
            delta_val = delta(frame, mode="exact")[0]
        except BudgetExceededError:
            delta_val = delta(frame, mode="sampled", seed=cfg.seed)[0]
        try:
            omega_val = omega(frame, mode="exact")[0]
        except BudgetExceededError:
            omega_val = omega(frame, mode="sampled", seed=cfg.seed)[0]

    xnorm = float(np.linalg.norm(x))
    # Steps beyond ~2||x|| + eps/omega cannot help unless the frame is degenerate.
    if omega_val > 0:
        t_max = 4.0 * xnorm + 4.0 * eps / omega_val
    else:
        t_max = min(cfg.t_cap, 4.0 * xnorm + 100.0 * eps)
    t_floor = eps / np.sqrt(b_upper) if b_upper > 0 else 0.0

    rng = np.random.default_rng(np.random.Philox(key=[cfg.seed, 0x9E_95]))
    dirs = []
    for u in _structured_directions(frame):
        dirs.extend((u, -u))
    for _ in range(cfg.restarts):
        dirs.append(rng.standard_normal(frame.dim))

    best_d, best_y = 0.0, x.copy()
    for u in dirs:
        norm = np.linalg.norm(u)
        if norm == 0:
            continue
        u = u / norm
        d, t = _best_t_along(frame, x, u, eps, t_max, cfg.grid_points, t_floor)
        if d > best_d:
            best_d, best_y = d, x + t * u

    # Hill-climb on the winning direction.
    if best_d > 0:
        u = (best_y - x) / np.linalg.norm(best_y - x)
        step = 0.5
        for _ in range(cfg.refine_rounds):
            cand = u + step * rng.standard_normal(frame.dim)
            cand /= np.linalg.norm(cand)
            d, t = _best_t_along(frame, x, cand, eps, t_max, cfg.grid_points, t_floor)
            if d > best_d:
                best_d, best_y, u = d, x + t * cand, cand
            else:
                step *= 0.9

    # Feasibility recheck (defensive; grid candidates were already feasible).
    gap = float(np.linalg.norm(analysis_map(frame, x) - analysis_map(frame, best_y)))
    if gap > eps * (1 + 1e-12):
        best_y, best_d = x.copy(), 0.0

    upper = np.inf if delta_val == 0 else 1.0 / delta_val
    lower = min(1.0 / eps, np.inf if omega_val == 0 else 1.0 / omega_val)
    q_theory = None
    try:
        if eps < delta_x(frame, x):
            q_theory = 1.0 / np.sqrt(a_lower)
    except (ValidationError, NotAFrameError, BudgetExceededError):
        pass

    w1, w2 = x + best_y, x - best_y
    return StabilityReport(
        x=x,
        eps=eps,
        Q_estimate=best_d / eps,
        bracket=(lower, upper),
        witness=(w1, w2, best_y),
        Q_theory=q_theory,
    )


def q_eps_brackets(frame: Frame, eps: float) -> dict:
    """Theory brackets for q_eps: lower min(1/eps, 1/omega), upper 1/Delta,
    exact 1/omega when eps < tau; Delta = 0 reports an unbounded measure."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    delta_val, _, delta_exact = delta(frame, mode="exact")
    omega_val, _, omega_exact = omega(frame, mode="exact")
    if delta_val == 0.0:
        return {
            "lower": np.inf,
            "upper": np.inf,
            "exact": None,
            "q_inf": np.inf,
            "unbounded": True,
            "exact_enumeration": bool(delta_exact and omega_exact),
        }
    tau_val = tau(frame)
    exact = 1.0 / omega_val if eps < tau_val else None
    return {
        "lower": min(1.0 / eps, 1.0 / omega_val),
        "upper": 1.0 / delta_val,
        "exact": exact,
        "q_inf": 1.0 / delta_val,
        "unbounded": False,
        "exact_enumeration": bool(delta_exact and omega_exact),
    }


def omega_witness_point(frame: Frame, eps: float) -> np.ndarray:
    """The x from the small-eps extremal construction: Q_eps(x) ~ min(1/eps, 1/omega).

    Builds w1 = t v1 along the lowest singular direction of the omega-achieving
    subset and w2 along a kernel vector of the deficient complement, scaled so
    ||w1 + w2|| = 2.
    """
    omega_val, s_omega, _ = omega(frame, mode="exact")
    if omega_val == 0.0:
        raise NotAFrameError("omega = 0: the construction needs a retrievable frame")
    v1 = _min_eigvec(gram(frame, s_omega))
    comp = s_omega.complement()
    if comp.size() == 0:
        raise NotAFrameError("omega subset has empty complement")
    sub = frame.columns_for(comp)
    _, _, vt = np.linalg.svd(sub.T, full_matrices=True)
    v2 = vt[-1]
    t = min(eps / omega_val, 1.0)
    w1 = t * v1
    # solve ||w1 + s v2|| = 2 for s >= 1
    b = float(np.dot(w1, v2))
    s = -b + np.sqrt(b**2 + 4.0 - t**2)
    return 0.5 * (w1 + s * v2)


def worst_case_witness(frame: Frame) -> tuple[np.ndarray, np.ndarray, float]:
    """Extremal triple (x, y, eps) with d(x,y)/eps >= 1/Delta from the
    Delta-achieving partition; for Delta = 0 the triple demonstrates
    non-injectivity (alpha(x) = alpha(y) with x != ±y)."""
    delta_val, s0, _ = delta(frame, mode="exact")
    u = _min_eigvec(gram(frame, s0)) if s0.size() else _pure_kernel(frame, s0)
    comp = s0.complement()
    v = _min_eigvec(gram(frame, comp)) if comp.size() else _pure_kernel(frame, comp)
    x = 0.5 * (u + v)
    y = 0.5 * (u - v)
    return x, y, delta_val


def _pure_kernel(frame: Frame, mask: SubsetMask) -> np.ndarray:
    # Empty subset: any unit vector has ||F_S^T v|| = 0; pick e_1 deterministically.
    v = np.zeros(frame.dim)
    v[0] = 1.0
    return v


def lipschitz_constants(
    frame: Frame,
    a0_cfg: A0Config | None = None,
    lambda_cfg: LambdaConfig | None = None,
    subset_budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
) -> StabilityConstants:
    """Assemble every stability constant and assert the theory chain
    Delta = rho_inf <= omega <= rho_0 = sqrt(A) <= sqrt(B)."""
    a_lower, b_upper = frame_bounds(frame)
    try:
        delta_val, s_delta, delta_exact = delta(frame, mode="exact")
    except BudgetExceededError:
        delta_val, s_delta, delta_exact = delta(
            frame, mode="sampled", budget=subset_budget, seed=seed
        )
    try:
        omega_val, s_omega, omega_exact = omega(frame, mode="exact")
    except BudgetExceededError:
        omega_val, s_omega, omega_exact = omega(
            frame, mode="sampled", budget=subset_budget, seed=seed
        )
    try:
        tau_val, tau_exact = tau(frame), True
    except BudgetExceededError:
        tau_val, tau_exact = np.nan, False
    lam, lam_arg = lambdaF(frame, lambda_cfg)
    a0_val, a0_x, a0_u = a0_search(frame, a0_cfg)

    tol = 1e-9 * max(1.0, b_upper)
    chain = (delta_val, omega_val, np.sqrt(a_lower), np.sqrt(b_upper))
    for lo, hi, names in zip(chain, chain[1:], ("Delta<=omega", "omega<=sqrtA", "sqrtA<=sqrtB")):
        if lo > hi + tol:
            raise VerdictConflictError(
                f"stability chain violated ({names}): {lo!r} > {hi!r}"
            )

    return StabilityConstants(
        Delta=delta_val,
        omega=omega_val,
        tau=tau_val,
        lambdaF=lam,
        sqrtA=float(np.sqrt(a_lower)),
        sqrtB=float(np.sqrt(b_upper)),
        mu0=float(np.sqrt(max(a0_val, 0.0))),
        exact={
            "Delta": delta_exact,
            "omega": omega_exact,
            "tau": tau_exact,
            "lambdaF": frame.dim == 2,
            "a0": frame.dim <= 2,
            "A": True,
            "B": True,
        },
        witnesses={
            "Delta_subset": s_delta,
            "omega_subset": s_omega,
            "lambdaF_argmax": lam_arg,
            "a0_x_star": a0_x,
            "a0_u_star": a0_u,
            "rho_inf": delta_val,
            "rho0": float(np.sqrt(a_lower)),
            "mu_inf": float(np.sqrt(max(a0_val, 0.0))),
            "upperU": float(np.sqrt(b_upper)),
            "upperV": lam**2,
        },
    )
