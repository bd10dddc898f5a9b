"""Random Gaussian frame ensembles and the redundancy-scaling studies.

Three studies: minimal redundancy m = 2n-1 (exact omega decay probe), the
tau scaling for n x (n+k) unit-column matrices, and the non-decay corridor
for m = r0 * n with r0 > 2.  Every row is reproducible from (spec, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .frame_core import Frame, null_vector
from .robustness import delta as delta_op, omega as omega_op, tau as tau_op
from .injectivity import full_spark

OMEGA_EXACT_MAX_N = 12


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    m: int
    scale: str          # unit_columns | one_over_sqrt_n
    seed: int
    trials: int = 1

    def __post_init__(self):
        if self.m < self.n:
            raise ValidationError(f"need m >= n, got n={self.n}, m={self.m}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.scale not in ("unit_columns", "one_over_sqrt_n"):
            raise ValidationError(f"unknown scale {self.scale!r}")


@dataclass
class ScalingRow:
    n: int
    m: int
    trial: int
    statistic: str
    value: float
    exact: bool


@dataclass
class StudyResult:
    rows: list[ScalingRow] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _stream(seed: int, tag: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.Philox(key=[seed, (tag << 32) | trial]))


def gaussian_frame(spec: EnsembleSpec, trial: int = 0) -> Frame:
    """i.i.d. N(0,1) frame, column-normalized or globally scaled by 1/sqrt(n)."""
    rng = _stream(spec.seed, spec.n * 1_000_003 + spec.m, trial)
    mat = rng.standard_normal((spec.n, spec.m))
    if spec.scale == "unit_columns":
        norms = np.linalg.norm(mat, axis=0)
        # a zero column has probability zero; redraw defensively
        while np.any(norms == 0.0):
            mat = rng.standard_normal((spec.n, spec.m))
            norms = np.linalg.norm(mat, axis=0)
        mat = mat / norms
    else:
        mat = mat / np.sqrt(spec.n)
    return Frame(mat)


def witness_bound_51(frame: Frame) -> dict:
    """The constructive sigma_n bound from the first n+1 columns.

    A null combination c of the first n+1 columns exists; dropping the column
    with the smallest |c_j| leaves an n x n block G with
    sigma_n(G) <= L / sqrt(n), L the largest norm among the n+1 columns.
    """
    n, m = frame.dim, frame.count
    if m < n + 1:
        raise ValidationError(f"need m >= n+1, got n={n}, m={m}")
    block = frame.matrix[:, : n + 1]
    c = null_vector(block)
    excluded = int(np.argmin(np.abs(c)))
    keep = [j for j in range(n + 1) if j != excluded]
    g = block[:, keep]
    evals = np.linalg.eigvalsh(g @ g.T)
    sigma_n = float(np.sqrt(max(evals[0], 0.0)))
    big_l = float(np.max(np.linalg.norm(block, axis=0)))
    bound = big_l / np.sqrt(n)
    return {
        "sigma_n_G": sigma_n,
        "bound": bound,
        "holds": sigma_n <= bound + 1e-12,
        "excluded_index": excluded,
    }


def _exact_omega_full_spark(frame: Frame) -> float:
    """Exact omega for a full-spark frame via batched size-(n-1) complements."""
    n, m = frame.dim, frame.count
    mat = frame.matrix
    full_gram = mat @ mat.T
    combos = np.array(list(_combinations_array(m, n - 1)), dtype=int)
    if combos.size == 0:  # n == 1
        evals = np.linalg.eigvalsh(full_gram)
        return float(np.sqrt(max(evals[0], 0.0)))
    outers = np.einsum("ij,kj->jik", mat, mat)  # (m, n, n)
    best = np.inf
    chunk = max(1, 50_000_000 // (max(n - 1, 1) * n * n * 8))
    for lo in range(0, len(combos), chunk):
        batch = combos[lo : lo + chunk]
        grams = full_gram[None] - outers[batch].sum(axis=1)
        evals = np.linalg.eigvalsh(grams)
        best = min(best, float(evals[:, 0].min()))
    return float(np.sqrt(max(best, 0.0)))


def _combinations_array(m: int, k: int):
    from itertools import combinations

    return combinations(range(m), k)


def minimal_redundancy_study(
    n_list: list[int], trials: int, seed: int
) -> StudyResult:
    """Exact omega for unit-column Gaussian frames at minimal redundancy
    m = 2n-1, with exponential and polynomial decay fits on the medians.

    Non-full-spark draws (measure zero) are discarded and redrawn; for n <= 6
    the identity Delta = omega is asserted by exhaustive enumeration.
    """
    result = StudyResult()
    medians = {}
    redraws = 0
    for n in n_list:
        if n > OMEGA_EXACT_MAX_N:
            raise BudgetExceededError(
                f"exact omega enumeration infeasible for n={n} > {OMEGA_EXACT_MAX_N}"
            )
        m = 2 * n - 1
        values = []
        for trial in range(trials):
            spec = EnsembleSpec(n=n, m=m, scale="unit_columns", seed=seed, trials=trials)
            frame = gaussian_frame(spec, trial)
            attempt = 0
            while not full_spark(frame)[0]:
                redraws += 1
                attempt += 1
                frame = gaussian_frame(spec, trial + (attempt << 20))
            omega_val = _exact_omega_full_spark(frame)
            if n <= 6:
                delta_val, _, _ = delta_op(frame, mode="exact")
                if abs(delta_val - omega_val) > 1e-10 * max(1.0, omega_val):
                    raise ValidationError(
                        f"Delta != omega at minimal redundancy: {delta_val!r} vs {omega_val!r}"
                    )
            values.append(omega_val)
            result.rows.append(
                ScalingRow(n=n, m=m, trial=trial, statistic="omega", value=omega_val, exact=True)
            )
        medians[n] = float(np.median(values))

    ns = np.array(sorted(medians))
    med = np.array([medians[n] for n in ns])
    summary = {"median_omega": {int(n): medians[n] for n in ns}, "redraws": redraws}
    if len(ns) >= 2 and np.all(med > 0):
        exp_fit = np.polyfit(ns.astype(float), np.log(med), 1)
        poly_fit = np.polyfit(np.log(ns.astype(float)), np.log(med), 1)
        exp_resid = float(np.sum((np.polyval(exp_fit, ns) - np.log(med)) ** 2))
        poly_resid = float(np.sum((np.polyval(poly_fit, np.log(ns)) - np.log(med)) ** 2))
        summary["exponential_fit"] = {"slope": float(exp_fit[0]), "residual": exp_resid}
        summary["polynomial_fit"] = {"slope": float(poly_fit[0]), "residual": poly_resid}
        summary["omega_n32_bounded_probe"] = {
            int(n): medians[n] * float(n) ** 1.5 for n in ns
        }
    result.summary = summary
    return result


def tau_scaling_study(
    n_list: list[int], k: int, trials: int, seed: int, budget: int = 2_000_000
) -> StudyResult:
    """Exact tau for n x (n+k) unit-column Gaussian matrices; reports the
    normalized medians tau * n^(k - 1/2) per n."""
    if k < 0:
        raise ValidationError("k must be >= 0")
    result = StudyResult()
    medians = {}
    for n in n_list:
        m = n + k
        if comb(m, n) > budget:
            raise BudgetExceededError(f"tau enumeration C({m},{n}) exceeds budget {budget}")
        values = []
        for trial in range(trials):
            spec = EnsembleSpec(n=n, m=m, scale="unit_columns", seed=seed, trials=trials)
            frame = gaussian_frame(spec, trial)
            tau_val = tau_op(frame)
            values.append(tau_val)
            result.rows.append(
                ScalingRow(n=n, m=m, trial=trial, statistic="tau", value=tau_val, exact=True)
            )
        medians[n] = float(np.median(values))
    result.summary = {
        "median_tau": {int(n): v for n, v in medians.items()},
        "normalized_median": {
            int(n): v * float(n) ** (k - 0.5) for n, v in medians.items()
        },
        "k": k,
    }
    return result


def redundancy_stability_study(
    r0: float,
    n_list: list[int],
    trials: int,
    subset_budget: int,
    seed: int,
) -> StudyResult:
    """Sampled (and, when feasible, exact) Delta and omega for F = G / sqrt(n)
    with m = round(r0 * n); medians per n feed the non-decay inspection."""
    if not r0 > 2:
        raise ValidationError(f"r0 must exceed 2, got {r0!r}")
    result = StudyResult()
    med_delta, med_omega = {}, {}
    for n in n_list:
        m = int(round(r0 * n))
        deltas, omegas = [], []
        for trial in range(trials):
            spec = EnsembleSpec(n=n, m=m, scale="one_over_sqrt_n", seed=seed, trials=trials)
            frame = gaussian_frame(spec, trial)
            d_val, _, d_exact = delta_op(
                frame,
                mode="exact" if 1 << (m - 1) <= subset_budget else "sampled",
                budget=subset_budget,
                seed=seed + trial,
            )
            try:
                o_val, _, o_exact = omega_op(
                    frame,
                    mode="exact" if comb(m, n - 1) <= subset_budget else "sampled",
                    budget=subset_budget,
                    seed=seed + trial,
                )
            except BudgetExceededError:
                o_val, _, o_exact = omega_op(
                    frame, mode="sampled", budget=subset_budget, seed=seed + trial
                )
            deltas.append(d_val)
            omegas.append(o_val)
            result.rows.append(
                ScalingRow(n=n, m=m, trial=trial, statistic="Delta", value=d_val, exact=d_exact)
            )
            result.rows.append(
                ScalingRow(n=n, m=m, trial=trial, statistic="omega", value=o_val, exact=o_exact)
            )
        med_delta[n] = float(np.median(deltas))
        med_omega[n] = float(np.median(omegas))
    result.summary = {
        "r0": r0,
        "median_Delta": {int(n): v for n, v in med_delta.items()},
        "median_omega": {int(n): v for n, v in med_omega.items()},
    }
    return result
