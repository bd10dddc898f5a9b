"""Slow, independent reference implementations used to freeze expected values.

Everything here deliberately avoids the library's own code paths: eigenvalues
come from SVD or closed forms, subset constants from exhaustive enumeration,
and optima from dense grids. These are oracles, not production code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def eig_2x2(mat):
    """Closed-form eigenvalues of a symmetric 2x2 matrix, descending."""
    a, b, c = mat[0, 0], mat[0, 1], mat[1, 1]
    tr = a + c
    disc = math.sqrt((a - c) ** 2 + 4.0 * b * b)
    return ((tr + disc) / 2.0, (tr - disc) / 2.0)


def frame_bounds_svd(F):
    """(A, B) from singular values of F, no eigensolver involved."""
    s = np.linalg.svd(F, compute_uv=False)
    n = F.shape[0]
    smin = s[n - 1] if len(s) >= n else 0.0
    return float(smin) ** 2, float(s[0]) ** 2


def r_matrix_naive(F, x):
    n, m = F.shape
    R = np.zeros((n, n))
    for j in range(m):
        f = F[:, j]
        R += (f @ x) ** 2 * np.outer(f, f)
    return R


def a0_grid_2d(F, points=200001):
    """Dense-grid a0 for n=2 via the closed-form 2x2 eigenvalue."""
    thetas = np.linspace(0.0, math.pi, points)
    best = math.inf
    for t in thetas:
        x = np.array([math.cos(t), math.sin(t)])
        lam = eig_2x2(r_matrix_naive(F, x))[1]
        best = min(best, lam)
    return best


def lambda_grid_2d(F, points=200001):
    """Dense-grid max_x lambda_max(R(x))^(1/4) for n=2."""
    thetas = np.linspace(0.0, math.pi, points)
    best = 0.0
    for t in thetas:
        x = np.array([math.cos(t), math.sin(t)])
        best = max(best, eig_2x2(r_matrix_naive(F, x))[0])
    return best ** 0.25


def subset_sigma_n(F, idx):
    """n-th largest singular value of the chosen columns, via SVD only."""
    n = F.shape[0]
    if len(idx) == 0:
        return 0.0
    s = np.linalg.svd(F[:, list(idx)], compute_uv=False)
    return float(s[n - 1]) if len(s) >= n else 0.0


def delta_bruteforce(F):
    """min over all subsets of sqrt(sigma_n(F_S)^2 + sigma_n(F_Sc)^2)."""
    n, m = F.shape
    cols = range(m)
    best = math.inf
    for r in range(m + 1):
        for S in itertools.combinations(cols, r):
            Sc = tuple(j for j in cols if j not in S)
            val = math.sqrt(subset_sigma_n(F, S) ** 2 + subset_sigma_n(F, Sc) ** 2)
            best = min(best, val)
    return best


def omega_bruteforce(F):
    """min sigma_n(F_S) over subsets whose complement is rank deficient."""
    n, m = F.shape
    cols = range(m)
    best = math.inf
    for r in range(m + 1):
        for S in itertools.combinations(cols, r):
            Sc = tuple(j for j in cols if j not in S)
            if subset_sigma_n(F, Sc) > 1e-10:
                continue
            best = min(best, subset_sigma_n(F, S))
    return best


def tau_bruteforce(F):
    """min sigma_n over all subsets of full rank n (monotone, so all sizes)."""
    n, m = F.shape
    cols = range(m)
    best = math.inf
    for r in range(n, m + 1):
        for S in itertools.combinations(cols, r):
            s = subset_sigma_n(F, S)
            if s > 1e-10:
                best = min(best, s)
    return best


def dist_d1_nuclear(x, y):
    """Nuclear norm of xx^T - yy^T computed from its SVD."""
    M = np.outer(x, x) - np.outer(y, y)
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def dist_d_naive(x, y):
    return min(float(np.linalg.norm(x - y)), float(np.linalg.norm(x + y)))


def full_spark_bruteforce(F):
    n, m = F.shape
    for S in itertools.combinations(range(m), n):
        if abs(np.linalg.det(F[:, list(S)])) < 1e-12:
            return False
    return True


def _rank(M):
    return 0 if M.shape[1] == 0 else int(np.linalg.matrix_rank(M))


def complement_property_bruteforce(F):
    """Every partition (S, Sc) has at least one side spanning R^n."""
    n, m = F.shape
    for bits in range(1 << (m - 1)):
        S = [j for j in range(m) if bits >> j & 1]
        Sc = [j for j in range(m) if not bits >> j & 1]
        if _rank(F[:, S]) < n and _rank(F[:, Sc]) < n:
            return False
    return True
