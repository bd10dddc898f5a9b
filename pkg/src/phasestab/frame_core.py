"""Frames, subset spectra, the magnitude analysis maps and the two metrics on R^n/±.

A frame is stored as its n x m matrix F = [f_1, ..., f_m] with the frame
vectors as columns.  Everything in this module is a pure function of its
inputs; Frame and SubsetMask are immutable after construction.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    ValidationError,
)

# Relative threshold for rank decisions: singular values > RANK_RTOL * sigma_1
# count toward the rank.
RANK_RTOL = 1e-10

# Eigenvalues of PSD Gram matrices in [-EIG_CLAMP_RTOL * ||M||, 0) are
# reported as 0: Gram matrices are PSD by construction, negatives are roundoff.
EIG_CLAMP_RTOL = 1e-12


@dataclass(frozen=True)
class Frame:
    """A spanning set of m column vectors in R^n, kept as an n x m matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2:
            raise ValidationError(f"frame matrix must be 2-d, got shape {mat.shape}")
        n, m = mat.shape
        if n < 1 or m < 1:
            raise ValidationError(f"frame matrix must be nonempty, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("frame matrix contains non-finite entries")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]

    def columns_for(self, mask: "SubsetMask") -> np.ndarray:
        """The n x |S| submatrix F_S."""
        return self.matrix[:, mask.indices()]

    def max_column_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.matrix, axis=0)))

    def rank(self) -> int:
        return matrix_rank(self.matrix)


@dataclass(frozen=True)
class SubsetMask:
    """A subset S of the column indices {0, ..., m-1}, stored as a bitmask."""

    bits: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("subset mask needs m >= 1")
        if self.bits < 0 or self.bits >= (1 << self.m):
            raise ValidationError(f"bitmask {self.bits} out of range for m={self.m}")

    @classmethod
    def from_indices(cls, indices, m: int) -> "SubsetMask":
        bits = 0
        for i in indices:
            if not 0 <= i < m:
                raise ValidationError(f"index {i} out of range for m={m}")
            bits |= 1 << i
        return cls(bits, m)

    @classmethod
    def full(cls, m: int) -> "SubsetMask":
        return cls((1 << m) - 1, m)

    @classmethod
    def empty(cls, m: int) -> "SubsetMask":
        return cls(0, m)

    def complement(self) -> "SubsetMask":
        return SubsetMask(((1 << self.m) - 1) ^ self.bits, self.m)

    def indices(self) -> list[int]:
        return [i for i in range(self.m) if self.bits >> i & 1]

    def size(self) -> int:
        return bin(self.bits).count("1")

    def contains(self, i: int) -> bool:
        return bool(self.bits >> i & 1)


@dataclass(frozen=True)
class SpectralSummary:
    """Spectrum of F_S F_S^T: eigenvalues (non-increasing), A[S] and sigma_n(F_S)."""

    eigenvalues: np.ndarray
    lower: float
    sigma_min: float
    mask: SubsetMask | None = field(default=None)


def sym_eig(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix.

    Returns eigenvalues sorted non-increasing and the matching orthonormal
    eigenvectors as columns.  Rejects non-symmetric input; wraps LAPACK
    non-convergence in ConvergenceError with the symmetry residual attached.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
    scale = float(np.max(np.abs(mat))) or 1.0
    asym = float(np.max(np.abs(mat - mat.T)))
    if asym > 1e-12 * scale:
        raise ValidationError(
            f"matrix is not symmetric: max |M - M^T| = {asym:.3e} vs scale {scale:.3e}"
        )
    try:
        evals, evecs = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    order = np.argsort(evals)[::-1]
    return evals[order], evecs[:, order]


def gram(frame: Frame, mask: SubsetMask | None = None) -> np.ndarray:
    """F_S F_S^T (the full FF^T when mask is None)."""
    sub = frame.matrix if mask is None else frame.columns_for(mask)
    return sub @ sub.T


def frame_bounds(frame: Frame) -> tuple[float, float]:
    """Optimal frame bounds (A, B): the extreme eigenvalues of FF^T.

    A = 0 signals a non-frame (the columns do not span); that is reported,
    not raised.
    """
    evals, _ = sym_eig(gram(frame))
    scale = float(evals[0]) if evals[0] > 0 else 1.0
    a = float(evals[-1])
    if -EIG_CLAMP_RTOL * scale <= a < 0.0:
        a = 0.0
    return a, float(evals[0])


def subset_spectrum(frame: Frame, mask: SubsetMask) -> SpectralSummary:
    """Spectrum of F_S F_S^T; the empty subset yields A[S] = sigma_min = 0."""
    if mask.m != frame.count:
        raise DimensionMismatchError(
            f"mask over {mask.m} indices does not match frame with m={frame.count}"
        )
    if mask.size() == 0:
        zeros = np.zeros(frame.dim)
        return SpectralSummary(eigenvalues=zeros, lower=0.0, sigma_min=0.0, mask=mask)
    evals, _ = sym_eig(gram(frame, mask))
    scale = float(evals[0]) if evals[0] > 0 else 1.0
    lower = float(evals[-1])
    if lower < 0:
        if lower < -EIG_CLAMP_RTOL * scale:
            raise ConvergenceError(
                f"Gram matrix eigenvalue {lower!r} below roundoff floor for scale {scale!r}"
            )
        lower = 0.0
    return SpectralSummary(
        eigenvalues=evals, lower=lower, sigma_min=float(np.sqrt(lower)), mask=mask
    )


def subset_lower_bound(frame: Frame, mask: SubsetMask) -> float:
    """A[S] = lambda_min(F_S F_S^T), clamped at 0."""
    return subset_spectrum(frame, mask).lower


def _check_vector(frame: Frame, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (frame.dim,):
        raise DimensionMismatchError(
            f"vector of shape {x.shape} does not match frame dimension {frame.dim}"
        )
    return x


def analysis_map(frame: Frame, x: np.ndarray) -> np.ndarray:
    """Magnitude analysis map: entry j is |<x, f_j>|."""
    x = _check_vector(frame, x)
    return np.abs(frame.matrix.T @ x)


def analysis_map_sq(frame: Frame, x: np.ndarray) -> np.ndarray:
    """Squared-magnitude analysis map: entry j is |<x, f_j>|^2."""
    x = _check_vector(frame, x)
    return (frame.matrix.T @ x) ** 2


def dist_d(x: np.ndarray, y: np.ndarray) -> float:
    """Sign-invariant Euclidean distance min(||x-y||, ||x+y||)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} and {y.shape} differ")
    return float(min(np.linalg.norm(x - y), np.linalg.norm(x + y)))


def dist_d1(x: np.ndarray, y: np.ndarray) -> float:
    """Nuclear-norm distance ||xx^T - yy^T||_1.

    Computed as ||x-y|| * ||x+y|| (the rank-<=2 closed form) and cross-checked
    against the sum of absolute eigenvalues of xx^T - yy^T.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shapes {x.shape} and {y.shape} differ")
    closed = float(np.linalg.norm(x - y) * np.linalg.norm(x + y))
    evals, _ = sym_eig(np.outer(x, x) - np.outer(y, y))
    spectral = float(np.sum(np.abs(evals)))
    scale = max(closed, spectral, 1.0)
    if abs(closed - spectral) > 1e-9 * scale:
        raise ConvergenceError(
            f"nuclear-norm routes disagree: {closed!r} vs {spectral!r}"
        )
    return closed


def null_vector(mat: np.ndarray) -> np.ndarray:
    """A unit vector c with M c = 0 for a matrix with more columns than rows."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[1] <= mat.shape[0]:
        raise ValidationError(
            f"need more columns than rows for a guaranteed null vector, got {mat.shape}"
        )
    _, _, vt = np.linalg.svd(mat, full_matrices=True)
    c = vt[-1]
    return c / np.linalg.norm(c)


def matrix_rank(mat: np.ndarray) -> int:
    """Rank = number of singular values above RANK_RTOL * sigma_1."""
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return 0
    svals = np.linalg.svd(mat, compute_uv=False)
    if svals[0] == 0.0:
        return 0
    return int(np.sum(svals > RANK_RTOL * svals[0]))


# ---------------------------------------------------------------------------
# Frame ingestion: CSV (n rows x m columns) and JSON {"dim", "count", "columns"}.
# ---------------------------------------------------------------------------

def frame_from_json_dict(doc: dict) -> Frame:
    try:
        n = int(doc["dim"])
        m = int(doc["count"])
        cols = doc["columns"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad frame JSON: {exc}") from exc
    if len(cols) != m:
        raise ValidationError(f"frame JSON declares count={m} but has {len(cols)} columns")
    mat = np.empty((n, m))
    for j, col in enumerate(cols):
        if len(col) != n:
            raise ValidationError(f"column {j} has length {len(col)}, expected dim={n}")
        mat[:, j] = col
    return Frame(mat)


def frame_to_json_dict(frame: Frame) -> dict:
    return {
        "dim": frame.dim,
        "count": frame.count,
        "columns": [frame.matrix[:, j].tolist() for j in range(frame.count)],
    }


def load_frame(path) -> Frame:
    """Load a frame from a .json or .csv file (decided by extension)."""
    path = os.fspath(path)
    if path.endswith(".json"):
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        return frame_from_json_dict(doc)
    if path.endswith(".csv"):
        rows = []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                try:
                    rows.append([float(v) for v in row])
                except ValueError as exc:
                    raise ValidationError(f"{path}:{lineno}: non-numeric entry ({exc})") from exc
        if not rows:
            raise ValidationError(f"{path}: empty CSV")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValidationError(f"{path}: ragged CSV rows, widths {sorted(widths)}")
        return Frame(np.array(rows))
    raise ValidationError(f"{path}: unsupported frame file extension (want .json or .csv)")


def dump_frame_csv(frame: Frame) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for i in range(frame.dim):
        writer.writerow([f"{v:.17g}" for v in frame.matrix[i]])
    return buf.getvalue()


def mercedes_benz_frame() -> Frame:
    """Three unit vectors in R^2 at angles 90, 210, 330 degrees (tight, A=B=3/2)."""
    angles = np.deg2rad([90.0, 210.0, 330.0])
    return Frame(np.vstack([np.cos(angles), np.sin(angles)]))


def standard_basis_frame(n: int) -> Frame:
    return Frame(np.eye(n))
