"""PCA via cyclic Jacobi eigendecomposition of the covariance matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
DEFAULT_VARIANCE = 0.95


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean_vector: np.ndarray  # (d,)
    components: np.ndarray  # (k, d), orthonormal rows
    eigenvalues: np.ndarray  # (k,), non-increasing
    explained_variance_ratio: np.ndarray  # (k,)

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    def to_dict(self) -> dict:
        return {
            "mean_vector": self.mean_vector.tolist(),
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(
            mean_vector=np.asarray(d["mean_vector"], dtype=np.float64),
            components=np.asarray(d["components"], dtype=np.float64).reshape(-1, len(d["mean_vector"])),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=np.float64),
            explained_variance_ratio=np.asarray(d["explained_variance_ratio"], dtype=np.float64),
        )


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues and eigenvectors (as columns) of a symmetric matrix.

    Cyclic-by-row sweeps over (p, q) with p < q. Stops once every
    off-diagonal magnitude falls below ``tol * max(1, max|a|)``.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, np.abs(a).max(initial=0.0))
    iu = np.triu_indices(n, 1)

    for _ in range(max_sweeps):
        if n < 2 or np.abs(a[iu]).max() < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff  # small-angle limit; tau itself would overflow
                else:
                    tau = diff / (2.0 * apq)
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.diag(a).copy(), v


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # largest-magnitude entry positive; argmax returns the first on ties
    return -vec if vec[np.argmax(np.abs(vec))] < 0 else vec


def fit_pca(matrix, retain: int | float = DEFAULT_VARIANCE) -> PcaModel:
    """Fit PCA on an (n, d) matrix.

    ``retain`` is either a component count (int) or the minimum fraction of
    variance to keep (float in (0, 1]).
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise ValueError(f"PCA needs at least 2 rows, got {n}")
    if d < 1:
        raise ValueError("PCA needs at least 1 column")
    if np.isnan(x).any():
        raise ValueError("PCA input contains missing values")
    if isinstance(retain, bool) or not isinstance(retain, (int, float, np.integer, np.floating)):
        raise TypeError(f"retain must be an int or float, got {retain!r}")

    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / n
    eigvals, eigvecs = jacobi_eigh(cov)
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(-eigvals, kind="stable")
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    total = eigvals.sum()
    ratio = eigvals / total if total > 0 else np.zeros_like(eigvals)

    if isinstance(retain, (int, np.integer)):
        k = int(retain)
        if not 1 <= k <= d:
            raise ValueError(f"component count must lie in [1, {d}], got {k}")
    else:
        v = float(retain)
        if not 0.0 < v <= 1.0:
            raise ValueError(f"variance fraction must lie in (0, 1], got {v}")
        cumulative = np.cumsum(ratio)
        reached = np.flatnonzero(cumulative >= v - 1e-12)
        k = int(reached[0]) + 1 if len(reached) else d

    components = np.array([_fix_sign(eigvecs[:, i]) for i in range(k)])
    return PcaModel(
        mean_vector=mean,
        components=components,
        eigenvalues=eigvals[:k].copy(),
        explained_variance_ratio=ratio[:k].copy(),
    )


def project(model: PcaModel, matrix) -> np.ndarray:
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.input_dim:
        raise ValueError(f"expected {model.input_dim} columns, got {x.shape[1]}")
    return (x - model.mean_vector) @ model.components.T


def reconstruct(model: PcaModel, scores) -> np.ndarray:
    return np.asarray(scores, dtype=np.float64) @ model.components + model.mean_vector
