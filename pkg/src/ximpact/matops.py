"""Dense symmetric linear-algebra kernels.

Eigendecompositions, matrix square roots, factorizations, projectors,
pseudo-inverses and spectral clipping for real symmetric matrices.  All
routines are pure functions of their inputs and deterministic: the
eigendecomposition fixes a descending eigenvalue order and a sign
convention (first nonzero component of each eigenvector positive), so two
calls on the same matrix return bit-identical results.

Conventions
-----------
* ``sqrt_psd`` returns the unique symmetric positive semi-definite square
  root, built from the eigendecomposition.  This symmetric root is the
  default matrix square root everywhere in the package; triangular
  (Cholesky) factors are available through :func:`factorize` for
  factorization-invariance tests.
* Eigenvalues whose magnitude is below ``ZERO_EIG_RTOL`` times the largest
  eigenvalue are treated as exact zeros by the rank-sensitive routines
  (square roots, pseudo-inverses).  At double precision such eigenvalues
  carry no information and keeping them would amplify round-off noise in
  kernel directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError, NotPD, NotPSD, SymmetryViolation

__all__ = [
    "EigDecomp",
    "Factor",
    "Projector",
    "sym_eig",
    "sqrt_psd",
    "inv_sqrt_pd",
    "factorize",
    "pinv_psd",
    "projector",
    "clip_psd",
    "check_symmetric",
]

# Relative symmetry tolerance for inputs (vs. max absolute entry).
SYM_RTOL = 1e-12
# Eigenvalues below -PSD_RTOL * lambda_max raise NotPSD instead of clipping.
PSD_RTOL = 1e-12
# Eigenvalues at or below ZERO_EIG_RTOL * lambda_max count as numerical zeros.
ZERO_EIG_RTOL = 1e-12


@dataclass(frozen=True)
class EigDecomp:
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are sorted descending; ``eigenvectors`` holds the
    matching orthonormal columns with the first nonzero component of each
    column positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


@dataclass(frozen=True)
class Factor:
    """A matrix ``L`` with ``L @ L.T`` equal to the factored input."""

    L: np.ndarray
    kind: str  # "symmetric-root" | "triangular"


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector ``P = B @ B.T`` onto span of basis columns."""

    P: np.ndarray
    subspace_basis: np.ndarray

    @property
    def complement(self) -> np.ndarray:
        return np.eye(self.P.shape[0]) - self.P


def check_symmetric(m: np.ndarray, rtol: float = SYM_RTOL) -> np.ndarray:
    """Validate symmetry and return the symmetrized array.

    Raises
    ------
    SymmetryViolation
        If any entry differs from its transpose by more than ``rtol``
        relative to the largest absolute entry.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SymmetryViolation(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > rtol * scale:
        raise SymmetryViolation("matrix is not symmetric within tolerance")
    return 0.5 * (m + m.T)


def sym_eig(m: np.ndarray) -> EigDecomp:
    """Eigendecomposition with descending sort and fixed sign convention."""
    ms = check_symmetric(m)
    w, v = np.linalg.eigh(ms)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    # Deterministic signs: first nonzero component of each column positive.
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
    w.setflags(write=False)
    v.setflags(write=False)
    return EigDecomp(w, v)


def _psd_eigvals(decomp: EigDecomp) -> np.ndarray:
    """Eigenvalues of a PSD matrix with numerical zeros flattened to 0.

    Raises NotPSD for eigenvalues below the negative tolerance.
    """
    w = decomp.eigenvalues
    if w.size == 0:
        return w.copy()
    top = max(w[0], 0.0)
    tol = PSD_RTOL * (top if top > 0.0 else 1.0)
    if w[-1] < -tol:
        raise NotPSD(f"eigenvalue {w[-1]:.3e} below PSD tolerance (max {top:.3e})")
    out = np.clip(w, 0.0, None)
    out[out <= ZERO_EIG_RTOL * top] = 0.0
    return out


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via the eigendecomposition."""
    dec = sym_eig(m)
    w = _psd_eigvals(dec)
    v = dec.eigenvectors
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def inv_sqrt_pd(m: np.ndarray, min_rtol: float = 1e-14) -> np.ndarray:
    """Symmetric inverse square root of a positive definite matrix."""
    dec = sym_eig(m)
    w = dec.eigenvalues
    if w[-1] <= 0 or w[-1] <= min_rtol * w[0]:
        raise NotPD(f"matrix not positive definite (min eig {w[-1]:.3e})")
    v = dec.eigenvectors
    out = (v / np.sqrt(w)) @ v.T
    return 0.5 * (out + out.T)


def factorize(m: np.ndarray, kind: str = "symmetric-root") -> Factor:
    """Factor ``m = L @ L.T``.

    ``kind="symmetric-root"`` returns the PSD symmetric root,
    ``kind="triangular"`` the lower Cholesky factor (PD input required).
    """
    if kind == "symmetric-root":
        return Factor(sqrt_psd(m), kind)
    if kind == "triangular":
        ms = check_symmetric(m)
        try:
            low = np.linalg.cholesky(ms)
        except np.linalg.LinAlgError as exc:
            raise NotPD("triangular factorization requires a PD matrix") from exc
        return Factor(low, kind)
    raise ValueError(f"unknown factor kind: {kind!r}")


def pinv_psd(m: np.ndarray, rel_cutoff: float = ZERO_EIG_RTOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a PSD matrix.

    Eigenvalues at or below ``rel_cutoff`` times the largest eigenvalue are
    treated as zero and excluded.  ``rel_cutoff=0`` inverts every strictly
    positive eigenvalue (used for scoring against clipped covariances).
    """
    dec = sym_eig(m)
    w = _psd_eigvals(dec)
    top = w[0] if w.size else 0.0
    if top <= 0.0:
        return np.zeros_like(np.asarray(m, dtype=float))
    inv = np.where(w > rel_cutoff * top, np.divide(1.0, w, where=w > 0), 0.0)
    v = dec.eigenvectors
    out = (v * inv) @ v.T
    return 0.5 * (out + out.T)


def projector(basis: np.ndarray) -> Projector:
    """Orthogonal projector onto the span of orthonormal columns."""
    b = np.asarray(basis, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    gram = b.T @ b
    if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-10):
        raise BasisError("columns are not orthonormal within 1e-10")
    p = b @ b.T
    return Projector(0.5 * (p + p.T), b)


def clip_psd(m: np.ndarray, floor: float) -> np.ndarray:
    """Clip eigenvalues from below at ``floor``, keeping eigenvectors."""
    dec = sym_eig(m)
    w = np.maximum(dec.eigenvalues, floor)
    v = dec.eigenvectors
    out = (v * w) @ v.T
    return 0.5 * (out + out.T)
