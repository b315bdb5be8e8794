"""Dense complex linear algebra for the tiny matrices of the junction solver.

Matrices are plain ``complex128`` numpy arrays. Every function accepts a
single ``(n, n)`` matrix or a stack ``(..., n, n)`` so that a whole energy
grid can be processed in one call. Sizes never exceed 4, so inversion is
done with explicit cofactor formulas (n <= 2) or Gauss-Jordan elimination
with partial pivoting (n = 3, 4) instead of general LU machinery.
"""

import numpy as np

from .errors import DimensionError, SingularMatrixError

#: Relative determinant threshold below which a matrix counts as singular.
SINGULAR_RTOL = 1e-14

MAX_SIZE = 4


def as_matrix(m):
    """Coerce ``m`` to a finite ``complex128`` array with at least 2 dims."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim < 2 or arr.shape[-1] < 1 or arr.shape[-2] < 1:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def identity(n):
    return np.eye(n, dtype=np.complex128)


def multiply(a, b):
    """Matrix product ``a @ b`` with a shape check.

    Raises:
        DimensionError: if ``a.cols != b.rows``.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(m):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def unitarity_error(m):
    """Largest entry magnitude of ``m^dagger m - I``.

    For a stack of matrices the maximum over the whole stack is returned.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionError(f"unitarity_error needs a square matrix, got {m.shape}")
    dev = adjoint(m) @ m - identity(m.shape[-1])
    return float(np.max(np.abs(dev)))


def _det_scale(m):
    # max row 2-norm raised to n: the determinant scale of a matrix with such rows
    n = m.shape[-1]
    row_norm = np.max(np.linalg.norm(m, axis=-1), axis=-1)
    return row_norm**n


def _small_inverse(m):
    n = m.shape[-1]
    if n == 1:
        det = m[..., 0, 0]
        safe = np.where(det == 0, 1.0, det)
        return (1.0 / safe)[..., None, None], det
    a, b = m[..., 0, 0], m[..., 0, 1]
    c, d = m[..., 1, 0], m[..., 1, 1]
    det = a * d - b * c
    safe = np.where(det == 0, 1.0, det)
    inv = np.empty_like(m)
    inv[..., 0, 0] = d / safe
    inv[..., 0, 1] = -b / safe
    inv[..., 1, 0] = -c / safe
    inv[..., 1, 1] = a / safe
    return inv, det


def _gauss_jordan(m):
    n = m.shape[-1]
    batch = m.shape[:-2]
    a = m.reshape(-1, n, n).copy()
    inv = np.broadcast_to(identity(n), a.shape).copy()
    det = np.ones(a.shape[0], dtype=np.complex128)
    rows = np.arange(a.shape[0])
    for col in range(n):
        piv = col + np.argmax(np.abs(a[:, col:, col]), axis=1)
        swap = piv != col
        if np.any(swap):
            for arr in (a, inv):
                top = arr[rows, col].copy()
                arr[rows, col] = arr[rows, piv]
                arr[rows, piv] = top
            det = np.where(swap, -det, det)
        p = a[:, col, col].copy()
        det = det * p
        p = np.where(p == 0, 1.0, p)
        a[:, col] /= p[:, None]
        inv[:, col] /= p[:, None]
        for r in range(n):
            if r == col:
                continue
            f = a[:, r, col].copy()
            a[:, r] -= f[:, None] * a[:, col]
            inv[:, r] -= f[:, None] * inv[:, col]
    return inv.reshape(m.shape), det.reshape(batch)


def determinant_and_inverse(m):
    """Return ``(inverse, det)`` without a singularity check."""
    m = as_matrix(m)
    n = m.shape[-1]
    if m.shape[-2] != n:
        raise DimensionError(f"inverse needs a square matrix, got {m.shape}")
    if n > MAX_SIZE:
        raise DimensionError(f"matrices larger than {MAX_SIZE}x{MAX_SIZE} are not supported")
    if n <= 2:
        return _small_inverse(m)
    return _gauss_jordan(m)


def inverse(m):
    """Inverse of a square matrix (or stack of matrices) of size <= 4.

    Raises:
        SingularMatrixError: if ``|det| < 1e-14 * (max row norm)**n`` for any
            matrix in the stack. The error carries the smallest determinant
            magnitude seen and the stack indices that failed.
    """
    m = as_matrix(m)
    inv, det = determinant_and_inverse(m)
    scale = _det_scale(m)
    bad = ~(np.abs(det) > SINGULAR_RTOL * scale)
    if np.any(bad):
        mag = float(np.min(np.abs(det)))
        idx = np.argwhere(np.atleast_1d(bad)).ravel()
        raise SingularMatrixError(f"matrix is singular (|det| = {mag:.3e})", mag, idx)
    return inv
