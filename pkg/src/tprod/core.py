"""Dense third-order tensor values and the block-circulant unfolding operators.

A tensor is a stack of p frontal slices, each an m x n complex matrix.
Storage is slice-major: the slice index varies slowest, then rows, then
columns, so ``unfold`` is a plain reshape. All values are immutable and
every operation here is pure.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NotBlockCirculant

# Relative residual against the block-circulant projection above which
# bcirc_inv refuses the input. Downstream identities assume exact
# structure, so silently accepting structure-breaking input would be a bug.
BCIRC_STRUCTURE_RTOL = 1e-10


class Tensor3:
    """Dense m x n x p complex tensor.

    ``data`` has shape (p, m, n): ``data[k]`` is the k-th frontal slice.
    A real tensor is a complex tensor whose imaginary parts vanish; use
    :meth:`is_real` for a tolerance test or :attr:`exactly_real` for the
    bitwise one.
    """

    __slots__ = ("data",)

    def __init__(self, slices):
        arr = np.array(slices, dtype=np.complex128, order="C")
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3 or arr.size == 0:
            raise DimMismatch(f"expected a nonempty (p, m, n) array, got shape {arr.shape}")
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def zeros(cls, m, n, p):
        return cls(np.zeros((p, m, n), dtype=np.complex128))

    @classmethod
    def from_flat(cls, flat, m, n, p):
        """Build from m*n*p scalars in slice-major order."""
        flat = np.asarray(flat, dtype=np.complex128)
        if flat.size != m * n * p:
            raise DimMismatch(f"need {m * n * p} entries, got {flat.size}")
        return cls(flat.reshape(p, m, n))

    @property
    def m(self):
        return self.data.shape[1]

    @property
    def n(self):
        return self.data.shape[2]

    @property
    def p(self):
        return self.data.shape[0]

    @property
    def shape(self):
        """Logical shape (m, n, p)."""
        return (self.m, self.n, self.p)

    @property
    def exactly_real(self):
        return bool(np.all(self.data.imag == 0.0))

    def is_real(self, tol=1e-12):
        """True when every imaginary part is <= tol * (1 + |entry|)."""
        return bool(np.all(np.abs(self.data.imag) <= tol * (1.0 + np.abs(self.data))))

    def real_part(self):
        return Tensor3(self.data.real)

    def conj(self):
        return Tensor3(self.data.conj())

    def slice(self, k):
        """k-th frontal slice (0-indexed) as an (m, n) array copy."""
        return np.array(self.data[k])

    def __add__(self, other):
        _check_same_shape(self, other)
        return Tensor3(self.data + other.data)

    def __sub__(self, other):
        _check_same_shape(self, other)
        return Tensor3(self.data - other.data)

    def __neg__(self):
        return Tensor3(-self.data)

    def __mul__(self, scalar):
        return Tensor3(self.data * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        from .algebra import tprod

        return tprod(self, other)

    def __repr__(self):
        return f"Tensor3(m={self.m}, n={self.n}, p={self.p})"


def _check_same_shape(a, b):
    if not isinstance(b, Tensor3):
        raise DimMismatch(f"expected Tensor3, got {type(b).__name__}")
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def unfold(a: Tensor3) -> np.ndarray:
    """Stack the frontal slices vertically into an (m*p, n) matrix."""
    return a.data.reshape(a.p * a.m, a.n).copy()


def fold(mat, m, n, p) -> Tensor3:
    """Inverse of :func:`unfold`."""
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (m * p, n):
        raise DimMismatch(f"expected shape {(m * p, n)}, got {mat.shape}")
    return Tensor3(mat.reshape(p, m, n))


def bcirc(a: Tensor3) -> np.ndarray:
    """Block-circulant (m*p, n*p) matrix whose first block column is unfold(a)."""
    p = a.p
    idx = (np.arange(p)[:, None] - np.arange(p)[None, :]) % p
    blocks = a.data[idx]  # (p, p, m, n), block (i, j) = slice (i - j) mod p
    return blocks.transpose(0, 2, 1, 3).reshape(p * a.m, p * a.n).copy()


def bcirc_inv(mat, m, n, p, rtol=BCIRC_STRUCTURE_RTOL) -> Tensor3:
    """Recover the tensor whose bcirc is ``mat``.

    The result reproduces the first block column of ``mat`` exactly; the
    whole matrix must agree with its block-circulant projection (mean over
    circulant block diagonals) to relative residual ``rtol``, else
    :class:`NotBlockCirculant` is raised.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.shape != (m * p, n * p):
        raise DimMismatch(f"expected shape {(m * p, n * p)}, got {mat.shape}")
    blocks = mat.reshape(p, m, p, n).swapaxes(1, 2)  # (p, p, m, n)
    rows = np.arange(p)
    proj = np.stack([blocks[rows, (rows - d) % p].mean(axis=0) for d in range(p)])
    scale = np.linalg.norm(mat)
    if scale > 0.0:
        residual = np.linalg.norm(mat - bcirc(Tensor3(proj))) / scale
        if residual > rtol:
            raise NotBlockCirculant(
                f"circulant-consistency residual {residual:.3e} exceeds {rtol:.1e}"
            )
    return Tensor3(blocks[:, 0])


def _reversed_tail(data):
    # slice order (1, p, p-1, ..., 2) in 1-indexed terms
    return np.concatenate([data[:1], data[:0:-1]])


def transpose(a: Tensor3) -> Tensor3:
    """Transpose each slice and reverse the order of slices 2..p."""
    return Tensor3(_reversed_tail(a.data).transpose(0, 2, 1))


def conj_transpose(a: Tensor3) -> Tensor3:
    """Conjugate-transpose each slice and reverse the order of slices 2..p."""
    return Tensor3(_reversed_tail(a.data).conj().transpose(0, 2, 1))


def block(rows) -> Tensor3:
    """Compose a block tensor from a 2D grid of tensors.

    ``rows`` is a list of lists; entries are Tensor3 values or the scalar 0
    standing for a zero block whose dimensions are inferred from its row
    and column neighbours. Slice k of the result is the block matrix of the
    quadrants' k-th slices.
    """
    if not rows or not all(isinstance(r, (list, tuple)) and len(r) == len(rows[0]) for r in rows):
        raise DimMismatch("block spec must be a rectangular list of lists")
    nr, nc = len(rows), len(rows[0])

    p = None
    row_m = [None] * nr
    col_n = [None] * nc
    for i in range(nr):
        for j in range(nc):
            e = rows[i][j]
            if isinstance(e, Tensor3):
                if p is None:
                    p = e.p
                elif e.p != p:
                    raise DimMismatch("all blocks must share the tube length p")
                if row_m[i] is None:
                    row_m[i] = e.m
                elif row_m[i] != e.m:
                    raise DimMismatch(f"inconsistent row heights in block row {i}")
                if col_n[j] is None:
                    col_n[j] = e.n
                elif col_n[j] != e.n:
                    raise DimMismatch(f"inconsistent column widths in block column {j}")
    if p is None or any(v is None for v in row_m) or any(v is None for v in col_n):
        raise DimMismatch("zero blocks leave some block dimensions undetermined")

    slices = []
    for k in range(p):
        grid = [
            [
                rows[i][j].data[k]
                if isinstance(rows[i][j], Tensor3)
                else np.zeros((row_m[i], col_n[j]), dtype=np.complex128)
                for j in range(nc)
            ]
            for i in range(nr)
        ]
        slices.append(np.block(grid))
    return Tensor3(np.stack(slices))


def fnorm(a: Tensor3) -> float:
    """Frobenius norm of bcirc(a), i.e. sqrt(p) times the entrywise norm."""
    return float(np.sqrt(a.p) * np.linalg.norm(a.data))


def specnorm(a: Tensor3) -> float:
    """Largest tubal singular value (spectral norm of bcirc(a))."""
    from .spectral import face_singular_values

    sv = face_singular_values(a)
    return float(sv.max()) if sv.size else 0.0
