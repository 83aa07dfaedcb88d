"""DFT face domain: T-SVD, T-CSVD, tubal rank, projectors, partial isometries.

All spectral work happens on the p "faces" obtained by a forward DFT along
the tube fibers. With the unitary DFT matrix F_p, the block-circulant of a
tensor factors as

    bcirc(A) = (F_p^H kron I_m) . blockdiag(D_1 .. D_p) . (F_p kron I_n),

so the T-product becomes an independent matrix product per face. For a
real tensor the faces come in conjugate pairs D_{p-k} = conj(D_k); every
factorization here processes only faces 0..p//2 and mirrors the rest, so
inverse transforms of the factors are real by construction rather than by
luck.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import Tensor3
from .errors import DimMismatch

_EPS = float(np.finfo(np.float64).eps)


def default_rank_rtol(m, n, p):
    """Relative rank cutoff: max(m, n) * p * machine epsilon."""
    return max(m, n) * p * _EPS


@dataclass(frozen=True)
class FaceStack:
    """The p DFT-domain faces of a tensor: ``faces[k]`` is an m x n matrix."""

    m: int
    n: int
    p: int
    faces: np.ndarray

    def __post_init__(self):
        if self.faces.shape != (self.p, self.m, self.n):
            raise DimMismatch(f"faces shape {self.faces.shape} != {(self.p, self.m, self.n)}")


def from_tensor(a: Tensor3) -> FaceStack:
    """Forward DFT along tubes."""
    return FaceStack(a.m, a.n, a.p, np.fft.fft(a.data, axis=0))


def to_tensor(fs: FaceStack) -> Tensor3:
    """Inverse of :func:`from_tensor`."""
    return Tensor3(np.fft.ifft(fs.faces, axis=0))


def face_singular_values(a: Tensor3) -> np.ndarray:
    """(p, min(m, n)) singular values of every DFT face, descending per face."""
    return np.linalg.svd(np.fft.fft(a.data, axis=0), compute_uv=False)


def _fix_phases(u, vh):
    """Scale singular vectors so each left vector's largest entry is real positive.

    Determinism for golden tests; the product u @ diag(s) @ vh is unchanged.
    """
    ncols = u.shape[1]
    nrows = vh.shape[0]
    for j in range(ncols):
        col = u[:, j]
        k = int(np.argmax(np.abs(col)))
        a = col[k]
        if np.abs(a) > 0.0:
            ph = a / np.abs(a)
            u[:, j] = col * np.conj(ph)
            if j < nrows:
                vh[j, :] = vh[j, :] * ph
    for j in range(u.shape[1], nrows):
        row = vh[j, :]
        k = int(np.argmax(np.abs(row)))
        a = row[k]
        if np.abs(a) > 0.0:
            vh[j, :] = row * (np.abs(a) / a)
    return u, vh


def _face_svd(a: Tensor3, full_matrices):
    """Per-face SVDs with deterministic phases and conjugate mirroring.

    Returns (uf, s, vhf, real_input) where uf is (p, m, mu), s is (p, k),
    vhf is (p, nv, n) with mu/nv = m/n when full, else k = min(m, n).
    """
    m, n, p = a.m, a.n, a.p
    k = min(m, n)
    mu = m if full_matrices else k
    nv = n if full_matrices else k
    faces = np.fft.fft(a.data, axis=0)
    real_input = a.exactly_real

    uf = np.empty((p, m, mu), dtype=np.complex128)
    s = np.empty((p, k), dtype=np.float64)
    vhf = np.empty((p, nv, n), dtype=np.complex128)

    last = p // 2 if real_input else p - 1
    for i in range(last + 1):
        face = faces[i]
        self_conj = real_input and (i == 0 or (p % 2 == 0 and i == p // 2))
        if self_conj:
            u_i, s_i, vh_i = np.linalg.svd(face.real, full_matrices=full_matrices)
            u_i = u_i.astype(np.complex128)
            vh_i = vh_i.astype(np.complex128)
        else:
            u_i, s_i, vh_i = np.linalg.svd(face, full_matrices=full_matrices)
        u_i, vh_i = _fix_phases(u_i, vh_i)
        uf[i], s[i], vhf[i] = u_i, s_i, vh_i
        if real_input and 0 < i < p - i:
            uf[p - i] = u_i.conj()
            s[p - i] = s_i
            vhf[p - i] = vh_i.conj()
    return uf, s, vhf, real_input


def _ifft_tensor(face_array, real_output):
    data = np.fft.ifft(face_array, axis=0)
    return Tensor3(data.real) if real_output else Tensor3(data)


def _embed_diag(s, m, n):
    """(p, k) values -> (p, m, n) stack of rectangular diagonal matrices."""
    p, k = s.shape
    out = np.zeros((p, m, n), dtype=np.complex128)
    idx = np.arange(k)
    out[:, idx, idx] = s
    return out


@dataclass(frozen=True)
class TSvd:
    """Full factorization A = U * S * V^H with unitary U, V and F-diagonal S."""

    U: Tensor3
    S: Tensor3
    V: Tensor3


def tsvd(a: Tensor3) -> TSvd:
    uf, s, vhf, real_input = _face_svd(a, full_matrices=True)
    u = _ifft_tensor(uf, real_input)
    sd = _ifft_tensor(_embed_diag(s, a.m, a.n), real_input)
    v = _ifft_tensor(vhf.conj().transpose(0, 2, 1), real_input)
    return TSvd(u, sd, v)


@dataclass
class TCsvd:
    """Compact factorization A = Ur * Sr * Vr^H truncated at the tubal rank.

    ``sigma[i, j]`` is the j-th singular value of face i, zeroed below the
    rank cutoff; positions j >= face_ranks[i] are genuine zeros kept inside
    the window because r = max over faces.
    """

    m: int
    n: int
    p: int
    r: int
    face_ranks: tuple
    sigma: np.ndarray
    uf: np.ndarray
    vhf: np.ndarray
    real_input: bool
    rank_cutoff: float

    @cached_property
    def Ur(self) -> Tensor3:
        if self.r == 0:
            return Tensor3(np.zeros((self.p, self.m, 1)))
        return _ifft_tensor(self.uf, self.real_input)

    @cached_property
    def Sr(self) -> Tensor3:
        if self.r == 0:
            return Tensor3.zeros(1, 1, self.p)
        return _ifft_tensor(_embed_diag(self.sigma, self.r, self.r), self.real_input)

    @cached_property
    def Vr(self) -> Tensor3:
        if self.r == 0:
            return Tensor3(np.zeros((self.p, self.n, 1)))
        return _ifft_tensor(self.vhf.conj().transpose(0, 2, 1), self.real_input)

    def rebuild_from_values(self, vals, real_values=True) -> Tensor3:
        """U_r * diagface(vals) * V_r^H for a (p, r) array of diagonal values."""
        if self.r == 0:
            return Tensor3.zeros(self.m, self.n, self.p)
        faces = (self.uf * np.asarray(vals, dtype=np.complex128)[:, None, :]) @ self.vhf
        return _ifft_tensor(faces, self.real_input and real_values)


def tcsvd(a: Tensor3, tol_rank=None) -> TCsvd:
    """Compact T-SVD; ``tol_rank`` is relative to the largest face singular value."""
    uf, s, vhf, real_input = _face_svd(a, full_matrices=False)
    m, n, p = a.m, a.n, a.p
    rtol = default_rank_rtol(m, n, p) if tol_rank is None else float(tol_rank)
    smax = float(s.max()) if s.size else 0.0
    cutoff = rtol * smax
    ranks = tuple(int(c) for c in (s > cutoff).sum(axis=1))
    r = max(ranks) if ranks else 0
    sigma = s[:, :r].copy()
    sigma[sigma <= cutoff] = 0.0
    return TCsvd(
        m=m,
        n=n,
        p=p,
        r=r,
        face_ranks=ranks,
        sigma=sigma,
        uf=uf[:, :, :r],
        vhf=vhf[:, :r, :],
        real_input=real_input,
        rank_cutoff=cutoff,
    )


def t_eigenvalues(a: Tensor3, tol_rank=None) -> np.ndarray:
    """Squared positive singular values over all faces, descending.

    Equals the positive spectrum of bcirc(A * A^H).
    """
    c = tcsvd(a, tol_rank)
    vals = c.sigma[c.sigma > 0.0]
    return np.sort(vals**2)[::-1]


def projectors(c: TCsvd):
    """Range projectors (Q_left, Q_right) = (A * Apinv, Apinv * A).

    Window positions whose singular value is zero (faces of lower rank than
    the tubal rank) are excluded; only then do the frames reproduce the
    pseudoinverse projectors.
    """
    if c.r == 0:
        return Tensor3.zeros(c.m, c.m, c.p), Tensor3.zeros(c.n, c.n, c.p)
    mask = (c.sigma > 0.0).astype(np.float64)
    uf_pos = c.uf * mask[:, None, :]
    q_left = _ifft_tensor(uf_pos @ c.uf.conj().transpose(0, 2, 1), c.real_input)
    vf = c.vhf.conj().transpose(0, 2, 1)
    vf_pos = vf * mask[:, None, :]
    q_right = _ifft_tensor(vf_pos @ vf.conj().transpose(0, 2, 1), c.real_input)
    return q_left, q_right


@dataclass(frozen=True)
class PartialIsometrySet:
    """Rank-one spectral pieces of a tensor.

    ``E`` is the sum isometry Ur * Vr^H. ``components[i][j]`` is the tensor
    whose only nonzero DFT face is u_j v_j^H on face i, so
    A = sum_{i,j} values[i, j] * components[i][j].
    """

    E: Tensor3
    components: list
    values: np.ndarray


def isometry(c: TCsvd) -> Tensor3:
    """The partial isometry E = Ur * Vr^H (real whenever the input was)."""
    if c.r == 0:
        return Tensor3.zeros(c.m, c.n, c.p)
    return _ifft_tensor(c.uf @ c.vhf, c.real_input)


def partial_isometries(c: TCsvd) -> PartialIsometrySet:
    comps = []
    for i in range(c.p):
        row = []
        for j in range(c.r):
            faces = np.zeros((c.p, c.m, c.n), dtype=np.complex128)
            faces[i] = np.outer(c.uf[i, :, j], c.vhf[i, j, :])
            row.append(Tensor3(np.fft.ifft(faces, axis=0)))
        comps.append(row)
    return PartialIsometrySet(E=isometry(c), components=comps, values=c.sigma.copy())


def apply_facewise(a: Tensor3, fn, conj_equivariant=True) -> Tensor3:
    """Transform, apply ``fn(face, index)`` per face, transform back.

    When the input is real and ``fn`` commutes with complex conjugation,
    only faces 0..p//2 are evaluated and the rest mirrored, which makes the
    result exactly real.
    """
    faces = np.fft.fft(a.data, axis=0)
    p = a.p
    mirror = a.exactly_real and conj_equivariant
    out = None
    last = p // 2 if mirror else p - 1
    for i in range(last + 1):
        face = faces[i]
        if mirror and (i == 0 or (p % 2 == 0 and i == p // 2)):
            face = face.real.astype(np.complex128)
        res = np.asarray(fn(face, i), dtype=np.complex128)
        if out is None:
            out = np.empty((p,) + res.shape, dtype=np.complex128)
        out[i] = res
        if mirror and 0 < i < p - i:
            out[p - i] = res.conj()
    return _ifft_tensor(out, mirror)
