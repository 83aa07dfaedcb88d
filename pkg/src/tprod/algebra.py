"""The T-product ring: multiplication, identity, inverse, unitarity, forms.

tprod routes through the FFT face path (O(m n s p log p + m n s p));
the dense block-circulant path is O(m n s p^2) and is kept behind the
``method`` flag as a test oracle and benchmark baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Tensor3, bcirc, conj_transpose, fnorm, fold, transpose, unfold
from .errors import DimMismatch, Singular
from .spectral import apply_facewise, default_rank_rtol, face_singular_values


def identity(n, p) -> Tensor3:
    """First frontal slice I_n, all other slices zero."""
    data = np.zeros((p, n, n), dtype=np.complex128)
    data[0] = np.eye(n)
    return Tensor3(data)


def tprod(a: Tensor3, b: Tensor3, method="fft") -> Tensor3:
    """T-product of an (m, n, p) tensor with an (n, s, p) tensor."""
    if a.n != b.m or a.p != b.p:
        raise DimMismatch(f"cannot multiply {a.shape} by {b.shape}")
    if method == "dense":
        return fold(bcirc(a) @ unfold(b), a.m, b.n, a.p)
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    fc = np.fft.fft(a.data, axis=0) @ np.fft.fft(b.data, axis=0)
    out = np.fft.ifft(fc, axis=0)
    if a.exactly_real and b.exactly_real:
        out = out.real
    return Tensor3(out)


def inverse(a: Tensor3, tol_rank=None) -> Tensor3:
    """T-product inverse of an F-square tensor.

    Raises :class:`Singular` (with the worst face index and its smallest
    singular value) when any DFT face is numerically singular.
    """
    if a.m != a.n:
        raise DimMismatch(f"inverse needs an F-square tensor, got {a.shape}")
    sv = face_singular_values(a)
    smax = float(sv.max())
    rtol = default_rank_rtol(a.m, a.n, a.p) if tol_rank is None else float(tol_rank)
    smin_per_face = sv[:, -1]
    worst = int(np.argmin(smin_per_face))
    if smin_per_face[worst] <= rtol * smax:
        raise Singular(
            f"face {worst} is singular (min singular value {smin_per_face[worst]:.3e})",
            face=worst,
            smin=float(smin_per_face[worst]),
        )
    return apply_facewise(a, lambda face, i: np.linalg.inv(face))


def is_unitary(q: Tensor3, tol=1e-10) -> bool:
    """True when q^H * q and q * q^H are both within ``tol`` of identity in fnorm."""
    if q.m != q.n:
        return False
    eye = identity(q.n, q.p)
    qh = conj_transpose(q)
    return (
        fnorm(tprod(qh, q) - eye) <= tol
        and fnorm(tprod(q, qh) - eye) <= tol
    )


@dataclass
class FormKind:
    """A bilinear or sesquilinear form <x, y> = x^T * T * y (or x^H * T * y).

    ``tensor`` must be F-square and invertible; its inverse is computed
    lazily and cached for adjoints.
    """

    kind: str
    tensor: Tensor3
    _inv: Tensor3 = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("bilinear", "sesquilinear"):
            raise ValueError(f"kind must be bilinear or sesquilinear, got {self.kind!r}")
        if self.tensor.m != self.tensor.n:
            raise DimMismatch("form tensor must be F-square")

    def inv(self) -> Tensor3:
        if self._inv is None:
            self._inv = inverse(self.tensor)
        return self._inv


def form_eval(form: FormKind, x: Tensor3, y: Tensor3) -> Tensor3:
    """Evaluate the form on lateral slices x, y (n x 1 x p), giving a 1 x 1 x p tube."""
    t = form.tensor
    if x.shape != (t.n, 1, t.p) or y.shape != (t.n, 1, t.p):
        raise DimMismatch(f"form on {t.shape} needs {(t.n, 1, t.p)} operands")
    left = transpose(x) if form.kind == "bilinear" else conj_transpose(x)
    return tprod(left, tprod(t, y))


def adjoint(a: Tensor3, form: FormKind) -> Tensor3:
    """Adjoint with respect to the form: T^-1 * A^T * T (bilinear) or with A^H."""
    t = form.tensor
    if a.m != a.n or a.m != t.n or a.p != t.p:
        raise DimMismatch(f"adjoint needs {t.n}x{t.n}x{t.p}, got {a.shape}")
    mid = transpose(a) if form.kind == "bilinear" else conj_transpose(a)
    return tprod(form.inv(), tprod(mid, t))
