"""Moore-Penrose inverse, least squares, tensor equations, and contour oracles.

The production paths are spectral (compact T-SVD). The Cauchy-integral
forms are implemented as independent cross-checks: trapezoidal quadrature
on circles, which converges geometrically for analytic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import tprod
from .core import Tensor3, fnorm
from .errors import (
    DimMismatch,
    EigenvalueOnContour,
    EmptyValues,
    NearSingularShift,
    ZeroSingularValue,
    ZeroSingularValueRequiresFZero,
)
from .spectral import TCsvd, _ifft_tensor, isometry, tcsvd

DEFAULT_NODES = 256
_CLUSTER_RTOL = 1e-8


def pinv(a: Tensor3, tol_rank=None) -> Tensor3:
    """Moore-Penrose inverse: Vr * Sr^+ * Ur^H.

    Satisfies the four Penrose identities in the T-product sense.
    """
    c = tcsvd(a, tol_rank)
    if c.r == 0:
        return Tensor3.zeros(a.n, a.m, a.p)
    inv_vals = np.zeros(c.sigma.shape)
    pos = c.sigma > 0.0
    inv_vals[pos] = 1.0 / c.sigma[pos]
    vf = c.vhf.conj().transpose(0, 2, 1)
    ufh = c.uf.conj().transpose(0, 2, 1)
    faces = (vf * inv_vals[:, None, :]) @ ufh
    return _ifft_tensor(faces, c.real_input)


def lstsq(a: Tensor3, b: Tensor3, tol_rank=None) -> Tensor3:
    """Minimum-norm least squares solution of A * X = B."""
    if a.m != b.m or a.p != b.p:
        raise DimMismatch(f"lstsq shapes do not conform: {a.shape} vs {b.shape}")
    return tprod(pinv(a, tol_rank), b)


@dataclass(frozen=True)
class SolveResult:
    x: Tensor3
    residual: float


def solve_axb(a: Tensor3, b: Tensor3, d: Tensor3, tol_rank=None) -> SolveResult:
    """Best-consistent solution of A * X * B = D with its consistency residual.

    X = A^+ * D * B^+; the residual |A*X*B - D| / |D| vanishes exactly when
    D equals its projection P_range(A) * D * P_range(B^H-side).
    """
    if d.m != a.m or d.n != b.n or a.p != b.p or a.p != d.p:
        raise DimMismatch(
            f"solve shapes do not conform: A {a.shape}, B {b.shape}, D {d.shape}"
        )
    x = tprod(pinv(a, tol_rank), tprod(d, pinv(b, tol_rank)))
    dn = fnorm(d)
    residual = 0.0 if dn == 0.0 else fnorm(tprod(a, tprod(x, b)) - d) / dn
    return SolveResult(x=x, residual=residual)


@dataclass
class Resolvent:
    """Evaluator for (z E - A)^+ off the singular-value set."""

    csvd: TCsvd

    @classmethod
    def of(cls, a: Tensor3, tol_rank=None):
        return cls(tcsvd(a, tol_rank))

    @property
    def E(self) -> Tensor3:
        return isometry(self.csvd)

    def scale(self):
        return max(float(self.csvd.sigma.max()) if self.csvd.sigma.size else 0.0, 1.0)


def resolvent_eval(r: Resolvent, z) -> Tensor3:
    """(z E - A)^+ = Vr * (z I - Sr)^-1 * Ur^H (an n x m x p tensor)."""
    c = r.csvd
    if c.r == 0:
        return Tensor3.zeros(c.n, c.m, c.p)
    z = complex(z)
    dist = np.abs(z - c.sigma).min()
    if dist < 1e-8 * r.scale():
        raise NearSingularShift(f"shift {z} is within {dist:.3e} of a singular value")
    vals = 1.0 / (z - c.sigma.astype(np.complex128))
    vf = c.vhf.conj().transpose(0, 2, 1)
    ufh = c.uf.conj().transpose(0, 2, 1)
    faces = (vf * vals[:, None, :]) @ ufh
    return _ifft_tensor(faces, c.real_input and z.imag == 0.0)


def resolvent_identity_residual(r: Resolvent, lam, mu) -> float:
    """Defect of R(lam) - R(mu) = (mu - lam) R(lam) * E * R(mu), relative.

    The product goes through the isometry E; that is the only reading under
    which the two sides conform for rectangular tensors.
    """
    rl = resolvent_eval(r, lam)
    rm = resolvent_eval(r, mu)
    lhs = rl - rm
    rhs = (complex(mu) - complex(lam)) * tprod(rl, tprod(r.E, rm))
    return fnorm(lhs - rhs) / max(fnorm(lhs), 1e-300)


@dataclass(frozen=True)
class Contour:
    """Disjoint circles, each enclosing exactly one cluster of target values."""

    circles: tuple
    nodes_per_circle: int

    def __post_init__(self):
        if self.nodes_per_circle < 16:
            raise ValueError("need at least 16 quadrature nodes per circle")
        for _, rad in self.circles:
            if rad <= 0:
                raise ValueError("circle radii must be positive")
        for i, (ci, ri) in enumerate(self.circles):
            for cj, rj in self.circles[i + 1:]:
                if abs(ci - cj) <= ri + rj:
                    raise ValueError("contour circles must be pairwise disjoint")


def _cluster(values, rtol=_CLUSTER_RTOL):
    vals = np.sort(np.asarray(values, dtype=float))
    scale = vals[-1]
    groups = [[vals[0]]]
    for v in vals[1:]:
        if v - groups[-1][-1] <= rtol * scale:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [float(np.mean(g)) for g in groups]


def contour_for(values, nodes=DEFAULT_NODES) -> Contour:
    """One circle per cluster: radius = min(0.45 * gap to nearest, 0.5 * value)."""
    values = [v for v in np.asarray(values, dtype=float).ravel() if v > 0]
    if not values:
        raise EmptyValues("contour needs at least one positive value")
    centers = _cluster(values)
    circles = []
    for i, c in enumerate(centers):
        gap = min((abs(c - o) for j, o in enumerate(centers) if j != i), default=np.inf)
        rad = min(0.45 * gap, 0.5 * c)
        circles.append((complex(c), float(rad)))
    return Contour(circles=tuple(circles), nodes_per_circle=int(nodes))


def _quad_nodes(contour):
    """Nodes z_k and weights w_k so (1/2 pi i) . oint g dz ~ sum g(z_k) w_k."""
    for center, rad in contour.circles:
        th = 2.0 * np.pi * np.arange(contour.nodes_per_circle) / contour.nodes_per_circle
        z = center + rad * np.exp(1j * th)
        w = (z - center) / contour.nodes_per_circle
        yield from zip(z, w)


def gfun_contour(a: Tensor3, f, nodes=DEFAULT_NODES, contour=None) -> Tensor3:
    """Cauchy-integral route to the generalized function.

    f_gen(A) = E * ((1/2 pi i) oint f(z) (z E - A)^+ dz) * E, quadratured on
    circles around the distinct singular values. Cross-check oracle for
    :func:`tprod.genfun.gfun`; not the production path.
    """
    res = Resolvent.of(a)
    c = res.csvd
    if c.r == 0:
        return Tensor3.zeros(a.m, a.n, a.p)
    if np.any(c.sigma <= 0.0) and f.value_at_zero != 0:
        raise ZeroSingularValueRequiresFZero("zero singular value in window but f(0) != 0")
    if contour is None:
        contour = contour_for(c.sigma[c.sigma > 0.0], nodes)
    acc = Tensor3.zeros(a.n, a.m, a.p)
    for z, w in _quad_nodes(contour):
        acc = acc + (complex(f(np.array([z]))[0]) * w) * resolvent_eval(res, z)
    e = res.E
    return tprod(e, tprod(acc, e))


def cluster_projector_contour(a: Tensor3, target, nodes=DEFAULT_NODES) -> Tensor3:
    """E * ((1/2 pi i) oint (z E - A)^+ dz) * E around one singular-value cluster.

    Equals the sum of that cluster's partial-isometry components.
    """
    res = Resolvent.of(a)
    c = res.csvd
    centers = _cluster(c.sigma[c.sigma > 0.0])
    target = float(target)
    k = int(np.argmin([abs(t - target) for t in centers]))
    full = contour_for(c.sigma[c.sigma > 0.0], nodes)
    circle = full.circles[k]
    sub = Contour(circles=(circle,), nodes_per_circle=nodes)
    acc = Tensor3.zeros(a.n, a.m, a.p)
    for z, w in _quad_nodes(sub):
        acc = acc + w * resolvent_eval(res, z)
    e = res.E
    return tprod(e, tprod(acc, e))


def pinv_contour(a: Tensor3, nodes=DEFAULT_NODES) -> Tensor3:
    """A^+ = (1/2 pi i) oint z^-1 (z E - A)^+ dz; needs all windowed values > 0."""
    res = Resolvent.of(a)
    c = res.csvd
    if c.r == 0:
        return Tensor3.zeros(a.n, a.m, a.p)
    if np.any(c.sigma <= 0.0):
        raise ZeroSingularValue("contour pseudoinverse needs a full rank window")
    contour = contour_for(c.sigma, nodes)
    acc = Tensor3.zeros(a.n, a.m, a.p)
    for z, w in _quad_nodes(contour):
        acc = acc + (w / z) * resolvent_eval(res, z)
    return acc


def solve_axb_contour(a: Tensor3, b: Tensor3, d: Tensor3, nodes=DEFAULT_NODES) -> Tensor3:
    """Double-contour route to A * X * B = D.

    The integrand separates in lambda and mu, so the double circle
    quadrature factors exactly into the two single-contour pseudoinverses.
    """
    return tprod(pinv_contour(a, nodes), tprod(d, pinv_contour(b, nodes)))


def standard_fn_contour(a: Tensor3, f, nodes=DEFAULT_NODES, contour=None, b=None):
    """Standard T-function via f(A) = (1/2 pi i) oint f(z) (z I - A)^-1 dz.

    The contour must enclose every face eigenvalue; with ``b`` given the
    action f(A) * b is integrated instead of f(A).
    """
    if a.m != a.n:
        raise DimMismatch(f"standard function needs an F-square tensor, got {a.shape}")
    faces = np.fft.fft(a.data, axis=0)
    eigs = np.concatenate([np.linalg.eigvals(faces[i]) for i in range(a.p)])
    if contour is None:
        center = complex(eigs.mean())
        spread = float(np.abs(eigs - center).max())
        radius = 1.3 * spread + 0.1 * max(spread, 1.0)
        contour = Contour(circles=((center, radius),), nodes_per_circle=int(nodes))
    scale = max(float(np.abs(eigs).max()), 1.0)
    for center, rad in contour.circles:
        margin = np.abs(np.abs(eigs - center) - rad).min()
        if margin < 1e-8 * scale:
            raise EigenvalueOnContour(f"face eigenvalue within {margin:.3e} of the contour")

    eye = np.eye(a.n, dtype=np.complex128)
    bfaces = np.fft.fft(b.data, axis=0) if b is not None else None
    out = None
    for z, w in _quad_nodes(contour):
        fz = complex(f(np.array([z]))[0]) * w
        for i in range(a.p):
            shard = np.linalg.solve(z * eye - faces[i], bfaces[i] if b is not None else eye)
            if out is None:
                out = np.zeros((a.p,) + shard.shape, dtype=np.complex128)
            out[i] += fz * shard
    return Tensor3(np.fft.ifft(out, axis=0))
