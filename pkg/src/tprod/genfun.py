"""Generalized tensor functions, standard T-functions, and generalized powers.

A generalized function applies a scalar function to the singular values
inside the compact T-SVD, leaving the singular subspaces fixed:
f_gen(A) = Ur * f(Sr) * Vr^H. The standard T-function instead applies a
matrix function to every DFT face of an F-square tensor (equivalently to
bcirc(A)); the two disagree in general even when f(0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .algebra import tprod
from .core import Tensor3, conj_transpose, block, fnorm
from .errors import (
    ConsistencyError,
    DefectiveFace,
    DimMismatch,
    FnDomainError,
    NoConvergence,
    RadiusViolation,
    SeriesDivergence,
    ZeroSingularValueRequiresFZero,
)
from .spectral import apply_facewise, isometry, tcsvd

_SERIES_CAP = 500
_SERIES_RTOL = 1e-12


@dataclass(frozen=True)
class Series:
    """Power series around 0: ``coeff(k)`` is the coefficient of z^k."""

    coeff: Callable[[int], complex]
    radius: float

    @classmethod
    def from_coeffs(cls, coeffs, radius=np.inf):
        arr = np.asarray(coeffs, dtype=np.complex128)
        return cls(coeff=lambda k: complex(arr[k]) if k < arr.size else 0.0, radius=radius)

    def eval(self, z):
        """Partial sums of the series at z (array ok); guards the radius.

        Stops after two consecutive negligible terms, so alternating series
        with zero coefficients in between are not truncated early.
        """
        z = np.asarray(z, dtype=np.complex128)
        if np.any(np.abs(z) >= self.radius):
            raise RadiusViolation(f"|z| up to {np.abs(z).max():.3g} >= radius {self.radius:.3g}")
        acc = np.full(z.shape, complex(self.coeff(0)))
        pw = np.ones_like(z)
        small = 0
        for k in range(1, _SERIES_CAP + 1):
            pw = pw * z
            term = complex(self.coeff(k)) * pw
            acc = acc + term
            tn, an = np.abs(term).max(), max(np.abs(acc).max(), 1e-300)
            small = small + 1 if tn <= _SERIES_RTOL * an else 0
            if small >= 2:
                return acc
        raise SeriesDivergence(f"series did not settle within {_SERIES_CAP} terms")


@dataclass(frozen=True)
class ScalarFn:
    """A scalar function driving every generalized-function path.

    ``fn`` must accept numpy arrays (real or complex). ``value_at_zero`` is
    the declared f(0) used to gate zero singular values inside the rank
    window. ``deriv(z0, k)`` gives the k-th derivative for Taylor mode, and
    ``deriv_radius(z0)`` the local disc of convergence (None means entire).
    ``odd_completed`` marks f as extended to negatives by f(-x) = -f(x).
    """

    fn: Callable
    value_at_zero: complex
    name: str = ""
    series: Optional[Series] = None
    deriv: Optional[Callable[[complex, int], complex]] = None
    deriv_radius: Optional[Callable[[complex], float]] = None
    odd_completed: bool = False

    def __call__(self, x):
        x = np.asarray(x)
        if self.odd_completed and not np.iscomplexobj(x) and np.any(x < 0):
            ax = np.abs(x)
            out = np.asarray(self.fn(ax), dtype=np.complex128)
            return np.sign(x) * out
        return self.fn(x)


def scalar_fn(fn, value_at_zero, name="", series=None, deriv=None, deriv_radius=None,
              odd_completed=False) -> ScalarFn:
    return ScalarFn(fn, value_at_zero, name, series, deriv, deriv_radius, odd_completed)


def polynomial(coeffs) -> ScalarFn:
    """Polynomial sum(c_k z^k) from low-order-first coefficients."""
    arr = np.asarray(coeffs, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise FnDomainError("polynomial needs a nonempty 1-d coefficient list")

    def ev(z):
        z = np.asarray(z, dtype=np.complex128)
        acc = np.zeros_like(z)
        for c in arr[::-1]:
            acc = acc * z + c
        return acc

    def dv(z0, k):
        if k >= arr.size:
            return 0.0
        out = 0.0
        for j in range(k, arr.size):
            out += arr[j] * math.perm(j, k) * z0 ** (j - k)
        return out

    return ScalarFn(ev, complex(arr[0]), name="poly", series=Series.from_coeffs(arr),
                    deriv=dv)


def _cyclic_deriv(funcs):
    # derivative cycle for sin/cos style functions
    def dv(z0, k):
        return funcs[k % len(funcs)](z0)

    return dv


def _ln1p(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.log(1.0 + z)
    return np.log1p(z)


def _ln1p_deriv(z0, k):
    if k == 0:
        return complex(np.log(1.0 + complex(z0)))
    return (-1.0) ** (k - 1) * math.factorial(k - 1) / (1.0 + z0) ** k


def _inv_shift(z):
    return 1.0 / (1.0 + np.asarray(z))


def _inv_shift_deriv(z0, k):
    return (-1.0) ** k * math.factorial(k) / (1.0 + z0) ** (k + 1)


def _alt(parity_num, parity_den):
    # coefficient helper for the trig series
    def c(k):
        if k % 2 != parity_num:
            return 0.0
        j = k // 2
        return (-1.0) ** j / math.factorial(k) if parity_den else 1.0 / math.factorial(k)

    return c


def power_fn(alpha) -> ScalarFn:
    """f(x) = x**alpha on the nonnegative axis (principal branch elsewhere)."""
    alpha = float(alpha)
    if alpha > 0:
        f0 = 0.0
    elif alpha == 0:
        f0 = 1.0
    else:
        f0 = np.inf

    def ev(z):
        z = np.asarray(z)
        if not np.iscomplexobj(z) and (alpha != int(alpha)) and np.any(z < 0):
            z = z.astype(np.complex128)
        return z**alpha

    def dv(z0, k):
        if alpha == int(alpha) and alpha >= 0 and k > alpha:
            return 0.0
        c = 1.0
        for j in range(k):
            c *= alpha - j
        return c * complex(z0) ** (alpha - k)

    series = None
    if alpha == int(alpha) and alpha >= 0:
        coeffs = np.zeros(int(alpha) + 1)
        coeffs[int(alpha)] = 1.0
        series = Series.from_coeffs(coeffs)
    odd = alpha == int(alpha) and int(alpha) % 2 == 1
    return ScalarFn(ev, f0, name=f"power({alpha:g})", series=series, deriv=dv,
                    deriv_radius=(None if series is not None else (lambda z0: abs(z0))),
                    odd_completed=odd)


def _sign_eval(z):
    z = np.asarray(z, dtype=np.complex128)
    az = np.abs(z)
    out = np.zeros_like(z)
    nz = az > 0
    out[nz] = z[nz] / az[nz]
    return out


NAMED_FUNCTIONS = {
    "exp": ScalarFn(np.exp, 1.0, "exp",
                    Series(lambda k: 1.0 / math.factorial(k), np.inf),
                    deriv=lambda z0, k: np.exp(z0)),
    "ln1p": ScalarFn(_ln1p, 0.0, "ln1p",
                     Series(lambda k: 0.0 if k == 0 else (-1.0) ** (k + 1) / k, 1.0),
                     deriv=_ln1p_deriv,
                     deriv_radius=lambda z0: abs(1.0 + z0)),
    "sin": ScalarFn(np.sin, 0.0, "sin", Series(_alt(1, True), np.inf),
                    deriv=_cyclic_deriv([np.sin, np.cos, lambda z: -np.sin(z),
                                         lambda z: -np.cos(z)]),
                    odd_completed=True),
    "cos": ScalarFn(np.cos, 1.0, "cos", Series(_alt(0, True), np.inf),
                    deriv=_cyclic_deriv([np.cos, lambda z: -np.sin(z),
                                         lambda z: -np.cos(z), np.sin])),
    "sinh": ScalarFn(np.sinh, 0.0, "sinh", Series(_alt(1, False), np.inf),
                     deriv=_cyclic_deriv([np.sinh, np.cosh]), odd_completed=True),
    "cosh": ScalarFn(np.cosh, 1.0, "cosh", Series(_alt(0, False), np.inf),
                     deriv=_cyclic_deriv([np.cosh, np.sinh])),
    "sqrt": power_fn(0.5),
    "sign": ScalarFn(_sign_eval, 0.0, "sign", odd_completed=True),
    "inverse_shift": ScalarFn(_inv_shift, 1.0, "inverse_shift",
                              Series(lambda k: (-1.0) ** k, 1.0),
                              deriv=_inv_shift_deriv,
                              deriv_radius=lambda z0: abs(1.0 + z0)),
    "id": power_fn(1),
    "square": power_fn(2),
    "cube": power_fn(3),
}

# Named functions whose generalized form needs every windowed singular
# value strictly positive (their even series parts do not vanish at 0).
POSITIVE_ONLY = frozenset({"exp", "cos", "cosh", "ln1p", "inverse_shift"})


def named_scalar_fn(name) -> ScalarFn:
    if isinstance(name, ScalarFn):
        return name
    key = str(name)
    if key.startswith("power(") and key.endswith(")"):
        return power_fn(float(key[6:-1]))
    try:
        return NAMED_FUNCTIONS[key]
    except KeyError:
        raise FnDomainError(f"unknown scalar function {name!r}") from None


def _window_values(f, c):
    """f on the windowed singular values; zeros gated on f(0) = 0."""
    zero = c.sigma <= 0.0
    if c.r > 0 and zero.any() and f.value_at_zero != 0:
        raise ZeroSingularValueRequiresFZero(
            f"zero singular value inside rank window but f(0) = {f.value_at_zero}"
        )
    vals = np.zeros(c.sigma.shape, dtype=np.complex128)
    if (~zero).any():
        out = np.asarray(f(c.sigma[~zero]), dtype=np.complex128)
        if not np.all(np.isfinite(out)):
            raise FnDomainError(f"{f.name or 'f'} is not finite on some singular value")
        vals[~zero] = out
    return vals


def gfun(a: Tensor3, f: ScalarFn, tol_rank=None) -> Tensor3:
    """Generalized tensor function Ur * f(Sr) * Vr^H via the compact T-SVD."""
    c = tcsvd(a, tol_rank)
    if c.r == 0:
        return Tensor3.zeros(a.m, a.n, a.p)
    vals = _window_values(f, c)
    return c.rebuild_from_values(vals, real_values=bool(np.all(vals.imag == 0.0)))


def _matrix_series(d, f, face_index):
    if f.series is None:
        raise DefectiveFace(f"face {face_index} defective and no series fallback")
    rho = float(np.abs(np.linalg.eigvals(d)).max())
    if rho >= f.series.radius:
        raise SeriesDivergence(
            f"face {face_index}: spectral radius {rho:.3g} >= series radius {f.series.radius:.3g}"
        )
    n = d.shape[0]
    acc = complex(f.series.coeff(0)) * np.eye(n, dtype=np.complex128)
    pw = np.eye(n, dtype=np.complex128)
    small = 0
    for k in range(1, _SERIES_CAP + 1):
        pw = pw @ d
        term = complex(f.series.coeff(k)) * pw
        acc = acc + term
        negligible = np.linalg.norm(term) <= _SERIES_RTOL * max(np.linalg.norm(acc), 1e-300)
        small = small + 1 if negligible else 0
        if small >= 2:
            return acc
    raise SeriesDivergence(f"face {face_index}: series did not settle in {_SERIES_CAP} terms")


def _matrix_function(d, f, face_index, cond_limit, force_series):
    if force_series:
        return _matrix_series(d, f, face_index)
    scale = max(np.linalg.norm(d), 1.0)
    if np.linalg.norm(d - d.conj().T) <= 1e-12 * scale:
        w, v = np.linalg.eigh(d)
        fw = np.asarray(f(w.astype(np.complex128)), dtype=np.complex128)
        return (v * fw) @ v.conj().T
    w, v = np.linalg.eig(d)
    sv = np.linalg.svd(v, compute_uv=False)
    if sv[-1] <= 0 or sv[0] / sv[-1] > cond_limit:
        return _matrix_series(d, f, face_index)
    fw = np.asarray(f(w), dtype=np.complex128)
    if not np.all(np.isfinite(fw)):
        raise FnDomainError(f"{f.name or 'f'} not finite on the spectrum of face {face_index}")
    return (v * fw) @ np.linalg.inv(v)


def _looks_real_analytic(f):
    # real coefficients <=> f maps reals to reals, which lets the facewise
    # driver exploit conjugate symmetry of real input
    try:
        probe = np.asarray(f(np.array([0.37, 1.21])), dtype=np.complex128)
    except Exception:
        return False
    return bool(np.all(np.abs(probe.imag) <= 1e-14 * (1.0 + np.abs(probe))))


def standard_tfn(a: Tensor3, f: ScalarFn, cond_limit=1e8, force_series=False) -> Tensor3:
    """Standard T-function: the matrix function of every DFT face.

    Equals bcirc_inv(f(bcirc(a))). Primary path is a face eigendecomposition
    with a conditioning guard; a declared power series is the fallback.
    """
    if a.m != a.n:
        raise DimMismatch(f"standard T-function needs an F-square tensor, got {a.shape}")
    return apply_facewise(
        a,
        lambda face, i: _matrix_function(face, f, i, cond_limit, force_series),
        conj_equivariant=_looks_real_analytic(f),
    )


def gpower(a: Tensor3, k: int, tol_rank=None) -> Tensor3:
    """Generalized power: X_0 = E and X_j = X_{j-1} * E^H * A.

    Satisfies X_{2j+1} = (A * A^H)^j * A and X_{2j} = (A * A^H)^j * E.
    """
    if k < 0 or k != int(k):
        raise ValueError("generalized power needs a nonnegative integer exponent")
    e = isometry(tcsvd(a, tol_rank))
    eh = conj_transpose(e)
    x = e
    for _ in range(int(k)):
        x = tprod(tprod(x, eh), a)
    return x


def _taylor_coeff(f, z0, k):
    if z0 == 0 and f.series is not None:
        return complex(f.series.coeff(k))
    if f.deriv is None:
        raise FnDomainError(f"{f.name or 'f'} has no derivative access at z0 = {z0}")
    d = complex(f.deriv(z0, k))
    if k < 150:
        return d / math.factorial(k)
    return d * math.exp(-math.lgamma(k + 1))


def gfun_taylor(a: Tensor3, f: ScalarFn, z0=0.0, max_terms=_SERIES_CAP, tol=1e-12,
                tol_rank=None) -> Tensor3:
    """Generalized function by Taylor expansion in generalized powers of (A - z0 E).

    Valid while every windowed singular value stays inside the disc of
    convergence around z0; must agree with :func:`gfun` to about 10 * tol.
    """
    c = tcsvd(a, tol_rank)
    if c.r == 0:
        return Tensor3.zeros(a.m, a.n, a.p)
    zero = c.sigma <= 0.0
    if zero.any() and f.value_at_zero != 0:
        raise ZeroSingularValueRequiresFZero("zero singular value in window but f(0) != 0")

    radius = None
    if z0 == 0 and f.series is not None:
        radius = f.series.radius
    elif f.deriv_radius is not None:
        radius = f.deriv_radius(z0)
    dist = np.abs(c.sigma - z0)
    if radius is not None and np.isfinite(radius) and dist.max() >= radius:
        raise RadiusViolation(
            f"singular value at distance {dist.max():.3g} from z0 exceeds radius {radius:.3g}"
        )

    shifted = c.sigma.astype(np.complex128) - z0
    acc = np.full(c.sigma.shape, _taylor_coeff(f, z0, 0), dtype=np.complex128)
    pw = np.ones_like(shifted)
    prev_ratio = 0.0
    ratio = np.inf
    small = 0
    for k in range(1, max_terms + 1):
        pw = pw * shifted
        term = _taylor_coeff(f, z0, k) * pw
        acc = acc + term
        tn = np.linalg.norm(term)
        an = max(np.linalg.norm(acc), 1e-300)
        prev_ratio, ratio = ratio if k > 1 else 0.0, tn / an
        small = small + 1 if ratio <= tol else 0
        if small >= 2:
            break
    else:
        # a vanishing coefficient can make the very last term tiny while the
        # series still diverges, so judge the last two terms together
        if max(ratio, prev_ratio) > 100 * tol:
            raise NoConvergence(
                f"hit {max_terms} terms with relative term size {max(ratio, prev_ratio):.3g}"
            )
    return c.rebuild_from_values(acc, real_values=bool(np.all(np.abs(acc.imag) <= 1e-13 * (1 + np.abs(acc)))))


def named_gfun(a: Tensor3, name, tol_rank=None) -> Tensor3:
    """Generalized function by name, enforcing the positivity preconditions."""
    f = named_scalar_fn(name)
    if f.name in POSITIVE_ONLY:
        c = tcsvd(a, tol_rank)
        if c.r > 0 and np.any(c.sigma <= 0.0):
            raise ZeroSingularValueRequiresFZero(
                f"{f.name} needs strictly positive singular values in the rank window"
            )
    return gfun(a, f, tol_rank)


def even_odd_split(f: ScalarFn):
    """Split f(z) = sum a_k z^k into g1(w) = sum a_2k w^k, g2(w) = sum a_2k+1 w^k.

    Then f_gen(A) = g1_gen(A * A^H) * E + g2_gen(A * A^H) * A: the even and
    odd halves act through the Gram tensor.
    """
    if f.series is None:
        raise FnDomainError(f"{f.name or 'f'} has no power series to split")
    base = f.series
    r2 = base.radius**2 if np.isfinite(base.radius) else np.inf
    s1 = Series(lambda k: base.coeff(2 * k), r2)
    s2 = Series(lambda k: base.coeff(2 * k + 1), r2)
    g1 = ScalarFn(s1.eval, complex(base.coeff(0)), name=f"{f.name}_even_gram", series=s1)
    g2 = ScalarFn(s2.eval, complex(base.coeff(1)), name=f"{f.name}_odd_gram", series=s2)
    return g1, g2


def odd_part(f: ScalarFn) -> ScalarFn:
    """The odd half of f as a function of the singular value itself."""
    _, g2 = even_odd_split(f)

    def ev(x):
        x = np.asarray(x, dtype=np.complex128)
        return x * g2(x * x)

    return ScalarFn(ev, 0.0, name=f"{f.name}_odd", odd_completed=True)


def gfun_series_split(a: Tensor3, f: ScalarFn, tol_rank=None) -> Tensor3:
    """Second route to the generalized function through the even/odd split.

    Needs a full rank window whenever the even coefficients do not vanish
    (the even half evaluates at 0 otherwise).
    """
    g1, g2 = even_odd_split(f)
    c = tcsvd(a, tol_rank)
    e = isometry(c)
    gram = tprod(a, conj_transpose(a))
    return tprod(gfun(gram, g1, tol_rank), e) + tprod(gfun(gram, g2, tol_rank), a)


def mixed_block_fn(a: Tensor3, f: ScalarFn, rtol=1e-9) -> Tensor3:
    """Standard function of [[0, A], [A^H, 0]], cross-checked blockwise.

    The result must assemble as [[g1(A A^H), f_odd_gen(A)],
    [f_odd_gen(A)^H, g1(A^H A)]] where g1 carries the even series half;
    a :class:`ConsistencyError` reports disagreement between the routes.
    """
    g1, _ = even_odd_split(f)
    fo = odd_part(f)
    ah = conj_transpose(a)
    doubled = block([[0, a], [ah, 0]])
    full = standard_tfn(doubled, f)

    off = gfun(a, fo)
    diag1 = standard_tfn(tprod(a, ah), g1)
    diag2 = standard_tfn(tprod(ah, a), g1)
    assembled = block([[diag1, off], [conj_transpose(off), diag2]])

    scale = max(fnorm(full), 1.0)
    residual = fnorm(full - assembled) / scale
    if residual > rtol:
        raise ConsistencyError(
            f"blockwise assembly disagrees with the doubled tensor: residual {residual:.3e}"
        )
    return full
