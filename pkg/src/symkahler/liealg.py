"""Numerical core for compact matrix Lie algebras.

Provides the bracket/structure-constant machinery, Ad-invariant inner
products, analytic functions of ad_w evaluated spectrally, the orthogonal
splitting g = m ⊕ k of a symmetric pair, the operator pair (B_w^m, B_w^k)
solving

    Id = (sin ad_w / ad_w) ∘ B_w^m + (cos ad_w) ∘ B_w^k      on g,

and the complex fields Y^xi(e, w) built from it.  Elements of the algebra
are coefficient vectors with respect to the stored basis; operators are
N×N real matrices acting on coefficients.

Everything here is immutable after construction and all operations are
pure functions, so instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InputError, NumericalError, SingularParameterError

__all__ = [
    "MatrixLieAlgebra",
    "SymmetricPair",
    "AdOperator",
    "BOperators",
    "YFieldValue",
    "SPECTRAL_TAGS",
    "analytic_of_ad",
    "b_operators",
    "y_field",
    "general_y_field",
    "gram_schmidt",
]

_JACOBI_TOL = 1e-12
_PIVOT_TOL = 1e-10

# Guard radii for spectral functions requiring an implicit injectivity
# domain: 1/cos-type operators reject |eigenvalue| >= pi/2 - 1e-6,
# 1/sin-type operators reject |eigenvalue| >= pi - 1e-6.
_GUARD_EPS = 1e-6
_GUARD_COS = math.pi / 2
_GUARD_SIN = math.pi


def _stable_sinhc(t: np.ndarray) -> np.ndarray:
    """sinh(t)/t with the removable singularity at t=0 evaluated exactly."""
    out = np.ones_like(t)
    nz = t != 0
    out[nz] = np.sinh(t[nz]) / t[nz]
    return out


def _stable_t_over_sinh(t: np.ndarray) -> np.ndarray:
    return 1.0 / _stable_sinhc(t)


def _stable_coshm1_over(t: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """(cosh t - 1)/denom via 2 sinh^2(t/2), exact for small t."""
    out = np.zeros_like(t)
    nz = denom != 0
    out[nz] = 2.0 * np.sinh(t[nz] / 2.0) ** 2 / denom[nz]
    return out


def _stable_dexp(t: np.ndarray) -> np.ndarray:
    """(1 - e^{-s})/s at s = -i*t, with value 1 at t = 0."""
    out = np.ones_like(t, dtype=complex)
    nz = t != 0
    out[nz] = (1.0 - np.exp(1j * t[nz])) / (-1j * t[nz])
    return out


@dataclass(frozen=True)
class _SpectralTag:
    """A scalar entire (or guarded meromorphic) function of ad_w.

    ``on_imag`` evaluates f(-i*theta) for real theta: ad_w is skew with
    respect to the invariant form, so its spectrum is i*R and the whole
    evaluation reduces to these values.  ``guard`` is the spectral-radius
    guard (None = entire, no restriction).
    """

    name: str
    on_imag: Callable[[np.ndarray], np.ndarray]
    guard: float | None = None


def _tag(name, fn, guard=None):
    return name, _SpectralTag(name, fn, guard)


SPECTRAL_TAGS: dict[str, _SpectralTag] = dict(
    [
        _tag("one", lambda t: np.ones_like(t) + 0j),
        _tag("cos", lambda t: np.cosh(t) + 0j),
        _tag("sin", lambda t: -1j * np.sinh(t)),
        _tag("sinc", lambda t: _stable_sinhc(t) + 0j),
        _tag("sec", lambda t: 1.0 / np.cosh(t) + 0j, guard=_GUARD_COS),
        _tag("t_over_sin", lambda t: _stable_t_over_sinh(t) + 0j, guard=_GUARD_SIN),
        _tag(
            "t_cos_over_sin",
            lambda t: _stable_t_over_sinh(t) * np.cosh(t) + 0j,
            guard=_GUARD_SIN,
        ),
        _tag(
            "cos_minus_one_over_sin",
            # (cosh-1)/sinh = tanh(t/2); f(-i t) picks up a factor i.
            lambda t: 1j * np.tanh(t / 2.0),
            guard=_GUARD_SIN,
        ),
        _tag(
            "one_minus_cos_over_t",
            lambda t: -1j * _stable_coshm1_over(t, t),
            guard=None,
        ),
        _tag(
            "cos_minus_one_over_t_cos",
            lambda t: 1j * _stable_coshm1_over(t, t * np.cosh(t)),
            guard=_GUARD_COS,
        ),
        # Left-trivialised differential of exp: (1 - e^{-t})/t.
        _tag("dexp", lambda t: _stable_dexp(t), guard=None),
    ]
)


def gram_schmidt(vectors: np.ndarray, gram: np.ndarray, tol: float = _PIVOT_TOL) -> np.ndarray:
    """Orthonormalise the rows of ``vectors`` w.r.t. the form given by ``gram``.

    Rows with remaining norm below ``tol`` (relative to the largest input
    norm) are dropped, so the result is a basis of the span.
    """
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    out: list[np.ndarray] = []
    norms = [math.sqrt(max(v @ gram @ v, 0.0)) for v in vecs]
    scale = max(norms, default=0.0)
    if scale == 0.0:
        return np.zeros((0, vecs.shape[1]))
    for v in vecs:
        w = v.copy()
        for _ in range(2):  # re-orthogonalise once for stability
            for u in out:
                w = w - (u @ gram @ w) * u
        n = math.sqrt(max(w @ gram @ w, 0.0))
        if n > tol * scale:
            out.append(w / n)
    return np.array(out)


class MatrixLieAlgebra:
    """A compact matrix Lie algebra with bracket table and invariant form.

    Parameters
    ----------
    basis:
        Sequence of square real matrices spanning the algebra.
    inner_product:
        Optional Gram matrix of an Ad-invariant positive form on the
        given basis.  Default is the trace form <A,B> = -scale/2 tr(AB).
    orthonormalize:
        Re-express the basis as an orthonormal one for the form (pivot
        tolerance 1e-10).  All built-in spaces use this, which makes the
        stored ``inner_product`` the identity.
    scale:
        Global positive factor on the default trace form.
    """

    def __init__(
        self,
        basis: Sequence[np.ndarray],
        inner_product: np.ndarray | None = None,
        *,
        orthonormalize: bool = True,
        scale: float = 1.0,
        validate: bool = True,
        name: str = "",
    ):
        mats = [np.asarray(b, dtype=float) for b in basis]
        if not mats:
            raise InputError("empty basis")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise InputError("basis matrices must be square and of equal size")
        if scale <= 0:
            raise InputError("scale must be positive")
        self.name = name
        self._scale = float(scale)

        if inner_product is None:
            gram = np.array(
                [[-0.5 * scale * np.trace(a @ b) for b in mats] for a in mats]
            )
        else:
            gram = np.asarray(inner_product, dtype=float)

        if orthonormalize:
            coeffs = gram_schmidt(np.eye(len(mats)), gram)
            if coeffs.shape[0] != len(mats):
                raise InputError("basis is linearly dependent under the form")
            mats = [sum(c * m for c, m in zip(row, mats)) for row in coeffs]
            gram = np.eye(len(mats))

        self.basis: list[np.ndarray] = mats
        self.dim: int = len(mats)
        self.inner_product: np.ndarray = gram
        self._chol = np.linalg.cholesky(gram)

        # Dual frame for coefficient extraction: coeffs(M) solves
        # gram @ v = [<M, e_k>]_k.
        self._gram_inv = np.linalg.inv(gram)

        self.structure_constants = self._structure_constants()
        if validate:
            self.validate()
        for arr in (self.inner_product, self.structure_constants):
            arr.flags.writeable = False

    # -- basic maps -------------------------------------------------------

    def form_on_matrices(self, a: np.ndarray, b: np.ndarray) -> float:
        return -0.5 * self._scale * float(np.trace(a @ b))

    def matrix(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        return sum(c * m for c, m in zip(v, self.basis))

    def coeffs(self, mat: np.ndarray) -> np.ndarray:
        t = np.array([self.form_on_matrices(mat, e) for e in self.basis])
        return self._gram_inv @ t

    def inner(self, a: np.ndarray, b: np.ndarray):
        """Invariant form on coefficient vectors (complex-bilinear extension)."""
        return np.asarray(a) @ self.inner_product @ np.asarray(b)

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(float(np.real(self.inner(a, np.conj(a)))), 0.0))

    def bracket(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != (self.dim,) or b.shape != (self.dim,):
            raise InputError(
                f"bracket expects coefficient vectors of length {self.dim}"
            )
        return np.einsum("kij,i,j->k", self.structure_constants, a, b)

    def ad(self, v: np.ndarray) -> np.ndarray:
        """Matrix of ad_v on coefficients: ad(v)[k, j] = sum_i v_i c^k_{ij}."""
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise InputError(f"ad expects a coefficient vector of length {self.dim}")
        return np.einsum("kij,i->kj", self.structure_constants, v)

    def _structure_constants(self) -> np.ndarray:
        n = self.dim
        c = np.zeros((n, n, n))
        for i in range(n):
            for j in range(i + 1, n):
                comm = self.basis[i] @ self.basis[j] - self.basis[j] @ self.basis[i]
                v = self.coeffs(comm)
                c[:, i, j] = v
                c[:, j, i] = -v
        return c

    # -- invariants -------------------------------------------------------

    def validate(self) -> None:
        c = self.structure_constants
        g = self.inner_product
        anti = np.max(np.abs(c + np.swapaxes(c, 1, 2)))
        if anti > _JACOBI_TOL:
            raise NumericalError(f"bracket antisymmetry residual {anti:.3e}")
        # Jacobi: sum_cyc [e_i,[e_j,e_l]] = 0 on coefficients.
        jac = (
            np.einsum("kim,mjl->kijl", c, c)
            + np.einsum("kjm,mli->kijl", c, c)
            + np.einsum("klm,mij->kijl", c, c)
        )
        jmax = np.max(np.abs(jac))
        if jmax > _JACOBI_TOL * max(1.0, np.max(np.abs(c)) ** 2):
            raise NumericalError(f"Jacobi identity residual {jmax:.3e}")
        # Ad-invariance: <[a,b],c> + <b,[a,c]> = 0 for basis triples.
        inv = np.einsum("kib,kc->ibc", c, g) + np.einsum("kic,bk->ibc", c, g)
        imax = np.max(np.abs(inv))
        if imax > _JACOBI_TOL * max(1.0, np.max(np.abs(g)), np.max(np.abs(c))):
            raise NumericalError(f"form invariance residual {imax:.3e}")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise NumericalError("inner product is not positive-definite")

    def __repr__(self):
        return f"MatrixLieAlgebra({self.name or 'unnamed'}, dim={self.dim})"


class AdOperator:
    """ad_w together with its spectral decomposition.

    ad_w is skew-symmetric for the invariant form, hence normal after the
    change to orthonormal coordinates; analytic functions of it are
    evaluated by complexified eigendecomposition, with removable
    singularities taken by their limits.
    """

    def __init__(self, algebra: MatrixLieAlgebra, w: np.ndarray):
        self.algebra = algebra
        self.w = np.asarray(w, dtype=float)
        self.matrix = algebra.ad(self.w)
        L = algebra._chol
        self._L = L
        tilde = L.T @ self.matrix @ np.linalg.inv(L).T
        herm = 1j * tilde
        theta, V = np.linalg.eigh(herm)
        self._theta = theta  # ad_w eigenvalues are -i*theta (purely imaginary)
        self._V = V

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ad_w (purely imaginary)."""
        return -1j * self._theta

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self._theta))) if self._theta.size else 0.0

    def apply(self, tag: str) -> np.ndarray:
        """Evaluate f(ad_w) for a registered spectral function tag."""
        try:
            spec = SPECTRAL_TAGS[tag]
        except KeyError:
            raise InputError(f"unknown spectral function tag {tag!r}") from None
        if spec.guard is not None:
            bad = np.abs(self._theta) >= spec.guard - _GUARD_EPS
            if np.any(bad):
                theta = self._theta[bad][0]
                raise SingularParameterError(tag, -1j * theta, spec.guard)
        vals = spec.on_imag(self._theta)
        F = (self._V * vals) @ self._V.conj().T
        Linv_t = np.linalg.inv(self._L).T
        out = Linv_t @ F @ self._L.T
        imag = np.max(np.abs(out.imag)) if out.size else 0.0
        if imag > 1e-10 * max(1.0, np.max(np.abs(out.real))):
            raise NumericalError(f"spectral evaluation of {tag!r} not real: {imag:.3e}")
        return out.real


def analytic_of_ad(algebra: MatrixLieAlgebra, w: np.ndarray, tag: str) -> np.ndarray:
    """f(ad_w) for f one of the registered spectral tags."""
    return AdOperator(algebra, w).apply(tag)


class SymmetricPair:
    """Orthogonal symmetric splitting g = m ⊕ k defined by an involution.

    ``sigma`` is the involutive automorphism as an N×N matrix on
    coefficients; k is its (+1)-eigenspace, m its (−1)-eigenspace, and the
    bracket satisfies [m,m] ⊆ k, [k,m] ⊆ m, [k,k] ⊆ k with k ⊥ m.
    """

    def __init__(self, algebra: MatrixLieAlgebra, sigma: np.ndarray, *, validate: bool = True, name: str = ""):
        self.algebra = algebra
        self.sigma = np.asarray(sigma, dtype=float)
        self.name = name or algebra.name
        n = algebra.dim
        if self.sigma.shape != (n, n):
            raise InputError("sigma must act on coefficient space")
        g = algebra.inner_product
        eye = np.eye(n)
        # Columns of (1 ∓ sigma)/2 span the eigenspaces; gram_schmidt works on rows.
        self.m_basis = gram_schmidt(((eye - self.sigma) / 2.0).T, g)
        self.k_basis = gram_schmidt(((eye + self.sigma) / 2.0).T, g)
        if self.m_basis.shape[0] + self.k_basis.shape[0] != n:
            raise NumericalError("sigma eigenspaces do not span the algebra")
        self.P_m = self._projector(self.m_basis)
        self.P_k = self._projector(self.k_basis)
        if validate:
            self.validate()
        for arr in (self.sigma, self.m_basis, self.k_basis, self.P_m, self.P_k):
            arr.flags.writeable = False

    def _projector(self, basis: np.ndarray) -> np.ndarray:
        g = self.algebra.inner_product
        return basis.T @ basis @ g

    @property
    def dim_m(self) -> int:
        return self.m_basis.shape[0]

    @property
    def dim_k(self) -> int:
        return self.k_basis.shape[0]

    def project_m(self, v: np.ndarray) -> np.ndarray:
        return self.P_m @ v

    def project_k(self, v: np.ndarray) -> np.ndarray:
        return self.P_k @ v

    def validate(self) -> None:
        alg = self.algebra
        tol = 1e-12
        n = alg.dim
        if np.max(np.abs(self.sigma @ self.sigma - np.eye(n))) > tol:
            raise NumericalError("sigma is not an involution")
        if np.max(np.abs(self.P_m + self.P_k - np.eye(n))) > 1e-10:
            raise NumericalError("projections do not sum to the identity")
        if np.max(np.abs(self.P_m @ self.P_k)) > 1e-10:
            raise NumericalError("projections are not complementary")
        scale = max(1.0, np.max(np.abs(alg.structure_constants)))
        for u in self.m_basis:
            for v in self.m_basis:
                if alg.norm(self.P_m @ alg.bracket(u, v)) > tol * scale:
                    raise NumericalError("[m,m] not contained in k")
        for u in self.k_basis:
            for v in self.m_basis:
                if alg.norm(self.P_k @ alg.bracket(u, v)) > tol * scale:
                    raise NumericalError("[k,m] not contained in m")
        for u in self.k_basis:
            for v in self.k_basis:
                if alg.norm(self.P_m @ alg.bracket(u, v)) > tol * scale:
                    raise NumericalError("[k,k] not contained in k")
        cross = np.max(np.abs(self.m_basis @ alg.inner_product @ self.k_basis.T))
        if cross > tol:
            raise NumericalError("m and k are not orthogonal")

    def require_m(self, xi: np.ndarray, what: str = "xi") -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.algebra.dim,):
            raise InputError(f"{what} must be a coefficient vector of length {self.algebra.dim}")
        if self.algebra.norm(xi - self.P_m @ xi) > 1e-10 * max(1.0, self.algebra.norm(xi)):
            raise InputError(f"{what} must lie in m")
        return xi

    def __repr__(self):
        return f"SymmetricPair({self.name}, dim_m={self.dim_m}, dim_k={self.dim_k})"


@dataclass(frozen=True)
class BOperators:
    """The unique pair (B_w^m, B_w^k) splitting the identity through
    sinc(ad_w) and cos(ad_w), as N×N matrices with ranges in m and k."""

    b_m: np.ndarray
    b_k: np.ndarray
    residual_closed: float
    residual_solve: float
    agreement: float


def _identity_residual(pair: SymmetricPair, ad: AdOperator, bm: np.ndarray, bk: np.ndarray) -> float:
    lhs = ad.apply("sinc") @ bm + ad.apply("cos") @ bk
    return float(np.max(np.abs(lhs - np.eye(pair.algebra.dim))))


def b_operators(pair: SymmetricPair, w: np.ndarray, *, check: bool = True) -> BOperators:
    """Solve Id = sinc(ad_w)∘B^m + cos(ad_w)∘B^k with range(B^m) ⊆ m, range(B^k) ⊆ k.

    Two independent routes are computed and cross-checked: the symmetric-space
    closed form B^m = (ad_w/sin ad_w)∘P_m, B^k = (1/cos ad_w)∘P_k, and a
    generic linear solve of the defining identity with the range constraints.
    """
    pair.require_m(w, "w")
    ad = AdOperator(pair.algebra, w)

    bm_closed = ad.apply("t_over_sin") @ pair.P_m
    bk_closed = ad.apply("sec") @ pair.P_k

    # Generic route: columns of the combined operator on (m ⊕ k)-coefficients.
    sinc_m = ad.apply("sinc") @ pair.m_basis.T      # N × dim_m
    cos_k = ad.apply("cos") @ pair.k_basis.T        # N × dim_k
    A = np.hstack([sinc_m, cos_k])
    try:
        X = np.linalg.solve(A, np.eye(pair.algebra.dim))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"B-operator system singular: {exc}") from exc
    bm_solve = pair.m_basis.T @ X[: pair.dim_m]
    bk_solve = pair.k_basis.T @ X[pair.dim_m:]

    res_c = _identity_residual(pair, ad, bm_closed, bk_closed)
    res_s = _identity_residual(pair, ad, bm_solve, bk_solve)
    agree = float(
        max(np.max(np.abs(bm_closed - bm_solve)), np.max(np.abs(bk_closed - bk_solve)))
    )
    if check:
        if res_c > 1e-10 or res_s > 1e-10:
            raise NumericalError(
                f"B-operator identity residuals too large: closed {res_c:.3e}, solve {res_s:.3e}"
            )
        if agree > 1e-9:
            raise NumericalError(f"closed-form vs solved B-operators disagree: {agree:.3e}")
    return BOperators(bm_closed, bk_closed, res_c, res_s, agree)


@dataclass(frozen=True)
class YFieldValue:
    """Value of the invariant (1,0)-type field at (e, w): a complex algebra
    component and a complex m-component, both as coefficient vectors."""

    g_component: np.ndarray
    m_component: np.ndarray

    def __iter__(self):
        return iter((self.g_component, self.m_component))


def y_field(pair: SymmetricPair, xi: np.ndarray, w: np.ndarray) -> YFieldValue:
    """Symmetric-space evaluation for xi ∈ m:

        Y^xi(e,w) = ( (1/cos ad_w) xi − i ((cos ad_w − 1)/sin ad_w) xi ,
                      −i (ad_w cos ad_w / sin ad_w) xi ).
    """
    xi = pair.require_m(xi)
    pair.require_m(w, "w")
    ad = AdOperator(pair.algebra, w)
    g_re = ad.apply("sec") @ xi
    g_im = ad.apply("cos_minus_one_over_sin") @ xi
    m_im = ad.apply("t_cos_over_sin") @ xi
    return YFieldValue(g_re - 1j * g_im, -1j * m_im)


def general_y_field(pair: SymmetricPair, xi: np.ndarray, w: np.ndarray) -> YFieldValue:
    """General (non-symmetric-case) evaluation for xi ∈ g through B-operators.

    Uses the generically solved B^m (not the symmetric closed form), so that
    agreement with :func:`y_field` is a genuine cross-implementation check.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (pair.algebra.dim,):
        raise InputError("xi must be a coefficient vector")
    pair.require_m(w, "w")
    ad = AdOperator(pair.algebra, w)
    # Generic-solve route for independence from the spectral closed form.
    sinc_m = ad.apply("sinc") @ pair.m_basis.T
    cos_k = ad.apply("cos") @ pair.k_basis.T
    X = np.linalg.solve(np.hstack([sinc_m, cos_k]), np.eye(pair.algebra.dim))
    bm = pair.m_basis.T @ X[: pair.dim_m]

    v1 = bm @ (ad.apply("sin") @ xi)
    v2 = bm @ (ad.apply("cos") @ xi)
    corr = ad.apply("cos_minus_one_over_t_cos")
    g1 = corr @ v1 + ad.apply("sec") @ xi
    g2 = corr @ v2
    return YFieldValue(g1 - 1j * g2, v1 - 1j * v2)
