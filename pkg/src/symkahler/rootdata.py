"""Restricted-root apparatus of a compact symmetric pair.

Computes a Cartan subspace a ⊂ m, the positive restricted roots λ with
multiplicities and adapted bases (ξ^j_λ, ζ^j_λ) satisfying

    [w, ξ^j_λ] = -λ'(w) ζ^j_λ,   [w, ζ^j_λ] = λ'(w) ξ^j_λ   for all w ∈ a,

the orthogonal endomorphism T (T ξ = -ζ, T ζ = ξ, T² = -Id on m⁺ ⊕ k⁺),
and the centraliser tower h = z_k(a), z(h), g_h = z_g(h), together with the
finite group D_a = exp(a) ∩ K and the fixed-point algebra g_H it cuts out
of g_h, with the multiplicity-one root subsets Σ_h and Σ_H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import (
    DegeneracyError,
    IncompleteEnumerationError,
    InputError,
    NumericalError,
)
from .liealg import MatrixLieAlgebra, SymmetricPair, gram_schmidt

__all__ = [
    "PositiveRoot",
    "RestrictedRootData",
    "CentralizerTower",
    "cartan_subspace",
    "restricted_roots",
    "centralizer_tower",
    "d_a_and_g_H",
    "build_root_data",
    "cartan_subalgebra_of",
]

_RANK_TOL = 1e-10
_CLUSTER_TOL = 1e-8
_D_A_BOUND = 4 * math.pi


def _nullspace(rows: np.ndarray, tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the right null space, as rows."""
    rows = np.atleast_2d(rows)
    if rows.shape[0] == 0:
        return np.eye(rows.shape[1])
    _, s, vt = np.linalg.svd(rows)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(smax, 1.0)))
    return vt[rank:]


def _subspace_solve(alg: MatrixLieAlgebra, basis: np.ndarray, condition_rows: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Vectors v = basis.T @ c with condition_rows(v) = 0, as rows in g-coords."""
    cols = [condition_rows(b) for b in basis]
    mat = np.array(cols).T if cols else np.zeros((0, 0))
    null = _nullspace(mat) if mat.size else np.eye(basis.shape[0])
    vecs = null @ basis
    return gram_schmidt(vecs, alg.inner_product) if vecs.size else vecs


def cartan_subspace(pair: SymmetricPair, seed: np.ndarray, *, rng_seed: int = 0) -> np.ndarray:
    """Orthonormal basis (rows) of a maximal commutative subspace of m
    containing a regular perturbation of ``seed``.

    The centraliser of a generic element of m inside m is already maximal
    commutative; non-generic seeds are nudged inside their own centraliser
    until the centraliser stabilises and commutes.
    """
    alg = pair.algebra
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (alg.dim,) or alg.norm(seed) == 0:
        raise InputError("seed must be a nonzero element of m")
    w = pair.require_m(seed, "seed") / alg.norm(seed)
    rng = np.random.default_rng(rng_seed)

    def centralizer_in_m(v: np.ndarray) -> np.ndarray:
        ad_v = alg.ad(v)
        return _subspace_solve(alg, pair.m_basis, lambda b: ad_v @ b)

    def is_commutative(basis: np.ndarray) -> bool:
        scale = max(1.0, np.max(np.abs(alg.structure_constants)))
        return all(
            alg.norm(alg.bracket(u, v)) <= 1e-12 * scale
            for i, u in enumerate(basis)
            for v in basis[i + 1:]
        )

    cand = centralizer_in_m(w)
    for _ in range(pair.dim_m + 1):
        if is_commutative(cand):
            break
        # nudge towards a generic element of the current centraliser
        weights = rng.normal(size=cand.shape[0])
        w = w + 1e-2 * weights @ cand
        w = pair.P_m @ w
        w /= alg.norm(w)
        nxt = centralizer_in_m(w)
        if nxt.shape[0] > cand.shape[0]:
            continue
        cand = nxt
    else:
        raise NumericalError("Cartan subspace iteration did not stabilise")

    # put the seed direction first so that a contains it explicitly
    stacked = np.vstack([w, cand])
    basis = gram_schmidt(stacked, alg.inner_product)
    if not is_commutative(basis):
        raise NumericalError("computed subspace is not commutative")
    basis.flags.writeable = False
    return basis


@dataclass
class PositiveRoot:
    """One positive restricted root: functional values on the a-basis,
    multiplicity, and the paired orthonormal bases of m_λ and k_λ."""

    lambda_prime: np.ndarray          # shape (r,): values λ'(X_1..X_r)
    multiplicity: int
    xi_basis: np.ndarray              # (m_λ, N) rows in m
    zeta_basis: np.ndarray            # (m_λ, N) rows in k
    in_sigma_h: bool = False
    in_sigma_H: bool = False

    def lambda_at(self, x: np.ndarray) -> float:
        """λ'(x) for chamber coordinates x w.r.t. the a-basis."""
        return float(self.lambda_prime @ np.asarray(x))


def restricted_roots(
    pair: SymmetricPair,
    a_basis: np.ndarray,
    *,
    max_retries: int = 6,
    rng_seed: int = 0,
) -> tuple[list[PositiveRoot], np.ndarray]:
    """Simultaneously diagonalise ad²(a) on m and build the paired root bases.

    Returns the roots sorted by their value at the chamber representative
    w_reg (default weights 1 + i/10 on the a-basis, randomised on retry)
    together with the w_reg coordinates used.
    """
    alg = pair.algebra
    a_basis = np.atleast_2d(np.asarray(a_basis, dtype=float))
    r = a_basis.shape[0]
    rng = np.random.default_rng(rng_seed)

    for attempt in range(max_retries):
        if attempt == 0:
            weights = np.array([1.0 + (i + 1) / 10.0 for i in range(r)])
        else:
            weights = 1.0 + rng.uniform(0.1, 1.0, size=r)
        try:
            roots = _roots_for_regular(pair, a_basis, weights)
            return roots, weights
        except DegeneracyError:
            if attempt == max_retries - 1:
                raise
    raise DegeneracyError("no regular element found")  # pragma: no cover


def _roots_for_regular(pair: SymmetricPair, a_basis: np.ndarray, weights: np.ndarray) -> list[PositiveRoot]:
    alg = pair.algebra
    r = a_basis.shape[0]
    w_reg = weights @ a_basis
    ad_w = alg.ad(w_reg)
    ad2 = ad_w @ ad_w

    # ad² restricted to m in the orthonormal m-basis coordinates (symmetric).
    Bm = pair.m_basis
    G = alg.inner_product
    M2 = Bm @ G @ ad2 @ Bm.T
    M2 = 0.5 * (M2 + M2.T)
    evals, evecs = np.linalg.eigh(M2)   # ascending; eigenvalues are -λ'(w_reg)²
    scale = max(1.0, float(np.max(np.abs(evals))))
    tol = _CLUSTER_TOL * scale

    zero_mask = np.abs(evals) <= tol
    if int(np.sum(zero_mask)) != r:
        raise DegeneracyError(
            f"kernel of ad²(w_reg) on m has dimension {int(np.sum(zero_mask))}, expected rank {r}"
        )

    neg = np.where(~zero_mask)[0]
    clusters: list[list[int]] = []
    for idx in neg:
        if clusters and abs(evals[idx] - evals[clusters[-1][-1]]) <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])

    pairing_tol = 1e-10 * max(1.0, float(np.max(np.abs(alg.structure_constants))), alg.norm(w_reg))
    roots: list[PositiveRoot] = []
    for cluster in clusters:
        lam_wreg = math.sqrt(max(-float(np.mean(evals[cluster])), 0.0))
        xi_rows = (evecs[:, cluster].T @ Bm)
        zeta_rows = np.array([-alg.bracket(w_reg, xi) / lam_wreg for xi in xi_rows])
        # functional from the first pair, then verified on every basis vector
        lam = np.array(
            [alg.inner(alg.bracket(a_basis[i], zeta_rows[0]), xi_rows[0]) for i in range(r)]
        )
        for xi, zeta in zip(xi_rows, zeta_rows):
            for i in range(r):
                res1 = alg.norm(alg.bracket(a_basis[i], xi) + lam[i] * zeta)
                res2 = alg.norm(alg.bracket(a_basis[i], zeta) - lam[i] * xi)
                if max(res1, res2) > pairing_tol:
                    raise DegeneracyError(
                        f"root pairing residual {max(res1, res2):.3e}: distinct roots share "
                        f"the eigenvalue {lam_wreg:.6g} of the regular element"
                    )
        # ζ rows must be orthonormal (orthogonality of the pairing isometry)
        gram = zeta_rows @ alg.inner_product @ zeta_rows.T
        if np.max(np.abs(gram - np.eye(len(cluster)))) > 1e-10:
            raise DegeneracyError("zeta basis not orthonormal; retry with another regular element")
        roots.append(
            PositiveRoot(
                lambda_prime=lam,
                multiplicity=len(cluster),
                xi_basis=xi_rows,
                zeta_basis=zeta_rows,
            )
        )

    roots.sort(key=lambda rt: float(rt.lambda_prime @ weights))
    # dimension accounting: Σ m_λ = dim m - r exactly
    if sum(rt.multiplicity for rt in roots) != pair.dim_m - r:
        raise NumericalError("root multiplicities do not fill m")
    return roots


@dataclass
class CentralizerTower:
    h_basis: np.ndarray
    z_h_basis: np.ndarray
    g_h_basis: np.ndarray


def centralizer_tower(pair: SymmetricPair, roots: Sequence[PositiveRoot], a_basis: np.ndarray) -> CentralizerTower:
    """h = {u ∈ k : [u, a] = 0}, its centre z(h), the centraliser g_h of h in
    g, and the multiplicity-one flags: λ ∈ Σ_h iff m_λ ∩ g_h ≠ 0."""
    alg = pair.algebra
    a_basis = np.atleast_2d(a_basis)

    def bracket_rows(basis_vectors: np.ndarray):
        def rows(v: np.ndarray) -> np.ndarray:
            return np.concatenate([alg.bracket(u, v) for u in basis_vectors])
        return rows

    h = _subspace_solve(alg, pair.k_basis, bracket_rows(a_basis))
    if h.shape[0]:
        z_h = _subspace_solve(alg, h, bracket_rows(h))
        g_h = _subspace_solve(alg, np.eye(alg.dim), bracket_rows(h))
    else:
        h = np.zeros((0, alg.dim))
        z_h = np.zeros((0, alg.dim))
        g_h = np.eye(alg.dim)

    # Σ_h membership: m_λ ∩ g_h ≠ 0; consistency demands multiplicity one then.
    P_gh = g_h.T @ g_h @ alg.inner_product if g_h.shape[0] else np.zeros((alg.dim, alg.dim))
    for rt in roots:
        resid = rt.xi_basis - rt.xi_basis @ P_gh.T
        norms = [alg.norm(v) for v in resid]
        inside = [n <= 1e-8 for n in norms]
        if any(inside):
            if not all(inside) or rt.multiplicity != 1:
                raise NumericalError(
                    "root meets g_h but is not fully contained with multiplicity one"
                )
            rt.in_sigma_h = True
        else:
            rt.in_sigma_h = False

    n_sigma_h = sum(1 for rt in roots if rt.in_sigma_h)
    expected = a_basis.shape[0] + z_h.shape[0] + 2 * n_sigma_h
    if g_h.shape[0] != expected:
        raise NumericalError(
            f"centraliser decomposition mismatch: dim g_h = {g_h.shape[0]}, expected {expected}"
        )
    return CentralizerTower(h_basis=h, z_h_basis=z_h, g_h_basis=g_h)


def _group_matrix(alg: MatrixLieAlgebra, v: np.ndarray) -> np.ndarray:
    return expm(alg.matrix(v))


def _ad_matrix_of_group(alg: MatrixLieAlgebra, g: np.ndarray) -> np.ndarray:
    g_inv = np.linalg.inv(g)
    cols = [alg.coeffs(g @ e @ g_inv) for e in alg.basis]
    return np.array(cols).T


def d_a_and_g_H(
    pair: SymmetricPair,
    roots: Sequence[PositiveRoot],
    a_basis: np.ndarray,
    tower: CentralizerTower,
    k_membership: Callable[[np.ndarray], bool] | None = None,
    *,
    bound: float = _D_A_BOUND,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Enumerate D_a = exp(a) ∩ K = exp{v ∈ a : exp v = exp(-v)} and cut the
    fixed-point algebra g_H out of g_h; set the Σ_H flags.

    exp(2v) = Id is decided on the spectral lattice of the a-basis in the
    defining representation: all eigen-functionals of v must be multiples
    of π.  Enumeration covers multiples up to ``bound`` per functional;
    non-closure of the resulting set under multiplication raises
    IncompleteEnumerationError.  With no membership predicate the subgroup
    K is assumed connected, so D_a acts trivially and g_H = g_h, Σ_H = Σ_h.
    """
    alg = pair.algebra
    a_basis = np.atleast_2d(a_basis)
    r = a_basis.shape[0]

    generators: list[np.ndarray] = []
    if k_membership is not None:
        # simultaneous eigen-functionals of the commuting a-matrices
        rng = np.random.default_rng(12345)
        combo_w = rng.normal(size=r)
        combo = alg.matrix(combo_w @ a_basis)
        _, vecs = np.linalg.eig(combo)
        a_mats = [alg.matrix(v) for v in a_basis]
        mus = []
        for col in vecs.T:
            mu = np.array([np.imag(col.conj() @ (m @ col)) / (col.conj() @ col).real for m in a_mats])
            mus.append(mu)
        mus = np.array(mus)
        # keep one representative per ±pair, drop zeros
        uniq: list[np.ndarray] = []
        for mu in mus:
            if np.max(np.abs(mu)) < 1e-9:
                continue
            if not any(
                np.allclose(mu, u, atol=1e-8) or np.allclose(mu, -u, atol=1e-8)
                for u in uniq
            ):
                uniq.append(mu)
        if uniq:
            M = np.array(uniq)
            # independent rows defining the lattice
            q, pivots = [], []
            for i, row in enumerate(M):
                trial = np.array(q + [row])
                if np.linalg.matrix_rank(trial, tol=1e-8) > len(q):
                    q.append(row)
                    pivots.append(i)
            Mr = np.array(q)
            kmax = int(math.ceil(bound / math.pi)) + 1
            grids = np.meshgrid(*[np.arange(-kmax, kmax + 1)] * Mr.shape[0], indexing="ij")
            ks = np.stack([g.ravel() for g in grids], axis=1)
            sol = np.linalg.lstsq(Mr, math.pi * ks.T, rcond=None)[0].T
            found: list[np.ndarray] = []
            for v_coords in sol:
                mu_vals = M @ v_coords
                if np.max(np.abs(mu_vals)) > bound + 1e-6:
                    continue
                if np.max(np.abs(mu_vals / math.pi - np.round(mu_vals / math.pi))) > 1e-8:
                    continue
                v = v_coords @ a_basis
                g = _group_matrix(alg, v)
                if np.max(np.abs(g @ g - np.eye(g.shape[0]))) > 1e-8:
                    continue
                if not k_membership(g):
                    continue
                if not any(np.max(np.abs(g - f)) < 1e-8 for f in found):
                    found.append(g)
            # group closure under multiplication within the enumerated set
            for g1 in found:
                for g2 in found:
                    prod = g1 @ g2
                    if not any(np.max(np.abs(prod - f)) < 1e-7 for f in found):
                        raise IncompleteEnumerationError(
                            "enumerated exp(a) ∩ K candidates do not close under "
                            f"multiplication within bound {bound:.3g}; increase the bound"
                        )
            d = alg.basis[0].shape[0]
            generators = [g for g in found if np.max(np.abs(g - np.eye(d))) > 1e-8]

    g_h = tower.g_h_basis
    if generators:
        ad_mats = [_ad_matrix_of_group(alg, g) for g in generators]
        rows_fn = lambda v: np.concatenate([(A - np.eye(alg.dim)) @ v for A in ad_mats])
        g_H = _subspace_solve(alg, g_h, rows_fn)
        for rt in roots:
            if not rt.in_sigma_h:
                rt.in_sigma_H = False
                continue
            fixed = all(
                alg.norm(A @ vec - vec) <= 1e-9
                for A in ad_mats
                for vec in np.vstack([rt.xi_basis, rt.zeta_basis])
            )
            rt.in_sigma_H = fixed
    else:
        g_H = g_h
        for rt in roots:
            rt.in_sigma_H = rt.in_sigma_h
    return generators, g_H


@dataclass
class RestrictedRootData:
    """Complete restricted-root data of a symmetric pair.

    Immutable after construction; shared freely by the metric machinery.
    """

    pair: SymmetricPair
    a_basis: np.ndarray
    roots: list[PositiveRoot]
    w_reg_coords: np.ndarray
    h_basis: np.ndarray
    z_h_basis: np.ndarray
    g_h_basis: np.ndarray
    g_H_basis: np.ndarray
    d_a_generators: list[np.ndarray] = field(default_factory=list)

    @property
    def algebra(self) -> MatrixLieAlgebra:
        return self.pair.algebra

    @property
    def rank(self) -> int:
        return self.a_basis.shape[0]

    @property
    def sigma_H(self) -> list[int]:
        return [i for i, rt in enumerate(self.roots) if rt.in_sigma_H]

    def a_point(self, x: np.ndarray) -> np.ndarray:
        """Chamber coordinates -> algebra coefficient vector."""
        return np.asarray(x, dtype=float) @ self.a_basis

    def lambda_values(self, x: np.ndarray) -> np.ndarray:
        return np.array([rt.lambda_at(x) for rt in self.roots])

    def m_plus_basis(self) -> np.ndarray:
        if not self.roots:
            return np.zeros((0, self.algebra.dim))
        return np.vstack([rt.xi_basis for rt in self.roots])

    def k_plus_basis(self) -> np.ndarray:
        if not self.roots:
            return np.zeros((0, self.algebra.dim))
        return np.vstack([rt.zeta_basis for rt in self.roots])

    def t_operator(self) -> np.ndarray:
        """T with T(ξ^j_λ) = -ζ^j_λ, T(ζ^j_λ) = ξ^j_λ, zero on a ⊕ h."""
        alg = self.algebra
        G = alg.inner_product
        T = np.zeros((alg.dim, alg.dim))
        for rt in self.roots:
            for xi, zeta in zip(rt.xi_basis, rt.zeta_basis):
                T += -np.outer(zeta, G @ xi) + np.outer(xi, G @ zeta)
        return T

    def projector(self, basis: np.ndarray) -> np.ndarray:
        if basis.shape[0] == 0:
            return np.zeros((self.algebra.dim, self.algebra.dim))
        return basis.T @ basis @ self.algebra.inner_product

    def report(self) -> dict:
        """JSON-ready summary of the root system and centraliser tower."""
        return {
            "space": self.pair.name,
            "rank": self.rank,
            "dim_g": self.algebra.dim,
            "dim_m": self.pair.dim_m,
            "dim_k": self.pair.dim_k,
            "dim_h": int(self.h_basis.shape[0]),
            "dim_z_h": int(self.z_h_basis.shape[0]),
            "dim_g_h": int(self.g_h_basis.shape[0]),
            "dim_g_H": int(self.g_H_basis.shape[0]),
            "d_a_nontrivial_generators": len(self.d_a_generators),
            "roots": [
                {
                    "lambda_prime": [float(v) for v in rt.lambda_prime],
                    "multiplicity": int(rt.multiplicity),
                    "in_sigma_h": bool(rt.in_sigma_h),
                    "in_sigma_H": bool(rt.in_sigma_H),
                }
                for rt in self.roots
            ],
        }

    def validate(self) -> None:
        alg = self.algebra
        scale = max(1.0, float(np.max(np.abs(alg.structure_constants))))
        for i, u in enumerate(self.a_basis):
            for v in self.a_basis[i + 1:]:
                if alg.norm(alg.bracket(u, v)) > 1e-12 * scale:
                    raise NumericalError("Cartan subspace is not commutative")
        mult = sum(rt.multiplicity for rt in self.roots)
        if self.rank + mult != self.pair.dim_m:
            raise NumericalError("m does not decompose into a ⊕ Σ m_λ")
        if self.h_basis.shape[0] + mult != self.pair.dim_k:
            raise NumericalError("k does not decompose into h ⊕ Σ k_λ")
        for rt in self.roots:
            if rt.in_sigma_H and rt.multiplicity != 1:
                raise NumericalError("Σ_H root with multiplicity > 1")
        # [g_H, h] = 0 and Ad(D_a)-fixedness of g_H
        for u in self.g_H_basis:
            for v in self.h_basis:
                if alg.norm(alg.bracket(u, v)) > 1e-12 * scale:
                    raise NumericalError("[g_H, h] != 0")
        for g in self.d_a_generators:
            A = _ad_matrix_of_group(alg, g)
            for u in self.g_H_basis:
                if alg.norm(A @ u - u) > 1e-9:
                    raise NumericalError("g_H not fixed by Ad(D_a)")


def build_root_data(
    pair: SymmetricPair,
    seed: np.ndarray | None = None,
    k_membership: Callable[[np.ndarray], bool] | None = None,
    *,
    d_a_bound: float = _D_A_BOUND,
    rng_seed: int = 0,
) -> RestrictedRootData:
    """Run the full pipeline: Cartan subspace, roots, tower, D_a and g_H."""
    if seed is None:
        seed = pair.m_basis[0]
    a_basis = cartan_subspace(pair, seed, rng_seed=rng_seed)
    roots, weights = restricted_roots(pair, a_basis, rng_seed=rng_seed)
    tower = centralizer_tower(pair, roots, a_basis)
    generators, g_H = d_a_and_g_H(
        pair, roots, a_basis, tower, k_membership, bound=d_a_bound
    )
    data = RestrictedRootData(
        pair=pair,
        a_basis=a_basis,
        roots=roots,
        w_reg_coords=weights,
        h_basis=tower.h_basis,
        z_h_basis=tower.z_h_basis,
        g_h_basis=tower.g_h_basis,
        g_H_basis=g_H,
        d_a_generators=generators,
    )
    data.validate()
    return data


def cartan_subalgebra_of(alg: MatrixLieAlgebra, basis: np.ndarray, *, rng_seed: int = 7) -> np.ndarray:
    """Maximal commutative subspace of the compact subalgebra spanned by
    ``basis`` rows (centraliser of a generic element inside the span)."""
    if basis.shape[0] == 0:
        return basis
    rng = np.random.default_rng(rng_seed)
    for _ in range(8):
        v = rng.normal(size=basis.shape[0]) @ basis
        ad_v = alg.ad(v)
        cand = _subspace_solve(alg, basis, lambda b: ad_v @ b)
        scale = max(1.0, float(np.max(np.abs(alg.structure_constants))))
        if all(
            alg.norm(alg.bracket(u, w)) <= 1e-10 * scale
            for i, u in enumerate(cand)
            for w in cand[i + 1:]
        ):
            return cand
    raise NumericalError("could not stabilise a Cartan subalgebra")
