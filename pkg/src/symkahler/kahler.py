"""Invariant Kähler structures on G × W⁺ from an ansatz vector-function.

The exact two-form dθ^a attached to a map a: W⁺ → g_H of the shape

    a(x) = Σ_j ∂f/∂x_j(x) X_j + z_h + Σ_{λ∈Σ_H⁺} c^k_λ/cosh λ'(x) ζ¹_λ
                                 + Σ_{λ∈Σ_H⁺} c^m_λ/sinh λ'(x) ξ¹_λ

defines a Kähler structure iff the commutation relations hold and the two
Hermitian matrix fields w_H(x), w_*(x) are positive-definite; it is
Ricci-flat iff det w_H · det w_* is constant, equivalently iff the
invariant determinant function S built from the Y fields is constant.
This module implements the block-spectral operators R_x, S_x, the ansatz,
both matrix fields, the checks, the potential-function criterion and the
S-function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ChamberError, InputError, NumericalError
from .liealg import y_field
from .rootdata import RestrictedRootData

__all__ = [
    "AnsatzFunction",
    "HermitianField",
    "KahlerReport",
    "RicciFlatResult",
    "PotentialCaseResult",
    "rs_operators",
    "ansatz_value",
    "commutation_residual",
    "hermitian_fields",
    "kahler_check",
    "ricci_flat_residual",
    "potential_case_condition",
    "s_function",
    "omega_tilde",
    "z_frame",
    "chamber_ray_grid",
    "finite_difference_derivatives",
]

_RES_TOL = 1e-8


def _require_chamber(rd: RestrictedRootData, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (rd.rank,):
        raise InputError(f"chamber point must have {rd.rank} coordinates")
    lam = rd.lambda_values(x)
    if np.any(lam <= 0):
        raise ChamberError(f"point {x.tolist()} is outside the Weyl chamber (λ' = {lam.tolist()})")
    return x


def rs_operators(rd: RestrictedRootData, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Block-spectral operators at x ∈ W⁺ as N×N matrices:

    R_x = 1/cosh(λ'_x) · Id and S_x = 1/sinh(λ'_x) · T on each m_λ ⊕ k_λ,
    both zero on a ⊕ h.
    """
    x = _require_chamber(rd, x)
    alg = rd.algebra
    G = alg.inner_product
    R = np.zeros((alg.dim, alg.dim))
    S = np.zeros((alg.dim, alg.dim))
    for rt in rd.roots:
        lam = rt.lambda_at(x)
        for xi, zeta in zip(rt.xi_basis, rt.zeta_basis):
            P = np.outer(xi, G @ xi) + np.outer(zeta, G @ zeta)
            R += P / math.cosh(lam)
            # T maps ξ -> -ζ and ζ -> ξ on this block
            S += (-np.outer(zeta, G @ xi) + np.outer(xi, G @ zeta)) / math.sinh(lam)
    return R, S


def finite_difference_derivatives(
    f: Callable[[np.ndarray], float], rank: int, step: float = 1e-5
) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """Gradient and Hessian callables for a scalar f by central differences
    with one Richardson extrapolation step (ratio 2)."""

    def richardson(d: Callable[[float], np.ndarray]) -> np.ndarray:
        return (4.0 * d(step / 2.0) - d(step)) / 3.0

    def grad(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)

        def d(h: float) -> np.ndarray:
            out = np.zeros(rank)
            for j in range(rank):
                e = np.zeros(rank)
                e[j] = h
                out[j] = (f(x + e) - f(x - e)) / (2.0 * h)
            return out

        return richardson(d)

    def hess(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)

        def d(h: float) -> np.ndarray:
            out = np.zeros((rank, rank))
            f0 = f(x)
            for j in range(rank):
                ej = np.zeros(rank)
                ej[j] = h
                out[j, j] = (f(x + ej) - 2.0 * f0 + f(x - ej)) / h**2
                for k in range(j + 1, rank):
                    ek = np.zeros(rank)
                    ek[k] = h
                    v = (
                        f(x + ej + ek)
                        - f(x + ej - ek)
                        - f(x - ej + ek)
                        + f(x - ej - ek)
                    ) / (4.0 * h**2)
                    out[j, k] = out[k, j] = v
            return out

        return richardson(d)

    return grad, hess


@dataclass
class AnsatzFunction:
    """The g_H-valued vector-function a(x) generating the two-form dθ^a.

    ``f_grad``/``f_hess`` supply the Hessian-potential part; ``z_h`` is a fixed
    centre element; ``c_k``/``c_m`` map root indices in Σ_H⁺ to the
    coefficients of the cosh⁻¹/sinh⁻¹ profiles.  ``c_extra`` optionally
    plants such profiles on roots outside Σ_H (exploration of invalid
    ansätze); set ``validate=False`` to bypass the membership checks.
    """

    root_data: RestrictedRootData
    f_grad: Callable[[np.ndarray], np.ndarray]
    f_hess: Callable[[np.ndarray], np.ndarray]
    z_h: np.ndarray | None = None
    c_k: Mapping[int, float] = field(default_factory=dict)
    c_m: Mapping[int, float] = field(default_factory=dict)
    c_extra: Mapping[int, tuple[Sequence[float], Sequence[float]]] = field(default_factory=dict)
    validate: bool = True

    def __post_init__(self):
        rd = self.root_data
        alg = rd.algebra
        if self.z_h is None:
            self.z_h = np.zeros(alg.dim)
        self.z_h = np.asarray(self.z_h, dtype=float)
        if self.z_h.shape != (alg.dim,):
            raise InputError("z_h must be an algebra coefficient vector")
        if self.validate:
            P = rd.projector(rd.z_h_basis)
            if alg.norm(self.z_h - P @ self.z_h) > 1e-10 * max(1.0, alg.norm(self.z_h)):
                raise InputError("z_h must lie in the centre z(h)")
            sigma_H = set(rd.sigma_H)
            for idx in set(self.c_k) | set(self.c_m):
                if idx not in sigma_H:
                    raise InputError(f"coefficient on root {idx} outside Σ_H")
            for idx, (ck, cm) in self.c_extra.items():
                if idx in sigma_H:
                    raise InputError("c_extra is for roots outside Σ_H")
                m = rd.roots[idx].multiplicity
                if len(ck) != m or len(cm) != m:
                    raise InputError("c_extra arrays must match the root multiplicity")

    # -- evaluation -------------------------------------------------------

    def components(self, x: np.ndarray) -> dict[str, np.ndarray]:
        """Split a(x) into a-part, z_h, k-profile and m-profile parts."""
        rd = self.root_data
        x = _require_chamber(rd, x)
        grad = np.asarray(self.f_grad(x), dtype=float)
        if grad.shape != (rd.rank,):
            raise InputError("f_grad must return a gradient of length rank")
        a_a = grad @ rd.a_basis
        a_k = np.zeros(rd.algebra.dim)
        a_m = np.zeros(rd.algebra.dim)
        for idx, c in self.c_k.items():
            rt = rd.roots[idx]
            a_k = a_k + (c / math.cosh(rt.lambda_at(x))) * rt.zeta_basis[0]
        for idx, c in self.c_m.items():
            rt = rd.roots[idx]
            a_m = a_m + (c / math.sinh(rt.lambda_at(x))) * rt.xi_basis[0]
        for idx, (cks, cms) in self.c_extra.items():
            rt = rd.roots[idx]
            lam = rt.lambda_at(x)
            for j in range(rt.multiplicity):
                a_k = a_k + (cks[j] / math.cosh(lam)) * rt.zeta_basis[j]
                a_m = a_m + (cms[j] / math.sinh(lam)) * rt.xi_basis[j]
        return {"a_a": a_a, "z_h": self.z_h, "a_k": a_k, "a_m": a_m, "grad": grad}

    def value(self, x: np.ndarray) -> np.ndarray:
        c = self.components(x)
        return c["a_a"] + c["z_h"] + c["a_k"] + c["a_m"]

    def derivatives(self, x: np.ndarray) -> np.ndarray:
        """∂a/∂x_j for j = 1..r, stacked as rows."""
        rd = self.root_data
        x = _require_chamber(rd, x)
        hess = np.asarray(self.f_hess(x), dtype=float)
        if hess.shape != (rd.rank, rd.rank):
            raise InputError("f_hess must return an r×r matrix")
        rows = hess @ rd.a_basis
        out = np.array(rows, dtype=float)

        def profile_rows(idx, ck_list, cm_list):
            rt = rd.roots[idx]
            lam = rt.lambda_at(x)
            ch, sh = math.cosh(lam), math.sinh(lam)
            add = np.zeros((rd.rank, rd.algebra.dim))
            for j, (ck, cm) in enumerate(zip(ck_list, cm_list)):
                for i in range(rd.rank):
                    li = rt.lambda_prime[i]
                    add[i] += ck * (-li * sh / ch**2) * rt.zeta_basis[j]
                    add[i] += cm * (-li * ch / sh**2) * rt.xi_basis[j]
            return add

        for idx in set(self.c_k) | set(self.c_m):
            out += profile_rows(idx, [self.c_k.get(idx, 0.0)], [self.c_m.get(idx, 0.0)])
        for idx, (cks, cms) in self.c_extra.items():
            out += profile_rows(idx, cks, cms)
        return out

    def membership_residual(self, x: np.ndarray) -> float:
        """Distance of a(x) from g_H (should vanish for a valid ansatz)."""
        rd = self.root_data
        a = self.value(x)
        P = rd.projector(rd.g_H_basis)
        return rd.algebra.norm(a - P @ a)


def ansatz_value(a_fn: AnsatzFunction, x: np.ndarray) -> np.ndarray:
    """a(x) in algebra coordinates."""
    return a_fn.value(x)


def commutation_residual(a_fn: AnsatzFunction, x: np.ndarray) -> tuple[float, float]:
    """Operator norms on m⁺ of the two commutation relations

        R·ad_{a^k}·R + S·ad_{a^k}·S + (R² + S²)·ad_{z_h}   and
        R·ad_{a^m}·S − S·ad_{a^m}·R.
    """
    rd = a_fn.root_data
    x = _require_chamber(rd, x)
    comp = a_fn.components(x)
    alg = rd.algebra
    R, S = rs_operators(rd, x)
    ad_k = alg.ad(comp["a_k"])
    ad_z = alg.ad(comp["z_h"])
    ad_m = alg.ad(comp["a_m"])
    P_mplus = rd.projector(rd.m_plus_basis())
    op1 = (R @ ad_k @ R + S @ ad_k @ S + (R @ R + S @ S) @ ad_z) @ P_mplus
    op2 = (R @ ad_m @ S - S @ ad_m @ R) @ P_mplus
    return float(np.linalg.norm(op1, 2)), float(np.linalg.norm(op2, 2))


@dataclass(frozen=True)
class HermitianField:
    """The Hermitian matrix fields of the ansatz.

    ``w_H`` has one row per Cartan direction plus one per root in Σ_H⁺;
    ``w_star`` collects the remaining root slots (or is None when m_*⁺ = 0).
    ``full`` assembles the whole matrix including the mixed blocks, which
    vanish for a valid ansatz.
    """

    w_H: Callable[[np.ndarray], np.ndarray]
    w_star: Callable[[np.ndarray], np.ndarray] | None
    full: Callable[[np.ndarray], np.ndarray]
    h_slots: list
    star_slots: list


def _slot_list(rd: RestrictedRootData) -> list[tuple[int, int]]:
    return [(i, j) for i, rt in enumerate(rd.roots) for j in range(rt.multiplicity)]


def hermitian_fields(a_fn: AnsatzFunction) -> HermitianField:
    """Assemble w_H(x) and w_*(x) from the closed-form entries:

    - Cartan block: 2 ∂²f/∂x_k∂x_j;
    - Cartan/root entries: 2λ'(X_k)(i c^k_λ/cosh²λ'_x − c^m_λ/sinh²λ'_x),
      written invariantly through inner products with ζ¹_λ, ξ¹_λ;
    - root/root entries: −(2i/(sinh λ'_x sinh μ'_x)) <ad_{a^k+z_h} ζ^j_λ, ζ^k_μ>
      − (2/(cosh λ'_x sinh μ'_x)) <ad_{a^a+a^m} ξ^j_λ, ζ^k_μ>,
      whose Σ_H diagonal reduces to 2λ'(a(x))/(cosh λ'_x sinh λ'_x).
    """
    rd = a_fn.root_data
    alg = rd.algebra
    r = rd.rank
    slots = _slot_list(rd)
    h_slots = [(i, j) for (i, j) in slots if rd.roots[i].in_sigma_H]
    star_slots = [(i, j) for (i, j) in slots if not rd.roots[i].in_sigma_H]

    def entries(x: np.ndarray, slot_rows, slot_cols, with_a_rows: bool) -> np.ndarray:
        x = _require_chamber(rd, x)
        comp = a_fn.components(x)
        ak_z = comp["a_k"] + comp["z_h"]
        am_aa = comp["a_a"] + comp["a_m"]
        A_k = alg.ad(ak_z)
        A_m = alg.ad(am_aa)
        lam = [rt.lambda_at(x) for rt in rd.roots]

        def root_root(si, sj):
            (li, ji), (mi, ki) = si, sj
            zl = rd.roots[li].zeta_basis[ji]
            zm = rd.roots[mi].zeta_basis[ki]
            xl = rd.roots[li].xi_basis[ji]
            t1 = -2j / (math.sinh(lam[li]) * math.sinh(lam[mi])) * alg.inner(A_k @ zl, zm)
            t2 = -2.0 / (math.cosh(lam[li]) * math.sinh(lam[mi])) * alg.inner(A_m @ xl, zm)
            return t1 + t2

        def a_root(k, sj):
            (mi, ki) = sj
            rt = rd.roots[mi]
            lk = rt.lambda_prime[k]
            zc = alg.inner(ak_z, rt.zeta_basis[ki])
            xc = alg.inner(comp["a_m"], rt.xi_basis[ki])
            return 2.0 * lk * (1j * zc / math.cosh(lam[mi]) - xc / math.sinh(lam[mi]))

        n_rows = (r if with_a_rows else 0) + len(slot_rows)
        n_cols = (r if with_a_rows else 0) + len(slot_cols)
        w = np.zeros((n_rows, n_cols), dtype=complex)
        off = r if with_a_rows else 0
        if with_a_rows:
            hess = np.asarray(a_fn.f_hess(x), dtype=float)
            w[:r, :r] = 2.0 * hess
            for col, sj in enumerate(slot_cols):
                for k in range(r):
                    v = a_root(k, sj)
                    w[k, off + col] = v
            for row, si in enumerate(slot_rows):
                for k in range(r):
                    w[off + row, k] = np.conj(a_root(k, si))
        for row, si in enumerate(slot_rows):
            for col, sj in enumerate(slot_cols):
                w[off + row, off + col] = root_root(si, sj)
        return w

    def w_H(x):
        return entries(x, h_slots, h_slots, with_a_rows=True)

    w_star_fn = None
    if star_slots:
        def w_star_fn(x):
            return entries(x, star_slots, star_slots, with_a_rows=False)

    def full(x):
        return entries(x, slots, slots, with_a_rows=True)

    return HermitianField(w_H=w_H, w_star=w_star_fn, full=full, h_slots=h_slots, star_slots=star_slots)


@dataclass
class KahlerReport:
    points: list[dict]
    verdict: bool
    res_tol: float = _RES_TOL

    @property
    def passed(self) -> bool:
        return self.verdict


def _hermitian_eig(w: np.ndarray) -> tuple[float, float, float]:
    """(min eigenvalue, det, hermitian defect) of a nominally Hermitian matrix."""
    defect = float(np.max(np.abs(w - w.conj().T))) if w.size else 0.0
    if w.size == 0:
        return math.inf, 1.0, defect
    h = 0.5 * (w + w.conj().T)
    eigs = np.linalg.eigvalsh(h)
    det = float(np.real(np.linalg.det(h)))
    return float(eigs[0]), det, defect


def kahler_check(a_fn: AnsatzFunction, grid: Sequence[np.ndarray], *, res_tol: float = _RES_TOL) -> KahlerReport:
    """Per-point commutation residuals and positivity of w_H, w_*.

    The verdict is "Kähler on grid" iff every residual is below ``res_tol``
    and every minimum eigenvalue is positive.
    """
    if not len(grid):
        raise InputError("grid must be nonempty")
    fields = hermitian_fields(a_fn)
    points = []
    ok = True
    for x in grid:
        x = np.asarray(x, dtype=float)
        res1, res2 = commutation_residual(a_fn, x)
        eH, detH, defH = _hermitian_eig(fields.w_H(x))
        if fields.w_star is not None:
            eS, detS, defS = _hermitian_eig(fields.w_star(x))
        else:
            eS, detS, defS = math.inf, 1.0, 0.0
        mixed = 0.0
        if fields.star_slots and fields.h_slots:
            wf = fields.full(x)
            r = a_fn.root_data.rank
            idx_H = list(range(r)) + [r + k for k, s in enumerate(_slot_list(a_fn.root_data)) if s in fields.h_slots]
            idx_S = [r + k for k, s in enumerate(_slot_list(a_fn.root_data)) if s in fields.star_slots]
            mixed = float(np.max(np.abs(wf[np.ix_(idx_H, idx_S)])))
        point_ok = (
            res1 < res_tol
            and res2 < res_tol
            and eH > 0
            and (fields.w_star is None or eS > 0)
        )
        ok = ok and point_ok
        points.append(
            {
                "x": [float(v) for v in x],
                "res1": res1,
                "res2": res2,
                "min_eig_H": eH,
                "min_eig_star": None if fields.w_star is None else eS,
                "detH": detH,
                "detStar": None if fields.w_star is None else detS,
                "hermitian_defect": max(defH, defS),
                "mixed_block": mixed,
                "pass": bool(point_ok),
            }
        )
    return KahlerReport(points=points, verdict=ok, res_tol=res_tol)


@dataclass
class RicciFlatResult:
    values: np.ndarray
    const: float
    max_rel_dev: float


def ricci_flat_residual(a_fn: AnsatzFunction, grid: Sequence[np.ndarray]) -> RicciFlatResult:
    """det w_H(x) · det w_*(x) over the grid and its relative constancy."""
    fields = hermitian_fields(a_fn)
    vals = []
    for x in grid:
        _, detH, _ = _hermitian_eig(fields.w_H(np.asarray(x, dtype=float)))
        if fields.w_star is not None:
            _, detS, _ = _hermitian_eig(fields.w_star(np.asarray(x, dtype=float)))
        else:
            detS = 1.0
        vals.append(detH * detS)
    vals = np.array(vals)
    const = float(np.mean(vals))
    if const == 0:
        raise NumericalError("determinant product vanishes on the grid")
    dev = float(np.max(np.abs(vals - const)) / abs(const))
    return RicciFlatResult(values=vals, const=const, max_rel_dev=dev)


@dataclass
class PotentialCaseResult:
    products: np.ndarray
    const: float
    max_rel_dev: float
    non_kahler_at: list | None = None

    @property
    def is_kahler(self) -> bool:
        return self.non_kahler_at is None


def potential_case_condition(
    f_grad: Callable[[np.ndarray], np.ndarray],
    f_hess: Callable[[np.ndarray], np.ndarray],
    rd: RestrictedRootData,
    grid: Sequence[np.ndarray],
    *,
    variant: str = "x",
) -> PotentialCaseResult:
    """Constancy of det(∂²f) · Π_λ (2λ'(a(x)) / sinh 2λ'(x))^{m_λ} for the
    pure potential ansatz a = grad f.

    ``variant="x"`` uses sinh 2λ'(x) (consistent with the matrix-field
    entries); ``variant="printed"`` uses sinh 2λ'(a(x)) as literally
    printed, kept for comparison.  A non-positive-definite Hessian flags
    the point as non-Kähler before any constancy is reported.
    """
    if variant not in ("x", "printed"):
        raise InputError("variant must be 'x' or 'printed'")
    prods = []
    for x in grid:
        x = _require_chamber(rd, np.asarray(x, dtype=float))
        hess = np.asarray(f_hess(x), dtype=float)
        if np.linalg.eigvalsh(0.5 * (hess + hess.T))[0] <= 0:
            return PotentialCaseResult(
                products=np.array(prods), const=math.nan, max_rel_dev=math.inf,
                non_kahler_at=[float(v) for v in x],
            )
        grad = np.asarray(f_grad(x), dtype=float)
        p = float(np.linalg.det(hess))
        for rt in rd.roots:
            lam_a = float(rt.lambda_prime @ grad)
            lam_x = rt.lambda_at(x)
            arg = 2.0 * (lam_x if variant == "x" else lam_a)
            p *= (2.0 * lam_a / math.sinh(arg)) ** rt.multiplicity
        prods.append(p)
    prods = np.array(prods)
    const = float(np.mean(prods))
    dev = float(np.max(np.abs(prods - const)) / abs(const)) if const else math.inf
    return PotentialCaseResult(products=prods, const=const, max_rel_dev=dev)


# -- the invariant determinant function --------------------------------------


def omega_tilde(a_fn, x: np.ndarray) -> Callable:
    """The bilinear form of the exact two-form dθ^a at (e, x) on pairs
    (η, u) with η a complex algebra vector and u complex Cartan coordinates:

        ω̃((η₁,u₁),(η₂,u₂)) = Σ_j (u₁_j <a_[j], η₂> − u₂_j <a_[j], η₁>)
                               − <a(x), [η₁, η₂]>.
    """
    rd = a_fn.root_data
    alg = rd.algebra
    a = a_fn.value(x).astype(complex)
    d_a = a_fn.derivatives(x).astype(complex)

    def form(v1, v2):
        eta1, u1 = v1
        eta2, u2 = v2
        eta1 = np.asarray(eta1, dtype=complex)
        eta2 = np.asarray(eta2, dtype=complex)
        u1 = np.atleast_1d(np.asarray(u1, dtype=complex))
        u2 = np.atleast_1d(np.asarray(u2, dtype=complex))
        val = -alg.inner(a, alg.bracket(eta1, eta2))
        for j in range(rd.rank):
            val += u1[j] * alg.inner(d_a[j], eta2) - u2[j] * alg.inner(d_a[j], eta1)
        return complex(val)

    return form


def z_frame(rd: RestrictedRootData, x: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """The holomorphic frame (η, u) pairs at (e, x): (X_k, −i e_k) for the
    Cartan directions, ((1/cosh λ')ξ^j_λ + (i/sinh λ')ζ^j_λ, 0) per slot."""
    x = _require_chamber(rd, x)
    out = []
    for k in range(rd.rank):
        u = np.zeros(rd.rank, dtype=complex)
        u[k] = -1j
        out.append((rd.a_basis[k].astype(complex), u))
    for i, rt in enumerate(rd.roots):
        lam = rt.lambda_at(x)
        for j in range(rt.multiplicity):
            eta = rt.xi_basis[j] / math.cosh(lam) + 1j * rt.zeta_basis[j] / math.sinh(lam)
            out.append((eta, np.zeros(rd.rank, dtype=complex)))
    return out


def _reduce_mod_kernel(rd: RestrictedRootData, x: np.ndarray, eta: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a complex tangent pair (η, v) ∈ g × m at (e, x) along the
    projection kernel: v = u·a-basis + [x, ζ] with ζ ∈ k⁺, and subtract
    (ζ, [x,ζ]) to land in g × a."""
    alg = rd.algebra
    G = alg.inner_product
    u = rd.a_basis @ G @ v
    v_perp = v - u @ rd.a_basis
    kplus = rd.k_plus_basis()
    if kplus.shape[0]:
        w_vec = rd.a_point(x)
        A = alg.ad(w_vec) @ kplus.T            # N × dim k⁺, maps ζ-coords to [x, ζ]
        coef, *_ = np.linalg.lstsq(A, v_perp, rcond=None)
        resid = float(np.max(np.abs(A @ coef - v_perp)))
        if resid > 1e-9 * max(1.0, float(np.max(np.abs(v_perp)))):
            raise NumericalError(f"kernel reduction failed (residual {resid:.3e})")
        zeta = coef @ kplus
    else:
        zeta = np.zeros(alg.dim, dtype=complex)
        if float(np.max(np.abs(v_perp))) > 1e-10:
            raise NumericalError("m-component outside a with trivial k⁺")
    return eta - zeta, u


def s_function(a_fn, x: np.ndarray, xi_basis: np.ndarray | None = None) -> complex:
    """The invariant determinant S̃(e, x) = det ω̃(Y^{ξ_j}, conj Y^{ξ_k}).

    The Y fields are evaluated by the Lie-algebra layer; their m-components
    leave the Cartan directions, so each value is reduced modulo the
    projection-kernel directions (ζ^l, [x, ζ]) before pairing with the
    exact-form expression of ω̃.  Constancy of |S| over the chamber is the
    Ricci-flatness criterion; it is an independent route to
    det w_H · det w_*.
    """
    rd = a_fn.root_data
    x = _require_chamber(rd, np.asarray(x, dtype=float))
    if xi_basis is None:
        xi_basis = np.vstack([rd.a_basis, rd.m_plus_basis()])
    w_vec = rd.a_point(x)
    reduced = []
    for xi in xi_basis:
        val = y_field(rd.pair, xi, w_vec)
        eta, u = _reduce_mod_kernel(rd, x, val.g_component, val.m_component)
        reduced.append((eta, u))
    form = omega_tilde(a_fn, x)
    n = len(reduced)
    mat = np.zeros((n, n), dtype=complex)
    for i, vi in enumerate(reduced):
        for j, vj in enumerate(reduced):
            conj_vj = (np.conj(vj[0]), np.conj(vj[1]))
            mat[i, j] = form(vi, conj_vj)
    return complex(np.linalg.det(mat))


def chamber_ray_grid(
    rd: RestrictedRootData,
    count: int = 64,
    *,
    lambda_min: float = 1e-2,
    lambda_max: float = 1.5,
    direction: np.ndarray | None = None,
) -> list[np.ndarray]:
    """Log-spaced points along a chamber ray, staying a margin away from the
    chamber wall (min λ' = lambda_min) and inside the guarded spectral
    domain of the Y fields (max λ' = lambda_max < π/2)."""
    if count < 2:
        raise InputError("grid needs at least 2 points")
    if direction is None:
        direction = rd.w_reg_coords
    direction = np.asarray(direction, dtype=float)
    lam = rd.lambda_values(direction)
    if np.any(lam <= 0):
        raise ChamberError("grid direction is not in the Weyl chamber")
    t_lo = lambda_min / float(np.min(lam))
    t_hi = lambda_max / float(np.max(lam))
    if t_lo >= t_hi:
        raise InputError("empty grid window: lambda_min too large for lambda_max")
    ts = np.geomspace(t_lo, t_hi, count)
    return [t * direction for t in ts]
