"""The explicit SO(3)-invariant family on the (punctured) tangent bundle of S².

Everything here is closed-form in the basis X, Y, Z of so(3) with
[X,Y] = -Z, [X,Z] = Y, [Z,Y] = X and the Cartan ray a = R·X, chamber
coordinate x > 0.  The generating vector-function is

    a(x) = f'(x) X + (c_Z/cosh x) Z       (+ (c_Y/sinh x) Y when exploring),
    f'(x) = sqrt(C sinh²x + c_Z² sinh²x cosh⁻²x + C_1),
    f''(x) f'(x) = (C + c_Z²/cosh⁴x + c_Y²/sinh⁴x) cosh x sinh x,

which is Kähler and Ricci-flat for C > 0, C_1 ≥ 0, c_Y = 0, extends over
the zero section iff C_1 = 0, is complete there, and at c_Z = 0 is the
diagonal Stenzel metric, i.e. the Eguchi-Hanson metric after
cosh x = (t/ℓ)².
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import (
    BoundaryError,
    DiagnosticError,
    DomainError,
    InputError,
    NumericalError,
)

__all__ = [
    "S2FamilyParams",
    "CoframeMetric",
    "ExtensionVerdict",
    "CompletenessProfile",
    "EHComparison",
    "Cor63Verdict",
    "f_prime",
    "f_double_prime",
    "w_matrix",
    "omega_eval",
    "coframe_metric",
    "completeness_profile",
    "hamiltonian_hx",
    "extension_at_zero",
    "eguchi_hanson_compare",
    "corollary_6_3_check",
    "delta_form_eval",
    "so3_bracket",
    "family_table",
    "s2_ansatz",
    "TABLE_COLUMNS",
]


@dataclass(frozen=True)
class S2FamilyParams:
    """Parameters (C, C_1, c_Z, c_Y) of the family; c_Y ≠ 0 only for
    exploration (the Ricci-flat family on the whole half-line needs c_Y = 0)."""

    C: float = 1.0
    C1: float = 0.0
    c_Z: float = 0.0
    c_Y: float = 0.0

    def __post_init__(self):
        if not self.C > 0:
            raise InputError("C must be positive")
        if self.C1 < 0:
            raise InputError("C1 must be nonnegative")

    @property
    def ricci_flat(self) -> bool:
        return self.c_Y == 0.0


def _sinhc(x: float) -> float:
    return math.sinh(x) / x if x != 0 else 1.0


def _tanhc(x: float) -> float:
    return math.tanh(x) / x if x != 0 else 1.0


def f_prime(p: S2FamilyParams, x: float) -> float:
    """f'(x) = sqrt(C sinh²x + c_Z² tanh²x + C_1 − c_Y²/sinh²x)."""
    if x < 0:
        raise BoundaryError("x must be nonnegative")
    if x == 0 and (p.C1 == 0 or p.c_Y != 0):
        raise BoundaryError("x = 0 is outside the domain unless C1 > 0 (and c_Y = 0)")
    val = p.C * math.sinh(x) ** 2 + p.c_Z**2 * math.tanh(x) ** 2 + p.C1
    if p.c_Y:
        val -= p.c_Y**2 / math.sinh(x) ** 2
    if val <= 0:
        raise BoundaryError(f"f'(x)² = {val:.6g} ≤ 0 at x = {x:.6g}")
    return math.sqrt(val)


def f_double_prime(p: S2FamilyParams, x: float) -> float:
    """f''(x) = (C + c_Z²/cosh⁴x + c_Y²/sinh⁴x)·cosh x·sinh x / f'(x).

    For C_1 = 0 the quotient is evaluated in ratio form (sinh x/x etc.), so
    there is no 0/0 near the puncture and f'' extends analytically with
    f''(0⁺) = sqrt(C + c_Z²).
    """
    if x < 0:
        raise BoundaryError("x must be nonnegative")
    if p.c_Y == 0 and p.C1 == 0:
        if x == 0:
            raise BoundaryError("x = 0 is outside the domain when C1 = 0")
        ch = math.cosh(x)
        shc = _sinhc(x)
        num = p.C * shc * ch + p.c_Z**2 * shc / ch**3
        den = math.sqrt(p.C * shc**2 + p.c_Z**2 * _tanhc(x) ** 2)
        return num / den
    fp = f_prime(p, x)
    rhs = p.C + p.c_Z**2 / math.cosh(x) ** 4
    if p.c_Y:
        rhs += p.c_Y**2 / math.sinh(x) ** 4
    return rhs * math.cosh(x) * math.sinh(x) / fp


def w_matrix(p: S2FamilyParams, x: float) -> np.ndarray:
    """The 2×2 Hermitian matrix field:

        [[ 2f''(x),                2(i c_Z/cosh²x − c_Y/sinh²x) ],
         [  conj,                  2f'(x)/(cosh x sinh x)       ]].
    """
    if x <= 0:
        raise BoundaryError("w_matrix needs x > 0")
    ch, sh = math.cosh(x), math.sinh(x)
    w12 = 2.0 * (1j * p.c_Z / ch**2 - p.c_Y / sh**2)
    return np.array(
        [
            [2.0 * f_double_prime(p, x), w12],
            [np.conj(w12), 2.0 * f_prime(p, x) / (ch * sh)],
        ],
        dtype=complex,
    )


def so3_bracket(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bracket on coefficient triples (X, Y, Z): [X,Y]=-Z, [X,Z]=Y, [Z,Y]=X."""
    u = np.asarray(u)
    v = np.asarray(v)
    return np.array(
        [
            -(u[1] * v[2] - u[2] * v[1]),
            u[0] * v[2] - u[2] * v[0],
            -(u[0] * v[1] - u[1] * v[0]),
        ]
    )


def _a_vector(p: S2FamilyParams, x: float) -> np.ndarray:
    a = np.zeros(3)
    a[0] = f_prime(p, x)
    a[2] = p.c_Z / math.cosh(x)
    if p.c_Y:
        a[1] = p.c_Y / math.sinh(x)
    return a


def _a_vector_prime(p: S2FamilyParams, x: float) -> np.ndarray:
    d = np.zeros(3)
    d[0] = f_double_prime(p, x)
    d[2] = -p.c_Z * math.sinh(x) / math.cosh(x) ** 2
    if p.c_Y:
        d[1] = -p.c_Y * math.cosh(x) / math.sinh(x) ** 2
    return d


def omega_eval(
    p: S2FamilyParams,
    x: float,
    v1: tuple[np.ndarray, float],
    v2: tuple[np.ndarray, float],
) -> float:
    """The two-form at (e, x) on pairs (ξ, t·∂/∂x), ξ ∈ so(3):

        ω((ξ₁,t₁),(ξ₂,t₂)) = t₁<a'(x),ξ₂> − t₂<a'(x),ξ₁> − <a(x),[ξ₁,ξ₂]>.
    """
    if x <= 0:
        raise BoundaryError("omega_eval needs x > 0")
    xi1, t1 = v1
    xi2, t2 = v2
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    a = _a_vector(p, x)
    ap = _a_vector_prime(p, x)
    return float(t1 * (ap @ xi2) - t2 * (ap @ xi1) - a @ so3_bracket(xi1, xi2))


@dataclass(frozen=True)
class CoframeMetric:
    """Quadratic-form coefficients of ds² in (dx, θ^X, θ^Y, θ^Z):

        ds² = g_xx dx² + g_XX (θ^X)² + g_YY (θ^Y)² + g_ZZ (θ^Z)²
              + 2 g_XZ θ^X θ^Z + 2 g_xY dx θ^Y.
    """

    g_xx: float
    g_XX: float
    g_YY: float
    g_ZZ: float
    g_XZ: float
    g_xY: float

    def as_matrix(self) -> np.ndarray:
        """Symmetric 4×4 matrix in the frame order (θ^X, θ^Y, θ^Z, dx)."""
        m = np.zeros((4, 4))
        m[0, 0] = self.g_XX
        m[1, 1] = self.g_YY
        m[2, 2] = self.g_ZZ
        m[3, 3] = self.g_xx
        m[0, 2] = m[2, 0] = self.g_XZ
        m[1, 3] = m[3, 1] = self.g_xY
        return m

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.as_matrix())[0])


def coframe_metric(p: S2FamilyParams, x: float) -> CoframeMetric:
    """Metric coefficients in the left-invariant coframe:

        g_xx = f'', g_XX = f'', g_YY = f' coth x, g_ZZ = f' tanh x,
        g_XZ = −c_Z sinh x/cosh²x, g_xY = −c_Z/cosh x.
    """
    if p.c_Y != 0:
        raise InputError("coframe coefficients are defined for the c_Y = 0 family")
    if x <= 0:
        raise BoundaryError("coframe_metric needs x > 0")
    fp = f_prime(p, x)
    fpp = f_double_prime(p, x)
    ch, sh = math.cosh(x), math.sinh(x)
    return CoframeMetric(
        g_xx=fpp,
        g_XX=fpp,
        g_YY=fp * ch / sh,
        g_ZZ=fp * sh / ch,
        g_XZ=-p.c_Z * sh / ch**2,
        g_xY=-p.c_Z / ch,
    )


def f_U(p: S2FamilyParams, x: float) -> float:
    """Length scale of the orbit-orthogonal unit field:
    f_U = (f' cosh³x / (f'' f' cosh³x − c_Z² sinh x))^{1/2}."""
    if x <= 0:
        raise BoundaryError("f_U needs x > 0")
    fp = f_prime(p, x)
    fpp = f_double_prime(p, x)
    ch, sh = math.cosh(x), math.sinh(x)
    den = fpp * fp * ch**3 - p.c_Z**2 * sh
    if den <= 0:
        raise DiagnosticError(f"f_U denominator {den:.6g} ≤ 0 at x = {x:.6g}")
    return math.sqrt(fp * ch**3 / den)


@dataclass
class CompletenessProfile:
    xs: np.ndarray
    f_U: np.ndarray
    h: np.ndarray
    asym_ratio: np.ndarray

    def rows(self) -> list[dict]:
        return [
            {"x": float(x), "f_U": float(f), "h": float(hh), "asym_ratio": float(r)}
            for x, f, hh, r in zip(self.xs, self.f_U, self.h, self.asym_ratio)
        ]


def completeness_profile(p: S2FamilyParams, b: float, x_max: float, n: int) -> CompletenessProfile:
    """h(x) = ∫_b^x ds/f_U(s) by adaptive quadrature (abs tol 1e-10), with
    the asymptotic ratio (1/f_U)/(sqrt(C) sinh x)^{1/2} per point."""
    if not (0 < b < x_max):
        raise InputError("need 0 < b < x_max")
    if n < 2:
        raise InputError("need at least 2 points")
    xs = np.linspace(b, x_max, n)
    fu = np.array([f_U(p, float(x)) for x in xs])
    h = np.zeros(n)
    for i in range(1, n):
        val, _ = quad(lambda s: 1.0 / f_U(p, s), xs[i - 1], xs[i], epsabs=1e-10, limit=200)
        h[i] = h[i - 1] + val
    ratio = (1.0 / fu) / np.sqrt(np.sqrt(p.C) * np.sinh(xs))
    return CompletenessProfile(xs=xs, f_U=fu, h=h, asym_ratio=ratio)


def hamiltonian_hx(p: S2FamilyParams, x: float) -> tuple[float, float]:
    """Coefficients (a_0, c_0) of the Hamiltonian field H^x = ((a_0 X + c_0 Z)^l, 0):

        c_0 = c_Z cosh²x/(f'' f' cosh³x − c_Z² sinh x),  a_0 = c_0 f' cosh x/c_Z,

    with the c_Z → 0 limit (a_0, c_0) = (1/f'', 0).  The identity
    ‖H^x‖ = f_U is verified internally.
    """
    if x <= 0:
        raise BoundaryError("hamiltonian_hx needs x > 0")
    fp = f_prime(p, x)
    fpp = f_double_prime(p, x)
    ch, sh = math.cosh(x), math.sinh(x)
    den = fpp * fp * ch**3 - p.c_Z**2 * sh
    if den <= 0:
        raise DiagnosticError(f"Hamiltonian denominator {den:.6g} ≤ 0 at x = {x:.6g}")
    if p.c_Z == 0:
        a0, c0 = 1.0 / fpp, 0.0
    else:
        c0 = p.c_Z * ch**2 / den
        a0 = c0 * fp * ch / p.c_Z
    norm_sq = c0**2 * fp * sh / ch - 2.0 * a0 * c0 * p.c_Z * sh / ch**2 + a0**2 * fpp
    fu = f_U(p, x)
    if abs(math.sqrt(norm_sq) - fu) > 1e-10 * max(1.0, fu):
        raise NumericalError("‖H^x‖ does not match f_U")
    return a0, c0


@dataclass(frozen=True)
class ExtensionVerdict:
    extends: bool
    limit_matrix: np.ndarray | None
    min_eigenvalue: float | None


def extension_at_zero(p: S2FamilyParams) -> ExtensionVerdict:
    """The metric extends over the zero section iff C_1 = 0 (f'(0⁺) = 0);
    the limit matrix field is then

        [[2 sqrt(C+c_Z²), 2i c_Z], [−2i c_Z, 2 sqrt(C+c_Z²)]],

    positive-definite with minimum eigenvalue 2(sqrt(C+c_Z²) − |c_Z|)."""
    if p.C1 != 0:
        return ExtensionVerdict(extends=False, limit_matrix=None, min_eigenvalue=None)
    d = 2.0 * math.sqrt(p.C + p.c_Z**2)
    lim = np.array([[d, 2j * p.c_Z], [-2j * p.c_Z, d]], dtype=complex)
    return ExtensionVerdict(
        extends=True,
        limit_matrix=lim,
        min_eigenvalue=2.0 * (math.sqrt(p.C + p.c_Z**2) - abs(p.c_Z)),
    )


@dataclass
class EHComparison:
    rows: list[dict]
    max_round_trip: float
    max_coefficient_deviation: float


def eguchi_hanson_compare(ell: float, sample_t: Sequence[float]) -> EHComparison:
    """Coefficient table of the diagonal metric (C=1, c_Z=0, C_1=0) after the
    change of variable cosh x = (t/ℓ)², plus internal consistency checks:
    the substitution round-trips and pulling the radial coefficient back
    through (dt/dx)² recovers cosh x.
    """
    if ell <= 0:
        raise InputError("ell must be positive")
    p = S2FamilyParams(C=1.0, C1=0.0, c_Z=0.0)
    rows = []
    max_rt = 0.0
    max_dev = 0.0
    for t in sample_t:
        t = float(t)
        if t <= ell:
            raise DomainError(f"t = {t:.6g} must exceed ell = {ell:.6g}")
        ch = (t / ell) ** 2
        x = math.acosh(ch)
        t_back = ell * math.sqrt(math.cosh(x))
        max_rt = max(max_rt, abs(t_back - t))
        sh = math.sinh(x)
        dx_dt = 2.0 * t / (ell**2 * sh)
        g_tt = ch * dx_dt**2
        cf = coframe_metric(p, x)
        # invert the substitution on the radial coefficient
        g_xx_back = g_tt / dx_dt**2
        max_dev = max(
            max_dev,
            abs(g_xx_back - cf.g_xx),
            abs(ch - cf.g_XX),
            abs(ch - cf.g_YY),
            abs(sh * math.tanh(x) - cf.g_ZZ),
        )
        rows.append(
            {
                "t": t,
                "x": x,
                "g_tt": g_tt,
                "g_XX": ch,
                "g_YY": ch,
                "g_ZZ": sh * math.tanh(x),
            }
        )
    return EHComparison(rows=rows, max_round_trip=max_rt, max_coefficient_deviation=max_dev)


@dataclass
class Cor63Verdict:
    passes: bool
    first_failure: float | None
    is_potential: bool


def corollary_6_3_check(
    p: S2FamilyParams,
    f_prime_callable: Callable[[float], float],
    grid: Sequence[float],
    f_double_prime_callable: Callable[[float], float] | None = None,
) -> Cor63Verdict:
    """Kähler conditions for a user profile f' with the (c_Z, c_Y) terms:

        f''(x) > 0  and  f''(x) f'(x)/(cosh x sinh x)
                           − c_Z²/cosh⁴x − c_Y²/sinh⁴x > 0.

    When both off-ray coefficients vanish, 2f is a potential function of
    the structure.
    """
    if f_double_prime_callable is None:
        step = 1e-5

        def f_double_prime_callable(x: float) -> float:
            def d(h):
                return (f_prime_callable(x + h) - f_prime_callable(x - h)) / (2 * h)

            return (4.0 * d(step / 2) - d(step)) / 3.0

    for x in grid:
        x = float(x)
        fp = f_prime_callable(x)
        fpp = f_double_prime_callable(x)
        expr = (
            fpp * fp / (math.cosh(x) * math.sinh(x))
            - p.c_Z**2 / math.cosh(x) ** 4
            - p.c_Y**2 / math.sinh(x) ** 4
        )
        if fpp <= 0 or expr <= 0:
            return Cor63Verdict(passes=False, first_failure=x, is_potential=False)
    return Cor63Verdict(
        passes=True, first_failure=None, is_potential=(p.c_Z == 0 and p.c_Y == 0)
    )


def delta_form_eval(
    p: S2FamilyParams,
    w: np.ndarray,
    v1: tuple[np.ndarray, np.ndarray],
    v2: tuple[np.ndarray, np.ndarray],
) -> float:
    """The extension of the two-form to all of G × (m \\ {0}): at (e, w),
    on pairs (ξ, u) with ξ ∈ so(3) and u ∈ m (tangent to the fibre),

        Δ = −<(f'(|w|)/|w|) w + (c_Z/cosh|w|) Z, [ξ₁,ξ₂]>
            + <(f'/|w|) u₁ + (f'/|w|)' (⟨w,u₁⟩/|w|) w, ξ₂>
            − <(f'/|w|) u₂ + (f'/|w|)' (⟨w,u₂⟩/|w|) w, ξ₁>
            − (c_Z sinh|w|/(|w| cosh²|w|)) (⟨u₁,w⟩⟨Z,ξ₂⟩ − ⟨u₂,w⟩⟨Z,ξ₁⟩
                                            + ⟨Z,[u₁,u₂]⟩).

    Its kernel contains the projection directions (ζ^l, [w, ζ]).
    """
    w = np.asarray(w, dtype=float)
    s = float(np.linalg.norm(w))
    if s == 0:
        raise BoundaryError("delta form needs w != 0")
    xi1, u1 = (np.asarray(a, dtype=float) for a in v1)
    xi2, u2 = (np.asarray(a, dtype=float) for a in v2)
    fp = f_prime(p, s)
    fpp = f_double_prime(p, s)
    ch, sh = math.cosh(s), math.sinh(s)
    z = np.array([0.0, 0.0, 1.0])
    a_vec = (fp / s) * w + (p.c_Z / ch) * z
    ratio_prime = fpp / s - fp / s**2

    def radial(u):
        return (fp / s) * u + ratio_prime * ((w @ u) / s) * w

    val = -a_vec @ so3_bracket(xi1, xi2)
    val += radial(u1) @ xi2 - radial(u2) @ xi1
    val -= (p.c_Z * sh / (s * ch**2)) * (
        (u1 @ w) * (z @ xi2) - (u2 @ w) * (z @ xi1) + z @ so3_bracket(u1, u2)
    )
    return float(val)


TABLE_COLUMNS = [
    "x",
    "f_prime",
    "f_double_prime",
    "w11",
    "abs_w12",
    "w22",
    "det_w",
    "g_xx",
    "g_XX",
    "g_YY",
    "g_ZZ",
    "g_XZ",
    "g_xY",
    "f_U",
    "h",
]


def family_table(p: S2FamilyParams, xs: Sequence[float]) -> list[dict]:
    """Plot table of the family along the chamber ray; h accumulates from
    the first grid point."""
    xs = [float(x) for x in xs]
    rows = []
    h = 0.0
    for i, x in enumerate(xs):
        if i > 0:
            val, _ = quad(lambda s: 1.0 / f_U(p, s), xs[i - 1], x, epsabs=1e-10, limit=200)
            h += val
        w = w_matrix(p, x)
        cf = coframe_metric(p, x) if p.c_Y == 0 else None
        det = float(np.real(w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]))
        rows.append(
            {
                "x": x,
                "f_prime": f_prime(p, x),
                "f_double_prime": f_double_prime(p, x),
                "w11": float(np.real(w[0, 0])),
                "abs_w12": float(np.abs(w[0, 1])),
                "w22": float(np.real(w[1, 1])),
                "det_w": det,
                "g_xx": cf.g_xx if cf else math.nan,
                "g_XX": cf.g_XX if cf else math.nan,
                "g_YY": cf.g_YY if cf else math.nan,
                "g_ZZ": cf.g_ZZ if cf else math.nan,
                "g_XZ": cf.g_XZ if cf else math.nan,
                "g_xY": cf.g_xY if cf else math.nan,
                "f_U": f_U(p, x),
                "h": h,
            }
        )
    return rows


def s2_ansatz(p: S2FamilyParams, root_data):
    """Bridge into the general machinery: the ansatz with gradient f'(x),
    Hessian f''(x) and the (c_Z, c_Y) coefficients expressed in the root
    basis of the given sphere(2) root data (robust to basis sign flips)."""
    from .kahler import AnsatzFunction

    if root_data.rank != 1 or len(root_data.roots) != 1:
        raise InputError("s2_ansatz needs rank-one root data with a single root")
    rt = root_data.roots[0]
    alg = root_data.algebra
    lam_unit = rt.lambda_prime[0]
    if abs(lam_unit - 1.0) > 1e-9:
        raise InputError("s2_ansatz expects the unit-speed chamber coordinate")
    z_vec = np.zeros(alg.dim)
    z_vec[2] = 1.0
    y_vec = np.zeros(alg.dim)
    y_vec[1] = 1.0
    c_k = {0: p.c_Z * float(alg.inner(z_vec, rt.zeta_basis[0]))}
    c_m = {0: p.c_Y * float(alg.inner(y_vec, rt.xi_basis[0]))}

    def grad(x):
        return np.array([f_prime(p, float(x[0]))])

    def hess(x):
        return np.array([[f_double_prime(p, float(x[0]))]])

    return AnsatzFunction(
        root_data=root_data, f_grad=grad, f_hess=hess, c_k=c_k, c_m=c_m
    )
