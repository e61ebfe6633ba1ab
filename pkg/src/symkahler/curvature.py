"""Brute-force curvature verifier on a coordinate chart.

Independent of the analytic pipeline it checks: the metric comes in as a
black-box callable on chart coordinates and Christoffel symbols, Ricci
tensor and exterior derivatives are taken by central finite differences
with Richardson extrapolation (two step sizes, ratio 2).

For the tangent bundle of S² the chart is (u1, u2, u3, x) ↦
(exp(u1 X + u2 Y + u3 Z), x) with the metric pushed through the
left-trivialised differential of exp, (1 − e^{−ad_u})/ad_u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ChartError, InputError
from .sphere2 import S2FamilyParams, coframe_metric, f_prime, f_double_prime

__all__ = [
    "ChartMetric",
    "chart_metric_from_coframe",
    "christoffel",
    "ricci_tensor",
    "kahler_form_closedness",
    "so3_dexp",
    "round_sphere_chart",
    "constant_metric_chart",
]

_CHART_RADIUS = math.pi / 2


def so3_dexp(u: np.ndarray) -> np.ndarray:
    """(1 − e^{−ad_u})/ad_u on so(3) coefficients.

    With A = ad_u and θ = ‖u‖ (so A³ = −θ²A):
    D = I − ((1−cos θ)/θ²) A + ((θ − sin θ)/θ³) A².
    Small θ uses the series coefficients 1/2 − θ²/24 and 1/6 − θ²/120.
    """
    u = np.asarray(u, dtype=float)
    # ad_u in the (X, Y, Z) coefficient basis: columns are [u, e_j]
    a, b, c = u
    A = np.array(
        [
            [0.0, -c, b],
            [c, 0.0, -a],
            [-b, a, 0.0],
        ]
    )
    # check the column convention: [X,Y] = -Z, [X,Z] = Y, [Y,Z] = -X
    theta = float(np.linalg.norm(u))
    if theta < 1e-4:
        c1 = 0.5 - theta**2 / 24.0
        c2 = 1.0 / 6.0 - theta**2 / 120.0
    else:
        c1 = (1.0 - math.cos(theta)) / theta**2
        c2 = (theta - math.sin(theta)) / theta**3
    return np.eye(3) - c1 * A + c2 * A @ A


def _so3_ad(u: np.ndarray) -> np.ndarray:
    a, b, c = u
    # bracket table [X,Y]=-Z, [X,Z]=Y, [Z,Y]=X on coefficient triples
    return np.array(
        [
            [0.0, c, -b],
            [-c, 0.0, a],
            [b, -a, 0.0],
        ]
    )


@dataclass
class ChartMetric:
    """A metric as a callable on a box of chart coordinates."""

    dim: int
    metric_fn: Callable[[np.ndarray], np.ndarray]
    domain: list[tuple[float, float]]
    fd_step: float = 1e-3

    def __post_init__(self):
        if len(self.domain) != self.dim:
            raise InputError("domain box must have one interval per coordinate")

    def require_interior(self, coords: np.ndarray, margin: float) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise InputError(f"coords must have length {self.dim}")
        for c, (lo, hi) in zip(coords, self.domain):
            if not (lo + margin <= c <= hi - margin):
                raise ChartError(
                    f"coordinate {c:.6g} within {margin:.3g} of the chart edge [{lo:.6g}, {hi:.6g}]"
                )
        return coords

    def spot_check(self, points: Sequence[np.ndarray]) -> None:
        for pt in points:
            g = self.metric_fn(np.asarray(pt, dtype=float))
            if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
                raise ChartError("metric is not symmetric")
            if np.linalg.eigvalsh(g)[0] <= 0:
                raise ChartError("metric is not positive-definite on the domain box")


def chart_metric_from_coframe(
    params: S2FamilyParams,
    *,
    x_range: tuple[float, float] = (0.2, 1.6),
    fd_step: float = 1e-3,
    profile: tuple[Callable[[float], float], Callable[[float], float]] | None = None,
    right_translation: np.ndarray | None = None,
) -> ChartMetric:
    """Chart metric for the S² family: exponential coordinates on SO(3)
    (validity radius π/2) times the chamber coordinate.

    ``profile`` optionally replaces (f', f'') by arbitrary callables (for
    planted non-solutions); ``right_translation`` composes the chart with
    right translation by a fixed group element, which mixes the coframe by
    a constant rotation — a genuinely different chart of the same metric.
    """
    ad_rot = None
    if right_translation is not None:
        g0 = np.asarray(right_translation, dtype=float)
        # Ad_{g0^{-1}} on coefficients; for SO(3) matrices this is g0^{-1}
        # acting on the (X,Y,Z) axis vector, i.e. conjugation in coordinates.
        basis = [
            np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 0]]),
            np.array([[0.0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
            np.array([[0.0, 0, 0], [0, 0, 1], [0, -1, 0]]),
        ]
        g0_inv = np.linalg.inv(g0)

        def coeff(m):
            return np.array([-0.5 * np.trace(m @ e) for e in basis])

        ad_rot = np.array([coeff(g0_inv @ e @ g0) for e in basis]).T

    def metric_fn(coords: np.ndarray) -> np.ndarray:
        u = coords[:3]
        x = float(coords[3])
        if np.linalg.norm(u) >= _CHART_RADIUS:
            raise ChartError("‖u‖ beyond the exp-chart validity radius π/2")
        if profile is None:
            cf = coframe_metric(params, x).as_matrix()
        else:
            fp, fpp = profile[0](x), profile[1](x)
            ch, sh = math.cosh(x), math.sinh(x)
            cf = np.zeros((4, 4))
            cf[0, 0] = fpp
            cf[1, 1] = fp * ch / sh
            cf[2, 2] = fp * sh / ch
            cf[3, 3] = fpp
            cf[0, 2] = cf[2, 0] = -params.c_Z * sh / ch**2
            cf[1, 3] = cf[3, 1] = -params.c_Z / ch
        D = so3_dexp(u)
        if ad_rot is not None:
            D = ad_rot @ D
        B = np.zeros((4, 4))
        B[:3, :3] = D
        B[3, 3] = 1.0
        return B.T @ cf @ B

    r = _CHART_RADIUS / math.sqrt(3.0)
    domain = [(-r, r)] * 3 + [x_range]
    return ChartMetric(dim=4, metric_fn=metric_fn, domain=domain, fd_step=fd_step)


def christoffel(chart: ChartMetric, coords: np.ndarray, step: float) -> np.ndarray:
    """Γ^a_{bc} by central differences of the metric at the given step."""
    n = chart.dim
    g = chart.metric_fn(coords)
    ginv = np.linalg.inv(g)
    dg = np.zeros((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        dg[k] = (chart.metric_fn(coords + e) - chart.metric_fn(coords - e)) / (2.0 * step)
    gamma = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                s = 0.0
                for d in range(n):
                    s += ginv[a, d] * (dg[b][c, d] + dg[c][b, d] - dg[d][b, c])
                gamma[a, b, c] = 0.5 * s
    return gamma


def _ricci_once(chart: ChartMetric, coords: np.ndarray, step: float) -> np.ndarray:
    """Ric_{ij} = ∂_a Γ^a_{ij} − ∂_j Γ^a_{ai} + Γ^a_{ab}Γ^b_{ij} − Γ^a_{jb}Γ^b_{ai}
    with the same step inside and outside."""
    n = chart.dim
    gamma0 = christoffel(chart, coords, step)
    dgamma = np.zeros((n, n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        gp = christoffel(chart, coords + e, step)
        gm = christoffel(chart, coords - e, step)
        dgamma[k] = (gp - gm) / (2.0 * step)
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            v = 0.0
            for a in range(n):
                v += dgamma[a][a, i, j] - dgamma[j][a, a, i]
                for b in range(n):
                    v += gamma0[a, a, b] * gamma0[b, i, j] - gamma0[a, j, b] * gamma0[b, a, i]
            ric[i, j] = v
    return ric


def ricci_tensor(chart: ChartMetric, coords: np.ndarray, *, fd_step: float | None = None) -> np.ndarray:
    """Richardson-extrapolated Ricci tensor at interior coordinates."""
    h = chart.fd_step if fd_step is None else fd_step
    coords = chart.require_interior(coords, 2.0 * h)
    r1 = _ricci_once(chart, coords, h)
    r2 = _ricci_once(chart, coords, h / 2.0)
    return (4.0 * r2 - r1) / 3.0


def kahler_form_closedness(
    params: S2FamilyParams,
    coords: np.ndarray,
    *,
    step: float = 1e-4,
    perturbation: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """max |dω(e_i, e_j, e_k)| over coordinate triples, by central
    differences of the chart components of the two-form.

    The form is exact by construction, so the residual is pure truncation
    noise, O(step²).  ``perturbation`` adds a test two-form (to plant a
    non-closed defect)."""
    coords = np.asarray(coords, dtype=float)

    def omega_chart(c: np.ndarray) -> np.ndarray:
        u = c[:3]
        x = float(c[3])
        fp = f_prime(params, x)
        fpp = f_double_prime(params, x)
        ch = math.cosh(x)
        frame = np.zeros((4, 4))
        # ω = f' θ^Y∧θ^Z + (c_Z/cosh x) θ^X∧θ^Y + f'' dx∧θ^X
        #     − (c_Z sinh x/cosh²x) dx∧θ^Z
        frame[1, 2] = fp
        frame[0, 1] = params.c_Z / ch
        frame[3, 0] = fpp
        frame[3, 2] = -params.c_Z * math.sinh(x) / ch**2
        frame = frame - frame.T
        D = so3_dexp(u)
        B = np.zeros((4, 4))
        B[:3, :3] = D
        B[3, 3] = 1.0
        out = B.T @ frame @ B
        if perturbation is not None:
            out = out + perturbation(c)
        return out

    n = 4
    domega = np.zeros((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        domega[k] = (omega_chart(coords + e) - omega_chart(coords - e)) / (2.0 * step)
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                val = domega[i][j, k] + domega[j][k, i] + domega[k][i, j]
                worst = max(worst, abs(val))
    return worst


# -- test fixtures ------------------------------------------------------------


def constant_metric_chart(g: np.ndarray, *, size: float = 1.0) -> ChartMetric:
    """Flat fixture: a constant metric has vanishing curvature."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    return ChartMetric(
        dim=n,
        metric_fn=lambda c: g,
        domain=[(-size, size)] * n,
        fd_step=1e-3,
    )


def round_sphere_chart() -> ChartMetric:
    """Unit round two-sphere in polar coordinates: Ricci equals the metric."""

    def metric_fn(c: np.ndarray) -> np.ndarray:
        theta = float(c[0])
        return np.diag([1.0, math.sin(theta) ** 2])

    return ChartMetric(
        dim=2,
        metric_fn=metric_fn,
        domain=[(0.3, math.pi - 0.3), (-math.pi, math.pi)],
        fd_step=1e-3,
    )
