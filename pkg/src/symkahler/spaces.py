"""Built-in compact symmetric pairs and group-membership predicates.

Covers the round spheres S^n = SO(n+1)/SO(n), the spaces SU(n)/SO(n)
(realified so that all basis matrices are real), direct products of pairs,
and a generic entry path from a structure-constant table (adjoint
representation as matrix basis).
"""

from __future__ import annotations

import json
from typing import Callable

import numpy as np

from .errors import ConfigError, InputError
from .liealg import MatrixLieAlgebra, SymmetricPair

__all__ = [
    "so_algebra",
    "sphere_pair",
    "su_so_pair",
    "product_pair",
    "pair_from_structure_constants",
    "load_custom_pair",
    "pair_from_name",
    "sphere_k_membership",
    "su_so_k_membership",
]


def _sigma_from_matrix_map(algebra: MatrixLieAlgebra, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Coefficient matrix of an involution given by its action on matrices."""
    cols = [algebra.coeffs(fn(e)) for e in algebra.basis]
    return np.array(cols).T


def so_algebra(n: int, *, scale: float = 1.0) -> MatrixLieAlgebra:
    """so(n) with basis E_ij - E_ji (i<j), orthonormal for the -1/2 trace form."""
    if n < 2:
        raise InputError("so(n) needs n >= 2")
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j] = 1.0
            m[j, i] = -1.0
            basis.append(m)
    return MatrixLieAlgebra(basis, scale=scale, name=f"so({n})")


def sphere_pair(n: int, *, scale: float = 1.0) -> SymmetricPair:
    """The round sphere S^n = SO(n+1)/SO(n).

    The involution is conjugation by diag(-1, 1, ..., 1); k is the so(n)
    block fixing the first coordinate axis and m is its orthogonal
    complement (first row/column).
    """
    if n < 2:
        raise InputError("sphere(n) needs n >= 2")
    alg = so_algebra(n + 1, scale=scale)
    s = np.diag([-1.0] + [1.0] * n)
    sigma = _sigma_from_matrix_map(alg, lambda a: s @ a @ s)
    return SymmetricPair(alg, sigma, name=f"sphere({n})")


def _realify(z: np.ndarray) -> np.ndarray:
    """Complex n×n matrix as a real 2n×2n one: A + iB -> [[A, -B], [B, A]]."""
    a, b = z.real, z.imag
    return np.block([[a, -b], [b, a]])


def _unrealify(m: np.ndarray) -> np.ndarray:
    n = m.shape[0] // 2
    return m[:n, :n] + 1j * m[n:, :n]


def su_algebra_realified(n: int, *, scale: float = 1.0) -> MatrixLieAlgebra:
    """su(n) (traceless skew-Hermitian) as real 2n×2n matrices."""
    if n < 2:
        raise InputError("su(n) needs n >= 2")
    basis = []
    for j in range(n - 1):
        d = np.zeros((n, n), dtype=complex)
        d[j, j] = 1j
        d[j + 1, j + 1] = -1j
        basis.append(_realify(d))
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = -1.0
            basis.append(_realify(m))
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = 1j
            m[k, j] = 1j
            basis.append(_realify(m))
    return MatrixLieAlgebra(basis, scale=scale, name=f"su({n})")


def su_so_pair(n: int, *, scale: float = 1.0) -> SymmetricPair:
    """SU(n)/SO(n): the involution is complex conjugation, k = so(n) and
    m = i·(real symmetric traceless), all in the realified picture."""
    alg = su_algebra_realified(n, scale=scale)
    m = alg.basis[0].shape[0] // 2
    s = np.block(
        [[np.eye(m), np.zeros((m, m))], [np.zeros((m, m)), -np.eye(m)]]
    )
    sigma = _sigma_from_matrix_map(alg, lambda a: s @ a @ s)
    return SymmetricPair(alg, sigma, name=f"su_so({n})")


def product_pair(p1: SymmetricPair, p2: SymmetricPair, *, scale: float = 1.0) -> SymmetricPair:
    """Direct product of two symmetric pairs via block-diagonal embedding."""
    a1, a2 = p1.algebra, p2.algebra
    d1 = a1.basis[0].shape[0]
    d2 = a2.basis[0].shape[0]

    def emb1(m):
        out = np.zeros((d1 + d2, d1 + d2))
        out[:d1, :d1] = m
        return out

    def emb2(m):
        out = np.zeros((d1 + d2, d1 + d2))
        out[d1:, d1:] = m
        return out

    basis = [emb1(a1.matrix(v)) for v in np.eye(a1.dim)] + [
        emb2(a2.matrix(v)) for v in np.eye(a2.dim)
    ]
    alg = MatrixLieAlgebra(basis, scale=scale, name=f"{p1.name}x{p2.name}")
    sigma = np.zeros((alg.dim, alg.dim))
    sigma[: a1.dim, : a1.dim] = p1.sigma
    sigma[a1.dim:, a1.dim:] = p2.sigma
    return SymmetricPair(alg, sigma, name=f"{p1.name}x{p2.name}")


def pair_from_structure_constants(
    c: np.ndarray, sigma: np.ndarray, *, scale: float = 1.0, name: str = "custom"
) -> SymmetricPair:
    """Build a pair from a bracket table, using ad as the matrix basis.

    The adjoint representation is faithful for compact semisimple algebras,
    which is the intended input class.  ``sigma`` acts on coefficients.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if c.shape != (n, n, n):
        raise InputError("structure constants must be a rank-3 cube")
    # ad(e_i)[k, j] = c^k_{ij}
    ad_basis = [c[:, i, :] for i in range(n)]
    alg = MatrixLieAlgebra(ad_basis, scale=scale, name=name)
    return SymmetricPair(alg, np.asarray(sigma, dtype=float), name=name)


def load_custom_pair(path: str) -> SymmetricPair:
    """Read {"structure_constants": [[[...]]], "sigma": [[...]]} from JSON."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        c = np.array(data["structure_constants"], dtype=float)
        sigma = np.array(data["sigma"], dtype=float)
    except KeyError as exc:
        raise ConfigError(f"custom space file missing key: {exc}") from exc
    return pair_from_structure_constants(c, sigma, name=data.get("name", "custom"))


def sphere_k_membership(n: int, tol: float = 1e-9) -> Callable[[np.ndarray], bool]:
    """Membership test for K = SO(n) ⊂ SO(n+1) as stabiliser of e_1."""

    def member(g: np.ndarray) -> bool:
        g = np.asarray(g)
        if g.shape != (n + 1, n + 1):
            return False
        if np.max(np.abs(g.T @ g - np.eye(n + 1))) > tol:
            return False
        e1 = np.zeros(n + 1)
        e1[0] = 1.0
        return bool(np.max(np.abs(g @ e1 - e1)) <= tol)

    return member


def su_so_k_membership(n: int, tol: float = 1e-9) -> Callable[[np.ndarray], bool]:
    """Membership test for K = SO(n) ⊂ SU(n) on realified 2n×2n matrices."""

    def member(g: np.ndarray) -> bool:
        g = np.asarray(g)
        if g.shape != (2 * n, 2 * n):
            return False
        z = _unrealify(g)
        if np.max(np.abs(z.imag)) > tol:
            return False
        x = z.real
        if np.max(np.abs(x.T @ x - np.eye(n))) > tol:
            return False
        return bool(abs(np.linalg.det(x) - 1.0) <= max(tol, 1e-9) * 10)

    return member


def pair_from_name(space: str, *, scale: float = 1.0):
    """Parse "sphere:n", "su_so:n" or "custom:path" into (pair, k_membership).

    Custom spaces have no group-level membership test; the root machinery
    then falls back to its connected-K default.
    """
    kind, _, arg = space.partition(":")
    if kind == "sphere":
        try:
            n = int(arg)
        except ValueError:
            raise ConfigError(f"bad sphere dimension {arg!r}") from None
        return sphere_pair(n, scale=scale), sphere_k_membership(n)
    if kind == "su_so":
        try:
            n = int(arg)
        except ValueError:
            raise ConfigError(f"bad su_so size {arg!r}") from None
        return su_so_pair(n, scale=scale), su_so_k_membership(n)
    if kind == "custom":
        if not arg:
            raise ConfigError("custom space needs a file path: custom:<path>")
        return load_custom_pair(arg), None
    raise ConfigError(f"unknown space {space!r} (expected sphere:n, su_so:n, custom:path)")
