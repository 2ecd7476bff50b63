"""Orthonormal polynomial families for a moment sequence.

The family is represented by a lower-triangular coefficient matrix S over
the Glex monomial basis: row alpha holds the monomial coefficients of
P_alpha.  The main construction inverts the Cholesky factor of the moment
matrix, which is the unique family with unit norms, triangular support and
positive leading coefficients; the classical bordered-determinant formula
is kept as an independent cross-check oracle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .indexing import GlexTable, MultiIndex, add, dim_total, glex_enumerate
from .measures import MomentSequence, moment_matrix, psd_cholesky


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Coefficients of the orthonormal family up to degree d, Glex layout."""

    n: int
    d: int
    table: GlexTable
    coeffs: np.ndarray = field(repr=False)  # row alpha = P_alpha in monomial basis

    def block(self, m: int) -> slice:
        return self.table.block(m)

    def row(self, alpha: MultiIndex) -> np.ndarray:
        return self.coeffs[self.table.rank(alpha)]


@dataclass(frozen=True, eq=False)
class OrthoMomentMatrix:
    """Moment matrix of a sequence z expressed in the orthonormal basis."""

    d: int
    array: np.ndarray = field(repr=False)


def build_orthobasis(y: MomentSequence, d: int) -> OrthoBasis:
    """Orthonormalize the monomials up to degree d (needs moments to 2d)."""
    mm = moment_matrix(y, d)
    low = psd_cholesky(mm)
    s = solve_triangular(low, np.eye(low.shape[0]), lower=True)
    return OrthoBasis(y.n, d, mm.table, s)


def ortho_det_oracle(y: MomentSequence, sigma: MultiIndex) -> np.ndarray:
    """Bordered-determinant construction of P_sigma (cross-check only).

    Expands the determinant of the moment submatrix (rows strictly below
    sigma, columns up to sigma, a monomial row appended) by cofactors of the
    last row, then normalizes to unit norm and positive leading coefficient.
    Returns monomial coefficients over the ranks 0..rank(sigma).
    """
    sigma = tuple(sigma)
    d = sum(sigma)
    mm = moment_matrix(y, d)
    k = mm.table.rank(sigma)
    sub = mm.array[:k, : k + 1]
    coeff = np.empty(k + 1)
    for j in range(k + 1):
        cols = [c for c in range(k + 1) if c != j]
        coeff[j] = (-1.0) ** (k + j) * np.linalg.det(sub[:, cols])
    norm2 = coeff @ mm.array[: k + 1, : k + 1] @ coeff
    if norm2 <= 0:
        raise ValueError(f"degenerate moments: zero bordered determinant for sigma={sigma}")
    coeff /= np.sqrt(norm2)
    if coeff[k] < 0:
        coeff = -coeff
    return coeff


def eval_monomials(table: GlexTable, point) -> np.ndarray:
    """Values of every monomial in the table at a point."""
    x = np.asarray(point, dtype=float)
    exps = np.array(table.indices)
    return np.prod(x[None, :] ** exps, axis=1)


def eval_P(basis: OrthoBasis, m: int, point) -> np.ndarray:
    """Values of the degree-m block (P_alpha, |alpha| = m) at a point."""
    if m > basis.d:
        raise ValueError(f"basis built to degree {basis.d}, requested block {m}")
    mono = eval_monomials(basis.table, point)
    return basis.coeffs[basis.block(m)] @ mono


def product_coeffs(basis: OrthoBasis, gamma: MultiIndex, beta: MultiIndex) -> dict:
    """Monomial coefficients of P_gamma * P_beta, as exponent -> value."""
    t = basis.table
    s = basis.coeffs
    rg, rb = t.rank(gamma), t.rank(beta)
    prod: dict[MultiIndex, float] = defaultdict(float)
    for a in range(rg + 1):
        ca = s[rg, a]
        if ca == 0.0:
            continue
        ea = t.indices[a]
        for b in range(rb + 1):
            cb = s[rb, b]
            if cb == 0.0:
                continue
            prod[add(ea, t.indices[b])] += ca * cb
    return prod


def triple_product(
    y: MomentSequence,
    basis: OrthoBasis,
    gamma: MultiIndex,
    beta: MultiIndex,
    kappa: MultiIndex,
) -> float:
    """L_y(P_gamma P_beta P_kappa); needs moments to |gamma|+|beta|+|kappa|."""
    total = sum(gamma) + sum(beta) + sum(kappa)
    if y.d_max < total:
        raise ValueError(f"triple product needs moments to degree {total}, have {y.d_max}")
    t = basis.table
    s = basis.coeffs
    prod = product_coeffs(basis, gamma, beta)
    rk = t.rank(kappa)
    val = 0.0
    for c in range(rk + 1):
        cc = s[rk, c]
        if cc == 0.0:
            continue
        ec = t.indices[c]
        val += cc * sum(pc * y.values[add(e, ec)] for e, pc in prod.items())
    return val


def gram_in_ortho_basis(z: MomentSequence, basis: OrthoBasis, d: int) -> OrthoMomentMatrix:
    """S_d M_d(z) S_d^T: moment matrix of z in the orthonormal basis of y."""
    if d > basis.d:
        raise ValueError(f"basis built to degree {basis.d}, requested degree {d}")
    sd = dim_total(z.n, d)
    s = basis.coeffs[:sd, :sd]
    m = moment_matrix(z, d).array
    g = s @ m @ s.T
    return OrthoMomentMatrix(d, 0.5 * (g + g.T))
