"""Certificate polynomial built from an existence solution u.

A positive verdict is equivalent to existence of a degree-2m combination Q
of the orthonormal polynomials with integral(P_gamma P_beta Q) = delta for
all degree-m pairs.  With u solving a0 + A2m u = 0 that identity holds for
Q = -u^T P_2m; the `sign` flag also exposes the +u convention, under which
the pairing instead returns -I.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cubature import CubatureRule
from .indexing import GlexTable, dim_homog, dim_total
from .measures import MomentSequence
from .ortho import OrthoBasis, eval_P, product_coeffs


@dataclass(frozen=True, eq=False)
class CertificatePolynomial:
    n: int
    m: int
    sign: int
    u: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)  # monomial basis, Glex ranks up to s_2m
    table: GlexTable = field(repr=False)


@dataclass(frozen=True)
class RemarkReport:
    """Deviations of the four identities tying Q to the cubature rule."""

    u_from_rule: float  # u vs the weighted top-degree basis values at the nodes
    low_degree: float  # L_y(P_alpha Q) for |alpha| < 2m (must vanish)
    top_degree: float  # L_y(P_alpha Q) vs sign * u_alpha for |alpha| = 2m
    mean: float  # integral of Q itself (must vanish)


def build_Q(basis: OrthoBasis, u: np.ndarray, sign: int = -1) -> CertificatePolynomial:
    """Monomial coefficients of sign * u^T P_2m (degree-2m block of the basis)."""
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    if basis.d % 2 != 0:
        raise ValueError("basis degree must be even (2m)")
    m = basis.d // 2
    r2m = dim_homog(basis.n, 2 * m)
    u = np.asarray(u, dtype=float)
    if u.shape != (r2m,):
        raise ValueError(f"u must have length r_2m = {r2m}")
    coeffs = sign * (u @ basis.coeffs[basis.block(2 * m)])
    return CertificatePolynomial(basis.n, m, sign, u, coeffs, basis.table)


def _pair_with_moments(
    y: MomentSequence, basis: OrthoBasis, gamma, beta, q: CertificatePolynomial
) -> float:
    """L_y(P_gamma P_beta Q) straight from monomial coefficients and raw moments."""
    prod = product_coeffs(basis, gamma, beta)
    t = basis.table
    val = 0.0
    for pos, qc in enumerate(q.coeffs):
        if qc == 0.0:
            continue
        eq = t.indices[pos]
        val += qc * sum(pc * y.value(tuple(a + b for a, b in zip(e, eq))) for e, pc in prod.items())
    return val


def verify_corollary(
    y: MomentSequence, basis: OrthoBasis, q: CertificatePolynomial, m: int
) -> float:
    """Max deviation of L_y(P_gamma P_beta Q) from the identity matrix."""
    if y.d_max < 4 * m:
        raise ValueError(f"corollary check needs moments to degree {4 * m}, have {y.d_max}")
    block = basis.table.indices[basis.block(m)]
    rm = len(block)
    g = np.empty((rm, rm))
    for i, gamma in enumerate(block):
        for j in range(i, rm):
            g[i, j] = g[j, i] = _pair_with_moments(y, basis, gamma, block[j], q)
    return float(np.abs(g - np.eye(rm)).max())


def verify_remark(
    y: MomentSequence,
    basis: OrthoBasis,
    q: CertificatePolynomial,
    m: int,
    rule: CubatureRule,
) -> RemarkReport:
    """Check the rule/certificate identities; all deviations should be ~0."""
    w_prob = rule.weights / rule.scale
    u_rule = sum(
        w * eval_P(basis, 2 * m, x) for w, x in zip(w_prob, rule.nodes, strict=True)
    )
    dev_u = float(np.abs(u_rule - q.u).max())
    t = basis.table
    s_lo = dim_total(y.n, 2 * m - 1)
    dev_low = 0.0
    for alpha in t.indices[:s_lo]:
        row = basis.coeffs[t.rank(alpha)]
        val = 0.0
        for pos_a, ca in enumerate(row):
            if ca == 0.0:
                continue
            ea = t.indices[pos_a]
            for pos_q, cq in enumerate(q.coeffs):
                if cq == 0.0:
                    continue
                val += ca * cq * y.value(tuple(a + b for a, b in zip(ea, t.indices[pos_q])))
        dev_low = max(dev_low, abs(val))
    # |alpha| = 2m slice: orthonormality turns the pairing into sign * u_alpha.
    dev_top = 0.0
    q_in_basis = q.sign * q.u
    for idx, alpha in enumerate(t.indices[basis.block(2 * m)]):
        row = basis.coeffs[t.rank(alpha)]
        val = 0.0
        for pos_a, ca in enumerate(row):
            if ca == 0.0:
                continue
            ea = t.indices[pos_a]
            for pos_q, cq in enumerate(q.coeffs):
                if cq == 0.0:
                    continue
                val += ca * cq * y.value(tuple(a + b for a, b in zip(ea, t.indices[pos_q])))
        dev_top = max(dev_top, abs(val - q_in_basis[idx]))
    mean = float(sum(cq * y.value(t.indices[pos]) for pos, cq in enumerate(q.coeffs) if cq))
    return RemarkReport(dev_u, dev_low, dev_top, abs(mean))
