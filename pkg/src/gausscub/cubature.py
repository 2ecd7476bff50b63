"""Rule construction: moment completion, node extraction, weights, checks.

Two independent routes are kept side by side.  The flat-extension route
completes the degree-2m moments from the existence solution u and checks the
rank collapse of the completed moment matrix.  The multiplication-operator
route compresses coordinate multiplication to the degree-(m-1) orthonormal
basis; pairwise commutation of the n operators is the classical existence
criterion, and their joint eigenvalues are the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular

from .indexing import add, dim_homog, dim_total, glex_enumerate
from .measures import MomentFormatError, MomentSequence
from .ortho import OrthoBasis, eval_monomials, eval_P, gram_in_ortho_basis

DEFAULT_SEED = 7


class DegenerateSpectrumError(Exception):
    """Joint diagonalization kept hitting eigenvalue collisions."""


@dataclass(frozen=True, eq=False)
class MultiplicationOperators:
    """Coordinate multiplication compressed to the degree-(m-1) basis."""

    n: int
    m: int
    matrices: tuple[np.ndarray, ...] = field(repr=False)  # each s_{m-1} x s_{m-1}


@dataclass(frozen=True)
class FlatnessReport:
    flat: bool
    rank: int
    block_norm: float
    min_eigenvalue: float


@dataclass(frozen=True)
class ExactnessReport:
    max_error: float
    node_residual: float
    min_weight: float
    inside_support: bool | None  # None when no box support is declared


@dataclass(frozen=True, eq=False)
class CubatureRule:
    n: int
    m: int
    nodes: np.ndarray = field(repr=False)  # (s_{m-1}, n)
    weights: np.ndarray = field(repr=False)  # rescaled by the measure mass
    precision: int
    scale: float
    report: ExactnessReport | None = None


def complete_moments(y: MomentSequence, basis: OrthoBasis, u: np.ndarray, m: int) -> MomentSequence:
    """Extend y to degree 2m so the top orthonormal block has moments u.

    The degree-2m raw moments solve a triangular system in the diagonal
    block of the change-of-basis matrix; lower degrees are copied verbatim.
    """
    if basis.d < 2 * m:
        raise ValueError(f"basis built to degree {basis.d}, need {2 * m}")
    r2m = dim_homog(y.n, 2 * m)
    u = np.asarray(u, dtype=float)
    if u.shape != (r2m,):
        raise ValueError(f"u must have length r_2m = {r2m}")
    t = basis.table
    s_lo = dim_total(y.n, 2 * m - 1)
    s_hi = dim_total(y.n, 2 * m)
    rows = basis.coeffs[s_lo:s_hi, :]
    s2m = rows[:, s_lo:]
    theta = rows[:, :s_lo]
    y_low = np.array([y.values[a] for a in t.indices[:s_lo]])
    if np.abs(np.diag(s2m)).min() == 0.0:
        raise ValueError("degenerate basis: singular top-degree block")
    x2m = solve_triangular(s2m, u - theta @ y_low, lower=True)
    values = {a: y.values[a] for a in t.indices[:s_lo]}
    for alpha, v in zip(t.indices[s_lo:s_hi], x2m, strict=True):
        values[alpha] = float(v)
    z = MomentSequence(y.n, 2 * m, values, normalized=y.normalized, scale=y.scale)
    vec = np.zeros(len(t))  # rows are zero beyond rank s_hi, so padding is harmless
    vec[:s_hi] = [values[a] for a in t.indices[:s_hi]]
    check = rows @ vec
    if np.abs(check - u).max() > 1e-9 * max(1.0, np.abs(u).max()):
        raise RuntimeError("moment completion failed the consistency check against u")
    return z


def flatness_check(
    z: MomentSequence, basis: OrthoBasis, m: int, tol: float = 1e-8
) -> FlatnessReport:
    """Check the rank collapse that certifies an atomic representing measure.

    The completed moment matrix, in the orthonormal basis, must be (near)
    positive semidefinite with a vanishing degree-m diagonal block; its
    numerical rank is then s_{m-1}.
    """
    g = gram_in_ortho_basis(z, basis, m).array
    s1 = dim_total(z.n, m - 1)
    block = g[s1:, s1:]
    block_norm = float(np.abs(block).max()) if block.size else 0.0
    eigs = np.linalg.eigvalsh(g)
    min_eig = float(eigs.min())
    scale = max(1.0, float(eigs.max()))
    rank = int(np.sum(eigs > tol * scale))
    flat = block_norm <= tol * scale and min_eig >= -tol * scale
    return FlatnessReport(flat, rank, block_norm, min_eig)


def multiplication_operators(y: MomentSequence, basis: OrthoBasis, m: int) -> MultiplicationOperators:
    """N_i[beta, alpha] = L_y(x_i P_alpha P_beta) over degrees <= m-1.

    Only moments to degree 2m-1 enter; the operators are symmetric because
    coordinate multiplication is self-adjoint for the measure.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if y.d_max < 2 * m - 1:
        raise ValueError(f"operators at level m={m} need moments to {2 * m - 1}, have {y.d_max}")
    if basis.d < m - 1:
        raise ValueError(f"basis built to degree {basis.d}, need {m - 1}")
    s1 = dim_total(y.n, m - 1)
    t = basis.table
    s = basis.coeffs[:s1, :s1]
    mats = []
    for i in range(y.n):
        ei = tuple(1 if j == i else 0 for j in range(y.n))
        raw = np.empty((s1, s1))
        for a in range(s1):
            for b in range(a, s1):
                raw[a, b] = raw[b, a] = y.values[add(add(t.indices[a], t.indices[b]), ei)]
        ni = s @ raw @ s.T
        mats.append(0.5 * (ni + ni.T))
    return MultiplicationOperators(y.n, m, tuple(mats))


def commutation_defect(ops: MultiplicationOperators) -> float:
    """Max entry of any pairwise commutator; 0 means the criterion holds."""
    defect = 0.0
    for i in range(ops.n):
        for j in range(i + 1, ops.n):
            c = ops.matrices[i] @ ops.matrices[j] - ops.matrices[j] @ ops.matrices[i]
            defect = max(defect, float(np.abs(c).max()))
    return defect


def _operator_scale(ops: MultiplicationOperators) -> float:
    return max(1.0, max(float(np.abs(mat).max()) for mat in ops.matrices))


def extract_nodes(
    ops: MultiplicationOperators,
    tol: float = 1e-8,
    seed: int = DEFAULT_SEED,
    max_attempts: int = 5,
) -> np.ndarray:
    """Joint eigenvalues of the commuting operators, one node per eigenvector.

    Diagonalizes a random convex combination of the operators; a clustered
    spectrum triggers a re-draw of the combination (bounded attempts).
    Nodes are sorted lexicographically for determinism.
    """
    defect = commutation_defect(ops)
    if defect > tol * _operator_scale(ops):
        raise ValueError(
            f"operators do not commute (defect {defect:.3e}); no Gaussian cubature"
        )
    rng = np.random.default_rng(seed)
    size = ops.matrices[0].shape[0]
    for _ in range(max_attempts):
        c = rng.random(ops.n)
        c /= c.sum()
        a = sum(ci * ni for ci, ni in zip(c, ops.matrices))
        evals, vecs = np.linalg.eigh(a)
        spread = max(1.0, float(evals.max() - evals.min()))
        if size > 1 and np.diff(evals).min() < 1e-7 * spread:
            continue
        nodes = np.empty((size, ops.n))
        for k in range(size):
            v = vecs[:, k]
            for i in range(ops.n):
                nodes[k, i] = v @ ops.matrices[i] @ v
        order = np.lexsort(tuple(nodes[:, i] for i in range(ops.n - 1, -1, -1)))
        return nodes[order]
    raise DegenerateSpectrumError(
        f"eigenvalue collision persisted across {max_attempts} random combinations"
    )


def compute_weights(
    y: MomentSequence,
    basis: OrthoBasis,
    nodes: np.ndarray,
    positivity_tol: float = 1e-10,
) -> np.ndarray:
    """Solve the square interpolation system for the weights, rescale by mass.

    In the orthonormal basis the right-hand side is the first unit vector
    (the rule must reproduce L_y(P_alpha) = delta_{alpha=0}); every weight
    must be strictly positive for a Gaussian rule.
    """
    nodes = np.asarray(nodes, dtype=float)
    s1 = nodes.shape[0]
    vand = np.empty((s1, s1))
    for k in range(s1):
        mono = eval_monomials(basis.table, nodes[k])
        vand[:, k] = basis.coeffs[:s1, :s1] @ mono[:s1]
    rhs = np.zeros(s1)
    rhs[0] = 1.0
    try:
        gamma = np.linalg.solve(vand, rhs)
    except np.linalg.LinAlgError:
        raise ValueError("singular interpolation matrix: nodes are not distinct")
    if gamma.min() <= positivity_tol:
        raise ValueError(
            f"non-positive weight {gamma.min():.3e}: not a Gaussian rule"
        )
    return gamma * y.scale


def verify_exactness(
    rule: CubatureRule,
    y: MomentSequence,
    basis: OrthoBasis,
    box: tuple[float, float] | None = None,
) -> ExactnessReport:
    """Report the worst monomial error up to degree 2m-1 and node residuals."""
    table = glex_enumerate(y.n, 2 * rule.m - 1)
    max_err = 0.0
    for alpha in table.indices:
        approx = float(np.sum(rule.weights * np.prod(rule.nodes ** np.array(alpha), axis=1)))
        max_err = max(max_err, abs(approx - y.value(alpha) * y.scale))
    node_res = 0.0
    for x in rule.nodes:
        node_res = max(node_res, float(np.abs(eval_P(basis, rule.m, x)).max()))
    inside = None
    if box is not None:
        lo, hi = box
        inside = bool(np.all(rule.nodes > lo) and np.all(rule.nodes < hi))
    return ExactnessReport(max_err, node_res, float(rule.weights.min()), inside)


def build_rule(
    y: MomentSequence,
    basis: OrthoBasis,
    m: int,
    commutation_tol: float = 1e-8,
    seed: int = DEFAULT_SEED,
    box: tuple[float, float] | None = None,
) -> CubatureRule:
    """Nodes + weights + verification for a measure passing the existence test."""
    ops = multiplication_operators(y, basis, m)
    nodes = extract_nodes(ops, tol=commutation_tol, seed=seed)
    weights = compute_weights(y, basis, nodes)
    rule = CubatureRule(y.n, m, nodes, weights, precision=2 * m - 1, scale=y.scale)
    return replace(rule, report=verify_exactness(rule, y, basis, box=box))


# ---------------------------------------------------------------------------
# Rule file format: a header, one `x1 ... xn : weight` record per node in
# hex-float precision, and a trailing verification block in comments.


def store_rule(rule: CubatureRule, path) -> None:
    lines = [
        f"n = {rule.n}",
        f"m = {rule.m}",
        f"precision = {rule.precision}",
        f"scale = {rule.scale.hex()}",
    ]
    for x, w in zip(rule.nodes, rule.weights, strict=True):
        coords = " ".join(float(c).hex() for c in x)
        lines.append(f"{coords} : {float(w).hex()}")
    if rule.report is not None:
        lines.append(f"# max_exactness_error = {rule.report.max_error!r}")
        lines.append(f"# node_residual = {rule.report.node_residual!r}")
        lines.append(f"# min_weight = {rule.report.min_weight!r}")
        lines.append(f"# inside_support = {rule.report.inside_support}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_rule(path) -> CubatureRule:
    header: dict[str, str] = {}
    records: list[tuple[list[float], float]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" in line:
                left, _, right = line.partition(":")
                try:
                    coords = [float.fromhex(tok) for tok in left.split()]
                    weight = float.fromhex(right.strip())
                except ValueError:
                    raise MomentFormatError(f"line {lineno}: bad rule record {line!r}")
                records.append((coords, weight))
            elif "=" in line:
                key, _, val = line.partition("=")
                header[key.strip()] = val.strip()
            else:
                raise MomentFormatError(f"line {lineno}: unparseable line {line!r}")
    for key in ("n", "m", "precision", "scale"):
        if key not in header:
            raise MomentFormatError(f"missing rule header field {key!r}")
    try:
        n = int(header["n"])
        m = int(header["m"])
        precision = int(header["precision"])
        scale = float.fromhex(header["scale"])
    except ValueError:
        raise MomentFormatError("malformed rule header")
    expected = dim_total(n, m - 1)
    if len(records) != expected:
        raise MomentFormatError(f"rule has {len(records)} nodes, expected s_(m-1) = {expected}")
    for coords, _ in records:
        if len(coords) != n:
            raise MomentFormatError("node dimension mismatch in rule file")
    nodes = np.array([c for c, _ in records])
    weights = np.array([w for _, w in records])
    return CubatureRule(n, m, nodes, weights, precision=precision, scale=scale)
