"""Multi-index combinatorics and the graded lexicographic (Glex) order.

Multi-indices are plain tuples of non-negative ints; the degree of an index
is the sum of its entries.  Every matrix and vector layout in the package is
fixed by the Glex rank defined here: lower total degree first, ties broken
so that a higher exponent on an earlier variable comes first (x1 heaviest).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

MultiIndex = tuple[int, ...]

# Counts are kept within signed 64-bit range so a desk-scale misuse fails
# loudly instead of silently allocating absurd tables.
_COUNT_MAX = 2**63 - 1


def dim_total(n: int, d: int) -> int:
    """Number of monomials of degree <= d in n variables, C(n+d, d)."""
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    c = comb(n + d, d)
    if c > _COUNT_MAX:
        raise OverflowError(f"monomial count C({n + d},{d}) exceeds 64-bit range")
    return c


def dim_homog(n: int, d: int) -> int:
    """Number of monomials of degree exactly d in n variables, C(n+d-1, d)."""
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    c = comb(n + d - 1, d)
    if c > _COUNT_MAX:
        raise OverflowError(f"monomial count C({n + d - 1},{d}) exceeds 64-bit range")
    return c


def pair_count(n: int, m: int) -> int:
    """Number of unordered pairs of degree-m monomials, r_m (r_m + 1) / 2."""
    r = dim_homog(n, m)
    t = r * (r + 1) // 2
    if t > _COUNT_MAX:
        raise OverflowError(f"pair count for n={n}, m={m} exceeds 64-bit range")
    return t


def glex_key(alpha: MultiIndex):
    """Sort key realizing the Glex order (degree first, x1 heaviest)."""
    return (sum(alpha), tuple(-a for a in alpha))


def glex_compare(alpha: MultiIndex, beta: MultiIndex) -> int:
    """Total order on equal-dimension indices: -1, 0 or 1."""
    if len(alpha) != len(beta):
        raise ValueError("cannot compare multi-indices of different dimension")
    ka, kb = glex_key(alpha), glex_key(beta)
    return (ka > kb) - (ka < kb)


@dataclass(frozen=True, eq=False)
class GlexTable:
    """All multi-indices of degree <= d_max in n variables, in Glex order."""

    n: int
    d_max: int
    indices: tuple[MultiIndex, ...]
    _rank: dict[MultiIndex, int]

    def __len__(self) -> int:
        return len(self.indices)

    def rank(self, alpha: MultiIndex) -> int:
        try:
            return self._rank[tuple(alpha)]
        except KeyError:
            raise ValueError(f"{alpha} not in table (n={self.n}, d_max={self.d_max})")

    def offset(self, d: int) -> int:
        """Rank of the first index of degree d."""
        return 0 if d == 0 else dim_total(self.n, d - 1)

    def block(self, d: int) -> slice:
        """Rank range of the indices of degree exactly d."""
        if d > self.d_max:
            raise ValueError(f"degree {d} exceeds table d_max={self.d_max}")
        return slice(self.offset(d), self.offset(d) + dim_homog(self.n, d))


@lru_cache(maxsize=None)
def glex_enumerate(n: int, d_max: int) -> GlexTable:
    """Enumerate all multi-indices with degree <= d_max, Glex-sorted."""
    dim_total(n, d_max)  # validates arguments and the count range
    idx = [a for a in itertools.product(range(d_max + 1), repeat=n) if sum(a) <= d_max]
    idx.sort(key=glex_key)
    return GlexTable(n, d_max, tuple(idx), {a: i for i, a in enumerate(idx)})


def homog_rank(alpha: MultiIndex) -> int:
    """Position of alpha among the degree-|alpha| indices in Glex order."""
    n = len(alpha)
    d = sum(alpha)
    r = 0
    for i, a in enumerate(alpha[:-1]):
        rem = n - i - 1
        for k in range(a + 1, d + 1):
            r += dim_homog(rem, d - k)
        d -= a
    return r


def pair_rank(gamma: MultiIndex, beta: MultiIndex, m: int) -> int:
    """Row index of the unordered pair {gamma, beta} among the t_m pairs.

    Layout is upper-triangle, Glex-major: with i <= j the homogeneous ranks
    of the two indices, the pair sits at i*r_m - i*(i-1)/2 + (j-i).
    Symmetric in (gamma, beta) by construction.
    """
    if sum(gamma) != m or sum(beta) != m:
        raise ValueError(f"pair_rank needs |gamma| = |beta| = {m}")
    if len(gamma) != len(beta):
        raise ValueError("dimension mismatch in pair_rank")
    r = dim_homog(len(gamma), m)
    i, j = sorted((homog_rank(gamma), homog_rank(beta)))
    return i * r - i * (i - 1) // 2 + (j - i)


def add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta, strict=True))


def format_multiindex(alpha: MultiIndex) -> str:
    """Serialize as comma-joined integers, e.g. "2,1" for x1^2 x2."""
    return ",".join(str(a) for a in alpha)


def parse_multiindex(text: str, n: int | None = None) -> MultiIndex:
    parts = text.strip().split(",")
    try:
        alpha = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"malformed multi-index {text!r}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"negative exponent in multi-index {text!r}")
    if n is not None and len(alpha) != n:
        raise ValueError(f"multi-index {text!r} has dimension {len(alpha)}, expected {n}")
    return alpha
