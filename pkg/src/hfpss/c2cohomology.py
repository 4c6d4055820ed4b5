"""Group cohomology of C2 acting on a finitely generated abelian group.

Two routes are provided.  :func:`cohomology_periodic` uses the 2-periodic
resolution ``... -> Z[C2] --N--> Z[C2] --(1-σ)--> Z[C2] -> Z``;
:func:`cohomology_bar` builds the full inhomogeneous cochain complex
``C^n = Maps(C2^n, M)`` and serves as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .abgroup import FgAbGroup, IntMatrix, Subquotient, subquotient_in
from .errors import InvalidModule, OracleLimitExceeded

ORACLE_LIMIT = 8


@dataclass(frozen=True)
class C2Module:
    """An abelian group with an involution σ given on its cyclic generators.

    Column ``j`` of ``involution`` is ``σ(generator j)``.
    """

    underlying: FgAbGroup
    involution: IntMatrix

    def __post_init__(self):
        problems = module_violations(self.underlying, self.involution)
        if problems:
            raise InvalidModule("; ".join(problems))

    @classmethod
    def unchecked(cls, group: FgAbGroup, involution: IntMatrix) -> "C2Module":
        """Build without validation, so a loader can report problems later."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "underlying", group)
        object.__setattr__(obj, "involution", involution)
        return obj

    def violations(self) -> list[str]:
        return module_violations(self.underlying, self.involution)

    @classmethod
    def trivial(cls, group: FgAbGroup) -> "C2Module":
        return cls(group, IntMatrix.identity(group.ngens))

    @classmethod
    def sign(cls, group: FgAbGroup) -> "C2Module":
        return cls(group, IntMatrix.diag([-1] * group.ngens))

    @classmethod
    def zero(cls) -> "C2Module":
        return cls(FgAbGroup(), IntMatrix.zeros(0, 0))

    @property
    def orders(self) -> tuple[int, ...]:
        return self.underlying.orders

    @property
    def pro2_flags(self) -> list[bool]:
        g = self.underlying
        return [False] * len(g.torsion) + list(g.pro2)

    def sigma(self) -> list[list[int]]:
        return self.involution.tolist()


def module_violations(group: FgAbGroup, sigma: IntMatrix) -> list[str]:
    """Reasons why ``sigma`` is not an involution of ``group`` (empty if fine)."""
    n = group.ngens
    if sigma.rows != sigma.cols:
        return [f"involution matrix is not square ({sigma.rows}x{sigma.cols})"]
    if sigma.rows != n:
        return [f"involution has size {sigma.rows}, group has {n} generators"]
    out = []
    orders = group.orders
    for j, d in enumerate(orders):
        if d and any((sigma[i, j] * d) % orders[i] if orders[i] else sigma[i, j] * d for i in range(n)):
            out.append(f"σ does not respect the order of generator {group.generator_names[j]}")
    sq = sigma @ sigma
    for j in range(n):
        for i in range(n):
            diff = sq[i, j] - int(i == j)
            d = orders[i]
            if (diff % d) if d else diff:
                out.append("σ² is not the identity")
                return out
    return out


def _one_minus(sigma: list[list[int]]) -> list[list[int]]:
    n = len(sigma)
    return [[int(i == j) - sigma[i][j] for j in range(n)] for i in range(n)]


def _one_plus(sigma: list[list[int]]) -> list[list[int]]:
    n = len(sigma)
    return [[int(i == j) + sigma[i][j] for j in range(n)] for i in range(n)]


def _columns(mat: list[list[int]], n: int) -> list[list[int]]:
    return [[mat[i][j] for i in range(len(mat))] for j in range(n)]


def cohomology_periodic_sq(M: C2Module, s: int) -> Subquotient:
    """``H^s(C2; M)`` with its cocycle lifts, via the periodic resolution."""
    if s < 0:
        raise ValueError("cohomological degree must be nonnegative")
    sigma = M.sigma()
    n = len(sigma)
    orders = M.orders
    names = M.underlying.generator_names
    a = _one_minus(sigma)
    norm = _one_plus(sigma)
    if s == 0:
        incoming, outgoing = [], a
    elif s % 2 == 1:
        incoming, outgoing = _columns(a, n), norm
    else:
        incoming, outgoing = _columns(norm, n), a
    return subquotient_in(incoming, outgoing, orders, orders, names, M.pro2_flags)


def cohomology_periodic(M: C2Module, s: int) -> FgAbGroup:
    """``H^s(C2; M)``: ``ker(1-σ)`` for s = 0, ``ker N / im(1-σ)`` for odd s,
    ``ker(1-σ) / im N`` for even s >= 2."""
    return cohomology_periodic_sq(M, s).group


def _bar_differential(sigma: list[list[int]], n: int, deg: int) -> list[list[int]]:
    """Matrix of δ: C^deg -> C^(deg+1) for inhomogeneous cochains.

    A cochain in degree ``deg`` is a block vector indexed by tuples in
    ``{0,1}^deg`` (0 = identity, 1 = σ); each block has ``n`` entries.
    """
    src = list(product((0, 1), repeat=deg))
    dst = list(product((0, 1), repeat=deg + 1))
    src_index = {t: i for i, t in enumerate(src)}
    rows = [[0] * (len(src) * n) for _ in range(len(dst) * n)]
    for di, g in enumerate(dst):
        base_r = di * n
        # g1 . f(g2, ..., g_{deg+1})
        j0 = src_index[g[1:]] * n
        for r in range(n):
            for c in range(n):
                coef = sigma[r][c] if g[0] else int(r == c)
                if coef:
                    rows[base_r + r][j0 + c] += coef
        # sum_i (-1)^i f(g1, ..., g_i g_{i+1}, ...)
        for i in range(deg):
            merged = g[:i] + ((g[i] + g[i + 1]) % 2,) + g[i + 2:]
            j = src_index[merged] * n
            sgn = -1 if (i + 1) % 2 else 1
            for r in range(n):
                rows[base_r + r][j + r] += sgn
        # (-1)^(deg+1) f(g1, ..., g_deg)
        j = src_index[g[:-1]] * n
        sgn = -1 if (deg + 1) % 2 else 1
        for r in range(n):
            rows[base_r + r][j + r] += sgn
    return rows


def cohomology_bar(M: C2Module, s: int, limit: int = ORACLE_LIMIT) -> FgAbGroup:
    """``H^s(C2; M)`` from the unnormalized inhomogeneous cochain complex."""
    if s < 0:
        raise ValueError("cohomological degree must be nonnegative")
    if s > limit:
        raise OracleLimitExceeded(f"bar oracle limited to s <= {limit}, asked for {s}")
    sigma = M.sigma()
    n = len(sigma)
    orders = list(M.orders)
    b_orders = orders * (2 ** s)
    c_orders = orders * (2 ** (s + 1))
    outgoing = _bar_differential(sigma, n, s)
    if s == 0:
        incoming = []
    else:
        d_in = _bar_differential(sigma, n, s - 1)
        incoming = _columns(d_in, len(d_in[0]))
    return subquotient_in(incoming, outgoing, b_orders, c_orders).group
