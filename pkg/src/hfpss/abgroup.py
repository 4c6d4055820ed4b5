"""Finitely generated abelian groups over exact integers.

Groups are kept in invariant-factor form ``Z/d1 + ... + Z/dk + Z^r`` with
``d1 | d2 | ... | dk`` and every ``di >= 2``.  Summands carry human readable
names; groups produced by :func:`subquotient` also remember integer lifts of
their generators into the ambient basis so that later maps can be expressed
in the new generators.

All arithmetic uses Python integers, so invariant factors are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import CompositionNonzero

Vector = tuple[int, ...]


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix; acts on column vectors."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entry count does not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        cols = len(columns)
        return cls(rows, cols, tuple(tuple(int(columns[j][i]) for j in range(cols)) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        m = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            m[i][i] = int(v)
        return cls.from_rows(m, cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = other.transpose().entries
        out = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries)
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, v: Sequence[int]) -> Vector:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf_lists(a: list[list[int]], m: int, n: int, track_u: bool = True, track_vinv: bool = True):
    """Smith normal form on list matrices.

    Returns ``(U, D, V, Vinv)`` with ``U a V = D``.  Untracked transforms are
    returned as ``None``.
    """
    D = [row[:] for row in a]
    U = _identity(m) if track_u else None
    V = _identity(n)
    Vi = _identity(n) if track_vinv else None

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        if Vi is not None:
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        rs, rd = D[src], D[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += q * rs[k]
        if U is not None:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        for row in D:
            if row[src]:
                row[dst] += q * row[src]
        for row in V:
            if row[src]:
                row[dst] += q * row[src]
        if Vi is not None:
            vs, vd = Vi[src], Vi[dst]
            for k in range(n):
                if vd[k]:
                    vs[k] -= q * vd[k]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(i, t, -q)
                    if D[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(j, t, -q)
                    if D[t][j]:
                        clean = False
            if not clean:
                best = None
                for i in range(t + 1, m):
                    if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                        best = (abs(D[i][t]), i, None)
                for j in range(t + 1, n):
                    if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                        best = (abs(D[t][j]), None, j)
                _, i, j = best
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = None
            for i in (range(t + 1, m) if abs(p) != 1 else ()):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V, Vi


def smith_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular ``U``, ``V`` and diagonal ``D`` with ``U @ A @ V == D``.

    The diagonal of ``D`` is nonnegative and each entry divides the next.
    """
    U, D, V, _ = _snf_lists(A.tolist(), A.rows, A.cols)
    return (
        IntMatrix.from_rows(U, A.rows),
        IntMatrix.from_rows(D, A.cols),
        IntMatrix.from_rows(V, A.cols),
    )


def invariant_factors(A: IntMatrix) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith form of ``A``."""
    _, D, _, _ = _snf_lists(A.tolist(), A.rows, A.cols, track_u=False, track_vinv=False)
    return tuple(D[i][i] for i in range(min(A.rows, A.cols)) if D[i][i])


def kernel_basis(rows: list[list[int]], n: int) -> list[list[int]]:
    """Basis (as vectors) of the integer kernel of an ``m x n`` matrix."""
    m = len(rows)
    if m == 0:
        return _identity(n)
    _, D, V, _ = _snf_lists(rows, m, n, track_u=False, track_vinv=False)
    rank = sum(1 for i in range(min(m, n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FgAbGroup:
    """``Z/d1 + ... + Z/dk + Z^r`` with named generators.

    Generator order is torsion summands first, then free summands.  ``pro2``
    flags, per free summand, whether that summand stands for the 2-adic
    integers rather than ``Z``.  ``lifts`` (optional) gives each generator as
    an integer vector in some ambient basis.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    generator_names: tuple[str, ...] = ()
    pro2: tuple[bool, ...] = ()
    lifts: tuple[Vector, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisor chain")
        if len(self.generator_names) != self.free_rank + len(self.torsion):
            raise ValueError("one generator name per cyclic summand required")
        if not self.pro2:
            object.__setattr__(self, "pro2", (False,) * self.free_rank)
        if len(self.pro2) != self.free_rank:
            raise ValueError("pro2 flags must match free rank")

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "FgAbGroup":
        return cls()

    @classmethod
    def integers(cls, name: str = "1", pro2: bool = False) -> "FgAbGroup":
        return cls(1, (), (name,), (pro2,))

    @classmethod
    def cyclic(cls, order: int, name: str = "x") -> "FgAbGroup":
        if order == 0:
            return cls.integers(name)
        if order == 1:
            return cls()
        return cls(0, (order,), (name,))

    @classmethod
    def from_orders(
        cls,
        orders: Sequence[int],
        names: Sequence[str] | None = None,
        pro2: Sequence[bool] | None = None,
    ) -> "FgAbGroup":
        """Direct sum of cyclic groups ``Z/orders[i]`` (0 meaning free)."""
        n = len(orders)
        names = list(names) if names is not None else [f"x{i}" for i in range(n)]
        pro2 = list(pro2) if pro2 is not None else [False] * n
        return group_from_presentation(IntMatrix.diag(orders, n, n), names, pro2)

    # queries --------------------------------------------------------------

    @property
    def orders(self) -> tuple[int, ...]:
        return self.torsion + (0,) * self.free_rank

    @property
    def ngens(self) -> int:
        return len(self.generator_names)

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion)

    def order(self) -> int:
        """Cardinality, or 0 when infinite."""
        return 0 if self.free_rank else self.torsion_order

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion

    def is_isomorphic(self, other: "FgAbGroup") -> bool:
        return self.invariants() == other.invariants()

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(
            self.orders + other.orders,
            self.generator_names + other.generator_names,
            (False,) * len(self.torsion) + self.pro2 + (False,) * len(other.torsion) + other.pro2,
        )

    def summands(self) -> list[tuple[int, str, bool]]:
        """``(order, name, pro2)`` per cyclic summand, generator order."""
        out = [(d, nm, False) for d, nm in zip(self.torsion, self.generator_names)]
        free_names = self.generator_names[len(self.torsion):]
        out += [(0, nm, p) for nm, p in zip(free_names, self.pro2)]
        return out

    def label(self) -> str:
        if self.is_trivial():
            return "0"
        parts = ["Z_2" if p else "Z" for p in self.pro2]
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts)

    def __str__(self) -> str:
        return self.label()


def format_combination(coeffs: Sequence[int], names: Sequence[str]) -> str:
    """Render an integer combination such as ``2a - h1``."""
    terms = []
    for c, nm in zip(coeffs, names):
        if c == 0:
            continue
        mag = abs(c)
        body = nm if mag == 1 else (f"{mag}{nm}" if nm != "1" else str(mag))
        if nm == "1" and mag == 1:
            body = "1"
        if not terms:
            terms.append(body if c > 0 else "-" + body)
        else:
            terms.append(("+ " if c > 0 else "- ") + body)
    return " ".join(terms) if terms else "0"


def _reduce_vec(v: Sequence[int], orders: Sequence[int]) -> Vector:
    return tuple(x % d if d else x for x, d in zip(v, orders))


def group_from_presentation(
    relations: IntMatrix,
    names: Sequence[str] | None = None,
    pro2: Sequence[bool] | None = None,
) -> FgAbGroup:
    """Cokernel of the relations (one relation per row) on ``relations.cols`` generators.

    Generator names of the result are integer combinations of ``names``.
    """
    n = relations.cols
    names = list(names) if names is not None else [f"x{i}" for i in range(n)]
    pro2 = list(pro2) if pro2 is not None else [False] * n
    if len(names) != n or len(pro2) != n:
        raise ValueError("names/pro2 must have one entry per generator")
    rows = relations.tolist()

    # fast path: diagonal relations whose orders already chain
    diag = _diagonal_orders(rows, n)
    if diag is not None:
        gens = [(d, i) for i, d in enumerate(diag) if d != 1]
        tors = sorted((g for g in gens if g[0] != 0), key=lambda g: g[0])
        free = [g for g in gens if g[0] == 0]
        chain = [d for d, _ in tors]
        if all(b % a == 0 for a, b in zip(chain, chain[1:])):
            order = tors + free
            return FgAbGroup(
                free_rank=len(free),
                torsion=tuple(chain),
                generator_names=tuple(names[i] for _, i in order),
                pro2=tuple(pro2[i] for _, i in free),
                lifts=tuple(tuple(int(k == i) for k in range(n)) for _, i in order),
            )

    group, _, _ = _cokernel(rows, n, names, pro2)
    return group


def _diagonal_orders(rows: list[list[int]], n: int) -> list[int] | None:
    orders = [0] * n
    for r in rows:
        nz = [(j, x) for j, x in enumerate(r) if x]
        if not nz:
            continue
        if len(nz) > 1:
            return None
        j, x = nz[0]
        orders[j] = gcd(orders[j], abs(x))
    return orders


def _cokernel(rows, n, names, pro2):
    """Cokernel of ``rows`` on ``n`` generators.

    Returns the group, the column transform ``V`` (coordinates ``c`` map to
    ``c @ V``) and the kept summand indices.
    """
    m = len(rows)
    U, D, V, Vi = _snf_lists(rows, m, n, track_u=False) if m else (None, None, _identity(n), _identity(n))
    diag = [D[i][i] if (m and i < min(m, n)) else 0 for i in range(n)]
    keep = [i for i in range(n) if diag[i] != 1]
    tors = [i for i in keep if diag[i] != 0]
    free = [i for i in keep if diag[i] == 0]
    lifts = []
    gen_names = []
    free_pro2 = []
    for i in tors + free:
        vec = list(Vi[i])
        if diag[i] == 0:
            # prefer the sign that makes the leading coefficient positive
            lead = next((x for x in vec if x), 1)
            if lead < 0:
                vec = [-x for x in vec]
                for row in V:
                    row[i] = -row[i]
        lifts.append(tuple(vec))
        gen_names.append(format_combination(vec, names))
        if diag[i] == 0:
            free_pro2.append(any(pro2[k] for k, x in enumerate(vec) if x))
    group = FgAbGroup(
        free_rank=len(free),
        torsion=tuple(diag[i] for i in tors),
        generator_names=tuple(gen_names),
        pro2=tuple(free_pro2),
        lifts=tuple(lifts),
    )
    return group, V, tors + free


# ---------------------------------------------------------------------------
# subquotients


@dataclass(frozen=True)
class Subquotient:
    """``ker(g) / im(f)`` inside an ambient group ``B`` given by cyclic orders.

    ``group.lifts`` are vectors in ``B``'s coordinates.  :meth:`coordinates`
    expresses an element of ``ker(g)`` in the generators of ``group``.
    """

    group: FgAbGroup
    ambient_orders: tuple[int, ...]
    _kernel_v: tuple[tuple[int, ...], ...] = field(repr=False)
    _kernel_d: tuple[int, ...] = field(repr=False)
    _pres_v: tuple[tuple[int, ...], ...] = field(repr=False)
    _keep: tuple[int, ...] = field(repr=False)

    def coordinates(self, x: Sequence[int]) -> Vector:
        k = len(self._kernel_d)
        n = len(self.ambient_orders)
        xv = _vec_times(x, self._kernel_v, k)
        y = []
        for j in range(k):
            q, r = divmod(xv[j], self._kernel_d[j])
            if r:
                raise ValueError("vector is not in the kernel lattice")
            y.append(q)
        c = _vec_times(y, self._pres_v, k)
        return _reduce_vec([c[j] for j in self._keep], self.group.orders)

    def contains_cycle(self, x: Sequence[int]) -> bool:
        try:
            self.coordinates(x)
        except ValueError:
            return False
        return True


def _apply_rows(g: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    nz = [(j, x) for j, x in enumerate(v) if x]
    return [sum(row[j] * x for j, x in nz) for row in g]


def _vec_times(x: Sequence[int], mat: Sequence[Sequence[int]], width: int) -> list[int]:
    """Row vector ``x`` times matrix ``mat`` (only the first ``width`` columns)."""
    out = [0] * width
    for i, xi in enumerate(x):
        if xi:
            row = mat[i]
            for j in range(width):
                if row[j]:
                    out[j] += xi * row[j]
    return out


def _is_zero_mod(v: Sequence[int], orders: Sequence[int]) -> bool:
    return all((x % d == 0) if d else x == 0 for x, d in zip(v, orders))


def subquotient_in(
    f_images: Sequence[Sequence[int]],
    g: Sequence[Sequence[int]],
    b_orders: Sequence[int],
    c_orders: Sequence[int],
    names: Sequence[str] | None = None,
    pro2: Sequence[bool] | None = None,
) -> Subquotient:
    """Homology at ``B`` of ``A --f--> B --g--> C``.

    ``f_images`` lists the images of ``A``'s generators in ``B`` coordinates;
    ``g`` is the ``len(C) x len(B)`` matrix of ``g``.  ``B`` and ``C`` are
    direct sums of cyclic groups with the given orders (0 = free).
    """
    n = len(b_orders)
    m = len(c_orders)
    names = list(names) if names is not None else [f"b{i}" for i in range(n)]
    pro2 = list(pro2) if pro2 is not None else [False] * n
    g = [list(r) for r in g] if m else []
    for i, b in enumerate(b_orders):
        if b and m:
            col = [g[j][i] * b for j in range(m)]
            if not _is_zero_mod(col, c_orders):
                raise ValueError("map is not well defined on the torsion of its source")
    for v in f_images:
        if m and not _is_zero_mod(_apply_rows(g, v), c_orders):
            raise CompositionNonzero("g∘f is nonzero")

    # kernel lattice K = {x : g x in the relation lattice of C}
    if m == 0 or all(x == 0 for r in g for x in r):
        kgens = _identity(n)
    else:
        nz = [j for j, c in enumerate(c_orders) if c]
        aug = [g[j] + [c_orders[j] if nz[k] == j else 0 for k in range(len(nz))] for j in range(m)]
        kgens = [v[:n] for v in kernel_basis(aug, n + len(nz))]
        kgens = [v for v in kgens if any(v)]

    # basis of K: rows d_i * W_i of the Smith form of the generating set
    if kgens:
        _, Dk, Vk, Vik = _snf_lists(kgens, len(kgens), n, track_u=False)
        k = sum(1 for i in range(min(len(kgens), n)) if Dk[i][i])
        kd = [Dk[i][i] for i in range(k)]
    else:
        k, kd, Vk, Vik = 0, [], _identity(n), _identity(n)
    basis = [[kd[i] * Vik[i][j] for j in range(n)] for i in range(k)]

    def to_k(x):
        xv = _vec_times(x, Vk, k)
        out = []
        for j in range(k):
            q, r = divmod(xv[j], kd[j])
            if r:
                raise ValueError("vector is not in the kernel lattice")
            out.append(q)
        return out

    rels = [to_k(list(v)) for v in f_images]
    for i, b in enumerate(b_orders):
        if b:
            rels.append(to_k([b if j == i else 0 for j in range(n)]))
    rels = [r for r in rels if any(r)]

    basis_names = [format_combination(_reduce_vec(b, b_orders), names) for b in basis]
    basis_pro2 = [any(pro2[j] for j, x in enumerate(b) if x) for b in basis]
    qgroup, pres_v, keep = _cokernel(rels, k, basis_names, basis_pro2) if k else (FgAbGroup(), [], [])

    lifts = []
    gen_names = []
    for lift_k in (qgroup.lifts or ()):
        vec = _vec_times(lift_k, basis, n)
        vec = list(_reduce_vec(vec, b_orders))
        lifts.append(tuple(vec))
        gen_names.append(format_combination(vec, names))
    group = FgAbGroup(
        free_rank=qgroup.free_rank,
        torsion=qgroup.torsion,
        generator_names=tuple(gen_names),
        pro2=qgroup.pro2,
        lifts=tuple(lifts),
    )
    return Subquotient(
        group=group,
        ambient_orders=tuple(b_orders),
        _kernel_v=tuple(tuple(r) for r in Vk),
        _kernel_d=tuple(kd),
        _pres_v=tuple(tuple(r) for r in pres_v),
        _keep=tuple(keep),
    )


def subquotient(
    f: IntMatrix,
    g: IntMatrix,
    b: FgAbGroup | Sequence[int] | None = None,
    c: FgAbGroup | Sequence[int] | None = None,
) -> FgAbGroup:
    """``ker(g) / im(f)`` for ``A --f--> B --g--> C``.

    ``b`` and ``c`` describe the groups (default: free of the matching rank);
    matrices are written in their cyclic generators.  Raises
    :class:`CompositionNonzero` when ``g∘f`` is not zero.
    """
    b_orders, names, pro2 = _orders_of(b, f.rows if f.rows else g.cols)
    c_orders, _, _ = _orders_of(c, g.rows)
    f_images = [f.column(j) for j in range(f.cols)]
    return subquotient_in(f_images, g.tolist(), b_orders, c_orders, names, pro2).group


def _orders_of(x, n):
    if x is None:
        return [0] * n, [f"x{i}" for i in range(n)], [False] * n
    if isinstance(x, FgAbGroup):
        pro2 = [False] * len(x.torsion) + list(x.pro2)
        return list(x.orders), list(x.generator_names), pro2
    return list(x), [f"x{i}" for i in range(len(x))], [False] * len(x)


# ---------------------------------------------------------------------------
# extensions


def _prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_type(torsion: Iterable[int], p: int) -> tuple[int, ...]:
    """Partition recording the ``p``-primary part of a torsion group."""
    parts = [_prime_factors(d).get(p, 0) for d in torsion]
    return tuple(sorted((e for e in parts if e), reverse=True))


def _horizontal_strips(shape: tuple[int, ...], size: int):
    """All shapes obtained by adding a horizontal strip of ``size`` boxes."""
    rows = list(shape) + [0]

    def rec(i, remaining, current):
        if i == len(rows):
            if remaining == 0:
                yield tuple(x for x in current if x)
            return
        cap = remaining if i == 0 else min(remaining, rows[i - 1] - rows[i])
        for add in range(cap, -1, -1):
            yield from rec(i + 1, remaining - add, current + [rows[i] + add])

    yield from rec(0, size, [])


def lr_positive(lam: tuple[int, ...], mu: tuple[int, ...], nu: tuple[int, ...]) -> bool:
    """Whether the Littlewood-Richardson coefficient ``c^lam_{mu,nu}`` is nonzero."""
    if sum(lam) != sum(mu) + sum(nu):
        return False
    if any(m > l for m, l in zip(mu, list(lam) + [0] * len(mu))) or len(mu) > len(lam):
        return False

    def rec(label, shape, filling):
        if label > len(nu):
            return tuple(shape) == tuple(lam) and _lattice_word(filling, len(nu))
        for new in _horizontal_strips(shape, nu[label - 1]):
            if len(new) > len(lam) or any(a > b for a, b in zip(new, lam)):
                continue
            fill = dict(filling)
            old = list(shape) + [0] * (len(new) - len(shape))
            for r, (a, b) in enumerate(zip(old, new)):
                for col in range(a, b):
                    fill[(r, col)] = label
            if rec(label + 1, new, fill):
                return True
        return False

    return rec(1, tuple(mu), {})


def _lattice_word(filling: dict, k: int) -> bool:
    counts = [0] * (k + 2)
    for r in sorted({r for r, _ in filling}):
        for col in sorted((c for rr, c in filling if rr == r), reverse=True):
            x = filling[(r, col)]
            counts[x] += 1
            if x > 1 and counts[x] > counts[x - 1]:
                return False
    return True


def _partitions_containing(base: tuple[int, ...], total: int):
    def rec(i, remaining, prev, acc):
        if remaining == 0:
            if i >= len(base) or all(b == 0 for b in base[i:]):
                yield tuple(acc)
            return
        lo = base[i] if i < len(base) else 0
        for part in range(min(prev, remaining), max(lo, 1) - 1, -1):
            if part < lo:
                break
            yield from rec(i + 1, remaining - part, part, acc + [part])

    yield from rec(0, total, total, [])


def extension_consistent(expected: FgAbGroup, pieces: Sequence[FgAbGroup]) -> bool:
    """Whether ``expected`` admits a filtration with the given subquotients.

    Free parts are matched by rank only (no torsion-free extensions of torsion
    classes are considered); torsion parts are compared prime by prime using
    Littlewood-Richardson positivity.
    """
    if expected.free_rank != sum(p.free_rank for p in pieces):
        return False
    if expected.torsion_order != prod(p.torsion_order for p in pieces):
        return False
    primes = set(_prime_factors(expected.torsion_order))
    for p in primes:
        target = p_type(expected.torsion, p)
        reachable = {()}
        for piece in pieces:
            nu = p_type(piece.torsion, p)
            if not nu:
                continue
            nxt = set()
            for mu in reachable:
                for lam in _partitions_containing(mu, sum(mu) + sum(nu)):
                    if lr_positive(lam, mu, nu):
                        nxt.add(lam)
            reachable = nxt
        if target not in reachable:
            return False
    return True


__all__ = [
    "IntMatrix",
    "FgAbGroup",
    "Subquotient",
    "smith_normal_form",
    "invariant_factors",
    "kernel_basis",
    "group_from_presentation",
    "subquotient",
    "subquotient_in",
    "extension_consistent",
    "format_combination",
    "lr_positive",
]
