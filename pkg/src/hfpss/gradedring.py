"""Graded-commutative ring presentations with oriented rewrite rules.

A presentation lists generators with an internal degree ``t``, a filtration
``s`` and optionally a motivic weight ``w``.  Monomials are exponent tuples
in generator order; polynomials are ``{monomial: coefficient}`` dicts.

Relations are oriented rewrite rules ``lhs -> rhs``.  A rule whose left side
carries an integer coefficient and whose right side is zero (``2*h1 -> 0``)
is a *coefficient rule*: every monomial divisible by its left monomial is
annihilated by that integer.

Monomials are ordered degree-lexicographically, comparing exponents from the
last listed generator to the first; every rule must strictly decrease.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from .abgroup import FgAbGroup
from .errors import NonTerminating, ParseError, WindowExceeded

Monomial = tuple[int, ...]
Poly = dict  # Monomial -> int

MAX_REWRITES = 10_000


@dataclass(frozen=True)
class RingGenerator:
    name: str
    t: int
    s: int = 0
    weight: int | None = None
    order: int = 0

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass(frozen=True)
class RewriteRule:
    """``lhs_coefficient * lhs -> rhs``; ``rhs`` is a tuple of (coef, monomial-dict)."""

    lhs: tuple[tuple[str, int], ...]
    rhs: tuple[tuple[int, tuple[tuple[str, int], ...]], ...] = ()
    lhs_coefficient: int = 1

    @property
    def is_coefficient_rule(self) -> bool:
        return self.lhs_coefficient != 1 and not self.rhs

    def text(self) -> tuple[str, str]:
        lhs = _render_named(dict(self.lhs))
        if self.lhs_coefficient != 1:
            lhs = f"{self.lhs_coefficient}*{lhs}" if self.lhs else str(self.lhs_coefficient)
        if not self.rhs:
            return lhs, "0"
        terms = []
        for c, mono in self.rhs:
            body = _render_named(dict(mono))
            if body == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(body)
            elif c == -1:
                terms.append("-" + body)
            else:
                terms.append(f"{c}*{body}")
        return lhs, " + ".join(terms).replace("+ -", "- ")


def _render_named(exps: Mapping[str, int]) -> str:
    parts = [name if e == 1 else f"{name}^{e}" for name, e in exps.items() if e]
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class RingPresentation:
    generators: tuple[RingGenerator, ...]
    relations: tuple[RewriteRule, ...] = ()
    invertible: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        for name in self.invertible:
            if name not in names:
                raise ValueError(f"invertible generator {name!r} is not declared")

    # structure ------------------------------------------------------------

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @cached_property
    def has_weights(self) -> bool:
        return all(g.weight is not None for g in self.generators) and bool(self.generators)

    @cached_property
    def _invertible_mask(self) -> tuple[bool, ...]:
        return tuple(n in self.invertible for n in self.names)

    def unit(self) -> Monomial:
        return (0,) * self.ngens

    def gen(self, name: str, power: int = 1) -> Monomial:
        m = [0] * self.ngens
        m[self.index[name]] = power
        return tuple(m)

    def mono(self, exps: Mapping[str, int] | Iterable[tuple[str, int]]) -> Monomial:
        m = [0] * self.ngens
        items = exps.items() if isinstance(exps, Mapping) else exps
        for name, e in items:
            if name not in self.index:
                raise ParseError(f"unknown generator {name!r}")
            m[self.index[name]] += e
        return tuple(m)

    def degree(self, m: Monomial) -> tuple[int, int, int]:
        t = sum(e * g.t for e, g in zip(m, self.generators))
        s = sum(e * g.s for e, g in zip(m, self.generators))
        w = sum(e * (g.weight or 0) for e, g in zip(m, self.generators))
        return t, s, w

    def stem(self, m: Monomial) -> int:
        t, s, _ = self.degree(m)
        return t - s

    @cached_property
    def rewrite_rules(self) -> tuple[tuple[Monomial, Poly], ...]:
        out = []
        for rule in self.relations:
            if rule.is_coefficient_rule:
                continue
            if rule.lhs_coefficient != 1:
                raise ValueError("only coefficient rules may carry a left-hand coefficient")
            rhs: Poly = {}
            for c, mono in rule.rhs:
                key = self.mono(mono)
                rhs[key] = rhs.get(key, 0) + c
            out.append((self.mono(rule.lhs), {k: v for k, v in rhs.items() if v}))
        return tuple(out)

    @cached_property
    def coefficient_rules(self) -> tuple[tuple[int, Monomial], ...]:
        out = [(g.order, self.gen(g.name)) for g in self.generators if g.order]
        for rule in self.relations:
            if rule.is_coefficient_rule:
                out.append((abs(rule.lhs_coefficient), self.mono(rule.lhs)))
        return tuple(out)

    # monomial arithmetic -------------------------------------------------

    def divides(self, a: Monomial, b: Monomial) -> bool:
        return all(inv or x <= y for x, y, inv in zip(a, b, self._invertible_mask))

    def monomial_order(self, m: Monomial) -> int:
        """Additive order of the monomial's class (0 = free, 1 = zero)."""
        order = 0
        for c, lhs in self.coefficient_rules:
            if self.divides(lhs, m):
                order = gcd(order, c)
        return order

    def multiply(self, a: Monomial, b: Monomial) -> tuple[int, Monomial]:
        """``a * b = sign * (canonical product)`` with Koszul signs by stem."""
        odd = [g.stem % 2 for g in self.generators]
        parity = 0
        for i, eb in enumerate(b):
            if not (eb % 2 and odd[i]):
                continue
            for j in range(i + 1, len(a)):
                if a[j] % 2 and odd[j]:
                    parity ^= 1
        sign = -1 if parity else 1
        return sign, tuple(x + y for x, y in zip(a, b))

    def key(self, m: Monomial) -> tuple:
        """Sort key of the term order (larger key = larger monomial)."""
        return (sum(m), tuple(reversed(m)))

    def render(self, m: Monomial) -> str:
        return _render_named({n: e for n, e in zip(self.names, m)})

    def render_poly(self, p: Poly) -> str:
        if not p:
            return "0"
        terms = []
        for m in sorted(p, key=self.key, reverse=True):
            c = p[m]
            body = self.render(m)
            mag = abs(c)
            if body == "1":
                txt = str(mag)
            else:
                txt = body if mag == 1 else f"{mag}{body}"
            if not terms:
                terms.append(txt if c > 0 else "-" + txt)
            else:
                terms.append(("+ " if c > 0 else "- ") + txt)
        return " ".join(terms)

    # normal forms -----------------------------------------------------------

    def reduce_coefficients(self, p: Mapping[Monomial, int]) -> Poly:
        out = {}
        for m, c in p.items():
            d = self.monomial_order(m)
            if d:
                c %= d
                if c > d // 2:
                    c -= d
            if c:
                out[m] = c
        return out

    def is_normal(self, m: Monomial) -> bool:
        if self.monomial_order(m) == 1:
            return False
        return not any(self.divides(lhs, m) for lhs, _ in self.rewrite_rules)

    def normalize(self, p: Mapping[Monomial, int] | Monomial, max_rewrites: int = MAX_REWRITES) -> Poly:
        """Exhaustively rewrite ``p``.

        The largest reducible term is rewritten first, using the first
        applicable rule in declared order.
        """
        if isinstance(p, tuple):
            p = {p: 1}
        for m in p:
            for e, inv in zip(m, self._invertible_mask):
                if e < 0 and not inv:
                    raise ValueError(f"negative exponent on non-invertible generator in {self.render(m)}")
        work = self.reduce_coefficients(p)
        steps = 0
        rules = self.rewrite_rules
        while True:
            target = None
            for m in sorted(work, key=self.key, reverse=True):
                for lhs, rhs in rules:
                    if self.divides(lhs, m):
                        target = (m, lhs, rhs)
                        break
                if target:
                    break
            if target is None:
                return work
            steps += 1
            if steps > max_rewrites:
                raise NonTerminating(f"more than {max_rewrites} rewrites")
            m, lhs, rhs = target
            c = work.pop(m)
            rest = tuple(x - y for x, y in zip(m, lhs))
            sign, _ = self.multiply(lhs, rest)
            for rm, rc in rhs.items():
                s2, prod_m = self.multiply(rm, rest)
                work[prod_m] = work.get(prod_m, 0) + sign * s2 * c * rc
            work = self.reduce_coefficients(work)

    def multiply_poly(self, a: Mapping[Monomial, int], b: Mapping[Monomial, int]) -> Poly:
        out: Poly = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                sign, m = self.multiply(ma, mb)
                out[m] = out.get(m, 0) + sign * ca * cb
        return self.normalize(out)

    # validation -------------------------------------------------------------

    def order_violations(self) -> list[str]:
        """Rules whose right side is not strictly smaller than the left."""
        out = []
        for lhs, rhs in self.rewrite_rules:
            for m in rhs:
                if self.key(m) >= self.key(lhs):
                    out.append(f"rule {self.render(lhs)} -> {self.render_poly(rhs)} does not decrease the term order")
                    break
        return out

    def degree_violations(self) -> list[str]:
        out = []
        for lhs, rhs in self.rewrite_rules:
            for m in rhs:
                if self.degree(m) != self.degree(lhs):
                    out.append(f"rule {self.render(lhs)} -> {self.render_poly(rhs)} is not homogeneous")
                    break
        return out

    def sign_ambiguities(self) -> list[str]:
        """Products of odd-stem generators whose sign is not killed by 2-torsion."""
        out = []
        for g in self.generators:
            if g.stem % 2 and self.normalize({self.gen(g.name, 2): 2}):
                out.append(f"{g.name}^2 is not 2-torsion; graded commutativity leaves a sign")
        return out

    def critical_pairs(self) -> list[tuple[Monomial, Poly, Poly]]:
        """Overlaps of rule left sides with both one-step reductions, normalized."""
        out = []
        rules = self.rewrite_rules
        for i, (l1, r1) in enumerate(rules):
            for l2, r2 in rules[i + 1:]:
                if not any(a > 0 and b > 0 for a, b in zip(l1, l2)):
                    continue
                overlap = tuple(max(a, b) for a, b in zip(l1, l2))
                first = self._apply_at(overlap, l1, r1)
                second = self._apply_at(overlap, l2, r2)
                out.append((overlap, self.normalize(first), self.normalize(second)))
        # coefficient rules against rewrite rules
        for c, cl in self.coefficient_rules:
            for l1, r1 in rules:
                if not any(a > 0 and b > 0 for a, b in zip(cl, l1)):
                    continue
                overlap = tuple(max(a, b) for a, b in zip(cl, l1))
                zero = {}
                rewritten = {m: c * v for m, v in self._apply_at(overlap, l1, r1).items()}
                out.append((overlap, zero, self.normalize(rewritten)))
        return out

    def _apply_at(self, m: Monomial, lhs: Monomial, rhs: Poly) -> Poly:
        rest = tuple(x - y for x, y in zip(m, lhs))
        sign, _ = self.multiply(lhs, rest)
        out: Poly = {}
        for rm, rc in rhs.items():
            s2, pm = self.multiply(rm, rest)
            out[pm] = out.get(pm, 0) + sign * s2 * rc
        return out

    def confluence_failures(self) -> list[str]:
        return [
            f"critical pair at {self.render(m)}: {self.render_poly(a)} vs {self.render_poly(b)}"
            for m, a, b in self.critical_pairs()
            if a != b
        ]

    # parsing ------------------------------------------------------------------

    def parse(self, text: str) -> Poly:
        terms = parse_polynomial(text)
        out: Poly = {}
        for c, exps in terms:
            m = self.mono(exps)
            out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}

    # enumeration ----------------------------------------------------------

    def normal_monomials(self, box: "DegreeBox") -> dict[tuple[int, int, int], list[Monomial]]:
        """All normal monomials whose degree lies in ``box``, bucketed by (t, s, w)."""
        if box in self._cache:
            return self._cache[box]
        gens = self.generators
        n = len(gens)
        degs = [(g.t, g.s, g.weight or 0) for g in gens]
        bound = box.exponent_bound
        ranges = [(-bound if inv else 0, bound) for inv in self._invertible_mask]
        lo_box = (box.t_min, box.s_min, box.w_min)
        hi_box = (box.t_max, box.s_max, box.w_max)

        # reachable interval of the remaining generators' contributions
        rest_lo = [[0, 0, 0] for _ in range(n + 1)]
        rest_hi = [[0, 0, 0] for _ in range(n + 1)]
        for k in range(n - 1, -1, -1):
            for c in range(3):
                a, b = degs[k][c] * ranges[k][0], degs[k][c] * ranges[k][1]
                rest_lo[k][c] = rest_lo[k + 1][c] + min(a, b)
                rest_hi[k][c] = rest_hi[k + 1][c] + max(a, b)

        buckets: dict[tuple[int, int, int], list[Monomial]] = {}
        exps = [0] * n

        def rec(k, acc):
            for c in range(3):
                if acc[c] + rest_hi[k][c] < lo_box[c] or acc[c] + rest_lo[k][c] > hi_box[c]:
                    return
            if k == n:
                m = tuple(exps)
                if self.is_normal(m):
                    buckets.setdefault(tuple(acc), []).append(m)
                return
            for e in range(ranges[k][0], ranges[k][1] + 1):
                exps[k] = e
                rec(k + 1, [acc[c] + e * degs[k][c] for c in range(3)])
            exps[k] = 0

        rec(0, [0, 0, 0])
        for v in buckets.values():
            v.sort(key=self.key)
        self._cache[box] = buckets
        return buckets


@dataclass(frozen=True)
class DegreeBox:
    """Inclusive bounds on (t, s, w) plus a bound on exponent magnitude."""

    t_min: int
    t_max: int
    s_min: int = 0
    s_max: int = 0
    w_min: int = 0
    w_max: int = 0
    exponent_bound: int = 24

    def contains(self, t: int, s: int = 0, w: int = 0) -> bool:
        return self.t_min <= t <= self.t_max and self.s_min <= s <= self.s_max and self.w_min <= w <= self.w_max


def box_for_window(stem_min: int, stem_max: int, filtration_max: int, exponent_bound: int = 24) -> DegreeBox:
    """Degree box covering the chart window (stems by filtrations)."""
    return DegreeBox(
        t_min=stem_min,
        t_max=stem_max + filtration_max,
        s_min=0,
        s_max=filtration_max,
        w_min=0,
        w_max=0,
        exponent_bound=exponent_bound,
    )


def normalize(p: RingPresentation, m) -> Poly:
    """Normal form of a monomial or polynomial in ``p``."""
    return p.normalize(m)


def basis_in_bidegree(
    p: RingPresentation,
    t: int,
    s: int,
    window: DegreeBox,
) -> list[tuple[Monomial, int]]:
    """Normal-form monomials of internal degree ``t`` and filtration ``s``.

    Returns ``(monomial, order)`` pairs; order 0 means free.
    """
    if not (window.t_min <= t <= window.t_max and window.s_min <= s <= window.s_max):
        raise WindowExceeded(f"(s,t)=({s},{t}) outside the enumeration window")
    buckets = p.normal_monomials(window)
    out = []
    for (bt, bs, _), monos in buckets.items():
        if bt == t and bs == s:
            out.extend(monos)
    out.sort(key=p.key)
    return [(m, p.monomial_order(m)) for m in out]


def weight_zero_line(
    p: RingPresentation,
    t_range: Iterable[int],
    weight: int = 0,
    exponent_bound: int = 24,
) -> dict[int, FgAbGroup]:
    """Group spanned by weight-``weight`` normal monomials in each degree ``t``."""
    if not p.has_weights:
        raise ValueError("presentation carries no weight grading")
    ts = list(t_range)
    if not ts:
        return {}
    box = DegreeBox(min(ts), max(ts), 0, 0, weight, weight, exponent_bound)
    buckets = p.normal_monomials(box)
    out = {}
    for t in ts:
        monos = sorted(
            (m for (bt, bs, bw), ms in buckets.items() if bt == t and bw == weight for m in ms),
            key=p.key,
        )
        out[t] = FgAbGroup.from_orders(
            [p.monomial_order(m) for m in monos],
            [p.render(m) for m in monos],
            [p.monomial_order(m) == 0 for m in monos],
        )
    return out


# ---------------------------------------------------------------------------
# derivations


def apply_derivation(p: RingPresentation, poly: Mapping[Monomial, int], gen_diffs: Mapping[str, Poly]) -> Poly:
    """Extend generator values to a derivation of odd degree and apply it.

    ``d(xy) = d(x) y + (-1)^{stem x} x d(y)``; negative powers of invertible
    generators use ``d(g^-1) = -g^-2 d(g)`` (in the graded sense).
    """
    out: Poly = {}
    gens = p.generators
    for m, c in poly.items():
        prefix_stem = 0
        for i, e in enumerate(m):
            if e == 0:
                continue
            g = gens[i]
            dg = gen_diffs.get(g.name, {})
            if dg:
                # d(g^e) = coef * g^(e-1) d(g), with d(g) moved to the right
                if g.stem % 2 == 0:
                    coef = e
                else:
                    coef = 1 if e % 2 else 0
                if coef:
                    prefix = tuple(m[k] if k < i else 0 for k in range(len(m)))
                    suffix = tuple(m[k] if k > i else 0 for k in range(len(m)))
                    gpow = tuple(e - 1 if k == i else 0 for k in range(len(m)))
                    sign = -1 if prefix_stem % 2 else 1
                    # x d(g) s = (-1)^{|dg||s|} x s d(g)
                    dg_stem_odd = (g.stem - 1) % 2
                    suffix_stem = p.stem(suffix)
                    if dg_stem_odd and suffix_stem % 2:
                        sign = -sign
                    s1, left = p.multiply(prefix, gpow)
                    s2, left = p.multiply(left, suffix)
                    for dm, dc in dg.items():
                        s3, full = p.multiply(left, dm)
                        out[full] = out.get(full, 0) + c * coef * sign * s1 * s2 * s3 * dc
            prefix_stem += e * g.stem
    return p.normalize({k: v for k, v in out.items() if v})


# ---------------------------------------------------------------------------
# parsing

_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    pieces = re.split(r"(?<!\^)([+-])", text.strip())
    out = []
    sign = 1
    pending = False
    for piece in pieces:
        if piece in ("+", "-"):
            if pending and out:
                raise ParseError(f"two operators in a row in {text!r}")
            sign = -sign if piece == "-" else sign
            pending = True
            continue
        if piece.strip():
            out.append((sign, piece.strip()))
            sign = 1
            pending = False
    if pending:
        raise ParseError(f"dangling operator in {text!r}")
    if not out:
        raise ParseError(f"empty polynomial {text!r}")
    return out


def parse_polynomial(text: str) -> list[tuple[int, list[tuple[str, int]]]]:
    """Parse ``"2*h1^3*z - a + 4b"`` into (coefficient, [(name, exp), ...]) terms."""
    if text.strip() == "0":
        return []
    terms = []
    for sign, body in _split_terms(text):
        factors = [f.strip() for f in body.split("*") if f.strip()]
        if not factors:
            raise ParseError(f"empty term in {text!r}")
        coef = sign
        exps: list[tuple[str, int]] = []
        for f in factors:
            lead = re.match(r"^(\d+)(.*)$", f)
            if lead:
                coef *= int(lead.group(1))
                f = lead.group(2).strip()
                if not f:
                    continue
            mt = _FACTOR_RE.match(f)
            if not mt:
                raise ParseError(f"cannot parse factor {f!r} in {text!r}")
            exps.append((mt.group(1), int(mt.group(2) or 1)))
        terms.append((coef, exps))
    return terms


def rule(text_lhs: str, text_rhs: str = "0") -> RewriteRule:
    """Build a :class:`RewriteRule` from strings, e.g. ``rule("a*z", "h1^2")``."""
    lhs_terms = parse_polynomial(text_lhs)
    if len(lhs_terms) != 1:
        raise ParseError(f"left side must be a single term: {text_lhs!r}")
    coef, exps = lhs_terms[0]
    rhs = tuple((c, tuple(e)) for c, e in parse_polynomial(text_rhs))
    return RewriteRule(lhs=tuple(exps), rhs=rhs, lhs_coefficient=coef)


__all__ = [
    "RingGenerator",
    "RewriteRule",
    "RingPresentation",
    "DegreeBox",
    "box_for_window",
    "normalize",
    "basis_in_bidegree",
    "weight_zero_line",
    "apply_derivation",
    "parse_polynomial",
    "rule",
]
