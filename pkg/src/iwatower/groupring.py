"""Brute-force module arithmetic over finite p-group rings (Z/p^N)[G]:
augmentation-ideal quotients, subgroup coinvariants, and the fixed test
corpus of small 3-groups.

Everything is expanded on the abelian basis (generator, group element)
and resolved by Smith normal form over Z/p^N, so quotient orders are
exact brute-force counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import GroupTooLarge, HypothesisViolated
from .modules import AbelianShape, snf
from .padic import Prime

DEFAULT_ORDER_CAP = 243


class FiniteGroup:
    """Explicit finite group: elements 0..order-1 with a multiplication
    table.  The table is checked to be a group (exhaustive
    associativity, identity, inverses) at construction."""

    def __init__(self, table, name: str = "G", order_cap: int = DEFAULT_ORDER_CAP):
        table = [list(row) for row in table]
        n = len(table)
        if n > order_cap:
            raise GroupTooLarge(f"order {n} exceeds cap {order_cap}")
        if any(len(row) != n for row in table):
            raise ValueError("multiplication table is not square")
        self.table = table
        self.order = n
        self.name = name
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()
        self._check_associativity()

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        raise ValueError("no identity element")

    def _find_inverses(self):
        inv = [None] * self.order
        e = self.identity
        for x in range(self.order):
            for y in range(self.order):
                if self.table[x][y] == e and self.table[y][x] == e:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise ValueError(f"element {x} has no inverse")
        return inv

    def _check_associativity(self):
        t = self.table
        for a in range(self.order):
            ta = t[a]
            for b in range(self.order):
                tab = t[ta[b]]
                tb = t[b]
                for c in range(self.order):
                    if tab[c] != ta[tb[c]]:
                        raise ValueError("multiplication table is not associative")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def power(self, a: int, k: int) -> int:
        r = self.identity
        for _ in range(k):
            r = self.mul(r, a)
        return r

    def closure(self, generators) -> frozenset:
        """Subgroup generated by the given elements."""
        seen = {self.identity}
        frontier = set(generators) - seen
        seen |= frontier
        while frontier:
            new = set()
            for a in seen:
                for b in frontier:
                    for c in (self.mul(a, b), self.mul(b, a)):
                        if c not in seen:
                            new.add(c)
            seen |= new
            frontier = new
        return frozenset(seen)

    def is_normal(self, subgroup) -> bool:
        sub = set(subgroup)
        return all(
            self.mul(self.mul(g, u), self.inverse[g]) in sub
            for g in range(self.order)
            for u in sub
        )

    def conjugates(self, elements) -> frozenset:
        """All G-conjugates of the given elements."""
        out = set()
        for g in range(self.order):
            gi = self.inverse[g]
            for u in elements:
                out.add(self.mul(self.mul(g, u), gi))
        return frozenset(out)

    def power_subgroup(self, subgroup, exponent: int) -> frozenset:
        """Subgroup generated by the exponent-th powers of the given
        subgroup's elements."""
        return self.closure({self.power(u, exponent) for u in subgroup})

    def all_subgroups(self):
        """Every subgroup, by closing generator sets (order-capped
        groups only, so this stays tractable)."""
        subs = {frozenset({self.identity})}
        frontier = set(subs)
        while frontier:
            new = set()
            for sub in frontier:
                for x in range(self.order):
                    if x in sub:
                        continue
                    bigger = self.closure(set(sub) | {x})
                    if bigger not in subs:
                        new.add(bigger)
            subs |= new
            frontier = new
        return sorted(subs, key=lambda s: (len(s), sorted(s)))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


# ------------------------------------------------------------------
# constructions
# ------------------------------------------------------------------


def cyclic_group(k: int) -> FiniteGroup:
    table = [[(a + b) % k for b in range(k)] for a in range(k)]
    return FiniteGroup(table, name=f"C{k}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    n, m = G.order, H.order
    idx = lambda a, b: a * m + b
    table = [
        [
            idx(G.mul(a, a2), H.mul(b, b2))
            for a2 in range(n)
            for b2 in range(m)
        ]
        for a in range(n)
        for b in range(m)
    ]
    return FiniteGroup(table, name=f"{G.name}x{H.name}")


def semidirect_c3_c9() -> FiniteGroup:
    """C9 acted on by C3 through multiplication by 4 (an order-3
    automorphism of Z/9); elements (x mod 9, a mod 3)."""
    def idx(x, a):
        return x * 3 + a

    table = [[0] * 27 for _ in range(27)]
    for x, a, x2, a2 in product(range(9), range(3), range(9), range(3)):
        y = (x + x2 * pow(4, a, 9)) % 9
        table[idx(x, a)][idx(x2, a2)] = idx(y, (a + a2) % 3)
    return FiniteGroup(table, name="C9:C3")


def heisenberg(p: int = 3) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z/p; elements (a, b, c)
    with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')."""
    def idx(a, b, c):
        return (a * p + b) * p + c

    n = p ** 3
    table = [[0] * n for _ in range(n)]
    for a, b, c, a2, b2, c2 in product(range(p), repeat=6):
        table[idx(a, b, c)][idx(a2, b2, c2)] = idx(
            (a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p
        )
    return FiniteGroup(table, name=f"Heis{p}")


def corpus_groups(p: int = 3):
    """Fixed in-repo corpus for the finite-level lemma checks: each
    entry is (group, H, Gamma) with H normal, G = H*Gamma and
    H meet Gamma trivial."""
    if p != 3:
        raise ValueError("the fixed corpus is defined for p = 3")
    out = []
    c3, c9, c81 = cyclic_group(3), cyclic_group(9), cyclic_group(81)
    triv = lambda G: frozenset({G.identity})
    out.append((c3, triv(c3), frozenset(range(3))))
    out.append((c9, triv(c9), frozenset(range(9))))
    out.append((c81, triv(c81), frozenset(range(81))))
    e9 = direct_product(c3, c3)
    out.append((e9, e9.closure({3}), e9.closure({1})))  # first factor, second factor
    e27 = direct_product(direct_product(c3, c3), c3)
    out.append((e27, e27.closure({3, 9}), e27.closure({1})))
    sd = semidirect_c3_c9()
    out.append((sd, sd.closure({3}), sd.closure({1})))  # H = C9 = {(x,0)}, Gamma = {(0,a)}
    h = heisenberg(3)
    # H = {(0,b,c)} of order 9 (normal, contains the center); Gamma = {(a,0,0)}
    out.append((h, h.closure({3, 1}), h.closure({9})))
    return out


# ------------------------------------------------------------------
# modules over (Z/p^N)[G]
# ------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroupRingModule:
    """Finite presentation over the group ring: generators `k` and
    relations given as vectors of group-ring elements, each a dict
    mapping group-element index to an integer coefficient."""

    group: FiniteGroup
    p: Prime
    N: int
    generators: int = 1
    relations: tuple = ()

    def __post_init__(self):
        if self.group.order % self.p.p != 0 and self.group.order != 1:
            raise ValueError("group order must be a power of p")
        order = self.group.order
        while order % self.p.p == 0:
            order //= self.p.p
        if order != 1:
            raise ValueError("group order must be a power of p")
        rels = tuple(tuple(dict(e) for e in row) for row in self.relations)
        for row in rels:
            if len(row) != self.generators:
                raise ValueError("relation length does not match generator count")
        object.__setattr__(self, "relations", rels)

    @property
    def basis_size(self) -> int:
        return self.generators * self.group.order

    def _base_rows(self):
        """Abelian relation rows: each presentation relation multiplied
        on the left by every group element."""
        G = self.group
        rows = []
        for rel in self.relations:
            for g in range(G.order):
                row = [0] * self.basis_size
                for j, entry in enumerate(rel):
                    for s, c in entry.items():
                        row[j * G.order + G.mul(g, s)] += c
                rows.append(row)
        return rows

    def _difference_rows(self, multipliers, translates=None):
        """Rows (w - 1) * t * e_j for w in `multipliers`, t in
        `translates` (defaults to all of G), j over generators."""
        G = self.group
        if translates is None:
            translates = range(G.order)
        rows = []
        e = G.identity
        for w in multipliers:
            if w == e:
                continue
            for t in translates:
                for j in range(self.generators):
                    row = [0] * self.basis_size
                    row[j * G.order + G.mul(w, t)] += 1
                    row[j * G.order + t] -= 1
                    rows.append(row)
        return rows

    def shape_of(self, extra_rows) -> AbelianShape:
        rows = self._base_rows() + list(extra_rows)
        if not rows:
            return AbelianShape((), self.basis_size, self.N)
        mat = np.zeros((len(rows), self.basis_size), dtype=np.int64)
        for i, row in enumerate(rows):
            mat[i] = row
        return snf(mat, self.p, self.N)

    def shape(self) -> AbelianShape:
        return self.shape_of([])


def group_ring_module(group: FiniteGroup, p: Prime, N: int) -> FiniteGroupRingModule:
    """The group ring itself as a module over itself."""
    return FiniteGroupRingModule(group, p, N, generators=1, relations=())


# ------------------------------------------------------------------
# the lemma-level operations
# ------------------------------------------------------------------


@dataclass(frozen=True)
class AugmentationQuotients:
    """Brute-force comparison of M/I_U M (span of (u-1)x under the
    subgroup ring only) against M/M(U) (full group-ring span)."""

    log_size_iu: int  # log_p |M / I_U M|
    log_size_mu: int  # log_p |M / M(U)|
    inclusion_strict: bool


def augmentation_quotients(M: FiniteGroupRingModule, U) -> AugmentationQuotients:
    G = M.group
    U = G.closure(U)
    iu_rows = M._difference_rows(U)
    mu_rows = M._difference_rows(G.conjugates(U))
    log_iu = M.shape_of(iu_rows).log_order()
    log_mu = M.shape_of(mu_rows).log_order()
    return AugmentationQuotients(log_iu, log_mu, log_iu != log_mu)


@dataclass(frozen=True)
class QuotientCoinvariantReport:
    """The three quotient-coinvariant shapes computed by brute force:
    they are asserted pairwise equal when H_m is normal and meets
    Gamma_n trivially."""

    shape_hm_then_gamma: AbelianShape
    shape_joint: AbelianShape
    shape_gamma_then_hm: AbelianShape

    @property
    def all_equal(self) -> bool:
        return self.shape_hm_then_gamma == self.shape_joint == self.shape_gamma_then_hm


def quotient_coinvariant_check(
    M: FiniteGroupRingModule, H_m, Gamma_n
) -> QuotientCoinvariantReport:
    """Compare (M_{H_m})_{Gamma_n}, M / M(H_m Gamma_n) and
    (M/M(Gamma_n))_{H_m} as abelian groups."""
    G = M.group
    H_m = G.closure(H_m)
    Gamma_n = G.closure(Gamma_n)
    if not G.is_normal(H_m):
        raise HypothesisViolated("H_m must be normal in G")
    if len(H_m & Gamma_n) != 1:
        raise HypothesisViolated("H_m and Gamma_n must intersect trivially")
    joint = G.closure(H_m | Gamma_n)
    if not G.is_normal(joint):
        raise HypothesisViolated(
            "the joint level subgroup generated by H_m and Gamma_n must "
            "be normal in G"
        )
    # (M_{H_m})_{Gamma_n}: H_m is normal so M(H_m) rows need no
    # conjugation; the Gamma_n coinvariants of the quotient add plain
    # difference rows (subgroup-ring span suffices for coinvariants)
    rows1 = M._difference_rows(H_m) + M._difference_rows(Gamma_n)
    shape1 = M.shape_of(rows1)
    # M / M(G_{m,n})
    shape2 = M.shape_of(M._difference_rows(G.conjugates(joint)))
    # (M / M(Gamma_n))_{H_m}
    rows3 = M._difference_rows(G.conjugates(Gamma_n)) + M._difference_rows(H_m)
    shape3 = M.shape_of(rows3)
    return QuotientCoinvariantReport(shape1, shape2, shape3)
