"""Finitely presented modules over the truncated d-variable Iwasawa
algebra: coinvariants at tower levels, Smith normal form over Z/p^N,
and the independent resultant oracle for one-variable torsion sizes.

The coinvariant computation works on the monomial basis modulo the
level-n elements (1+T_j)^{p^n} - 1, which are monic, so reduction is
exact Euclidean division per variable (no Groebner machinery).  Dense
kernels use numpy int64 arithmetic; p^N must stay below sqrt(2^63).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np
import sympy

from .errors import ContextMismatch, DimensionOverflow, PrecisionExhausted
from .padic import Prime, ord_p
from .series import PrecisionContext, SeriesElement, omega_int_coeffs

#: default cap on the number of Z/p^N basis elements of a coinvariant.
DEFAULT_DIMENSION_BOUND = 20000

#: elementary divisors with exponent >= N - guard are flagged as
#: indistinguishable from free at precision N.
DEFAULT_GUARD = 2

_INT64_MODULUS_CAP = 3_037_000_499  # floor(sqrt(2^63 - 1))


@dataclass(frozen=True)
class AbelianShape:
    """Elementary-divisor profile of a finite-precision abelian p-group:
    direct sum of Z/p^{e_i} (1 <= e_i < N) and free_rank copies of
    Z/p^N (indistinguishable from free at this precision)."""

    torsion_exponents: tuple
    free_rank_at_precision: int
    N: int

    @property
    def log_torsion(self) -> int:
        return sum(self.torsion_exponents)

    @property
    def zp_rank(self) -> int:
        return self.free_rank_at_precision

    @property
    def precision_margin(self) -> int:
        top = max(self.torsion_exponents, default=0)
        return self.N - top

    def log_order(self) -> int:
        """log_p of the order of the full finite Z/p^N-module."""
        return self.log_torsion + self.N * self.free_rank_at_precision

    def log_mod_pn(self, n: int) -> int:
        """log_p |A/p^n A|."""
        return sum(min(e, n) for e in self.torsion_exponents) + self.free_rank_at_precision * min(self.N, n)


@dataclass(frozen=True)
class ModulePresentation:
    """M = Lambda_d^k / <rows of the relation matrix>."""

    context: PrecisionContext
    generators: int
    relations: tuple  # tuple of length-k tuples of SeriesElement

    def __post_init__(self):
        if self.generators < 1:
            raise ValueError("need at least one generator")
        rels = tuple(tuple(row) for row in self.relations)
        for row in rels:
            if len(row) != self.generators:
                raise ValueError("relation length does not match generator count")
            for entry in row:
                if entry.context != self.context:
                    raise ContextMismatch(
                        "presentation entry context differs from module context"
                    )
        object.__setattr__(self, "relations", rels)

    def relation_matrix(self):
        return [list(row) for row in self.relations]

    def is_square(self) -> bool:
        return len(self.relations) == self.generators


@dataclass(frozen=True)
class TowerDatum:
    """Per-level measurement of a coinvariant quotient."""

    n: int
    log_torsion: int
    zp_rank: int
    log_mod_pn: int
    flags: tuple = ()

    @property
    def flagged(self) -> bool:
        return bool(self.flags)


# ------------------------------------------------------------------
# Smith normal form over Z/p^N
# ------------------------------------------------------------------


def _valuations(sub: np.ndarray, p: int, N: int) -> np.ndarray:
    vals = np.full(sub.shape, N, dtype=np.int64)
    t = sub.copy()
    active = t != 0
    cur = 0
    while active.any() and cur < N:
        nondiv = active & (t % p != 0)
        vals[nondiv] = cur
        active &= ~nondiv
        t[active] //= p
        cur += 1
    return vals


def snf(matrix, p: Prime, N: int) -> AbelianShape:
    """Shape of the cokernel of `matrix` viewed as relations (rows)
    among `ncols` generators of (Z/p^N)^ncols.

    Pivoting is by minimal p-valuation (first occurrence in row-major
    order), which over the local ring Z/p^N yields the elementary
    divisors directly; deterministic given that rule.
    """
    q = p.p
    m = q ** N
    if m > _INT64_MODULUS_CAP:
        raise ValueError(f"p^N = {m} too large for the dense int64 kernel")
    A = np.atleast_2d(np.asarray(matrix, dtype=np.int64)) % m
    if A.size == 0:
        ncols = A.shape[1] if A.ndim == 2 else 0
        return AbelianShape((), ncols, N)
    rows, cols = A.shape
    exps = []
    r = 0
    top = min(rows, cols)
    while r < top:
        sub = A[r:, r:]
        vals = _valuations(sub, q, N)
        e = int(vals.min())
        if e >= N:
            break
        i, j = map(int, np.argwhere(vals == e)[0])
        if i:
            A[[r, r + i], :] = A[[r + i, r], :]
        if j:
            A[:, [r, r + j]] = A[:, [r + j, r]]
        pe = q ** e
        u = int(A[r, r]) // pe
        inv = pow(u, -1, m)
        A[r, r:] = (A[r, r:] * inv) % m
        # entries below the pivot all have valuation >= e, so the
        # canonical representatives are exactly divisible by p^e
        c = A[r + 1:, r] // pe
        A[r + 1:, r:] = (A[r + 1:, r:] - c[:, None] * A[r, r:]) % m
        # column operations clearing row r only touch row r, as the
        # pivot column is now zero below the pivot
        A[r, r + 1:] = 0
        exps.append(e)
        r += 1
    torsion = tuple(sorted(e for e in exps if e >= 1))
    return AbelianShape(torsion, cols - len(exps), N)


# ------------------------------------------------------------------
# Coinvariants on the monomial basis
# ------------------------------------------------------------------


def _reduction_table(p: int, N: int, n: int, max_extra: int) -> np.ndarray:
    """red[e] = dense coefficient vector (length p^n) of T^e reduced
    modulo (1+T)^{p^n} - 1, for e < p^n + max_extra."""
    q = p ** n
    m = p ** N
    size = q + max_extra
    red = np.zeros((size, q), dtype=np.int64)
    for e in range(min(q, size)):
        red[e, e] = 1
    w = [(-comb(q, i)) % m for i in range(1, q)]  # T^q = -sum_i C(q,i) T^i
    for e in range(q, size):
        acc = np.zeros(q, dtype=np.int64)
        for i, c in enumerate(w, start=1):
            if c:
                acc = (acc + c * red[e - q + i]) % m
        red[e] = acc
    return red


def coinvariants(
    M: ModulePresentation,
    n: int,
    dimension_bound: int = DEFAULT_DIMENSION_BOUND,
) -> AbelianShape:
    """Shape of the level-n coinvariant quotient of M: the quotient of
    Lambda_d^k by the relation rows together with the level-n elements
    (1+T_j)^{p^n} - 1 acting on every generator, computed on the
    monomial basis with exponents < p^n per variable."""
    ctx = M.context
    p, N, d = ctx.p.p, ctx.N, ctx.d
    q = p ** n
    basis = M.generators * q ** d
    if basis > dimension_bound:
        raise DimensionOverflow(
            f"basis size {basis} exceeds bound {dimension_bound}"
        )
    if not M.relations:
        return AbelianShape((), basis, N)
    m = p ** N
    if m > _INT64_MODULUS_CAP:
        raise ValueError(f"p^N = {m} too large for the dense int64 kernel")
    max_deg = [0] * d
    for row in M.relations:
        for entry in row:
            for exps in entry.coefficients:
                for j in range(d):
                    max_deg[j] = max(max_deg[j], exps[j])
    red = [_reduction_table(p, N, n, max_deg[j] + 1) for j in range(d)]
    multipliers = list(np.ndindex(*([q] * d)))
    nrows = len(M.relations) * len(multipliers)
    A = np.zeros((nrows, basis), dtype=np.int64)
    block = q ** d
    row_idx = 0
    for rel in M.relations:
        for a in multipliers:
            out = A[row_idx]
            for gi, entry in enumerate(rel):
                if entry.is_zero():
                    continue
                seg = np.zeros(block, dtype=np.int64)
                for exps, c in entry.coefficients.items():
                    vec = red[0][a[0] + exps[0]]
                    for j in range(1, d):
                        vec = np.multiply.outer(vec, red[j][a[j] + exps[j]]).ravel() % m
                    seg = (seg + c * vec) % m
                out[gi * block:(gi + 1) * block] = seg
            row_idx += 1
    return snf(A, ctx.p, N)


def partial_coinvariants(
    M: ModulePresentation,
    n: int,
    variables,
    dimension_bound: int = DEFAULT_DIMENSION_BOUND,
) -> ModulePresentation:
    """Coinvariants in a subset of variables only, at level n: returns a
    new presentation over the remaining variables, with generators
    indexed by (old generator, monomial in the eliminated variables).

    Needed for coinvariants along an inner factor of the tower group.
    """
    ctx = M.context
    p, N, d, D = ctx.p.p, ctx.N, ctx.d, ctx.D
    variables = sorted(set(variables))
    if any(v < 0 or v >= d for v in variables):
        raise ValueError("variable index out of range")
    if len(variables) >= d:
        raise ValueError("use coinvariants() to eliminate all variables")
    keep = [j for j in range(d) if j not in variables]
    q = p ** n
    s = len(variables)
    new_gens = M.generators * q ** s
    if new_gens > dimension_bound:
        raise DimensionOverflow(f"generator count {new_gens} exceeds bound")
    new_ctx = PrecisionContext(ctx.p, N, len(keep), D)
    max_deg = {v: 0 for v in variables}
    for row in M.relations:
        for entry in row:
            for exps in entry.coefficients:
                for v in variables:
                    max_deg[v] = max(max_deg[v], exps[v])
    red = {v: _reduction_table(p, N, n, max_deg[v] + 1) for v in variables}
    elim_monos = list(np.ndindex(*([q] * s)))
    mono_index = {mo: idx for idx, mo in enumerate(elim_monos)}
    new_relations = []
    for rel in M.relations:
        for a in elim_monos:
            # coefficient dicts for each new generator column
            cols = [dict() for _ in range(new_gens)]
            for gi, entry in enumerate(rel):
                for exps, c in entry.coefficients.items():
                    vec = None
                    for vi, v in enumerate(variables):
                        r = red[v][a[vi] + exps[v]]
                        vec = r if vec is None else np.multiply.outer(vec, r).ravel() % (p ** N)
                    rem_exps = tuple(exps[j] for j in keep)
                    vec = vec.reshape([q] * s)
                    for mo in np.argwhere(vec):
                        mo = tuple(int(x) for x in mo)
                        col = gi * (q ** s) + mono_index[mo]
                        coeffs = cols[col]
                        coeffs[rem_exps] = coeffs.get(rem_exps, 0) + int(vec[mo]) * c
            row_out = []
            for coeffs in cols:
                scaled = {e: v for e, v in coeffs.items()}
                row_out.append(SeriesElement(new_ctx, scaled))
            new_relations.append(tuple(row_out))
    return ModulePresentation(new_ctx, new_gens, tuple(new_relations))


def tower(
    M: ModulePresentation,
    n_max: int,
    guard: int = DEFAULT_GUARD,
    dimension_bound: int = DEFAULT_DIMENSION_BOUND,
    workers: int = 1,
) -> list:
    """Coinvariant measurements for n = 0..n_max.  Levels are
    independent pure computations; per-level failures are recorded as
    flags and the run continues."""

    def level(n: int) -> TowerDatum:
        try:
            shape = coinvariants(M, n, dimension_bound)
        except DimensionOverflow:
            return TowerDatum(n, 0, 0, 0, ("DimensionOverflow",))
        except PrecisionExhausted:
            return TowerDatum(n, 0, 0, 0, ("PrecisionExhausted",))
        flags = ()
        if shape.torsion_exponents and shape.precision_margin < guard:
            flags = ("PrecisionMargin",)
        return TowerDatum(
            n,
            shape.log_torsion,
            shape.zp_rank,
            shape.log_mod_pn(n),
            flags,
        )

    ns = range(n_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(level, ns))
    return [level(n) for n in ns]


# ------------------------------------------------------------------
# Independent resultant oracle (d = 1)
# ------------------------------------------------------------------


def torsion_size_resultant_oracle(f: SeriesElement, n: int) -> int:
    """log_p of the level-n torsion size of Lambda_1/(f), computed as
    ord_p of the exact integer resultant of the level-n element with
    the canonical lift of f.

    Independent of the SNF path: exact big-integer arithmetic on lifted
    coefficients.  Raises PrecisionExhausted when the resultant is 0
    mod p^N (value not determined at this precision)."""
    ctx = f.context
    if ctx.d != 1:
        raise ValueError("resultant oracle requires d = 1")
    if f.is_zero():
        raise PrecisionExhausted("f is 0 at this precision")
    p, N = ctx.p.p, ctx.N
    T = sympy.Symbol("T")
    fint = sympy.Poly(list(reversed(f.univariate_coeffs())), T)
    wint = sympy.Poly(list(reversed(omega_int_coeffs(p, n))), T)
    # Res(w, f) = product of f over the roots of the monic w
    res = int(sympy.resultant(wint, fint))
    if res % (p ** N) == 0:
        raise PrecisionExhausted(
            "resultant is 0 mod p^N; torsion size not determined at this precision"
        )
    return ord_p(res, ctx.p)
