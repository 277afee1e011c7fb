"""Truncated polynomial / power-series arithmetic over Z/p^N in d
variables, modeling the completed group algebra of Z_p^d via T_j =
(generator_j) - 1, together with one-variable Weierstrass theory.

Coefficients live in Z/p^N (fixed precision, canonical representatives
in [0, p^N)); degrees are truncated at D per variable.  Elements are
immutable sparse multidegree maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import (
    ContextMismatch,
    DegreeOverflow,
    NotSquare,
    PrecisionExhausted,
)
from .padic import Prime, ord_p

#: largest matrix size accepted by char_poly (cofactor expansion).
CHAR_POLY_SIZE_BOUND = 8


@dataclass(frozen=True)
class PrecisionContext:
    """Ambient ring parameters: work in (Z/p^N)[T_1..T_d] truncated at
    degree D per variable."""

    p: Prime
    N: int
    d: int = 1
    D: int = 16

    def __post_init__(self):
        self.p.require_odd()
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.D < 1:
            raise ValueError(f"D must be >= 1, got {self.D}")

    @property
    def modulus(self) -> int:
        return self.p.p ** self.N

    def with_precision(self, N: int) -> "PrecisionContext":
        return PrecisionContext(self.p, N, self.d, self.D)


class SeriesElement:
    """Immutable sparse element of the truncated ring.

    coefficients: dict mapping multidegree tuples (length d, entries
    <= D) to nonzero residues mod p^N.
    """

    __slots__ = ("context", "coefficients")

    def __init__(self, context: PrecisionContext, coefficients: dict):
        m = context.modulus
        clean = {}
        for exps, c in coefficients.items():
            exps = tuple(exps)
            if len(exps) != context.d:
                raise ValueError(f"multidegree {exps} has wrong arity for d={context.d}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if any(e > context.D for e in exps):
                raise DegreeOverflow(f"exponent in {exps} exceeds D={context.D}")
            c %= m
            if c:
                clean[exps] = c
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "coefficients", clean)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("SeriesElement is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(context: PrecisionContext) -> "SeriesElement":
        return SeriesElement(context, {})

    @staticmethod
    def constant(context: PrecisionContext, c: int) -> "SeriesElement":
        return SeriesElement(context, {(0,) * context.d: c})

    @staticmethod
    def variable(context: PrecisionContext, j: int = 0) -> "SeriesElement":
        if not 0 <= j < context.d:
            raise ValueError(f"variable index {j} out of range for d={context.d}")
        exps = [0] * context.d
        exps[j] = 1
        return SeriesElement(context, {tuple(exps): 1})

    @staticmethod
    def univariate(context: PrecisionContext, coeffs, j: int = 0) -> "SeriesElement":
        """Element from a list of coefficients in the single variable T_j."""
        data = {}
        for e, c in enumerate(coeffs):
            exps = [0] * context.d
            exps[j] = e
            data[tuple(exps)] = c
        return SeriesElement(context, data)

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree(self, j: int = 0) -> int:
        """Degree in variable j; -1 for the zero element."""
        if not self.coefficients:
            return -1
        return max(e[j] for e in self.coefficients)

    def coefficient(self, exps) -> int:
        return self.coefficients.get(tuple(exps), 0)

    def univariate_coeffs(self) -> list:
        """Dense coefficient list, d = 1 only."""
        if self.context.d != 1:
            raise ValueError("univariate_coeffs requires d = 1")
        out = [0] * (self.degree(0) + 1)
        for (e,), c in self.coefficients.items():
            out[e] = c
        return out if out else [0]

    def content_valuation(self) -> int:
        """min over coefficients of ord_p; N for the zero element."""
        if not self.coefficients:
            return self.context.N
        p = self.context.p
        return min(min(ord_p(c, p), self.context.N) for c in self.coefficients.values())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeriesElement)
            and self.context == other.context
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash((self.context, frozenset(self.coefficients.items())))

    def equals_mod(self, other: "SeriesElement", precision: int) -> bool:
        """Equality of coefficients mod p^precision (same context)."""
        self._require_same_context(other)
        m = self.context.p.p ** precision
        keys = set(self.coefficients) | set(other.coefficients)
        return all(
            (self.coefficients.get(k, 0) - other.coefficients.get(k, 0)) % m == 0
            for k in keys
        )

    def __repr__(self):
        if not self.coefficients:
            return "SeriesElement(0)"
        terms = []
        for exps in sorted(self.coefficients):
            c = self.coefficients[exps]
            mono = "*".join(
                f"T{j + 1}^{e}" if e > 1 else f"T{j + 1}"
                for j, e in enumerate(exps)
                if e
            )
            terms.append(f"{c}*{mono}" if mono else str(c))
        return "SeriesElement(" + " + ".join(terms) + ")"

    # -- arithmetic ---------------------------------------------------

    def _require_same_context(self, other: "SeriesElement"):
        if self.context != other.context:
            raise ContextMismatch(f"{self.context} vs {other.context}")

    def __add__(self, other: "SeriesElement") -> "SeriesElement":
        self._require_same_context(other)
        data = dict(self.coefficients)
        for exps, c in other.coefficients.items():
            data[exps] = data.get(exps, 0) + c
        return SeriesElement(self.context, data)

    def __neg__(self) -> "SeriesElement":
        return SeriesElement(self.context, {e: -c for e, c in self.coefficients.items()})

    def __sub__(self, other: "SeriesElement") -> "SeriesElement":
        return self + (-other)

    def __mul__(self, other: "SeriesElement") -> "SeriesElement":
        """Convolution product, truncated at degree D per variable
        (documented power-series contract; no error on truncation)."""
        self._require_same_context(other)
        ctx = self.context
        D = ctx.D
        data = {}
        for ea, ca in self.coefficients.items():
            for eb, cb in other.coefficients.items():
                exps = tuple(x + y for x, y in zip(ea, eb))
                if any(e > D for e in exps):
                    continue
                data[exps] = data.get(exps, 0) + ca * cb
        return SeriesElement(ctx, data)

    def scale(self, c: int) -> "SeriesElement":
        return SeriesElement(self.context, {e: v * c for e, v in self.coefficients.items()})


def omega(context: PrecisionContext, n: int, j: int = 0) -> SeriesElement:
    """(1 + T_j)^{p^n} - 1: monic distinguished of degree p^n in T_j;
    generates the relative augmentation ideal of the level-n subgroup
    in variable j."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    q = context.p.p ** n
    if q > context.D:
        raise DegreeOverflow(f"deg omega({n}) = {q} exceeds D = {context.D}")
    data = {}
    for e in range(1, q + 1):
        exps = [0] * context.d
        exps[j] = e
        data[tuple(exps)] = comb(q, e)
    return SeriesElement(context, data)


def omega_int_coeffs(p: int, n: int) -> list:
    """Exact integer coefficient list of (1+T)^{p^n} - 1 (constant term
    first), untruncated.  Used by the resultant oracle and by the
    coinvariant reduction tables."""
    q = p ** n
    return [0] + [comb(q, e) for e in range(1, q + 1)]


# -- one-variable Weierstrass theory ---------------------------------


@dataclass(frozen=True)
class WeierstrassForm:
    """f = p^mu * distinguished * unit to effective precision N - mu.

    distinguished is monic of degree lam with non-leading coefficients
    divisible by p; unit has unit constant term.  Both live in a context
    with precision N - mu.
    """

    mu: int
    distinguished: SeriesElement
    unit: SeriesElement
    lam: int
    effective_precision: int


def _unit_inverse(u: SeriesElement) -> SeriesElement:
    """Inverse of a unit power series mod (p^N, T^{D+1}) by Newton
    iteration; d = 1 only."""
    ctx = u.context
    c0 = u.coefficient((0,))
    if c0 % ctx.p.p == 0:
        raise PrecisionExhausted("constant term is not a unit")
    inv0 = pow(c0, -1, ctx.modulus)
    x = SeriesElement.constant(ctx, inv0)
    two = SeriesElement.constant(ctx, 2)
    # doubles correct T-adic order each step
    steps = max(1, ctx.D.bit_length() + 1)
    for _ in range(steps):
        x = x * (two - u * x)
    return x


def _divmod_monic(f: SeriesElement, g: SeriesElement) -> tuple:
    """Exact polynomial division by a monic univariate g (d = 1).
    Returns (q, r) with f = q*g + r, deg r < deg g."""
    ctx = f.context
    m = ctx.modulus
    gc = g.univariate_coeffs()
    dg = len(gc) - 1
    if gc[dg] % m != 1:
        raise ValueError("divisor must be monic")
    fc = f.univariate_coeffs()
    fc = [c % m for c in fc]
    q = [0] * max(1, len(fc) - dg)
    for k in range(len(fc) - 1, dg - 1, -1):
        c = fc[k] % m
        if c:
            q[k - dg] = c
            for i in range(dg + 1):
                fc[k - dg + i] = (fc[k - dg + i] - c * gc[i]) % m
    r = fc[:dg] if dg > 0 else [0]
    return (
        SeriesElement.univariate(ctx, q),
        SeriesElement.univariate(ctx, r),
    )


def weierstrass_divide(f: SeriesElement, g: SeriesElement) -> tuple:
    """Division of f by a distinguished polynomial g (d = 1): returns
    (q, r) with f = q*g + r and deg r < deg g, unique at working
    precision."""
    if f.context.d != 1:
        raise ValueError("weierstrass_divide requires d = 1")
    f._require_same_context(g)
    if g.is_zero():
        raise ValueError("division by zero")
    if g.degree(0) > f.context.D:
        raise DegreeOverflow("divisor degree exceeds D")
    return _divmod_monic(f, g)


def weierstrass_prepare(f: SeriesElement, guard: int = 1) -> WeierstrassForm:
    """Weierstrass preparation of a nonzero univariate f: factor
    f = p^mu * distinguished * unit.

    mu is the content valuation.  The distinguished part and unit live
    in a derived context of precision N - mu, in which the factorization
    holds exactly (mod T^{D+1}).  Raises PrecisionExhausted when mu is
    too close to N or when no unit coefficient appears within degree D.
    """
    ctx = f.context
    if ctx.d != 1:
        raise ValueError("weierstrass_prepare requires d = 1")
    if f.is_zero():
        raise PrecisionExhausted("f is 0 at this precision")
    p = ctx.p.p
    mu = f.content_valuation()
    if mu >= ctx.N - guard:
        raise PrecisionExhausted(
            f"content valuation {mu} >= N - guard = {ctx.N - guard}"
        )
    eff = ctx.N - mu
    work = ctx.with_precision(eff)
    f1 = SeriesElement(
        work, {e: c // (p ** mu) for e, c in f.coefficients.items()}
    )
    coeffs = f1.univariate_coeffs()
    lam = next((k for k, c in enumerate(coeffs) if c % p != 0), None)
    if lam is None:
        raise PrecisionExhausted(
            "no unit coefficient within degree D after removing content"
        )
    if lam == 0:
        # f1 is already a unit
        return WeierstrassForm(
            mu=mu,
            distinguished=SeriesElement.constant(work, 1),
            unit=f1,
            lam=0,
            effective_precision=eff,
        )
    # Hensel lifting of the factorization f1 = g*u from the exact split
    # f1 = (lower part) + T^lam * (upper part): start with g = T^lam,
    # u = upper part, error = lower part = 0 mod p.
    upper = SeriesElement.univariate(work, coeffs[lam:])
    g = SeriesElement.univariate(work, [0] * lam + [1])
    u = upper
    for _ in range(eff.bit_length() + 1):
        e = f1 - g * u
        if e.is_zero():
            break
        w = e * _unit_inverse(u)
        q, dg = _divmod_monic(w, g)
        du = q * u
        g = g + dg
        u = u + du
    assert (f1 - g * u).is_zero(), "Hensel lifting failed to converge"
    return WeierstrassForm(mu=mu, distinguished=g, unit=u, lam=lam, effective_precision=eff)


# -- characteristic power series of a square presentation ------------


def char_poly(matrix) -> SeriesElement:
    """Determinant of a square matrix over the one-variable truncated
    ring, by cofactor expansion on memoized column subsets (exact; no
    divisions, so no non-unit pivot issues).  A nonzero determinant
    certifies the presented cokernel is torsion and generates its
    characteristic ideal at working precision."""
    k = len(matrix)
    if k == 0:
        raise NotSquare("empty matrix")
    if any(len(row) != k for row in matrix):
        raise NotSquare("matrix is not square")
    if k > CHAR_POLY_SIZE_BOUND:
        raise NotSquare(f"matrix size {k} exceeds bound {CHAR_POLY_SIZE_BOUND}")
    ctx = matrix[0][0].context
    for row in matrix:
        for entry in row:
            entry._require_same_context(matrix[0][0])
    if ctx.d != 1:
        raise ValueError("char_poly requires d = 1")
    # minors[cols] = det of rows (k - len(cols))..k-1 restricted to cols
    minors = {(): SeriesElement.constant(ctx, 1)}
    for r in range(k - 1, -1, -1):
        size = k - r
        new = {}
        for cols in combinations(range(k), size):
            acc = SeriesElement.zero(ctx)
            for idx, c in enumerate(cols):
                rest = cols[:idx] + cols[idx + 1:]
                term = matrix[r][c] * minors[rest]
                acc = acc + term if idx % 2 == 0 else acc - term
            new[cols] = acc
        minors = new
    det = minors[tuple(range(k))]
    if det.is_zero():
        raise PrecisionExhausted(
            "determinant vanishes mod (p^N, T^(D+1)); torsionness not certifiable"
        )
    return det
