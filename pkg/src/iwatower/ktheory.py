"""Arithmetic bookkeeping for even K-groups of rings of integers:
translation between stored K-group order decompositions and second
Galois-cohomology orders, change-of-S accounting through local residue
field terms, vanishing propagation up towers, and growth prediction
tables driven by supplied invariants.

Every emitted prediction or certificate labels the identification of
the p-part of an even K-group with the corresponding H^2-order as a
theorem-backed assumption (Quillen-Lichtenbaum), keeping translation
steps distinguishable from computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy

from .errors import MissingInvariant, ResidueCharacteristicP
from .invariants import InvariantReport
from .padic import Prime, h1_local_order, ord_p

QL_ASSUMPTION = (
    "assumes: p-part of K_{2i-2}(O_F) identified with "
    "H^2(G_{S_p}(F), Z_p(i)) (Quillen-Lichtenbaum)"
)

KINDS = ("Zp", "Zpd", "Uniform", "Semidirect")


@dataclass(frozen=True)
class KGroupRecord:
    """A known even K-group order decomposition: cyclic factor orders
    (prime powers), so one record serves all p."""

    field_label: str
    i: int
    order_decomposition: tuple
    source: str = ""

    def __post_init__(self):
        if self.i < 2:
            raise ValueError(f"twist i must be >= 2, got {self.i}")
        decomp = tuple(int(x) for x in self.order_decomposition)
        for x in decomp:
            if x < 2 or len(sympy.factorint(x)) != 1:
                raise ValueError(f"decomposition entry {x} is not a prime power")
        object.__setattr__(self, "order_decomposition", decomp)


@dataclass(frozen=True)
class LocalPrimeDatum:
    """Residue data of a prime: label, residue cardinality q, and
    whether the prime ramifies in the extension."""

    label: str
    q: int
    ramified: bool = True

    def __post_init__(self):
        if self.q < 2 or len(sympy.factorint(self.q)) != 1:
            raise ValueError(f"q = {self.q} is not a prime power")


@dataclass(frozen=True)
class ExtensionDescriptor:
    """The tower setting: which growth theorem applies and which primes
    outside p ramify.  Zp/Zpd towers are unramified outside p, so their
    ramified list must be empty."""

    kind: str
    d: int
    ramified_primes: tuple = ()
    asserted_hypotheses: tuple = ()
    notes: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown extension kind {self.kind!r}")
        if self.kind == "Zp" and self.d != 1:
            raise ValueError("Zp kind requires d = 1")
        if self.kind == "Zpd" and self.d < 2:
            raise ValueError("Zpd kind requires d >= 2")
        if self.kind == "Semidirect" and self.d < 2:
            raise ValueError("Semidirect kind requires d >= 2")
        prs = tuple(self.ramified_primes)
        if self.kind in ("Zp", "Zpd") and any(v.ramified for v in prs):
            raise ValueError(
                f"{self.kind} towers are unramified outside p; "
                "ramified prime list must be empty"
            )
        object.__setattr__(self, "ramified_primes", prs)
        object.__setattr__(self, "asserted_hypotheses", tuple(self.asserted_hypotheses))
        object.__setattr__(self, "notes", tuple(self.notes))


def k_even_order_to_h2(record: KGroupRecord, p: Prime) -> int:
    """log_p of the p-part of the stored order decomposition; equals
    log_p of the corresponding H^2-order under the identification."""
    p.require_odd()
    return sum(ord_p(x, p) for x in record.order_decomposition)


def change_of_s_order(log_h2_sp: int, locals_, i: int, p: Prime) -> int:
    """log_p |H^2 over the larger set S|: orders multiply along the
    change-of-S short exact sequence, each prime outside p contributing
    its local H^1-order."""
    if log_h2_sp < 0:
        raise ValueError("log_h2_sp must be >= 0")
    total = log_h2_sp
    for v in locals_:
        if v.q % p.p == 0:
            raise ResidueCharacteristicP(
                f"prime {v.label} has residue characteristic p = {p.p}"
            )
        total += h1_local_order(v.q, i, p)
    return total


@dataclass(frozen=True)
class VanishingCertificate:
    """Audit record of the vanishing-propagation check: each condition
    is carried verbatim with its outcome."""

    certified: bool
    field_label: str
    p: int
    i: int
    conditions: tuple  # (description, passed) pairs
    assumptions: tuple = (QL_ASSUMPTION,)

    @property
    def failing(self):
        return tuple(desc for desc, ok in self.conditions if not ok)


def vanishing_propagation(
    record: KGroupRecord, ext: ExtensionDescriptor, p: Prime, i: int = None
) -> VanishingCertificate:
    """Certify that the p-part of the even K-group vanishes along the
    whole tower: requires (a) trivial p-part of the stored base order
    and (b) every ramified prime outside p has trivial local H^1 term.
    NotCertified is a value, not an error."""
    p.require_odd()
    if i is None:
        i = record.i
    if i != record.i:
        raise ValueError(f"record is for twist i = {record.i}, requested {i}")
    conditions = []
    p_part = k_even_order_to_h2(record, p)
    conditions.append(
        (
            f"p-part of |K_{{2i-2}}(O_F)| is trivial for p = {p.p} "
            f"(log_p = {p_part})",
            p_part == 0,
        )
    )
    for v in ext.ramified_primes:
        if not v.ramified or v.q % p.p == 0:
            continue
        h1 = h1_local_order(v.q, i, p)
        conditions.append(
            (
                f"ramified prime {v.label} (q = {v.q}): "
                f"ord_p(q^(i-1) - 1) = {h1} must vanish",
                h1 == 0,
            )
        )
    certified = all(ok for _, ok in conditions)
    return VanishingCertificate(
        certified=certified,
        field_label=record.field_label,
        p=p.p,
        i=i,
        conditions=tuple(conditions),
    )


@dataclass(frozen=True)
class PredictionRow:
    n: int
    main_term: int
    o_class: str
    torsion_type: str  # "p^inf" or "p^n"
    theorem_tag: str
    qualifier: str = "asymptotic"  # or "upper-bound"


@dataclass(frozen=True)
class TowerPrediction:
    rows: tuple
    assumptions: tuple


def predict_growth(
    inv: InvariantReport,
    ext: ExtensionDescriptor,
    p: Prime,
    i: int,
    n_range,
) -> TowerPrediction:
    """Per-level main terms of the growth law matching the extension
    kind, with symbolic O-class labels (the underlying theorems provide
    no constants)."""
    p.require_odd()
    d = ext.d
    q = p.p
    rows = []
    if ext.kind == "Zp":
        mu, lam = inv.slot("mu"), inv.slot("lam")
        for n in n_range:
            rows.append(
                PredictionRow(n, mu * q ** n + lam * n, "O(1)", "p^inf", "zp-tower")
            )
    elif ext.kind == "Zpd":
        mu, l0 = inv.slot("mu"), inv.slot("l0")
        for n in n_range:
            rows.append(
                PredictionRow(
                    n,
                    mu * q ** (d * n) + l0 * n * q ** ((d - 1) * n),
                    "O(p^((d-1)n))",
                    "p^inf",
                    "zpd-tower",
                )
            )
    elif ext.kind == "Uniform":
        mu = inv.slot("mu")
        for n in n_range:
            rows.append(
                PredictionRow(
                    n,
                    mu * q ** (d * n),
                    "O(n*p^((d-1)n))",
                    "p^n",
                    "uniform-tower",
                )
            )
    elif ext.kind == "Semidirect":
        rank_h = inv.slot("rank_over_h")
        for n in n_range:
            rows.append(
                PredictionRow(
                    n,
                    rank_h * n * q ** ((d - 1) * n),
                    "O(p^((d-1)n))",
                    "p^inf",
                    "semidirect-tower",
                )
            )
        if inv.mu_h is not None:
            for n in n_range:
                rows.append(
                    PredictionRow(
                        n,
                        rank_h * n * q ** ((d - 1) * n)
                        + inv.mu_h * q ** ((d - 1) * n),
                        "O(n*p^((d-2)n))",
                        "p^n",
                        "semidirect-upper-bound",
                        qualifier="UPPER_BOUND",
                    )
                )
    assumptions = [QL_ASSUMPTION]
    for hyp in ext.asserted_hypotheses:
        assumptions.append(f"asserted (unchecked): {hyp}")
    return TowerPrediction(tuple(rows), tuple(assumptions))


def mod_p_h2_dimension(cl_sp_p_rank: int, s_p_count: int) -> int:
    """F_p-dimension of the mod-p second cohomology from the p-rank of
    the S_p-class group and the number of primes above p."""
    if s_p_count < 1:
        raise ValueError(f"s_p_count must be >= 1, got {s_p_count}")
    if cl_sp_p_rank < 0:
        raise ValueError(f"cl_sp_p_rank must be >= 0, got {cl_sp_p_rank}")
    return cl_sp_p_rank + s_p_count - 1


#: stored K-group records shipped with the package.
BUILTIN_KTABLE = (
    KGroupRecord(
        field_label="Q(sqrt(-4683))",
        i=2,
        order_decomposition=(2, 2, 3, 37),
        source="Browkin-Gangl tame kernel tables (imaginary quadratic fields)",
    ),
)
