"""Text formats: the polynomial grammar, the module-presentation file,
tower TSV tables, invariant-report records, K-group tables, extension
descriptors, and prediction TSV output.

All table formats are TSV with a single header row; structured inputs
are line-oriented `key: value` documents with `#` comments, chosen over
binary formats for auditability.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .invariants import InvariantReport
from .ktheory import ExtensionDescriptor, KGroupRecord, LocalPrimeDatum, TowerPrediction
from .modules import ModulePresentation, TowerDatum
from .padic import Prime
from .series import PrecisionContext, SeriesElement

_VAR_RE = re.compile(r"^T(\d+)(?:\^(\d+))?$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_P_RE = re.compile(r"^p(?:\^(\d+))?$")


def parse_polynomial(text: str, context: PrecisionContext) -> SeriesElement:
    """Parse the term grammar `c*T1^a*T2^b`, terms joined by + or -,
    with `p` (and `p^k`) allowed as a literal for the context prime."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    # split into signed terms at top level
    terms = []
    sign, buf = 1, []
    for ch in text:
        if ch in "+-" and buf and buf[-1] not in "*^":
            terms.append((sign, "".join(buf).strip()))
            sign, buf = (1 if ch == "+" else -1), []
        elif ch in "+-" and not "".join(buf).strip():
            sign *= 1 if ch == "+" else -1
        else:
            buf.append(ch)
    last = "".join(buf).strip()
    if not last:
        raise ValueError(f"dangling sign in polynomial {text!r}")
    terms.append((sign, last))

    data = {}
    p = context.p.p
    for sign, term in terms:
        coeff = sign
        exps = [0] * context.d
        for factor in (f.strip() for f in term.split("*")):
            if not factor:
                raise ValueError(f"empty factor in term {term!r}")
            m = _VAR_RE.match(factor)
            if m:
                j = int(m.group(1)) - 1
                if not 0 <= j < context.d:
                    raise ValueError(
                        f"variable T{j + 1} out of range for d = {context.d}"
                    )
                exps[j] += int(m.group(2) or 1)
                continue
            m = _P_RE.match(factor)
            if m:
                coeff *= p ** int(m.group(1) or 1)
                continue
            if _INT_RE.match(factor):
                coeff *= int(factor)
                continue
            raise ValueError(f"cannot parse factor {factor!r} in {term!r}")
        key = tuple(exps)
        data[key] = data.get(key, 0) + coeff
    return SeriesElement(context, data)


def format_polynomial(f: SeriesElement) -> str:
    """Inverse of parse_polynomial (canonical representatives)."""
    if f.is_zero():
        return "0"
    parts = []
    for exps in sorted(f.coefficients):
        c = f.coefficients[exps]
        factors = [str(c)]
        for j, e in enumerate(exps):
            if e == 1:
                factors.append(f"T{j + 1}")
            elif e > 1:
                factors.append(f"T{j + 1}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


# ------------------------------------------------------------------
# module-presentation file
# ------------------------------------------------------------------

_HEADER_KEYS = ("p", "N", "d", "D", "generators")


def _logical_lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def parse_module_file(text: str, N: int = None, D: int = None) -> ModulePresentation:
    """Parse the module-presentation document: header fields p, N, d,
    D, generators, then `relation:` lines whose entries are
    `;`-separated polynomials (one per generator).  N and D arguments
    override the header values (command-line precision control)."""
    header = {}
    relation_lines = []
    for line in _logical_lines(text):
        if ":" not in line:
            raise ValueError(f"malformed line (no colon): {line!r}")
        key, value = (s.strip() for s in line.split(":", 1))
        if key == "relation":
            relation_lines.append(value)
        elif key in _HEADER_KEYS:
            if key in header:
                raise ValueError(f"duplicate header field {key!r}")
            header[key] = int(value)
        else:
            raise ValueError(f"unknown field {key!r}")
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise ValueError(f"missing header fields: {', '.join(missing)}")
    if N is not None:
        header["N"] = N
    if D is not None:
        header["D"] = D
    context = PrecisionContext(
        Prime(header["p"]), header["N"], header["d"], header["D"]
    )
    k = header["generators"]
    relations = []
    for value in relation_lines:
        entries = [e.strip() for e in value.split(";")]
        if len(entries) != k:
            raise ValueError(
                f"relation has {len(entries)} entries, expected {k}: {value!r}"
            )
        relations.append(tuple(parse_polynomial(e, context) for e in entries))
    return ModulePresentation(context, k, tuple(relations))


def format_module_file(M: ModulePresentation) -> str:
    ctx = M.context
    lines = [
        f"p: {ctx.p.p}",
        f"N: {ctx.N}",
        f"d: {ctx.d}",
        f"D: {ctx.D}",
        f"generators: {M.generators}",
    ]
    for row in M.relations:
        lines.append("relation: " + "; ".join(format_polynomial(e) for e in row))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------
# tower TSV
# ------------------------------------------------------------------

TOWER_COLUMNS = ("n", "log_torsion", "zp_rank", "log_mod_pn", "flags")


def format_tower_tsv(data) -> str:
    lines = ["\t".join(TOWER_COLUMNS)]
    for t in sorted(data, key=lambda t: t.n):
        lines.append(
            f"{t.n}\t{t.log_torsion}\t{t.zp_rank}\t{t.log_mod_pn}\t"
            + (",".join(t.flags) if t.flags else "-")
        )
    return "\n".join(lines) + "\n"


def parse_tower_tsv(text: str):
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines:
        raise ValueError("empty tower table")
    header = tuple(lines[0].split("\t"))
    if header != TOWER_COLUMNS:
        raise ValueError(f"unexpected tower header: {header}")
    out = []
    for line in lines[1:]:
        cells = line.split("\t")
        if len(cells) != len(TOWER_COLUMNS):
            raise ValueError(f"malformed tower row: {line!r}")
        n, lt, zr, lm, flags = cells
        out.append(
            TowerDatum(
                int(n),
                int(lt),
                int(zr),
                int(lm),
                () if flags == "-" else tuple(flags.split(",")),
            )
        )
    return out


# ------------------------------------------------------------------
# invariant-report record (flat key=value text)
# ------------------------------------------------------------------

_REPORT_SLOTS = ("mu", "lam", "l0", "rank", "rank_over_h", "mu_h")


def format_report(report: InvariantReport) -> str:
    lines = [
        f"p={report.p}",
        f"d={report.d}",
        f"method={report.method}",
    ]
    if report.model:
        lines.append(f"model={report.model}")
    for name in _REPORT_SLOTS:
        value = getattr(report, name)
        if value is not None:
            lines.append(f"{name}={value}")
    if report.residuals:
        lines.append("residuals=" + ",".join(str(r) for r in report.residuals))
    if report.window_bound is not None:
        lines.append(f"window_bound={report.window_bound}")
    if report.verdict:
        lines.append(f"verdict={report.verdict}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> InvariantReport:
    fields = {}
    for line in _logical_lines(text):
        if "=" not in line:
            raise ValueError(f"malformed record line: {line!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    for required in ("p", "d", "method"):
        if required not in fields:
            raise ValueError(f"missing record field {required!r}")
    kwargs = {
        "p": int(fields["p"]),
        "d": int(fields["d"]),
        "method": fields["method"],
        "model": fields.get("model", ""),
    }
    for name in _REPORT_SLOTS:
        if name in fields:
            kwargs[name] = int(fields[name])
    if "residuals" in fields:
        kwargs["residuals"] = tuple(
            int(x) for x in fields["residuals"].split(",") if x
        )
    if "window_bound" in fields:
        kwargs["window_bound"] = Fraction(fields["window_bound"])
    if "verdict" in fields:
        kwargs["verdict"] = fields["verdict"]
    return InvariantReport(**kwargs)


# ------------------------------------------------------------------
# K-group table and extension descriptor
# ------------------------------------------------------------------

KTABLE_COLUMNS = ("field_label", "i", "decomposition", "source")


def parse_ktable(text: str):
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        raise ValueError("empty K-group table")
    header = tuple(lines[0].split("\t"))
    if header != KTABLE_COLUMNS:
        raise ValueError(f"unexpected K-table header: {header}")
    out = []
    for line in lines[1:]:
        cells = line.split("\t")
        if len(cells) != len(KTABLE_COLUMNS):
            raise ValueError(f"malformed K-table row: {line!r}")
        label, i, decomposition, source = cells
        out.append(
            KGroupRecord(
                field_label=label,
                i=int(i),
                order_decomposition=tuple(
                    int(x) for x in decomposition.split(",") if x
                ),
                source=source,
            )
        )
    return out


def format_ktable(records) -> str:
    lines = ["\t".join(KTABLE_COLUMNS)]
    for r in records:
        decomposition = ",".join(str(x) for x in r.order_decomposition)
        lines.append(f"{r.field_label}\t{r.i}\t{decomposition}\t{r.source}")
    return "\n".join(lines) + "\n"


def parse_descriptor(text: str) -> ExtensionDescriptor:
    """Extension-descriptor document: `kind:` and `d:` fields plus zero
    or more `ramified_prime: label q [ramified|unramified]`,
    `hypothesis:` and `note:` lines."""
    kind = None
    d = None
    primes = []
    hypotheses = []
    notes = []
    for line in _logical_lines(text):
        if ":" not in line:
            raise ValueError(f"malformed descriptor line: {line!r}")
        key, value = (s.strip() for s in line.split(":", 1))
        if key == "kind":
            kind = value
        elif key == "d":
            d = int(value)
        elif key == "ramified_prime":
            parts = value.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"malformed ramified_prime line: {value!r}")
            ramified = True
            if len(parts) == 3:
                if parts[2] not in ("ramified", "unramified"):
                    raise ValueError(f"bad ramification flag {parts[2]!r}")
                ramified = parts[2] == "ramified"
            primes.append(LocalPrimeDatum(parts[0], int(parts[1]), ramified))
        elif key == "hypothesis":
            hypotheses.append(value)
        elif key == "note":
            notes.append(value)
        else:
            raise ValueError(f"unknown descriptor field {key!r}")
    if kind is None or d is None:
        raise ValueError("descriptor needs both 'kind' and 'd' fields")
    return ExtensionDescriptor(
        kind=kind,
        d=d,
        ramified_primes=tuple(primes),
        asserted_hypotheses=tuple(hypotheses),
        notes=tuple(notes),
    )


PREDICTION_COLUMNS = ("n", "main_term", "o_class", "torsion_type", "theorem_tag")


def format_prediction_tsv(prediction: TowerPrediction) -> str:
    lines = ["\t".join(PREDICTION_COLUMNS)]
    for row in prediction.rows:
        tag = row.theorem_tag
        if row.qualifier == "UPPER_BOUND":
            tag += "[UPPER_BOUND]"
        lines.append(
            f"{row.n}\t{row.main_term}\t{row.o_class}\t{row.torsion_type}\t{tag}"
        )
    for a in prediction.assumptions:
        lines.append(f"# {a}")
    return "\n".join(lines) + "\n"
