import pytest
from fractions import Fraction

from iwatower import (
    InvariantReport,
    PrecisionContext,
    Prime,
    SeriesElement,
    TowerDatum,
)
from iwatower.formats import (
    format_ktable,
    format_module_file,
    format_polynomial,
    format_prediction_tsv,
    format_report,
    format_tower_tsv,
    parse_descriptor,
    parse_ktable,
    parse_module_file,
    parse_polynomial,
    parse_report,
    parse_tower_tsv,
)
from iwatower.ktheory import BUILTIN_KTABLE, predict_growth, ExtensionDescriptor


@pytest.fixture
def ctx(p3):
    return PrecisionContext(p3, 6, 2, 16)


class TestPolynomialGrammar:
    def test_basic_terms(self, ctx):
        f = parse_polynomial("2*T1^2*T2 + p*T2 - 5", ctx)
        assert f.coefficient((2, 1)) == 2
        assert f.coefficient((0, 1)) == 3
        assert f.coefficient((0, 0)) == ctx.modulus - 5

    def test_p_powers(self, ctx):
        f = parse_polynomial("p^2*T1", ctx)
        assert f.coefficient((1, 0)) == 9

    def test_bare_variable(self, ctx):
        f = parse_polynomial("T2", ctx)
        assert f.coefficient((0, 1)) == 1

    def test_leading_minus(self, ctx):
        f = parse_polynomial("-T1 + 4", ctx)
        assert f.coefficient((1, 0)) == ctx.modulus - 1
        assert f.coefficient((0, 0)) == 4

    def test_like_terms_combine(self, ctx):
        f = parse_polynomial("T1 + 2*T1", ctx)
        assert f.coefficient((1, 0)) == 3

    def test_errors(self, ctx):
        for bad in ("", "T3", "q*T1", "T1 +", "2**T1"):
            with pytest.raises(ValueError):
                parse_polynomial(bad, ctx)

    def test_roundtrip(self, ctx):
        f = SeriesElement(ctx, {(0, 0): 7, (1, 2): 5, (3, 0): 1})
        assert parse_polynomial(format_polynomial(f), ctx) == f

    def test_format_zero(self, ctx):
        assert format_polynomial(SeriesElement.zero(ctx)) == "0"


class TestModuleFile:
    DOC = """\
# sample module
p: 3
N: 12
d: 1
D: 30
generators: 2
relation: T1 - p; p^2
relation: 0; T1^2 + p*T1
"""

    def test_parse(self):
        M = parse_module_file(self.DOC)
        assert M.context.p.p == 3
        assert M.context.N == 12
        assert M.generators == 2
        assert len(M.relations) == 2
        assert M.relations[0][0].coefficient((1,)) == 1

    def test_roundtrip(self):
        M = parse_module_file(self.DOC)
        assert parse_module_file(format_module_file(M)) == M

    def test_missing_header(self):
        with pytest.raises(ValueError):
            parse_module_file("p: 3\nN: 4\nrelation: T1")

    def test_wrong_relation_arity(self):
        doc = self.DOC.replace("T1 - p; p^2", "T1 - p")
        with pytest.raises(ValueError):
            parse_module_file(doc)

    def test_unknown_field(self):
        with pytest.raises(ValueError):
            parse_module_file(self.DOC + "bogus: 1\n")


class TestTowerTsv:
    def test_roundtrip(self):
        data = [
            TowerDatum(0, 1, 0, 0),
            TowerDatum(1, 2, 3, 2, ("PrecisionMargin",)),
        ]
        assert parse_tower_tsv(format_tower_tsv(data)) == data

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_tower_tsv("a\tb\n1\t2\n")


class TestReportRecord:
    def test_roundtrip(self):
        rep = InvariantReport(
            p=3,
            d=1,
            method="fitted",
            model="Iwasawa_d1",
            mu=2,
            lam=0,
            residuals=(0, 0, 1),
            window_bound=Fraction(1),
            verdict="window-consistent",
        )
        assert parse_report(format_report(rep)) == rep

    def test_exact_report(self):
        rep = InvariantReport(p=3, d=1, method="exact", mu=1, lam=2)
        assert parse_report(format_report(rep)) == rep

    def test_missing_required(self):
        with pytest.raises(ValueError):
            parse_report("p=3\nd=1\n")


class TestKTable:
    def test_roundtrip(self):
        text = format_ktable(BUILTIN_KTABLE)
        records = parse_ktable(text)
        assert records == list(BUILTIN_KTABLE)

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_ktable("x\ty\n")


class TestDescriptor:
    def test_parse(self):
        doc = """\
kind: Semidirect
d: 2
ramified_prime: v7 7 ramified
ramified_prime: w5 5 unramified
hypothesis: decomposition dimension 2
note: demo
"""
        ext = parse_descriptor(doc)
        assert ext.kind == "Semidirect"
        assert ext.d == 2
        assert len(ext.ramified_primes) == 2
        assert ext.ramified_primes[0].ramified
        assert not ext.ramified_primes[1].ramified
        assert ext.asserted_hypotheses == ("decomposition dimension 2",)

    def test_missing_kind(self):
        with pytest.raises(ValueError):
            parse_descriptor("d: 2\n")

    def test_zpd_ramified_rejected(self):
        with pytest.raises(ValueError):
            parse_descriptor("kind: Zpd\nd: 2\nramified_prime: v 7 ramified\n")


class TestPredictionTsv:
    def test_upper_bound_tagged(self):
        rep = InvariantReport(p=3, d=2, method="fitted", rank_over_h=1, mu_h=1)
        pred = predict_growth(
            rep, ExtensionDescriptor("Semidirect", 2), Prime(3), 2, range(2)
        )
        text = format_prediction_tsv(pred)
        assert "[UPPER_BOUND]" in text
        assert text.startswith("n\tmain_term\to_class\ttorsion_type\ttheorem_tag\n")
        assert "# assumes" in text
