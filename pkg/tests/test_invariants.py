import random

import pytest

from iwatower import (
    GrowthModel,
    HypothesisViolated,
    InsufficientData,
    ModulePresentation,
    NonIntegralCoefficient,
    NotSquare,
    SeriesElement,
    TowerDatum,
    coinvariants,
    cuoco_monsky_hypothesis_check,
    exact_invariants_d1,
    fit_growth,
    mu_of_mod_pn,
    mu_positivity_equiv,
    partial_coinvariants,
    tower,
)

from conftest import cyclic_module, poly, split_module


class TestExactInvariants:
    def test_scalar_times_linear(self, ctx3):
        M = cyclic_module(ctx3, [-27, 9])  # p^2 (T - p)
        rep = exact_invariants_d1(M)
        assert (rep.mu, rep.lam) == (2, 1)
        assert rep.method == "exact"

    def test_omega_level_one(self, ctx3):
        M = cyclic_module(ctx3, [0, 3, 3, 1])
        rep = exact_invariants_d1(M)
        assert (rep.mu, rep.lam) == (0, 3)

    def test_matrix_presentation(self, ctx3):
        t = SeriesElement.variable(ctx3)
        p = SeriesElement.constant(ctx3, 3)
        M = ModulePresentation(ctx3, 2, ((t, p), (p, t)))
        rep = exact_invariants_d1(M)
        assert (rep.mu, rep.lam) == (0, 2)

    def test_non_square_rejected(self, ctx3):
        M = ModulePresentation(ctx3, 2, ())
        with pytest.raises(NotSquare):
            exact_invariants_d1(M)


class TestMuOfModPn:
    def test_known_values(self):
        assert mu_of_mod_pn({2, 3}, 0, 1) == 2
        assert mu_of_mod_pn((2, 3), 1, 5) == 10
        assert mu_of_mod_pn((), 0, 7) == 0

    def test_monotone_and_eventually_affine(self):
        alphas, r = (1, 2, 5), 2
        values = [mu_of_mod_pn(alphas, r, n) for n in range(1, 12)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        # slope stabilizes to r once n exceeds max(alphas)
        tail = [b - a for a, b in zip(values[5:], values[6:])]
        assert all(s == r for s in tail)


class TestMuPositivity:
    def test_positive(self, ctx3):
        M = cyclic_module(ctx3, [0, 3, 3])  # p * (T + T^2) ... content 1
        exact_pos, mod_p_pos = mu_positivity_equiv(M)
        assert exact_pos is True and mod_p_pos is True

    def test_zero(self, ctx3):
        M = cyclic_module(ctx3, [3, 3, 1])  # distinguished, mu = 0
        exact_pos, mod_p_pos = mu_positivity_equiv(M)
        assert exact_pos is False and mod_p_pos is False

    def test_randomized_agreement(self, ctx3):
        rng = random.Random(31)
        for _ in range(15):
            mu = rng.randrange(0, 2)
            roots = [rng.randrange(1, 9) for _ in range(rng.randrange(0, 3))]
            M = split_module(ctx3, mu, roots)
            exact_pos, mod_p_pos = mu_positivity_equiv(M)
            assert exact_pos == mod_p_pos


class TestGrowthModelValidation:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            GrowthModel("NoSuchLaw", 3, 1)

    def test_dimension_constraints(self):
        with pytest.raises(ValueError):
            GrowthModel("Iwasawa_d1", 3, 2)
        with pytest.raises(ValueError):
            GrowthModel("CuocoMonsky", 3, 1)


class TestFitGrowth:
    def test_pure_mu(self, ctx3):
        M = cyclic_module(ctx3, [9])
        data = tower(M, 5)
        rep = fit_growth(data, GrowthModel("Iwasawa_d1", 3, 1))
        assert (rep.mu, rep.lam) == (2, 0)
        assert all(r == 0 for r in rep.residuals)
        assert rep.verdict == "window-consistent"

    def test_linear_relation(self, ctx3):
        M = cyclic_module(ctx3, [-3, 1])
        data = tower(M, 5)
        rep = fit_growth(data, GrowthModel("Iwasawa_d1", 3, 1))
        assert (rep.mu, rep.lam) == (0, 1)
        assert set(rep.residuals) == {1}

    def test_cuoco_monsky_instance(self, ctx3_d2):
        f = SeriesElement(ctx3_d2, {(1, 0): 1, (0, 0): -3})
        M = ModulePresentation(ctx3_d2, 1, ((f,),))
        data = tower(M, 3)
        assert [t.log_torsion for t in data] == [1, 6, 27, 108]
        rep = fit_growth(data, GrowthModel("CuocoMonsky", 3, 2))
        assert (rep.mu, rep.l0) == (0, 1)
        assert rep.verdict == "window-consistent"

    def test_cuoco_monsky_hypothesis_failure(self, ctx3_d2):
        f = SeriesElement(ctx3_d2, {(1, 0): 1})  # T1: ranks grow as p^n
        M = ModulePresentation(ctx3_d2, 1, ((f,),))
        data = tower(M, 3)
        assert [t.zp_rank for t in data] == [1, 3, 9, 27]
        model = GrowthModel("CuocoMonsky", 3, 2)
        ok, _ = cuoco_monsky_hypothesis_check(data, model)
        assert not ok
        with pytest.raises(HypothesisViolated):
            fit_growth(data, model)

    def test_insufficient_data(self, ctx3):
        M = cyclic_module(ctx3, [9])
        data = tower(M, 2)  # only n = 1, 2 usable after burn-in
        with pytest.raises(InsufficientData):
            fit_growth(data, GrowthModel("Iwasawa_d1", 3, 1))

    def test_non_integral_coefficient(self):
        data = [TowerDatum(n, 3**n + (n % 2), 0, 0) for n in range(6)]
        with pytest.raises(NonIntegralCoefficient):
            fit_growth(data, GrowthModel("Iwasawa_d1", 3, 1))

    def test_flagged_points_excluded(self, ctx3):
        M = cyclic_module(ctx3, [9])
        data = tower(M, 5)
        # corrupt the top point but flag it: fit must ignore it
        data[-1] = TowerDatum(5, 999999, 0, 0, ("PrecisionMargin",))
        rep = fit_growth(data, GrowthModel("Iwasawa_d1", 3, 1))
        assert (rep.mu, rep.lam) == (2, 0)

    def test_mu_additive_on_direct_sums(self, ctx3):
        rng = random.Random(37)
        model = GrowthModel("Iwasawa_d1", 3, 1)
        for _ in range(5):
            mu1, mu2 = rng.randrange(0, 2), rng.randrange(0, 2)
            r1 = [rng.randrange(1, 9)]
            r2 = [rng.randrange(1, 9)]
            M1 = split_module(ctx3, mu1, r1)
            M2 = split_module(ctx3, mu2, r2)
            z = SeriesElement.zero(ctx3)
            f1 = M1.relations[0][0]
            f2 = M2.relations[0][0]
            Msum = ModulePresentation(ctx3, 2, ((f1, z), (z, f2)))
            fit1 = fit_growth(tower(M1, 5), model)
            fit2 = fit_growth(tower(M2, 5), model)
            fitsum = fit_growth(tower(Msum, 5), model)
            assert fitsum.mu == fit1.mu + fit2.mu
            assert fitsum.lam == fit1.lam + fit2.lam

    def test_agreement_exact_vs_fitted(self, ctx3):
        rng = random.Random(43)
        model = GrowthModel("Iwasawa_d1", 3, 1)
        for _ in range(10):
            mu = rng.randrange(0, 3)
            roots = [rng.randrange(1, 9) for _ in range(rng.randrange(0, 3))]
            M = split_module(ctx3, mu, roots)
            exact = exact_invariants_d1(M)
            fitted = fit_growth(tower(M, 5), model)
            assert (fitted.mu, fitted.lam) == (exact.mu, exact.lam)
            assert fitted.verdict == "window-consistent"


class TestPerbetFit:
    def test_recovers_rank_and_mu(self, ctx3):
        # M = Lambda^r + Lambda/p^mu: log|M_{G_n}/p^n| = r n p^n + mu p^n
        model = GrowthModel("Perbet_modpn", 3, 1)
        for r, mu in ((1, 0), (0, 2), (2, 1)):
            gens = r + (1 if mu else 0)
            rels = []
            if mu:
                row = [SeriesElement.zero(ctx3)] * gens
                row[-1] = poly(ctx3, [3**mu])
                rels.append(tuple(row))
            M = ModulePresentation(ctx3, gens, tuple(rels))
            data = tower(M, 4)
            rep = fit_growth(data, model)
            assert (rep.rank, rep.mu) == (r, mu)


class TestSemidirectRankFit:
    def test_recovers_h_rank(self, ctx3_d2):
        # torsion module with finite coinvariants whose level sizes grow
        # like rank * n * p^n: Lambda_2/(T1 - p) has log = (n+1) p^n
        f = SeriesElement(ctx3_d2, {(1, 0): 1, (0, 0): -3})
        M = ModulePresentation(ctx3_d2, 1, ((f,),))
        data = tower(M, 3)
        rep = fit_growth(data, GrowthModel("Semidirect_rank", 3, 2))
        assert rep.rank_over_h == 1
        assert rep.verdict == "window-consistent"

    def test_nonzero_rank_rejected(self, ctx3_d2):
        f = SeriesElement(ctx3_d2, {(1, 0): 1})
        M = ModulePresentation(ctx3_d2, 1, ((f,),))
        data = tower(M, 3)
        with pytest.raises(HypothesisViolated):
            fit_growth(data, GrowthModel("Semidirect_rank", 3, 2))
