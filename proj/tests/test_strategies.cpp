#include "helpers.hpp"
#include "tirever/error.hpp"
#include "tirever/hp_filter.hpp"
#include "tirever/montecarlo.hpp"
#include "tirever/strategies.hpp"

#include <gtest/gtest.h>

using namespace tirever;
using testing_util::mar10;
using testing_util::mar11;

namespace {

StrategyOptions known(int p) {
    StrategyOptions o;
    o.known_order = p;
    return o;
}

StrategyOptions ungated(int p) {
    StrategyOptions o = known(p);
    o.normality_gate = false;
    return o;
}

}  // namespace

TEST(OrderSelection, DefaultMaxOrder) {
    EXPECT_EQ(default_max_order(50), 5);
    EXPECT_EQ(default_max_order(100), 10);
    EXPECT_EQ(default_max_order(500), 17);
    EXPECT_EQ(default_max_order(1000), 21);
    EXPECT_EQ(default_max_order(5), 1);
}

TEST(OrderSelection, WhiteNoiseSelectsOrderOne) {
    RandomStream rng(4);
    Eigen::VectorXd e(1000);
    for (auto& v : e) v = rng.normal();
    const PseudoCausalOrder o = select_pseudo_causal_order(TimeSeries(e), 10, Criterion::bic);
    EXPECT_EQ(o.p, 1);
    EXPECT_NEAR(o.coefficients[0], 0.0, 0.1);
    EXPECT_EQ(o.criterion_values.size(), 10);
}

TEST(OrderSelection, RecoversAr2) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        MarSpec ar2;
        ar2.phi = Eigen::Vector2d(0.5, 0.3);
        ar2.innovation = {200.0, 1.0, 1.0};
        const TimeSeries y = testing_util::simulate(ar2, 1000, seed);
        if (select_pseudo_causal_order(y, default_max_order(1000), Criterion::bic).p == 2) ++hits;
    }
    EXPECT_GE(hits, 40);
}

TEST(OrderSelection, SingularRegressors) {
    EXPECT_THROW(select_pseudo_causal_order(TimeSeries(Eigen::VectorXd::Constant(200, 2.0)), 5,
                                            Criterion::bic),
                 NumericError);
}

TEST(Strategies, GaussianSeriesAreGated) {
    int gated = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const TrVerdict v = strategy1(TimeSeries(testing_util::gaussian_ar1(0.8, 500, seed)));
        if (v.verdict == Verdict::reversible_gaussian) {
            ++gated;
            EXPECT_TRUE(v.fits.empty());
            EXPECT_FALSE(v.decisive_statistic.has_value());
            EXPECT_EQ(v.p_grid, 0);
        }
    }
    EXPECT_GE(gated, 180);
    EXPECT_LE(gated, 198);
}

TEST(Strategies, CausalProcessIsIrreversible) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const TimeSeries y = testing_util::simulate(mar10(0.8), 500, 300 + seed);
        EXPECT_EQ(strategy1(y).verdict, Verdict::irreversible);
        EXPECT_EQ(strategy2(y).verdict, Verdict::irreversible);
        EXPECT_EQ(strategy2(y, known(1)).verdict, Verdict::irreversible);
    }
}

TEST(Strategies, OddOrderIsWidened) {
    const TimeSeries y = testing_util::simulate(mar10(0.8), 300, 5);
    const TrVerdict v = strategy1(y, known(1));
    EXPECT_EQ(v.p_selected, 1);
    EXPECT_EQ(v.p_grid, 2);
    EXPECT_EQ(v.fits.size(), 4u);
}

TEST(Strategies, VerdictInvariantsAndAgreement) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const double varphi = seed % 2 ? 0.8 : 0.4;
        const TimeSeries y = testing_util::simulate(mar11(0.8, varphi), 300, 500 + seed);
        const TrVerdict screened = screen_and_fit(y, ungated(2));
        ASSERT_FALSE(screened.fits.empty()) << "seed " << seed;
        const TrVerdict s1 = decide_strategy1(screened, Criterion::bic);
        const TrVerdict s2 = decide_strategy2(screened, 0.05);
        EXPECT_EQ(s1.strategy, Strategy::s1);
        EXPECT_EQ(s2.strategy, Strategy::s2);
        ASSERT_TRUE(s2.selected.has_value());
        const MarFit& chosen = s2.fits[*s2.selected];
        if (chosen.r() == chosen.s()) {
            ASSERT_TRUE(s2.decisive_p_value.has_value());
            EXPECT_GE(*s2.decisive_statistic, 0.0);
            EXPECT_EQ(s2.decisive_df, chosen.s());
        }
        if (s1.verdict == Verdict::reversible && s2.decisive_p_value && *s2.decisive_p_value >= 0.05) {
            EXPECT_EQ(s2.verdict, Verdict::reversible);
        }
    }
}

TEST(Strategies, LikelihoodRatioIsNonNegative) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TimeSeries y = testing_util::simulate(mar11(0.8, 0.8), 120, 900 + seed);
        StrategyOptions o = known(2);
        o.normality_gate = false;
        const TrVerdict v = decide_strategy2(screen_and_fit(y, o), 0.05);
        for (const auto& f : v.fits) {
            if (!f.restricted || f.s() != 1) continue;
            for (const auto& g : v.fits)
                if (!g.restricted && g.r() == 1 && g.s() == 1) { EXPECT_GE(g.loglik, f.loglik); }
        }
        if (v.decisive_statistic && v.fits[*v.selected].r() == v.fits[*v.selected].s()) {
            EXPECT_GE(*v.decisive_statistic, 0.0);
        }
    }
}

TEST(Strategies, ReversalGivesSameVerdictClass) {
    int same = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MarSpec spec = seed % 2 ? mar11(0.8, 0.8) : mar11(0.8, 0.3);
        const TimeSeries y = testing_util::simulate(spec, 1000, 1200 + seed);
        const Verdict forward = strategy2(y, known(2)).verdict;
        const Verdict backward = strategy2(reverse(y), known(2)).verdict;
        same += forward == backward;
        ++total;
    }
    EXPECT_GE(same, 19) << same << "/" << total;
}

TEST(Strategies, Preconditions) {
    const TimeSeries short_series = testing_util::simulate(mar10(0.5), 49, 1);
    EXPECT_THROW(strategy1(short_series), DataError);
    EXPECT_THROW(strategy2(short_series), DataError);
    StrategyOptions bad;
    bad.alpha = 1.5;
    EXPECT_THROW(strategy2(testing_util::simulate(mar10(0.5), 100, 1), bad), DataError);
}

TEST(Names, RoundTrip) {
    for (auto v : {Verdict::reversible_gaussian, Verdict::reversible, Verdict::irreversible}) {
        EXPECT_EQ(parse_verdict(to_string(v)), v);
    }
    EXPECT_EQ(parse_strategy("1"), Strategy::s1);
    EXPECT_EQ(parse_strategy("s2"), Strategy::s2);
    EXPECT_EQ(parse_strategy("rr"), Strategy::rr);
    EXPECT_THROW(parse_strategy("3"), DataError);
    EXPECT_EQ(parse_criterion("aic"), Criterion::aic);
    EXPECT_EQ(parse_rr_variance("iid_plugin"), RrVariance::iid_plugin);
}

TEST(RrTest, PalindromeHasZeroStatistic) {
    RandomStream rng(6);
    Eigen::VectorXd half(60);
    for (auto& v : half) v = rng.normal() * rng.normal();
    Eigen::VectorXd x(121);
    x << half, rng.normal(), half.reverse();
    EXPECT_EQ(symmetric_bicovariance(x, 2), 0.0);
    EXPECT_EQ(rr_test(TimeSeries(x), 2, {RrVariance::iid_plugin, 0, 0}).gamma_hat, 0.0);
}

TEST(RrTest, ReversalFlipsSign) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TimeSeries y = testing_util::simulate(mar10(0.7), 200 + seed, seed);
        for (int k : {1, 2, 5}) {
            EXPECT_EQ(symmetric_bicovariance(reverse(y).values(), k), -symmetric_bicovariance(y.values(), k));
            const RrReport f = rr_test(y, k, {RrVariance::iid_plugin, 0, 0});
            const RrReport b = rr_test(reverse(y), k, {RrVariance::iid_plugin, 0, 0});
            EXPECT_EQ(b.gamma_hat, -f.gamma_hat);
            EXPECT_NEAR(std::abs(b.z_statistic), std::abs(f.z_statistic), 1e-10);
            EXPECT_NEAR(b.p_value, f.p_value, 1e-10);
        }
    }
}

TEST(RrTest, ScaleAndShift) {
    const TimeSeries y = testing_util::simulate(mar10(0.6), 400, 3);
    const double a = 2.5;
    const Eigen::VectorXd scaled = a * y.values();
    EXPECT_NEAR(symmetric_bicovariance(scaled, 2), a * a * a * symmetric_bicovariance(y.values(), 2),
                1e-10 * std::abs(symmetric_bicovariance(scaled, 2)) + 1e-12);
    const RrReport base = rr_test(y, 2, {RrVariance::iid_plugin, 0, 0});
    const RrReport moved = rr_test(TimeSeries(Eigen::VectorXd(scaled.array() + 40.0)), 2,
                                   {RrVariance::iid_plugin, 0, 0});
    EXPECT_NEAR(moved.gamma_hat, base.gamma_hat, 1e-8);
    EXPECT_NEAR(moved.z_statistic, base.z_statistic, 1e-8);
    EXPECT_NEAR(base.gamma_hat, base.b21 - base.b12, 1e-12);
}

TEST(RrTest, SizeOnGaussianNoise) {
    for (RrVariance method : {RrVariance::iid_plugin, RrVariance::block_bootstrap}) {
        int rejections = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            const TimeSeries y(testing_util::gaussian_ar1(0.0, 1000, 70000 + seed));
            if (rr_test(y, 2, {method, 500, seed}).p_value < 0.05) ++rejections;
        }
        EXPECT_GE(rejections, 10) << to_string(method);
        EXPECT_LE(rejections, 45) << to_string(method);
    }
}

TEST(RrTest, SizeOnPersistentGaussianAr1) {
    for (RrVariance method : {RrVariance::iid_plugin, RrVariance::block_bootstrap}) {
        int rejections = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            const TimeSeries y(testing_util::gaussian_ar1(0.8, 1000, 70000 + seed));
            if (rr_test(y, 2, {method, 500, seed}).p_value < 0.05) ++rejections;
        }
        EXPECT_GE(rejections, 10) << to_string(method);
        EXPECT_LE(rejections, 45) << to_string(method);
    }
}

TEST(RrTest, BootstrapDeterministicGivenSeed) {
    const TimeSeries y = testing_util::simulate(mar11(0.8, 0.3), 300, 4);
    EXPECT_EQ(rr_test(y, 2, {RrVariance::block_bootstrap, 200, 9}).variance_hat,
              rr_test(y, 2, {RrVariance::block_bootstrap, 200, 9}).variance_hat);
}

TEST(RrTest, Errors) {
    EXPECT_THROW(rr_test(TimeSeries(Eigen::VectorXd::Ones(12)), 2), DataError);
    EXPECT_THROW(rr_test(TimeSeries(Eigen::VectorXd::Constant(100, 3.0)), 2), DataError);
    EXPECT_THROW(rr_test(testing_util::simulate(mar10(0.5), 100, 1), 0), DataError);
}

TEST(Pipeline, NoDetrendMatchesDirectCall) {
    const TimeSeries y = testing_util::simulate(mar11(0.8, 0.4), 300, 21);
    PipelineOptions o;
    o.strategy = Strategy::s2;
    o.strategy_options = known(2);
    const PipelineResult r = run_pipeline(y, o);
    EXPECT_FALSE(r.detrended);
    EXPECT_FALSE(r.lambda.has_value());
    const auto& v = std::get<TrVerdict>(r.outcome);
    const TrVerdict direct = strategy2(demean(y), known(2));
    EXPECT_EQ(v.verdict, direct.verdict);
    EXPECT_EQ(v.decisive_statistic, direct.decisive_statistic);
}

TEST(Pipeline, MonthlyDetrendRecordsLambda) {
    RandomStream rng(5);
    const TimeSeries cycle = testing_util::simulate(mar10(0.8), 400, 5);
    const TimeSeries y = add_random_walk_drift(
        TimeSeries(cycle.values(), Frequency::monthly), TrendOverlay{}, rng);
    PipelineOptions o;
    o.detrend = true;
    o.strategy = Strategy::rr;
    const PipelineResult r = run_pipeline(y, o);
    EXPECT_TRUE(r.detrended);
    ASSERT_TRUE(r.lambda.has_value());
    EXPECT_EQ(*r.lambda, 129600.0);
}

TEST(Pipeline, TrendedCausalCycleIsIrreversible) {
    RandomStream rng(8);
    const TimeSeries cycle = testing_util::simulate(mar10(0.8), 500, 8);
    const TimeSeries y = add_random_walk_drift(cycle, TrendOverlay{}, rng);
    PipelineOptions o;
    o.detrend = true;
    o.lambda = 1600.0;
    o.strategy_options = known(1);
    EXPECT_EQ(std::get<TrVerdict>(run_pipeline(y, o).outcome).verdict, Verdict::irreversible);
}

TEST(Pipeline, PureTrendIsDegenerate) {
    const TimeSeries line(Eigen::VectorXd::LinSpaced(200, 1.0, 50.0), Frequency::quarterly);
    PipelineOptions o;
    o.detrend = true;
    try {
        run_pipeline(line, o);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate"), std::string::npos);
    }
}
