#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "evb/simulate.hpp"

#include "oracle.hpp"

using namespace evb::models;
using evb::mc::estimate_union;
using evb::mc::UnionSource;
using evb::mc::Verdict;

namespace {

IndependentModel constant_model(double q) {
    return IndependentModel{{ProbRule::Kind::constant, q, {}, 1.0}};
}

PeriodicModel single_event_model(double q) {
    PeriodicModel m;
    m.space.atoms = {{"in", q}, {"out", 1.0 - q}};
    m.events = {{1, 0}};
    return m;
}

} // namespace

TEST_CASE("normal_quantile matches reference values") {
    using evb::mc::detail::normal_quantile;
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).margin(1e-6));
    CHECK(normal_quantile(0.995) == Approx(2.5758293035489004).margin(1e-6));
    CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-12));
    CHECK(normal_quantile(0.25) == Approx(-normal_quantile(0.75)).margin(1e-9));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("wilson interval behaves at the boundaries") {
    using evb::mc::detail::wilson;
    const double z = 2.5758293035489004;
    const auto zero = wilson(0, 1000, z);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    const auto full = wilson(1000, 1000, z);
    CHECK(full.high == 1.0);
    CHECK(full.low < 1.0);
    const auto mid = wilson(500, 1000, z);
    CHECK(mid.low < 0.5);
    CHECK(mid.high > 0.5);
    CHECK(mid.low > zero.low);
    CHECK(full.high > mid.high);
}

TEST_CASE("estimate_union basics") {
    SECTION("a certain event makes the union certain") {
        const EventSeqModel model{single_event_model(1.0)};
        const auto est = estimate_union(model, 0, 5, 4096, 9);
        CHECK(est.estimate == 1.0);
        CHECK(est.hits == est.trials);
        CHECK(est.ci_high == 1.0);
        CHECK(est.std_error == 0.0);
    }
    SECTION("independent fair events over two positions") {
        const EventSeqModel model{constant_model(0.5)};
        const auto est = estimate_union(model, 0, 2, 100000, 0);
        CHECK(std::abs(est.estimate - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / 100000.0));
        CHECK(est.ci_low <= 0.75);
        CHECK(est.ci_high >= 0.75);
        CHECK(est.ci_low <= est.estimate);
        CHECK(est.ci_high >= est.estimate);
        CHECK(est.estimate * static_cast<double>(est.trials) ==
              static_cast<double>(est.hits));
    }
    SECTION("overlap cycle over ten periods") {
        const EventSeqModel model{oracle::overlap_cycle_model()};
        const auto est = estimate_union(model, 0, 30, 100000, 0);
        CHECK(est.ci_low <= 0.75);
        CHECK(est.ci_high >= 0.75);
    }
}

TEST_CASE("estimate_union is deterministic for any worker count") {
    const EventSeqModel model{constant_model(0.3)};
    const auto one = estimate_union(model, 0, 8, 20000, 5, 0.99, 1);
    const auto two = estimate_union(model, 0, 8, 20000, 5, 0.99, 2);
    const auto five = estimate_union(model, 0, 8, 20000, 5, 0.99, 5);
    CHECK(one.hits == two.hits);
    CHECK(one.hits == five.hits);
    CHECK(one.estimate == two.estimate);

    const auto reseeded = estimate_union(model, 0, 8, 20000, 6, 0.99, 2);
    CHECK(reseeded.hits != one.hits);
}

TEST_CASE("estimate_union is monotone in the horizon for a fixed seed") {
    const EventSeqModel model{constant_model(0.2)};
    double prev = 0.0;
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto est = estimate_union(model, 0, n, 20000, 3);
        CHECK(est.estimate >= prev);
        prev = est.estimate;
    }
}

TEST_CASE("validate_bound") {
    SECTION("overlap cycle with signed weights is exactly tight") {
        std::vector<double> w;
        for (int k = 0; k < 10; ++k) w.insert(w.end(), {1.0, 1.0, -1.0});
        const auto rep = evb::mc::validate_bound(EventSeqModel{oracle::overlap_cycle_model()},
                                                 evb::WeightScheme::explicit_list(w), 30, 1000, 0);
        REQUIRE(rep.bound);
        CHECK(*rep.bound == Approx(0.75).margin(1e-13));
        CHECK(rep.estimate.source == UnionSource::exact);
        CHECK(rep.estimate.estimate == 0.75);
        CHECK(rep.estimate.std_error == 0.0);
        CHECK(rep.slack == Approx(0.0).margin(1e-13));
        CHECK(rep.verdict == Verdict::consistent);
    }
    SECTION("independent fair events at n=99") {
        const auto rep = evb::mc::validate_bound(EventSeqModel{constant_model(0.5)},
                                                 evb::WeightScheme::unit(), 99, 1000, 0);
        REQUIRE(rep.bound);
        CHECK(*rep.bound == Approx(0.99).epsilon(1e-12));
        CHECK(rep.estimate.source == UnionSource::exact);
        CHECK(rep.estimate.estimate == Approx(1.0).margin(1e-12));
        CHECK(rep.verdict == Verdict::consistent);
    }
    SECTION("vanishing denominator carries the flag instead of a verdict") {
        const auto rep = evb::mc::validate_bound(
            EventSeqModel{single_event_model(0.5)},
            evb::WeightScheme::explicit_list({1.0, -1.0}), 2, 1000, 0);
        CHECK_FALSE(rep.bound);
        CHECK(rep.verdict == Verdict::undefined_ratio);
    }
    SECTION("force_mc skips the exact-union shortcut") {
        evb::mc::ValidateOptions opt;
        opt.force_mc = true;
        const auto rep = evb::mc::validate_bound(EventSeqModel{oracle::overlap_cycle_model()},
                                                 evb::WeightScheme::unit(), 3, 100000, 0, opt);
        CHECK(rep.estimate.source == UnionSource::mc);
        CHECK(rep.estimate.ci_low <= 0.75);
        CHECK(rep.estimate.ci_high >= 0.75);
        CHECK(rep.verdict == Verdict::consistent);
    }
}

TEST_CASE("random models with exact unions are never violated") {
    evb::Splitmix64 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rm = oracle::random_periodic(rng);
        const std::size_t n = std::min<std::size_t>(2 * rm.events.size(), 10);
        const auto w = oracle::random_weights(rng, n);
        const auto rep = evb::mc::validate_bound(EventSeqModel{rm.model},
                                                 evb::WeightScheme::explicit_list(w),
                                                 n, 100, trial);
        CHECK(rep.estimate.source == UnionSource::exact);
        INFO("trial " << trial);
        CHECK(rep.verdict != Verdict::violated);
    }
}

TEST_CASE("wilson coverage on a known union (reduced)") {
    // 50 seeded repetitions; the acceptance suite runs the full calibration.
    const EventSeqModel model{single_event_model(0.75)};
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto est = estimate_union(model, 0, 1, 2000, seed);
        covered += est.ci_low <= 0.75 && 0.75 <= est.ci_high;
    }
    CHECK(covered >= 46);
}

TEST_CASE("convergence_experiment") {
    SECTION("constant-event model yields flat exact rows") {
        const auto rows = evb::mc::convergence_experiment(
            EventSeqModel{single_event_model(0.4)}, evb::WeightScheme::unit(), {1, 2, 4, 8}, 100,
            0);
        REQUIRE(rows.size() == 4);
        for (const auto& r : rows) {
            REQUIRE(r.ratio);
            CHECK(*r.ratio == Approx(0.4).margin(1e-13));
            CHECK(r.union_value == Approx(0.4).margin(1e-15));
            CHECK(r.source == UnionSource::exact);
        }
    }
    SECTION("markov rows come from simulation") {
        MarkovModel chain;
        chain.states = 2;
        chain.transition = evb::Matrix(2, 2);
        chain.transition(0, 0) = 0.9;
        chain.transition(0, 1) = 0.1;
        chain.transition(1, 0) = 0.2;
        chain.transition(1, 1) = 0.8;
        chain.initial = {1.0, 0.0};
        chain.target = {0, 1};
        const auto rows = evb::mc::convergence_experiment(
            EventSeqModel{chain}, evb::WeightScheme::unit(), {2, 4}, 2000, 0);
        for (const auto& r : rows) {
            CHECK(r.source == UnionSource::mc);
            CHECK(r.ci_low <= r.union_value);
            CHECK(r.ci_high >= r.union_value);
        }
    }
    SECTION("independent fair events approach one") {
        const auto rows = evb::mc::convergence_experiment(
            EventSeqModel{constant_model(0.5)}, evb::WeightScheme::unit(), {1000}, 100, 0);
        REQUIRE(rows[0].ratio);
        CHECK(*rows[0].ratio == Approx(1000.0 / 1001.0).epsilon(1e-12));
        CHECK(rows[0].union_value == Approx(1.0).margin(1e-12));
        CHECK(rows[0].source == UnionSource::exact);
    }
    SECTION("harmonic ratios increase toward one") {
        const EventSeqModel model{IndependentModel{{ProbRule::Kind::harmonic, 0.0, {}, 1.0}}};
        const auto rows = evb::mc::convergence_experiment(model, evb::WeightScheme::unit(),
                                                          {100, 1000}, 100, 0);
        REQUIRE(rows[0].ratio);
        REQUIRE(rows[1].ratio);
        CHECK(*rows[0].ratio < *rows[1].ratio);
        // closed form: H_n^2 / (H_n^2 + H_n - sum 1/k^2)
        double h = 0.0, sq = 0.0;
        for (std::size_t k = 1; k <= 1000; ++k) {
            h += 1.0 / static_cast<double>(k);
            sq += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
        }
        CHECK(*rows[1].ratio == Approx(h * h / (h * h + h - sq)).epsilon(1e-9));
    }
    SECTION("signed weights stay tight at every multiple of the period") {
        std::vector<double> w;
        for (int k = 0; k < 100; ++k) w.insert(w.end(), {1.0, 1.0, -1.0});
        const auto rows = evb::mc::convergence_experiment(
            EventSeqModel{oracle::overlap_cycle_model()},
            evb::WeightScheme::explicit_list(w), {3, 30, 300}, 100, 0);
        for (const auto& r : rows) {
            REQUIRE(r.ratio);
            CHECK(*r.ratio == Approx(0.75).margin(1e-12));
            CHECK(r.union_value == 0.75);
            CHECK(r.source == UnionSource::exact);
        }
    }
    SECTION("grid validation") {
        const EventSeqModel model{constant_model(0.5)};
        CHECK_THROWS_AS(evb::mc::convergence_experiment(model, evb::WeightScheme::unit(), {},
                                                        100, 0),
                        std::invalid_argument);
        CHECK_THROWS_AS(evb::mc::convergence_experiment(model, evb::WeightScheme::unit(),
                                                        {4, 2}, 100, 0),
                        std::invalid_argument);
    }
    SECTION("csv emission marks sources and blank undefined cells") {
        const auto rows = evb::mc::convergence_experiment(
            EventSeqModel{single_event_model(0.4)}, evb::WeightScheme::unit(), {1, 2}, 100, 0);
        std::ostringstream out;
        evb::mc::write_convergence_csv(out, rows);
        CHECK(out.str().rfind("n,ratio,running_max,union,ci_low,ci_high,source\n", 0) == 0);
        CHECK(out.str().find(",exact") != std::string::npos);
    }
}
