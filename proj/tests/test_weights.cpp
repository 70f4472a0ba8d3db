#include <catch2/catch.hpp>

#include <cmath>

#include "evb/models.hpp"
#include "evb/optimize.hpp"
#include "evb/weights.hpp"

#include "oracle.hpp"

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

} // namespace

TEST_CASE("inverse_probability_weights") {
    CHECK(evb::inverse_probability_weights(std::vector<double>{0.5, 0.25}) ==
          std::vector<double>{2.0, 4.0});
    CHECK(evb::inverse_probability_weights(std::vector<double>{1, 1, 1}) ==
          std::vector<double>{1.0, 1.0, 1.0});
    CHECK(evb::inverse_probability_weights(std::vector<double>{0.5, 0.5, 0.25}) ==
          std::vector<double>{2.0, 2.0, 4.0});

    const std::vector<double> with_zero{0.5, 0.0, 0.25};
    CHECK_THROWS_WITH(evb::inverse_probability_weights(with_zero),
                      Catch::Contains("event 2"));
}

TEST_CASE("optimal_weights") {
    SECTION("single event recovers its probability") {
        evb::SymMatrix m(1);
        m.at(0, 0) = 0.7;
        const evb::GramData g({0.7}, std::move(m));
        const auto opt = evb::optimal_weights(g, 1);
        CHECK(opt.weights == std::vector<double>{1.0});
        CHECK(opt.value == Approx(0.7).epsilon(1e-13));
    }
    SECTION("overlap cycle recovers the signed weight pattern") {
        const auto g = evb::models::gram(
            evb::models::EventSeqModel{oracle::overlap_cycle_model()}, 3);
        const auto opt = evb::optimal_weights(g, 3);
        const std::vector<double> target{1.0, 1.0, -1.0};
        CHECK(cosine(opt.weights, target) > 1.0 - 1e-9);
        CHECK(opt.value == Approx(0.75).margin(1e-12));
        double max_abs = 0.0;
        for (double v : opt.weights) max_abs = std::max(max_abs, std::abs(v));
        CHECK(max_abs == Approx(1.0).margin(1e-14));
    }
    SECTION("symmetric independent events force equal weights") {
        const evb::models::EventSeqModel model{
            evb::models::IndependentModel{{evb::models::ProbRule::Kind::constant, 0.5, {}, 1.0}}};
        const auto g = evb::models::gram(model, 10);
        const auto opt = evb::optimal_weights(g, 10);
        CHECK(opt.value == Approx(10.0 / 11.0).epsilon(1e-12));
        for (double v : opt.weights) CHECK(v == Approx(opt.weights.front()).epsilon(1e-9));
    }
    SECTION("dominates random weight choices") {
        evb::Splitmix64 rng(41);
        for (int trial = 0; trial < 40; ++trial) {
            const auto rm = oracle::random_periodic(rng);
            const std::size_t n = std::min<std::size_t>(rm.events.size() + 2, 8);
            const auto g = evb::models::gram(rm.model, n);
            const auto opt = evb::optimal_weights(g, n);
            for (int u = 0; u < 100; ++u) {
                const auto w = oracle::random_weights(rng, n);
                const auto r = evb::bound_ratio(g, w, n);
                if (r) CHECK(opt.value >= *r - 1e-9);
            }
        }
    }
    SECTION("degenerate Gram data is rejected") {
        evb::SymMatrix zero(2);
        const evb::GramData g({0.0, 0.0}, std::move(zero));
        CHECK_THROWS_WITH(evb::optimal_weights(g, 2), Catch::Contains("degenerate"));
    }
}

TEST_CASE("resolve_weights") {
    const auto g = evb::models::gram(
        evb::models::EventSeqModel{oracle::overlap_cycle_model()}, 3);

    CHECK(evb::resolve_weights(evb::WeightScheme::unit(), g, 3) ==
          std::vector<double>{1.0, 1.0, 1.0});
    CHECK(evb::resolve_weights(evb::WeightScheme::inverse_probability(), g, 3) ==
          std::vector<double>{2.0, 2.0, 4.0});

    const auto optimal = evb::resolve_weights(evb::WeightScheme::optimal(), g, 3);
    CHECK(optimal.size() == 3);

    const auto explicit_scheme = evb::WeightScheme::explicit_list({1.0, 2.0});
    CHECK(evb::resolve_weights(explicit_scheme, g, 2) == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(evb::resolve_weights(explicit_scheme, g, 3), std::invalid_argument);
}
