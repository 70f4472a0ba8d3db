#include <catch2/catch.hpp>

#include <cmath>

#include "evb/gram.hpp"
#include "evb/models.hpp"
#include "evb/psd.hpp"
#include "evb/rng.hpp"

#include "oracle.hpp"

using evb::Matrix;

TEST_CASE("check_psd accepts a nonnegative diagonal") {
    Matrix m(2, 2);
    m(0, 0) = 0.3;
    m(1, 1) = 0.7;
    const auto v = evb::check_psd(m);
    CHECK(v.pass);
    CHECK(v.min_eigenvalue == Approx(0.3).margin(1e-12));
}

TEST_CASE("check_psd rejects an indefinite 2x2 matrix") {
    // det = 0.5 - 0.81 = -0.31 < 0 forces one negative eigenvalue; the
    // closed form is (trace - sqrt(trace^2 - 4 det)) / 2.
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = m(1, 0) = 0.9;
    m(1, 1) = 0.5;
    const auto v = evb::check_psd(m);
    CHECK_FALSE(v.pass);
    const double expected = (1.5 - std::sqrt(1.5 * 1.5 + 4.0 * 0.31)) / 2.0;
    CHECK(v.min_eigenvalue == Approx(expected).margin(1e-12));
    CHECK(v.min_eigenvalue < 0.0);
}

TEST_CASE("check_psd rejects malformed input before the spectral test") {
    Matrix rect(2, 3);
    CHECK_THROWS_AS(evb::check_psd(rect), std::invalid_argument);

    Matrix skew(2, 2);
    skew(0, 1) = 1.0;
    skew(1, 0) = 0.999;
    CHECK_THROWS_AS(evb::check_psd(skew), std::invalid_argument);

    Matrix inf(2, 2);
    inf(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(evb::check_psd(inf), std::invalid_argument);
}

TEST_CASE("event Gram matrices are positive semi-definite") {
    // Randomized finite spaces; the Gram of any event family is PSD because
    // the quadratic form is the second moment of a weighted indicator sum.
    evb::Splitmix64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const auto rm = oracle::random_periodic(rng);
        const std::size_t period = rm.events.size();
        const std::size_t n = period + rng.next() % 4;
        const auto g = evb::models::gram(rm.model, n);
        CHECK(g.validate().empty());
        const auto verdict = evb::check_psd(g.matrix(), 1e-8);
        INFO("trial " << trial << " min eigenvalue " << verdict.min_eigenvalue);
        CHECK(verdict.pass);
    }
}
