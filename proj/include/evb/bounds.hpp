#pragma once
// The weighted lower-bound machinery for the probability that infinitely many
// events occur. For real weights w and Gram data of the events, the central
// quantity is the ratio
//
//   R_n = (sum_{k<n} w_k p_k)^2 / (sum_{i,j<n} w_i w_j M_ij).
//
// Whenever the weighted probability sums diverge, limsup_n R_n lower-bounds
// P(infinitely many A_n occur); for each fixed n, R_n lower-bounds the union
// probability P(A_1 u ... u A_n) by the weighted Chung-Erdos inequality.
// Denominators at or below a small guard are reported as flagged-undefined
// rather than turned into infinities: the quadratic form of a PSD matrix can
// be driven to zero by signed weights, and the ratio is meaningless there.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evb/gram.hpp"

namespace evb {

inline constexpr double kDenominatorGuard = 1e-12;

namespace detail {

inline void require_prefix(std::size_t available, std::span<const double> w, std::size_t n) {
    if (n > available) throw std::out_of_range("n exceeds available Gram data");
    if (w.size() < n) throw std::invalid_argument("weight sequence shorter than n");
}

} // namespace detail

// sum_{k<n} w_k p_k
template <gram_source G>
double weighted_prob_sum(const G& g, std::span<const double> w, std::size_t n) {
    detail::require_prefix(g.size(), w, n);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * g.prob(k);
    return s;
}

// sum_{first <= i,j < n} w_i w_j M_ij, folded over the lower triangle.
template <gram_source G>
double weight_quad_form(const G& g, std::span<const double> w, std::size_t first, std::size_t n) {
    detail::require_prefix(g.size(), w, n);
    if (first > n) throw std::out_of_range("weight_quad_form: first exceeds n");
    double diag = 0.0, lower = 0.0;
    for (std::size_t i = first; i < n; ++i) {
        diag += w[i] * w[i] * g.inter(i, i);
        for (std::size_t j = first; j < i; ++j) lower += w[i] * w[j] * g.inter(i, j);
    }
    return diag + 2.0 * lower;
}

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

// Weighted Chung-Erdos inequality:
//   (sum_{i<n} w_i p_i)^2 <= P(union of first n events) * sum_{i,j<n} w_i w_j M_ij.
// Returns both sides; the caller supplies the union probability.
template <gram_source G>
InequalitySides weighted_chung_erdos(const G& g, std::span<const double> w, std::size_t n,
                                     double union_prob) {
    const double s = weighted_prob_sum(g, w, n);
    const double q = weight_quad_form(g, w, 0, n);
    return {s * s, union_prob * q};
}

// R_n, or nullopt when the denominator does not exceed the guard.
template <gram_source G>
std::optional<double> bound_ratio(const G& g, std::span<const double> w, std::size_t n,
                                  double guard = kDenominatorGuard) {
    const double den = weight_quad_form(g, w, 0, n);
    if (!(den > guard)) return std::nullopt;
    const double num = weighted_prob_sum(g, w, n);
    return num * num / den;
}

struct RatioOptions {
    double guard = kDenominatorGuard;
    double tail_fraction = 0.25; // final_estimate = max ratio over the last fraction of indices
    double divergence_margin = 1.0;
};

struct BoundReport {
    std::string scheme_label = "explicit";
    std::vector<double> weights;
    std::vector<std::optional<double>> ratios;      // R_1..R_N; nullopt = denominator under guard
    std::vector<std::optional<double>> running_max; // nondecreasing once defined
    std::optional<double> final_estimate;
    std::vector<double> partial_sums; // S_m = sum_{k<=m} w_k p_k
    double denominator_min = std::numeric_limits<double>::infinity();
    bool diverging = false;
};

// Evaluates R_1..R_N incrementally: the numerator sum and the quadratic form
// are extended in O(n) gram queries per step by adding one row of M.
template <gram_source G>
BoundReport ratio_sequence(const G& g, std::span<const double> w, const RatioOptions& opt = {}) {
    const std::size_t n_max = g.size();
    detail::require_prefix(n_max, w, n_max);

    BoundReport rep;
    rep.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n_max));
    rep.ratios.reserve(n_max);
    rep.running_max.reserve(n_max);
    rep.partial_sums.reserve(n_max);

    double num_sum = 0.0, quad = 0.0;
    std::optional<double> best;
    for (std::size_t n = 0; n < n_max; ++n) {
        num_sum += w[n] * g.prob(n);
        double cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) cross += w[i] * g.inter(i, n);
        quad += w[n] * (w[n] * g.inter(n, n) + 2.0 * cross);

        rep.partial_sums.push_back(num_sum);
        rep.denominator_min = std::min(rep.denominator_min, quad);
        if (quad > opt.guard) {
            const double r = num_sum * num_sum / quad;
            rep.ratios.emplace_back(r);
            best = best ? std::max(*best, r) : r;
        } else {
            rep.ratios.emplace_back(std::nullopt);
        }
        rep.running_max.push_back(best);
    }

    if (n_max > 0) {
        const std::size_t window =
            std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(n_max) *
                                                              opt.tail_fraction));
        std::optional<double> tail_max;
        for (std::size_t i = n_max - window; i < n_max; ++i)
            if (rep.ratios[i]) tail_max = tail_max ? std::max(*tail_max, *rep.ratios[i]) : *rep.ratios[i];
        rep.final_estimate = tail_max;

        const std::size_t half = n_max / 2;
        const double s_half = half >= 1 ? rep.partial_sums[half - 1] : 0.0;
        rep.diverging = rep.partial_sums[n_max - 1] >= s_half + opt.divergence_margin;
    }
    return rep;
}

// CSV layout: `n,ratio,running_max,partial_sum`; undefined ratios are empty cells.
inline void write_bound_csv(std::ostream& out, const BoundReport& rep) {
    out << "n,ratio,running_max,partial_sum\n";
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
        out << (i + 1) << ',';
        if (rep.ratios[i]) out << detail::format_double(*rep.ratios[i]);
        out << ',';
        if (rep.running_max[i]) out << detail::format_double(*rep.running_max[i]);
        out << ',' << detail::format_double(rep.partial_sums[i]) << '\n';
    }
}

// Closed form of the ratio under inverse-probability weights w_i = 1/p_i:
//   n^2 / sum_{i,j<n} M_ij / (p_i p_j).
template <gram_source G>
double inverse_probability_ratio(const G& g, std::size_t n) {
    if (n > g.size()) throw std::out_of_range("n exceeds available Gram data");
    double diag = 0.0, lower = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pi = g.prob(i);
        if (pi == 0.0)
            throw std::domain_error("inverse_probability_ratio: event " + std::to_string(i + 1) +
                                    " has zero probability");
        diag += g.inter(i, i) / (pi * pi);
        for (std::size_t j = 0; j < i; ++j) lower += g.inter(i, j) / (pi * g.prob(j));
    }
    const double den = diag + 2.0 * lower;
    return static_cast<double>(n) * static_cast<double>(n) / den;
}

// Off-diagonal ratio for nonnegative weights:
//   sum_{i<j<n} w_i w_j p_i p_j / sum_{i<j<n} w_i w_j M_ij.
template <gram_source G>
std::optional<double> off_diagonal_ratio(const G& g, std::span<const double> w, std::size_t n,
                                         double guard = kDenominatorGuard) {
    detail::require_prefix(g.size(), w, n);
    if (n < 2) throw std::invalid_argument("off_diagonal_ratio: needs at least two events");
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] < 0.0)
            throw std::invalid_argument("off_diagonal_ratio: weight " + std::to_string(i + 1) +
                                        " is negative");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double ww = w[i] * w[j];
            num += ww * g.prob(i) * g.prob(j);
            den += ww * g.inter(i, j);
        }
    if (!(den > guard)) return std::nullopt;
    return num / den;
}

// Ratio of the full quadratic form over [0, n) to the tail form over
// [start, n). Equals 1 at start = 0 and tends to 1 as n grows whenever the
// weighted probability sums diverge, which is what makes the truncated bound
// estimate meaningful.
template <gram_source G>
std::optional<double> tail_ratio(const G& g, std::span<const double> w, std::size_t start,
                                 std::size_t n, double guard = kDenominatorGuard) {
    detail::require_prefix(g.size(), w, n);
    if (start >= n) throw std::out_of_range("tail_ratio: start must be below n");
    if (start == 0) return 1.0; // identical sums by definition
    const double tail = weight_quad_form(g, w, start, n);
    if (std::abs(tail) <= guard) return std::nullopt;
    return weight_quad_form(g, w, 0, n) / tail;
}

struct DivergenceDiagnostic {
    std::vector<double> partial_sums;
    bool diverging = false;
};

// Finite-horizon heuristic for the divergence hypothesis on sum w_n p_n:
// flags divergence when S_n clears S_{floor(n/2)} by the margin. Advisory
// only; it never blocks a bound computation.
template <gram_source G>
DivergenceDiagnostic divergence_diagnostic(const G& g, std::span<const double> w,
                                           double margin = 1.0) {
    const std::size_t n = g.size();
    detail::require_prefix(n, w, n);
    DivergenceDiagnostic d;
    d.partial_sums.reserve(n);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += w[k] * g.prob(k);
        d.partial_sums.push_back(s);
    }
    if (n > 0) {
        const std::size_t half = n / 2;
        const double s_half = half >= 1 ? d.partial_sums[half - 1] : 0.0;
        d.diverging = d.partial_sums[n - 1] >= s_half + margin;
    }
    return d;
}

} // namespace evb
