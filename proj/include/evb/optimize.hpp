#pragma once
// Optimal weight selection. The ratio R_n is a generalized Rayleigh quotient
// (w.p)^2 / (w.M w), so its maximizer over w solves M w = p; the maximum value
// is p.w. The system is solved through the spectral decomposition of M with a
// relative eigenvalue cutoff, because Gram matrices of strongly overlapping
// events are routinely numerically singular.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "evb/bounds.hpp"
#include "evb/gram.hpp"
#include "evb/psd.hpp"
#include "evb/weights.hpp"

namespace evb {

inline constexpr double kEigenCutoff = 1e-10;

struct OptimalWeights {
    std::vector<double> weights; // scaled so that p.w >= 0 and max|w_i| = 1
    double value = 0.0;          // the achieved ratio R_n
};

template <gram_source G>
OptimalWeights optimal_weights(const G& g, std::size_t n, double cutoff = kEigenCutoff) {
    if (n == 0 || n > g.size()) throw std::out_of_range("optimal_weights: n out of range");

    SymMatrix m(n);
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    bool any_p = false;
    for (std::size_t i = 0; i < n; ++i) {
        p(static_cast<Eigen::Index>(i)) = g.prob(i);
        any_p = any_p || g.prob(i) != 0.0;
        for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = g.inter(i, j);
    }
    if (!any_p) throw std::domain_error("optimal_weights: degenerate Gram data");

    const auto eig = detail::sym_eigen(m);
    const double lambda_max = eig.values(static_cast<Eigen::Index>(n) - 1);
    if (!(lambda_max > 0.0)) throw std::domain_error("optimal_weights: degenerate Gram data");
    const double threshold = cutoff * lambda_max;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    bool kept = false;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double lambda = eig.values(k);
        if (lambda < threshold) continue;
        kept = true;
        const Eigen::VectorXd v = eig.vectors.col(k);
        w += (v.dot(p) / lambda) * v;
    }
    if (!kept) throw std::domain_error("optimal_weights: degenerate Gram data");

    if (p.dot(w) < 0.0) w = -w;
    const double max_abs = w.cwiseAbs().maxCoeff();
    if (!(max_abs > 0.0)) throw std::domain_error("optimal_weights: degenerate Gram data");
    w /= max_abs;

    OptimalWeights out;
    out.weights.assign(w.data(), w.data() + w.size());
    const auto value = bound_ratio(g, out.weights, n);
    if (!value) throw std::domain_error("optimal_weights: degenerate Gram data");
    out.value = *value;
    return out;
}

// Turns a scheme into a concrete weight vector of length n for the given
// Gram data. Explicit lists must cover n entries; silent padding would
// corrupt the divergence diagnostic.
template <gram_source G>
std::vector<double> resolve_weights(const WeightScheme& scheme, const G& g, std::size_t n,
                                    double cutoff = kEigenCutoff) {
    if (n > g.size()) throw std::out_of_range("resolve_weights: n exceeds available Gram data");
    switch (scheme.kind) {
        case WeightKind::unit: return std::vector<double>(n, 1.0);
        case WeightKind::inverse_probability: {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = g.prob(i);
            return inverse_probability_weights(p);
        }
        case WeightKind::optimal: return optimal_weights(g, n, cutoff).weights;
        case WeightKind::explicit_list: {
            if (scheme.values.size() < n)
                throw std::invalid_argument("explicit weights: need " + std::to_string(n) +
                                            " entries, got " + std::to_string(scheme.values.size()));
            return std::vector<double>(scheme.values.begin(),
                                       scheme.values.begin() + static_cast<std::ptrdiff_t>(n));
        }
    }
    throw std::logic_error("resolve_weights: unknown scheme");
}

} // namespace evb
