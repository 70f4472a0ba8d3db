#pragma once
// Property suites behind the `verify` command. Each check re-states one of
// the library's mathematical contracts on concrete data and reports the
// counterexample inputs on failure. The CLI stays a thin adapter over these.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evb/bounds.hpp"
#include "evb/gram.hpp"
#include "evb/models.hpp"
#include "evb/optimize.hpp"
#include "evb/psd.hpp"
#include "evb/simulate.hpp"
#include "evb/weights.hpp"

namespace evb {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckOptions {
    double psd_tol = 1e-8;
    double frechet_tol = 1e-9;
    double ce_tol = 1e-9;           // absolute slack allowed in the union inequality
    double partition_tol = 1e-9;    // scaled by the magnitude of the compared sides
    double consistency_tol = 1e-12; // relative, inverse-weight closed form
    double guard = kDenominatorGuard;
    double cutoff = kEigenCutoff;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    double level = 0.99;
    unsigned threads = 0;
};

namespace detail {

// Gamma sums of the three blocks for every split of a symmetric matrix,
// computed incrementally in O(n^2) total.
inline std::vector<CheckResult> partition_all_splits(const SymMatrix& m, double tol) {
    const std::size_t n = m.size();
    CheckResult res{"partition inequality at every split", true, ""};
    if (n < 2) {
        res.detail = "skipped: needs at least 2 events";
        return {res};
    }
    const double total = gamma_sum(m);
    std::vector<double> ga(n + 1, 0.0), gb(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        double cross = 0.0;
        for (std::size_t j = 0; j + 1 < k; ++j) cross += m(k - 1, j);
        ga[k] = ga[k - 1] + 2.0 * cross + m(k - 1, k - 1);
    }
    for (std::size_t k = n; k-- > 0;) {
        double cross = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) cross += m(k, j);
        gb[k] = gb[k + 1] + 2.0 * cross + m(k, k);
    }
    for (std::size_t split = 1; split < n; ++split) {
        const double gc = 0.5 * (total - ga[split] - gb[split]);
        const double lhs = gc * gc, rhs = ga[split] * gb[split];
        const double scale = std::max({1.0, std::abs(rhs), lhs});
        if (lhs > rhs + tol * scale) {
            res.pass = false;
            res.detail = "split m=" + std::to_string(split) + ": Gamma(C)^2 = " +
                         evb::detail::format_double(lhs) + " > Gamma(A)Gamma(B) = " +
                         evb::detail::format_double(rhs);
            return {res};
        }
    }
    return {res};
}

} // namespace detail

// Checks that depend on Gram data alone: structural invariants, positive
// semi-definiteness, the partition inequality, the inverse-probability closed
// form, and the tail-ratio identity.
inline std::vector<CheckResult> check_gram(const GramData& g, std::span<const double> w,
                                           const CheckOptions& opt = {}) {
    std::vector<CheckResult> out;
    const std::size_t n = g.size();

    {
        CheckResult r{"gram invariants (diagonal, frechet, range)", true, ""};
        const auto issues = g.validate(opt.frechet_tol);
        if (!issues.empty()) {
            r.pass = false;
            r.detail = issues.front();
            if (issues.size() > 1)
                r.detail += " (+" + std::to_string(issues.size() - 1) + " more)";
        }
        out.push_back(std::move(r));
    }
    {
        const auto v = check_psd(g.matrix(), opt.psd_tol);
        out.push_back({"gram positive semi-definite", v.pass,
                       "min eigenvalue " + evb::detail::format_double(v.min_eigenvalue)});
    }
    {
        auto rs = detail::partition_all_splits(g.matrix(), opt.partition_tol);
        out.insert(out.end(), rs.begin(), rs.end());
    }
    {
        CheckResult r{"inverse-probability closed form", true, ""};
        bool positive = true;
        for (std::size_t i = 0; i < n && positive; ++i) positive = g.prob(i) > 0.0;
        if (!positive) {
            r.detail = "skipped: zero-probability event";
        } else {
            const double closed = inverse_probability_ratio(g, n);
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = g.prob(i);
            const auto direct = bound_ratio(g, inverse_probability_weights(p), n, opt.guard);
            if (!direct) {
                r.pass = false;
                r.detail = "direct ratio undefined";
            } else if (std::abs(closed - *direct) >
                       opt.consistency_tol * std::max(1.0, std::abs(closed))) {
                r.pass = false;
                r.detail = "closed form " + evb::detail::format_double(closed) +
                           " vs direct " + evb::detail::format_double(*direct);
            }
        }
        out.push_back(std::move(r));
    }
    {
        CheckResult r{"tail ratio identity at s=1", true, ""};
        if (n < 2) {
            r.detail = "skipped: needs at least 2 events";
        } else {
            const auto t = tail_ratio(g, w, 0, n, opt.guard);
            if (!t || *t != 1.0) {
                r.pass = false;
                r.detail = t ? "got " + evb::detail::format_double(*t) : "undefined";
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Full model suite: the Gram checks plus the weighted Chung-Erdos inequality
// and ratio-vs-union validity at every prefix, against exact unions where the
// model provides them and against the upper confidence bound otherwise.
inline std::vector<CheckResult> check_model(const models::EventSeqModel& model,
                                            const WeightScheme& scheme, std::size_t n,
                                            const CheckOptions& opt = {}) {
    const GramData g = models::gram(model, n);
    const auto w = resolve_weights(scheme, g, n, opt.cutoff);
    std::vector<CheckResult> out = check_gram(g, w, opt);

    CheckResult ce{"weighted chung-erdos vs union at every n", true, ""};
    CheckResult validity{"ratio bounded by union at every n", true, ""};
    for (std::size_t m = 1; m <= n; ++m) {
        const auto exact = models::exact_union(model, 0, m);
        double union_hi;
        if (exact) {
            union_hi = *exact;
        } else {
            union_hi =
                mc::estimate_union(model, 0, m, opt.trials, opt.seed, opt.level, opt.threads)
                    .ci_high;
        }
        const auto sides = weighted_chung_erdos(g, w, m, union_hi);
        if (ce.pass && sides.lhs > sides.rhs + opt.ce_tol) {
            ce.pass = false;
            ce.detail = "n=" + std::to_string(m) + ": lhs " +
                        evb::detail::format_double(sides.lhs) + " > rhs " +
                        evb::detail::format_double(sides.rhs) + " with union " +
                        evb::detail::format_double(union_hi) + (exact ? " (exact)" : " (mc hi)");
        }
        const auto r = bound_ratio(g, w, m, opt.guard);
        if (validity.pass && r && *r > union_hi + opt.ce_tol) {
            validity.pass = false;
            validity.detail = "n=" + std::to_string(m) + ": ratio " +
                              evb::detail::format_double(*r) + " > union " +
                              evb::detail::format_double(union_hi);
        }
    }
    out.push_back(std::move(ce));
    out.push_back(std::move(validity));
    return out;
}

} // namespace evb
