#pragma once
// Seeded Monte Carlo estimation of union probabilities and validation that
// computed ratio bounds never exceed them.
//
// Trials are split into fixed chunks of 4096; chunk c derives its random
// substream from (seed, c) and each trial inside a chunk gets its own
// substream in turn. Chunk results are integer hit counts, so the reduction
// is exact and the estimate is bit-identical under any worker schedule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "evb/bounds.hpp"
#include "evb/models.hpp"
#include "evb/optimize.hpp"
#include "evb/rng.hpp"
#include "evb/weights.hpp"

namespace evb::mc {

inline constexpr std::uint64_t kChunkTrials = 4096;

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie strictly inside (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425, phigh = 1.0 - plow;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

struct Interval {
    double low = 0.0, high = 1.0;
};

// Wilson score interval; well-behaved at proportions near 0 and 1. The
// interval always contains the point estimate, so the clamp keeps rounding
// at the p=0 and p=1 boundaries from violating that.
inline Interval wilson(std::uint64_t hits, std::uint64_t trials, double z) {
    const double t = static_cast<double>(trials);
    const double phat = static_cast<double>(hits) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double center = (phat + z2 / (2.0 * t)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t)) / denom;
    return {std::min(phat, std::max(0.0, center - half)),
            std::max(phat, std::min(1.0, center + half))};
}

} // namespace detail

enum class UnionSource { exact, mc };

inline const char* to_string(UnionSource s) { return s == UnionSource::exact ? "exact" : "mc"; }

struct UnionEstimate {
    double estimate = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double std_error = 0.0;
    double ci_low = 0.0, ci_high = 1.0;
    double level = 0.99;
    std::uint64_t seed = 0;
    std::size_t first = 0, n = 0; // 0-based position range [first, n)
    UnionSource source = UnionSource::mc;
};

// Exact value wrapped in the estimate shape: zero-width interval, no trials.
inline UnionEstimate exact_estimate(double value, std::size_t first, std::size_t n,
                                    std::uint64_t seed, double level = 0.99) {
    UnionEstimate e;
    e.estimate = e.ci_low = e.ci_high = value;
    e.level = level;
    e.seed = seed;
    e.first = first;
    e.n = n;
    e.source = UnionSource::exact;
    return e;
}

// Monte Carlo estimate of P(union of events at positions [first, n)).
// Deterministic given (model, first, n, trials, seed) for any thread count.
inline UnionEstimate estimate_union(const models::EventSeqModel& model, std::size_t first,
                                    std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                    double level = 0.99, unsigned threads = 0) {
    if (first >= n) throw std::invalid_argument("estimate_union: empty position range");
    if (trials == 0) throw std::invalid_argument("estimate_union: needs at least one trial");
    models::validate_model(model);

    const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<std::uint64_t> counts(chunks, 0);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t chunk_seed = substream_seed(seed, c);
        const std::uint64_t begin = c * kChunkTrials;
        const std::uint64_t end = std::min(trials, begin + kChunkTrials);
        std::uint64_t count = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            const auto traj =
                models::sample_indicators(model, n, substream_seed(chunk_seed, t - begin));
            bool hit = false;
            for (std::size_t k = first; k < n && !hit; ++k) hit = traj.bits[k] != 0;
            count += hit;
        }
        counts[c] = count;
    };

    unsigned workers = threads ? threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    std::uint64_t hits = 0;
    for (std::uint64_t c : counts) hits += c;

    UnionEstimate e;
    e.trials = trials;
    e.hits = hits;
    e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    const double z = detail::normal_quantile(0.5 + level / 2.0);
    const auto ci = detail::wilson(hits, trials, z);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    e.level = level;
    e.seed = seed;
    e.first = first;
    e.n = n;
    e.source = UnionSource::mc;
    return e;
}

struct ValidateOptions {
    double level = 0.99;
    bool force_mc = false; // skip the exact-union shortcut, e.g. for calibration
    double cutoff = kEigenCutoff;
    double guard = kDenominatorGuard;
    double slack_tol = 1e-9; // rounding slack before a bound counts as violated
    unsigned threads = 0;
};

enum class Verdict { consistent, violated, undefined_ratio };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::violated: return "violated";
        case Verdict::undefined_ratio: return "undefined-ratio";
    }
    return "?";
}

struct ValidationReport {
    std::optional<double> bound; // nullopt when the denominator is under guard
    UnionEstimate estimate;
    double slack = 0.0; // ci_high - bound
    Verdict verdict = Verdict::consistent;
};

// Checks the n-th ratio bound against the union probability, exact when the
// model admits one, simulated otherwise. A bound above ci_high by more than
// the rounding slack is a genuine violation; a bound above the point estimate
// but inside the interval is statistically consistent. The slack matters for
// models where the bound attains the union exactly and floating point decides
// which side of equality the quotient lands on.
inline ValidationReport validate_bound(const models::EventSeqModel& model,
                                       const WeightScheme& scheme, std::size_t n,
                                       std::uint64_t trials, std::uint64_t seed,
                                       const ValidateOptions& opt = {}) {
    const auto src = models::gram_view(model, n);
    const auto w = resolve_weights(scheme, src, n, opt.cutoff);

    ValidationReport rep;
    rep.bound = bound_ratio(src, w, n, opt.guard);

    const auto exact = opt.force_mc ? std::nullopt : models::exact_union(model, 0, n);
    rep.estimate = exact ? exact_estimate(*exact, 0, n, seed, opt.level)
                         : estimate_union(model, 0, n, trials, seed, opt.level, opt.threads);

    if (!rep.bound) {
        rep.verdict = Verdict::undefined_ratio;
        return rep;
    }
    rep.slack = rep.estimate.ci_high - *rep.bound;
    rep.verdict = *rep.bound > rep.estimate.ci_high + opt.slack_tol ? Verdict::violated
                                                                    : Verdict::consistent;
    return rep;
}

struct ConvergenceRow {
    std::size_t n = 0;
    std::optional<double> ratio;
    std::optional<double> running_max;
    double union_value = 0.0;
    double ci_low = 0.0, ci_high = 1.0;
    UnionSource source = UnionSource::exact;
};

// One row per grid point: the ratio sequence is evaluated incrementally once
// up to the largest n, unions are exact where available and re-estimated from
// the same seed otherwise (nested trials keep them monotone in n). `first`
// truncates the union range to positions [first, n) to make the tail cutoff
// explicit; ratios always cover the full prefix.
inline std::vector<ConvergenceRow> convergence_experiment(const models::EventSeqModel& model,
                                                          const WeightScheme& scheme,
                                                          const std::vector<std::size_t>& n_grid,
                                                          std::uint64_t trials, std::uint64_t seed,
                                                          const ValidateOptions& opt = {},
                                                          std::size_t first = 0) {
    if (n_grid.empty()) throw std::invalid_argument("convergence_experiment: empty grid");
    if (n_grid.front() <= first)
        throw std::invalid_argument("convergence_experiment: grid must start above first");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("convergence_experiment: grid must be increasing");

    const std::size_t n_max = n_grid.back();
    const auto src = models::gram_view(model, n_max);
    const auto w = resolve_weights(scheme, src, n_max, opt.cutoff);
    RatioOptions ropt;
    ropt.guard = opt.guard;
    const auto report = ratio_sequence(src, w, ropt);

    std::vector<ConvergenceRow> rows;
    rows.reserve(n_grid.size());
    for (std::size_t n : n_grid) {
        ConvergenceRow row;
        row.n = n;
        row.ratio = report.ratios[n - 1];
        row.running_max = report.running_max[n - 1];
        const auto exact = opt.force_mc ? std::nullopt : models::exact_union(model, first, n);
        if (exact) {
            row.union_value = row.ci_low = row.ci_high = *exact;
            row.source = UnionSource::exact;
        } else {
            const auto est = estimate_union(model, first, n, trials, seed, opt.level, opt.threads);
            row.union_value = est.estimate;
            row.ci_low = est.ci_low;
            row.ci_high = est.ci_high;
            row.source = UnionSource::mc;
        }
        rows.push_back(row);
    }
    return rows;
}

// CSV layout: `n,ratio,running_max,union,ci_low,ci_high,source`; undefined
// ratios become empty cells.
inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "n,ratio,running_max,union,ci_low,ci_high,source\n";
    for (const auto& r : rows) {
        out << r.n << ',';
        if (r.ratio) out << evb::detail::format_double(*r.ratio);
        out << ',';
        if (r.running_max) out << evb::detail::format_double(*r.running_max);
        out << ',' << evb::detail::format_double(r.union_value) << ','
            << evb::detail::format_double(r.ci_low) << ',' << evb::detail::format_double(r.ci_high)
            << ',' << to_string(r.source) << '\n';
    }
}

} // namespace evb::mc
