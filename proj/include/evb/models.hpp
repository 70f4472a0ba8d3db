#pragma once
// Generative event-sequence models with exact probabilities.
//
// Four variants:
//   periodic      events cycling through fixed subsets of a finite space
//   independent   mutually independent events with a per-position rule
//   parity        m fair bits per period; one event per nonempty bit subset,
//                 "parity of the selected bits is even"; each period draws a
//                 fresh independent block of bits, so distinct positions are
//                 pairwise independent and positions within one period form
//                 the classical pairwise-independent-but-dependent family
//   markov        A_n = {chain occupies a target state at step n}
//
// Every variant yields exact Gram data. The lazy ModelGram source serves
// per-entry queries without materializing the quadratic matrix, which is what
// makes large-horizon ratio sequences affordable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "evb/gram.hpp"
#include "evb/matrix.hpp"
#include "evb/rng.hpp"

namespace evb::models {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxHorizon = 1'000'000;      // per-entry evaluation
inline constexpr std::size_t kMaxDenseGram = 4096;         // dense materialization
inline constexpr std::size_t kMaxMarkovHorizon = 200'000;  // step-table precomputation
inline constexpr unsigned kMaxParityBits = 20;             // 2^m enumeration guard

// ---------------------------------------------------------------------------
// Finite probability space

struct FiniteSpace {
    struct Atom {
        std::string id;
        double mass = 0.0;
    };
    std::vector<Atom> atoms;

    void validate() const {
        if (atoms.empty()) throw ModelError("finite space: no atoms");
        double total = 0.0;
        for (const auto& a : atoms) {
            if (!(a.mass >= 0.0) || !std::isfinite(a.mass))
                throw ModelError("finite space: atom '" + a.id + "' has invalid mass");
            total += a.mass;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ModelError("finite space: atom masses sum to " + std::to_string(total) +
                             ", not 1");
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (atoms[i].id == atoms[j].id)
                    throw ModelError("finite space: duplicate atom id '" + atoms[i].id + "'");
    }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i].id == id) return i;
        throw ModelError("finite space: unknown atom id '" + id + "'");
    }
};

// An event is a subset of atoms, stored as a membership mask.
using AtomMask = std::vector<std::uint8_t>;

inline double mask_mass(const FiniteSpace& space, const AtomMask& mask) {
    double m = 0.0;
    for (std::size_t i = 0; i < space.atoms.size(); ++i)
        if (mask[i]) m += space.atoms[i].mass;
    return m;
}

// ---------------------------------------------------------------------------
// Model variants

struct PeriodicModel {
    FiniteSpace space;
    std::vector<AtomMask> events; // one per period position

    void validate() const {
        space.validate();
        if (events.empty()) throw ModelError("periodic model: empty period");
        for (const auto& e : events)
            if (e.size() != space.atoms.size())
                throw ModelError("periodic model: event mask does not match atom count");
    }
};

struct ProbRule {
    enum class Kind { constant, list, harmonic };
    Kind kind = Kind::constant;
    double value = 0.5;         // constant
    std::vector<double> values; // list
    double c = 1.0;             // harmonic: p at position k is min(1, c/k), k counted from 1

    double at(std::size_t i) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::list:
                if (i >= values.size())
                    throw ModelError("independent model: position " + std::to_string(i + 1) +
                                     " is beyond the listed probabilities");
                return values[i];
            case Kind::harmonic: return std::min(1.0, c / static_cast<double>(i + 1));
        }
        throw ModelError("independent model: unknown probability rule");
    }

    void validate() const {
        auto check = [](double p) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ModelError("independent model: probability " + std::to_string(p) +
                                 " outside [0,1]");
        };
        switch (kind) {
            case Kind::constant: check(value); break;
            case Kind::list:
                if (values.empty()) throw ModelError("independent model: empty probability list");
                for (double p : values) check(p);
                break;
            case Kind::harmonic:
                if (!(c >= 0.0) || !std::isfinite(c))
                    throw ModelError("independent model: invalid harmonic coefficient");
                break;
        }
    }
};

struct IndependentModel {
    ProbRule rule;
    void validate() const { rule.validate(); }
};

struct ParityModel {
    unsigned bits = 2;

    void validate() const {
        if (bits < 1 || bits > kMaxParityBits)
            throw ModelError("parity model: bit count " + std::to_string(bits) +
                             " outside [1, " + std::to_string(kMaxParityBits) + "]");
    }
    // Position k maps to the nonempty bit subset with mask (k mod period) + 1,
    // i.e. subsets enumerated in increasing binary-mask order.
    std::size_t period() const { return (std::size_t{1} << bits) - 1; }
};

struct MarkovModel {
    std::size_t states = 0;
    Matrix transition;               // row-stochastic, states x states
    std::vector<double> initial;     // distribution over states
    std::vector<std::uint8_t> target; // membership mask over states

    void validate() const {
        if (states == 0) throw ModelError("markov model: no states");
        if (transition.rows() != states || transition.cols() != states)
            throw ModelError("markov model: transition matrix is not states x states");
        if (initial.size() != states || target.size() != states)
            throw ModelError("markov model: initial/target size does not match state count");
        auto check_dist = [](std::span<const double> d, const std::string& what) {
            double total = 0.0;
            for (double v : d) {
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw ModelError("markov model: " + what + " has a negative entry");
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw ModelError("markov model: " + what + " sums to " + std::to_string(total) +
                                 ", not 1");
        };
        check_dist(initial, "initial distribution");
        for (std::size_t i = 0; i < states; ++i)
            check_dist(transition.row(i), "transition row " + std::to_string(i + 1));
    }
};

using EventSeqModel = std::variant<PeriodicModel, IndependentModel, ParityModel, MarkovModel>;

inline void validate_model(const EventSeqModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

inline const char* variant_name(const EventSeqModel& model) {
    switch (model.index()) {
        case 0: return "finite_periodic";
        case 1: return "independent";
        case 2: return "pairwise_parity";
        case 3: return "markov";
    }
    return "?";
}

inline std::optional<std::size_t> period_length(const EventSeqModel& model) {
    if (const auto* p = std::get_if<PeriodicModel>(&model)) return p->events.size();
    if (const auto* p = std::get_if<ParityModel>(&model)) return p->period();
    return std::nullopt;
}

namespace detail {

inline void check_horizon(std::size_t n) {
    if (n == 0) throw ModelError("horizon must be at least 1");
    if (n > kMaxHorizon)
        throw ModelError("horizon " + std::to_string(n) + " exceeds the guard " +
                         std::to_string(kMaxHorizon));
}

inline std::size_t draw_index(Splitmix64& rng, std::span<const double> masses) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < masses.size(); ++i) {
        acc += masses[i];
        if (u < acc) return i;
    }
    return masses.size() - 1; // last cell absorbs rounding slack
}

inline bool parity_even(std::uint32_t word) {
#if defined(__GNUC__) || defined(__clang__)
    return (__builtin_popcount(word) & 1) == 0;
#else
    int c = 0;
    for (; word; word &= word - 1) ++c;
    return (c & 1) == 0;
#endif
}

} // namespace detail

// ---------------------------------------------------------------------------
// Exact probabilities

// P(A_{i+1}) for the 0-based position i.
inline double event_prob(const EventSeqModel& model, std::size_t i) {
    validate_model(model);
    detail::check_horizon(i + 1);
    if (const auto* m = std::get_if<PeriodicModel>(&model))
        return mask_mass(m->space, m->events[i % m->events.size()]);
    if (const auto* m = std::get_if<IndependentModel>(&model)) return m->rule.at(i);
    if (std::get_if<ParityModel>(&model)) return 0.5;
    const auto& m = std::get<MarkovModel>(model);
    std::vector<double> mu = m.initial;
    for (std::size_t step = 0; step <= i; ++step) mu = vecmat(mu, m.transition);
    double p = 0.0;
    for (std::size_t s = 0; s < m.states; ++s)
        if (m.target[s]) p += mu[s];
    return p;
}

// ---------------------------------------------------------------------------
// Lazy Gram source

// Immutable per-entry oracle for p_i and M_ij over a fixed horizon. All
// tables are precomputed at construction, so concurrent readers are safe.
class ModelGram {
public:
    std::size_t size() const { return horizon_; }

    double prob(std::size_t i) const {
        switch (data_.index()) {
            case 0: {
                const auto& d = std::get<Periodic>(data_);
                return d.p[i % d.period];
            }
            case 1: return std::get<Independent>(data_).p[i];
            case 2: return 0.5;
            default: return std::get<Markov>(data_).p[i];
        }
    }

    double inter(std::size_t i, std::size_t j) const {
        switch (data_.index()) {
            case 0: {
                const auto& d = std::get<Periodic>(data_);
                return d.inter(i % d.period, j % d.period);
            }
            case 1: {
                const auto& d = std::get<Independent>(data_);
                return i == j ? d.p[i] : d.p[i] * d.p[j];
            }
            case 2: return i == j ? 0.5 : 0.25;
            default: {
                const auto& d = std::get<Markov>(data_);
                if (i == j) return d.p[i];
                const std::size_t lo = std::min(i, j), hi = std::max(i, j);
                const auto& rowsum = d.target_rowsum[hi - lo - 1];
                double v = 0.0;
                for (std::size_t s = 0; s < d.states; ++s)
                    if (d.target[s]) v += d.mu[lo][s] * rowsum[s];
                return v;
            }
        }
    }

private:
    struct Periodic {
        std::size_t period;
        std::vector<double> p;  // per residue
        SymMatrix inter;        // per residue pair
    };
    struct Independent {
        std::vector<double> p;
    };
    struct Parity {};
    struct Markov {
        std::size_t states;
        std::vector<std::uint8_t> target;
        std::vector<std::vector<double>> mu;            // mu[i] = distribution at step i+1
        std::vector<std::vector<double>> target_rowsum; // [d-1][s] = sum_{t in target} (T^d)[s][t]
        std::vector<double> p;                          // p[i] = sum_{s in target} mu[i][s]
    };

    std::size_t horizon_ = 0;
    std::variant<Periodic, Independent, Parity, Markov> data_;

    friend ModelGram gram_view(const EventSeqModel&, std::size_t);
    ModelGram() = default;
};

inline ModelGram gram_view(const EventSeqModel& model, std::size_t horizon) {
    validate_model(model);
    detail::check_horizon(horizon);

    ModelGram out;
    out.horizon_ = horizon;
    if (const auto* m = std::get_if<PeriodicModel>(&model)) {
        ModelGram::Periodic d;
        d.period = m->events.size();
        d.p.resize(d.period);
        d.inter = SymMatrix(d.period);
        for (std::size_t a = 0; a < d.period; ++a) {
            d.p[a] = mask_mass(m->space, m->events[a]);
            for (std::size_t b = 0; b <= a; ++b) {
                double v = 0.0;
                for (std::size_t k = 0; k < m->space.atoms.size(); ++k)
                    if (m->events[a][k] && m->events[b][k]) v += m->space.atoms[k].mass;
                d.inter.at(a, b) = v;
            }
        }
        out.data_ = std::move(d);
    } else if (const auto* mi = std::get_if<IndependentModel>(&model)) {
        ModelGram::Independent d;
        d.p.resize(horizon);
        for (std::size_t i = 0; i < horizon; ++i) d.p[i] = mi->rule.at(i);
        out.data_ = std::move(d);
    } else if (std::get_if<ParityModel>(&model)) {
        out.data_ = ModelGram::Parity{};
    } else {
        const auto& mk = std::get<MarkovModel>(model);
        if (horizon > kMaxMarkovHorizon || horizon * mk.states > 20'000'000)
            throw ModelError("markov model: horizon too large for step-table precomputation");
        ModelGram::Markov d;
        d.states = mk.states;
        d.target = mk.target;
        d.mu.reserve(horizon);
        std::vector<double> mu = mk.initial;
        for (std::size_t i = 0; i < horizon; ++i) {
            mu = vecmat(mu, mk.transition);
            d.mu.push_back(mu);
        }
        d.p.resize(horizon);
        for (std::size_t i = 0; i < horizon; ++i) {
            double p = 0.0;
            for (std::size_t s = 0; s < mk.states; ++s)
                if (mk.target[s]) p += d.mu[i][s];
            d.p[i] = p;
        }
        if (horizon > 1) {
            // r_d = T^d * target indicator, advanced one multiplication per gap.
            d.target_rowsum.reserve(horizon - 1);
            std::vector<double> r(mk.states, 0.0);
            for (std::size_t s = 0; s < mk.states; ++s) r[s] = mk.target[s] ? 1.0 : 0.0;
            for (std::size_t dgap = 1; dgap < horizon; ++dgap) {
                std::vector<double> next(mk.states, 0.0);
                for (std::size_t s = 0; s < mk.states; ++s) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t < mk.states; ++t) acc += mk.transition(s, t) * r[t];
                    next[s] = acc;
                }
                r = std::move(next);
                d.target_rowsum.push_back(r);
            }
        }
        out.data_ = std::move(d);
    }
    return out;
}

static_assert(gram_source<ModelGram>);

// Dense Gram data for the first n events.
inline GramData gram(const EventSeqModel& model, std::size_t n) {
    detail::check_horizon(n);
    if (n > kMaxDenseGram)
        throw ModelError("dense Gram guard: n = " + std::to_string(n) + " exceeds " +
                         std::to_string(kMaxDenseGram) + "; use gram_view for large horizons");
    return materialize(gram_view(model, n), n);
}

// ---------------------------------------------------------------------------
// Exact unions and limsup

// P(union of events at 0-based positions [first, n)), where the variant
// admits a closed form; markov models are simulation-only.
inline std::optional<double> exact_union(const EventSeqModel& model, std::size_t first,
                                         std::size_t n) {
    validate_model(model);
    detail::check_horizon(n);
    if (first >= n) throw ModelError("exact_union: empty position range");

    if (const auto* m = std::get_if<PeriodicModel>(&model)) {
        const std::size_t period = m->events.size();
        AtomMask used(m->space.atoms.size(), 0);
        const std::size_t count = std::min(n - first, period);
        for (std::size_t k = 0; k < count; ++k) {
            const AtomMask& e = m->events[(first + k) % period];
            for (std::size_t a = 0; a < used.size(); ++a) used[a] |= e[a];
        }
        return mask_mass(m->space, used);
    }
    if (const auto* m = std::get_if<IndependentModel>(&model)) {
        double miss = 1.0;
        for (std::size_t k = first; k < n; ++k) miss *= 1.0 - m->rule.at(k);
        return 1.0 - miss;
    }
    if (const auto* m = std::get_if<ParityModel>(&model)) {
        const std::size_t period = m->period();
        const std::size_t patterns = std::size_t{1} << m->bits;
        double miss = 1.0;
        for (std::size_t block = first / period; block <= (n - 1) / period; ++block) {
            const std::size_t lo = std::max(first, block * period);
            const std::size_t hi = std::min(n, (block + 1) * period);
            if (hi - lo == period) {
                // Fully covered block: with m >= 2 every bit pattern satisfies
                // some even-parity subset, so the block is hit surely.
                miss *= m->bits == 1 ? 0.5 : 0.0;
                continue;
            }
            std::size_t missing_patterns = 0;
            for (std::size_t x = 0; x < patterns; ++x) {
                bool avoid = true;
                for (std::size_t pos = lo; pos < hi && avoid; ++pos) {
                    const auto mask = static_cast<std::uint32_t>(pos % period + 1);
                    avoid = !detail::parity_even(static_cast<std::uint32_t>(x) & mask);
                }
                missing_patterns += avoid;
            }
            miss *= static_cast<double>(missing_patterns) / static_cast<double>(patterns);
        }
        return 1.0 - miss;
    }
    return std::nullopt; // markov
}

// P(infinitely many events occur). For a periodic model every period event
// recurs infinitely often, so the limsup event is exactly the union of the
// period's events. Other variants are undefined here.
inline std::optional<double> exact_limsup(const EventSeqModel& model) {
    validate_model(model);
    if (const auto* m = std::get_if<PeriodicModel>(&model))
        return exact_union(model, 0, m->events.size());
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Trajectory sampling

struct TrajectorySample {
    std::size_t n = 0;
    std::vector<std::uint8_t> bits; // bits[k] = 1 iff the outcome lies in A_{k+1}
};

// One outcome trajectory; deterministic given (model, n, seed). Randomness is
// consumed in position order, so extending the horizon with the same seed
// extends the same trajectory.
inline TrajectorySample sample_indicators(const EventSeqModel& model, std::size_t n,
                                          std::uint64_t seed) {
    validate_model(model);
    detail::check_horizon(n);
    Splitmix64 rng(seed);
    TrajectorySample out;
    out.n = n;
    out.bits.assign(n, 0);

    if (const auto* m = std::get_if<PeriodicModel>(&model)) {
        std::vector<double> masses(m->space.atoms.size());
        for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = m->space.atoms[i].mass;
        const std::size_t atom = detail::draw_index(rng, masses);
        const std::size_t period = m->events.size();
        for (std::size_t k = 0; k < n; ++k) out.bits[k] = m->events[k % period][atom];
    } else if (const auto* mi = std::get_if<IndependentModel>(&model)) {
        for (std::size_t k = 0; k < n; ++k) out.bits[k] = rng.bernoulli(mi->rule.at(k));
    } else if (const auto* mp = std::get_if<ParityModel>(&model)) {
        const std::size_t period = mp->period();
        for (std::size_t k = 0; k < n; ++k) {
            if (k % period == 0) { // fresh bit block for each period
                std::uint32_t word = 0;
                for (unsigned b = 0; b < mp->bits; ++b)
                    word |= static_cast<std::uint32_t>(rng.coin()) << b;
                out.bits[k] = detail::parity_even(word & 1u);
                for (std::size_t r = 1; r < period && k + r < n; ++r)
                    out.bits[k + r] =
                        detail::parity_even(word & static_cast<std::uint32_t>(r + 1));
            }
        }
    } else {
        const auto& mk = std::get<MarkovModel>(model);
        std::size_t state = detail::draw_index(rng, mk.initial);
        for (std::size_t k = 0; k < n; ++k) {
            state = detail::draw_index(rng, mk.transition.row(state));
            out.bits[k] = mk.target[state];
        }
    }
    return out;
}

} // namespace evb::models
