#pragma once
// Test-only oracles: brute-force enumeration over finite spaces, a
// from-scratch double-loop ratio, and Markov path enumeration. These stay
// deliberately independent of the library's evaluation paths so that they can
// arbitrate them.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evb/matrix.hpp"
#include "evb/models.hpp"
#include "evb/rng.hpp"

namespace oracle {

// Finite space as plain atom masses; events are bitmasks over atoms.
struct Space {
    std::vector<double> mass;
};

inline double prob(const Space& s, std::uint32_t event) {
    double p = 0.0;
    for (std::size_t a = 0; a < s.mass.size(); ++a)
        if (event & (1u << a)) p += s.mass[a];
    return p;
}

inline double inter(const Space& s, std::uint32_t e1, std::uint32_t e2) {
    return prob(s, e1 & e2);
}

inline double union_prob(const Space& s, std::span<const std::uint32_t> events) {
    std::uint32_t u = 0;
    for (std::uint32_t e : events) u |= e;
    return prob(s, u);
}

// Gram of the periodic sequence events[k % period] up to horizon n.
inline evb::Matrix gram_dense(const Space& s, std::span<const std::uint32_t> period_events,
                              std::size_t n) {
    evb::Matrix m(n, n);
    const std::size_t period = period_events.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = inter(s, period_events[i % period], period_events[j % period]);
    return m;
}

// From-scratch ratio evaluation: no incremental state, plain double loops.
inline std::optional<double> ratio_brute(std::span<const double> p, const evb::Matrix& m,
                                         std::span<const double> w, std::size_t n,
                                         double guard = 1e-12) {
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) num += w[k] * p[k];
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) den += w[i] * w[j] * m(i, j);
    if (!(den > guard)) return std::nullopt;
    return num * num / den;
}

// P(X_i in target and X_j in target) for a Markov chain, by enumerating every
// state path through step max(i,j)+1. Positions are 0-based; position k means
// the state after k+1 transitions from the initial distribution.
inline double markov_pair_prob(const evb::Matrix& t, std::span<const double> initial,
                               std::span<const std::uint8_t> target, std::size_t i,
                               std::size_t j) {
    const std::size_t steps = std::max(i, j) + 1;
    const std::size_t k = initial.size();
    double total = 0.0;
    std::vector<std::size_t> path(steps, 0);
    // Odometer enumeration of state sequences.
    while (true) {
        bool hit_i = target[path[i]] && target[path[j]];
        if (hit_i) {
            for (std::size_t s0 = 0; s0 < k; ++s0) {
                double p = initial[s0] * t(s0, path[0]);
                for (std::size_t step = 1; step < steps; ++step)
                    p *= t(path[step - 1], path[step]);
                total += p;
            }
        }
        std::size_t pos = 0;
        while (pos < steps && ++path[pos] == k) path[pos++] = 0;
        if (pos == steps) break;
    }
    return total;
}

inline double markov_event_prob(const evb::Matrix& t, std::span<const double> initial,
                                std::span<const std::uint8_t> target, std::size_t i) {
    return markov_pair_prob(t, initial, target, i, i);
}

// Randomized periodic model over a finite space, mirrored into both the
// oracle representation and the library model. All atom masses are strictly
// positive and every event is nonempty, so event probabilities stay positive.
struct RandomPeriodic {
    Space space;
    std::vector<std::uint32_t> events;
    evb::models::PeriodicModel model;
};

inline RandomPeriodic random_periodic(evb::Splitmix64& rng, std::size_t max_atoms = 6,
                                      std::size_t max_events = 8) {
    RandomPeriodic out;
    const std::size_t atoms = 1 + static_cast<std::size_t>(rng.next() % max_atoms);
    out.space.mass.resize(atoms);
    double total = 0.0;
    for (double& m : out.space.mass) {
        m = 0.05 + rng.next_double();
        total += m;
    }
    for (double& m : out.space.mass) m /= total;

    const std::size_t events = 1 + static_cast<std::size_t>(rng.next() % max_events);
    const std::uint32_t full = (1u << atoms) - 1;
    for (std::size_t e = 0; e < events; ++e) {
        std::uint32_t mask = static_cast<std::uint32_t>(rng.next()) & full;
        if (mask == 0) mask = 1u << (rng.next() % atoms);
        out.events.push_back(mask);
    }

    for (std::size_t a = 0; a < atoms; ++a)
        out.model.space.atoms.push_back({"a" + std::to_string(a), out.space.mass[a]});
    for (std::uint32_t mask : out.events) {
        evb::models::AtomMask am(atoms, 0);
        for (std::size_t a = 0; a < atoms; ++a) am[a] = (mask >> a) & 1u;
        out.model.events.push_back(std::move(am));
    }
    return out;
}

inline std::vector<double> random_weights(evb::Splitmix64& rng, std::size_t n, double lo = -2.0,
                                          double hi = 2.0) {
    std::vector<double> w(n);
    for (double& v : w) v = lo + (hi - lo) * rng.next_double();
    return w;
}

// The worked periodic example: four equal atoms, A and B independent with
// probability 1/2, events cycling A, B, A-and-B.
inline evb::models::PeriodicModel overlap_cycle_model() {
    evb::models::PeriodicModel m;
    m.space.atoms = {{"ab", 0.25}, {"a", 0.25}, {"b", 0.25}, {"none", 0.25}};
    m.events = {
        {1, 1, 0, 0}, // A
        {1, 0, 1, 0}, // B
        {1, 0, 0, 0}, // A and B
    };
    return m;
}

inline Space overlap_cycle_space() { return Space{{0.25, 0.25, 0.25, 0.25}}; }
inline std::vector<std::uint32_t> overlap_cycle_events() { return {0b0011u, 0b0101u, 0b0001u}; }

} // namespace oracle
