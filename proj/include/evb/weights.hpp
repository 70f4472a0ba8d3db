#pragma once
// Weight schemes applied to the ratio bound. Weights are arbitrary reals;
// negative entries are legitimate and sometimes optimal.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evb {

enum class WeightKind { unit, inverse_probability, optimal, explicit_list };

inline const char* to_string(WeightKind k) {
    switch (k) {
        case WeightKind::unit: return "unit";
        case WeightKind::inverse_probability: return "inverse";
        case WeightKind::optimal: return "optimal";
        case WeightKind::explicit_list: return "explicit";
    }
    return "?";
}

struct WeightScheme {
    WeightKind kind = WeightKind::unit;
    std::vector<double> values; // used by explicit_list only

    static WeightScheme unit() { return {WeightKind::unit, {}}; }
    static WeightScheme inverse_probability() { return {WeightKind::inverse_probability, {}}; }
    static WeightScheme optimal() { return {WeightKind::optimal, {}}; }
    static WeightScheme explicit_list(std::vector<double> w) {
        return {WeightKind::explicit_list, std::move(w)};
    }
};

// w_i = 1 / p_i; every probability must be strictly positive.
inline std::vector<double> inverse_probability_weights(std::span<const double> p) {
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            throw std::domain_error("inverse_probability_weights: event " + std::to_string(i + 1) +
                                    " has zero probability");
        w[i] = 1.0 / p[i];
    }
    return w;
}

} // namespace evb
