#pragma once
// Gram data of an event sequence: per-event probabilities p_i = P(A_i) and
// pairwise intersection probabilities M_ij = P(A_i and A_j).
//
// Bound computations are written against the gram_source concept so that
// large horizons can be served by lazy per-entry oracles instead of a dense
// matrix. GramData is the dense implementation used for inspection and CSV
// export. Indices are 0-based in code; the CSV format and all user-facing
// messages number events from 1.

#include <cmath>
#include <concepts>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evb/matrix.hpp"

namespace evb {

template <class G>
concept gram_source = requires(const G& g, std::size_t i, std::size_t j) {
    { g.size() } -> std::convertible_to<std::size_t>;
    { g.prob(i) } -> std::convertible_to<double>;
    { g.inter(i, j) } -> std::convertible_to<double>;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

class GramData {
public:
    GramData() = default;

    GramData(std::vector<double> probs, SymMatrix inter)
        : p_(std::move(probs)), m_(std::move(inter)) {
        if (p_.size() != m_.size())
            throw std::invalid_argument("GramData: probability count does not match matrix size");
    }

    std::size_t size() const { return p_.size(); }
    double prob(std::size_t i) const { return p_[i]; }
    double inter(std::size_t i, std::size_t j) const { return m_(i, j); }

    const std::vector<double>& probs() const { return p_; }
    const SymMatrix& matrix() const { return m_; }

    // Checks the cheap structural invariants: probability range, diagonal
    // consistency M_ii = p_i, and the Frechet bounds
    //   max(0, p_i + p_j - 1) <= M_ij <= min(p_i, p_j).
    // Returns one message per violation (events numbered from 1). Positive
    // semi-definiteness is checked separately via check_psd.
    std::vector<std::string> validate(double tol = 1e-9) const {
        std::vector<std::string> issues;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(p_[i] >= -tol && p_[i] <= 1.0 + tol) || !std::isfinite(p_[i]))
                issues.push_back("p[" + std::to_string(i + 1) + "] = " +
                                 detail::format_double(p_[i]) + " is not a probability");
            if (std::abs(m_(i, i) - p_[i]) > tol)
                issues.push_back("M[" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                                 "] = " + detail::format_double(m_(i, i)) +
                                 " differs from p[" + std::to_string(i + 1) + "] = " +
                                 detail::format_double(p_[i]));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) {
                const double v = m_(i, j);
                const std::string name = "M[" + std::to_string(j + 1) + "," +
                                         std::to_string(i + 1) + "] = " + detail::format_double(v);
                if (!std::isfinite(v)) {
                    issues.push_back(name + " is not finite");
                    continue;
                }
                if (v < -tol) issues.push_back(name + " is negative");
                if (v > std::min(p_[i], p_[j]) + tol)
                    issues.push_back(name + " exceeds min(p_i, p_j) = " +
                                     detail::format_double(std::min(p_[i], p_[j])));
                if (v < p_[i] + p_[j] - 1.0 - tol)
                    issues.push_back(name + " is below p_i + p_j - 1 = " +
                                     detail::format_double(p_[i] + p_[j] - 1.0));
            }
        return issues;
    }

private:
    std::vector<double> p_;
    SymMatrix m_;
};

static_assert(gram_source<GramData>);

template <gram_source G>
GramData materialize(const G& g, std::size_t n) {
    if (n > g.size()) throw std::out_of_range("materialize: n exceeds available Gram data");
    std::vector<double> p(n);
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = g.prob(i);
        for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = g.inter(i, j);
    }
    return GramData(std::move(p), std::move(m));
}

// CSV layout: header `i,j,p_i,p_j,m_ij`, one row per upper-triangle entry in
// row-major order, indices 1-based.
inline void write_gram_csv(std::ostream& out, const GramData& g) {
    out << "i,j,p_i,p_j,m_ij\n";
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            out << (i + 1) << ',' << (j + 1) << ',' << detail::format_double(g.prob(i)) << ','
                << detail::format_double(g.prob(j)) << ',' << detail::format_double(g.inter(i, j))
                << '\n';
}

inline GramData read_gram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("gram csv: empty input");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "i,j,p_i,p_j,m_ij")
        throw std::runtime_error("gram csv: expected header i,j,p_i,p_j,m_ij");

    struct Row {
        std::size_t i, j;
        double pi, pj, m;
    };
    std::vector<Row> rows;
    std::size_t n = 0, line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Row r{};
        std::istringstream ss(line);
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        if (!(ss >> r.i >> c1 >> r.j >> c2 >> r.pi >> c3 >> r.pj >> c4 >> r.m) || c1 != ',' ||
            c2 != ',' || c3 != ',' || c4 != ',' || r.i < 1 || r.j < r.i)
            throw std::runtime_error("gram csv: malformed row at line " + std::to_string(line_no));
        rows.push_back(r);
        n = std::max(n, r.j);
    }
    if (n == 0) throw std::runtime_error("gram csv: no data rows");

    std::vector<double> p(n, std::nan(""));
    SymMatrix m(n);
    std::vector<char> seen(n * (n + 1) / 2, 0);
    for (const Row& r : rows) {
        const std::size_t i = r.i - 1, j = r.j - 1;
        m.at(j, i) = r.m;
        seen[j * (j + 1) / 2 + i] = 1;
        p[i] = r.pi;
        p[j] = r.pj;
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i)
            if (!seen[j * (j + 1) / 2 + i])
                throw std::runtime_error("gram csv: missing entry for (" + std::to_string(i + 1) +
                                         "," + std::to_string(j + 1) + ")");
    return GramData(std::move(p), std::move(m));
}

} // namespace evb
