#pragma once

#include "fjrw/markings.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fjrw {

// prod_{j} u_{label_j, d_j} with distinct labels (u_{i,j} u_{i,j'} = 0).
// Factors are kept sorted by label, which makes the representation canonical.
struct UMonomial {
    std::vector<std::pair<int, int>> factors;  // (label, descendent)

    bool is_unit() const { return factors.empty(); }
    std::size_t degree() const { return factors.size(); }

    static UMonomial unit() { return {}; }

    static UMonomial single(int label, int descendent)
    {
        UMonomial m;
        m.factors.emplace_back(label, descendent);
        return m;
    }

    friend bool operator==(const UMonomial&, const UMonomial&) = default;
    friend auto operator<=>(const UMonomial&, const UMonomial&) = default;
};

// nullopt when the product vanishes (shared label).
inline std::optional<UMonomial> mul(const UMonomial& x, const UMonomial& y)
{
    UMonomial out;
    out.factors.reserve(x.factors.size() + y.factors.size());
    auto i = x.factors.begin();
    auto j = y.factors.begin();
    while (i != x.factors.end() && j != y.factors.end()) {
        if (i->first == j->first)
            return std::nullopt;
        if (i->first < j->first)
            out.factors.push_back(*i++);
        else
            out.factors.push_back(*j++);
    }
    out.factors.insert(out.factors.end(), i, x.factors.end());
    out.factors.insert(out.factors.end(), j, y.factors.end());
    return out;
}

inline std::string to_string(const UMonomial& m)
{
    if (m.is_unit())
        return "1";
    std::string out;
    for (const auto& [label, d] : m.factors) {
        if (!out.empty())
            out += '*';
        out += "u[" + std::to_string(label) + "," + std::to_string(d) + "]";
    }
    return out;
}

// prod t_{alpha,beta,d} as a multiset; factors sorted lexicographically.
// A monomial is zero in A_{I,sym} when, for some twist (alpha,beta), it
// carries more factors than I has markings of that twist.
struct TMonomial {
    std::vector<std::array<int, 3>> factors;  // (alpha, beta, d), sorted

    bool is_unit() const { return factors.empty(); }
    std::size_t degree() const { return factors.size(); }

    static TMonomial unit() { return {}; }

    static TMonomial single(int alpha, int beta, int descendent)
    {
        TMonomial m;
        m.factors.push_back({alpha, beta, descendent});
        return m;
    }

    friend bool operator==(const TMonomial&, const TMonomial&) = default;
    friend auto operator<=>(const TMonomial&, const TMonomial&) = default;
};

inline bool exceeds_fiber_counts(const TMonomial& m, const MarkingSet& ctx)
{
    std::size_t i = 0;
    while (i < m.factors.size()) {
        std::size_t j = i;
        while (j < m.factors.size() && m.factors[j][0] == m.factors[i][0] &&
               m.factors[j][1] == m.factors[i][1])
            ++j;
        if (static_cast<int>(j - i) > ctx.fiber_count(m.factors[i][0], m.factors[i][1]))
            return true;
        i = j;
    }
    return false;
}

// nullopt when the merged monomial lies in Ideal(I).
inline std::optional<TMonomial> mul(const TMonomial& x, const TMonomial& y,
                                    const MarkingSet& ctx)
{
    TMonomial out;
    out.factors.reserve(x.factors.size() + y.factors.size());
    std::merge(x.factors.begin(), x.factors.end(), y.factors.begin(), y.factors.end(),
               std::back_inserter(out.factors));
    if (exceeds_fiber_counts(out, ctx))
        return std::nullopt;
    return out;
}

inline std::string to_string(const TMonomial& m)
{
    if (m.is_unit())
        return "1";
    std::string out;
    std::size_t i = 0;
    while (i < m.factors.size()) {
        std::size_t j = i;
        while (j < m.factors.size() && m.factors[j] == m.factors[i])
            ++j;
        if (!out.empty())
            out += '*';
        out += "t[" + std::to_string(m.factors[i][0]) + "," +
               std::to_string(m.factors[i][1]) + "," + std::to_string(m.factors[i][2]) + "]";
        if (j - i > 1)
            out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

}  // namespace fjrw
