#pragma once

#include "fjrw/markings.hpp"
#include "fjrw/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <tuple>
#include <vector>

namespace fjrw {

// Rising factorial Gamma(c+n)/Gamma(c) = prod_{q=0}^{n-1} (c+q), exact.
inline Rational gamma_ratio(const Rational& c, int n)
{
    if (c <= 0)
        throw std::invalid_argument("gamma_ratio requires c > 0");
    if (n < 0)
        throw std::invalid_argument("gamma_ratio requires n >= 0");
    Rational out = 1;
    for (int q = 0; q < n; ++q)
        out *= c + q;
    return out;
}

// Numeric profile of a marking subset J with descendents d:
//   sum a_i = rJ + ell1*r,  sum b_i = sJ + ell2*s,
//   m = rs + sum_i (s*a_i + r*b_i + rs*(d_i - 1)),
//   dJ = (s*rJ + r*sJ - m)/(rs) - 1,
//   N  = ell1 + ell2 - |J| + 1 + sum d_i  (so m = s*rJ + r*sJ + rs*N).
struct TwistProfile {
    int rJ = 0;
    int sJ = 0;
    long long ell1 = 0;
    long long ell2 = 0;
    long long m = 0;
    long long dJ = 0;
    long long N = 0;

    friend bool operator==(const TwistProfile&, const TwistProfile&) = default;
};

inline TwistProfile twist_profile(const ModelParams& params,
                                  const std::vector<Marking>& markings,
                                  const DescendentVector& d)
{
    const long long r = params.r, s = params.s;
    long long sum_a = 0, sum_b = 0, sum_d = 0;
    for (const Marking& mk : markings) {
        sum_a += mk.a;
        sum_b += mk.b;
        auto it = d.find(mk.label);
        sum_d += (it == d.end()) ? 0 : it->second;
    }
    TwistProfile p;
    p.rJ = static_cast<int>(sum_a % r);
    p.sJ = static_cast<int>(sum_b % s);
    p.ell1 = (sum_a - p.rJ) / r;
    p.ell2 = (sum_b - p.sJ) / s;
    p.m = r * s;
    for (const Marking& mk : markings) {
        auto it = d.find(mk.label);
        const long long di = (it == d.end()) ? 0 : it->second;
        p.m += s * mk.a + r * mk.b + r * s * (di - 1);
    }
    p.N = p.ell1 + p.ell2 - static_cast<long long>(markings.size()) + 1 + sum_d;
    p.dJ = -p.N - 1;  // equivalent to (s*rJ + r*sJ - m)/rs - 1
    return p;
}

// Convenience: profile of the subset J of a marking set.
inline TwistProfile twist_profile(const MarkingSet& ctx,
                                  const std::vector<int>& J,
                                  const DescendentVector& d)
{
    std::vector<Marking> ms;
    ms.reserve(J.size());
    for (int label : J)
        ms.push_back(ctx.marking(label));
    return twist_profile(ctx.params(), ms, d);
}

// The p-th balanced graph Gamma_{J,p} has k1 = rJ + p*r, k2 = sJ + (N-p)*s.
struct BalancedKey {
    int p = 0;
    long long k1 = 0;
    long long k2 = 0;

    friend bool operator==(const BalancedKey&, const BalancedKey&) = default;
};

// The p-th critical graph Lambda_{J,p} has k1 = rJ + (p-1)*r + 1,
// k2 = sJ + (N-p)*s + 1, for p = 1..N.
struct CriticalKey {
    int p = 1;
    long long k1 = 0;
    long long k2 = 0;

    friend bool operator==(const CriticalKey&, const CriticalKey&) = default;
};

// Empty when N < 0 (Balanced(J,d) = emptyset).
inline std::vector<BalancedKey> enumerate_balanced(const ModelParams& params,
                                                   const TwistProfile& prof)
{
    std::vector<BalancedKey> keys;
    for (long long p = 0; p <= prof.N; ++p)
        keys.push_back({static_cast<int>(p), prof.rJ + p * params.r,
                        prof.sJ + (prof.N - p) * params.s});
    return keys;
}

inline std::vector<CriticalKey> enumerate_critical(const ModelParams& params,
                                                   const TwistProfile& prof)
{
    std::vector<CriticalKey> keys;
    for (long long p = 1; p <= prof.N; ++p)
        keys.push_back({static_cast<int>(p), prof.rJ + (p - 1) * params.r + 1,
                        prof.sJ + (prof.N - p) * params.s + 1});
    return keys;
}

// Real ranks of the two Witten bundle components on the open moduli:
//   e1 = (2*sum a + (k1+k12-1)(r-2))/r,  e2 analogous.
// Non-integrality signals an empty moduli configuration, not an error.
inline std::optional<std::pair<long long, long long>> open_witten_ranks(
    const ModelParams& params, long long k1, long long k2, long long k12,
    const std::vector<Marking>& markings)
{
    if (k1 < 0 || k2 < 0 || k12 < 0)
        throw std::invalid_argument("open_witten_ranks requires k1,k2,k12 >= 0");
    long long sum_a = 0, sum_b = 0;
    for (const Marking& m : markings) {
        sum_a += m.a;
        sum_b += m.b;
    }
    const long long n1 = 2 * sum_a + (k1 + k12 - 1) * (params.r - 2);
    const long long n2 = 2 * sum_b + (k2 + k12 - 1) * (params.s - 2);
    if (n1 % params.r != 0 || n2 % params.s != 0)
        return std::nullopt;
    return std::make_pair(n1 / params.r, n2 / params.s);
}

// One insertion of a closed extended invariant: twist in [-1, r-1] x [-1, s-1].
struct ClosedInsertion {
    int a = 0;
    int b = 0;
    int d = 0;

    friend bool operator==(const ClosedInsertion&, const ClosedInsertion&) = default;
};

struct SelectionOutcome {
    enum class Kind {
        TooFewPoints,      // n < 3: no stable genus-0 configuration; invariant 0
        DoubleNegative,    // two twists -1 in one coordinate: rejected input
        NonIntegralRank,   // e1 or e2 not an integer: invariant 0
        DimensionMismatch, // rank != dimension: invariant 0
        RamondVanishing,   // non-extended coordinate carrying an r-1 twist: 0
        Ok,
    };
    Kind kind = Kind::Ok;
    long long e1 = 0;
    long long e2 = 0;
};

// Selection rules for <prod tau_{d_i}^{(a_i,b_i)}>^ext.
inline SelectionOutcome closed_selection(const ModelParams& params,
                                         const std::vector<ClosedInsertion>& ins)
{
    using Kind = SelectionOutcome::Kind;
    int neg_a = 0, neg_b = 0;
    bool ramond_a = false, ramond_b = false;
    long long sum_a = 0, sum_b = 0, sum_d = 0;
    for (const ClosedInsertion& t : ins) {
        if (t.a < -1 || t.a > params.r - 1 || t.b < -1 || t.b > params.s - 1)
            throw std::invalid_argument("closed insertion twist out of range");
        if (t.d < 0)
            throw std::invalid_argument("closed insertion descendent must be >= 0");
        neg_a += (t.a == -1);
        neg_b += (t.b == -1);
        ramond_a = ramond_a || (t.a == params.r - 1);
        ramond_b = ramond_b || (t.b == params.s - 1);
        sum_a += t.a;
        sum_b += t.b;
        sum_d += t.d;
    }
    if (neg_a > 1 || neg_b > 1)
        return {Kind::DoubleNegative, 0, 0};
    if (ins.size() < 3)
        return {Kind::TooFewPoints, 0, 0};
    const long long n1 = sum_a - (params.r - 2);
    const long long n2 = sum_b - (params.s - 2);
    auto mod_ok = [](long long v, int q) { return ((v % q) + q) % q == 0; };
    if (!mod_ok(n1, params.r) || !mod_ok(n2, params.s))
        return {Kind::NonIntegralRank, 0, 0};
    const long long e1 = n1 / params.r;
    const long long e2 = n2 / params.s;
    if (e1 + e2 + sum_d != static_cast<long long>(ins.size()) - 3)
        return {Kind::DimensionMismatch, e1, e2};
    if ((neg_a == 0 && ramond_a) || (neg_b == 0 && ramond_b))
        return {Kind::RamondVanishing, e1, e2};
    return {Kind::Ok, e1, e2};
}

// Visits every ordered partition of J into h non-empty blocks exactly once.
// The visitor receives the blocks as index sets into J (each sorted).
inline void for_each_ordered_partition(
    const std::vector<int>& J, int h,
    const std::function<void(const std::vector<std::vector<int>>&)>& visit)
{
    const int n = static_cast<int>(J.size());
    if (h < 1 || h > n)
        return;
    std::vector<int> block_of(n, 0);
    std::vector<std::vector<int>> blocks(h);
    // Assign elements left to right; prune when the remaining elements cannot
    // fill the still-empty blocks.
    std::function<void(int, int)> rec = [&](int idx, int empty) {
        if (n - idx < empty)
            return;
        if (idx == n) {
            if (empty == 0)
                visit(blocks);
            return;
        }
        for (int b = 0; b < h; ++b) {
            const bool was_empty = blocks[b].empty();
            blocks[b].push_back(J[idx]);
            rec(idx + 1, empty - (was_empty ? 1 : 0));
            blocks[b].pop_back();
        }
    };
    rec(0, h);
}

}  // namespace fjrw
