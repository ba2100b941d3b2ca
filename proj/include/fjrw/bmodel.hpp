#pragma once

#include "fjrw/chamber.hpp"
#include "fjrw/coefficient.hpp"
#include "fjrw/series.hpp"

#include <map>
#include <utility>

namespace fjrw {

// Residue label (a,b) of a good-basis cycle Xi_{(a,b)}. Genuine cycles have
// 0 <= a <= r-2, 0 <= b <= s-2; the labels a = r-1 / b = s-1 are formal
// reduction classes (no actual cycle pairs nontrivially with x^{r-1}-type
// monomials, but the same reduction algebra extracts the Ramond-sector
// amplitude data). The cycles themselves are never materialized; the
// normalization plus integration by parts determine every integral.
struct CycleLabel {
    int a = 0;
    int b = 0;

    friend bool operator==(const CycleLabel&, const CycleLabel&) = default;
    friend auto operator<=>(const CycleLabel&, const CycleLabel&) = default;
};

inline void validate_cycle(const ModelParams& params, const CycleLabel& c)
{
    if (c.a < 0 || c.a > params.r - 1 || c.b < 0 || c.b > params.s - 1)
        throw std::invalid_argument("cycle label out of range");
}

inline bool is_genuine_cycle(const ModelParams& params, const CycleLabel& c)
{
    return c.a <= params.r - 2 && c.b <= params.s - 2;
}

// Largest cell weight of the declared domain; every balanced key of the
// domain has weight equal to its cell's m(J,d), so this bound closes the
// domain under the wall-crossing action.
inline long long potential_weight_bound(const ChamberIndex& nu)
{
    const MarkingSet& ctx = *nu.context();
    long long bound = static_cast<long long>(ctx.params().r) * ctx.params().s;
    for (const CellKey& cell : nu.domain_cells()) {
        const TwistProfile prof = nu.profile(cell);
        if (prof.N >= 0)
            bound = std::max(bound, prof.m);
    }
    return bound;
}

// W^nu = sum over balanced keys of (-1)^{|J|-1} nu * x^{k1} y^{k2} u_{J,d}.
// The J = emptyset keys contribute x^r + y^s.
inline UPotential build_potential(const ChamberIndex& nu)
{
    const MarkingSetPtr& ctx = nu.context();
    const ModelParams& params = ctx->params();
    UPotential W(ctx, potential_weight_bound(nu));
    for (const auto& [cell, vals] : nu.values()) {
        const TwistProfile prof = nu.profile(cell);
        const UMonomial u = u_monomial(cell.J, cell.descendents());
        const Rational sign = sign_pow(static_cast<long long>(cell.J.size()) - 1);
        for (const BalancedKey& key : enumerate_balanced(params, prof)) {
            const Rational c = sign * vals[static_cast<std::size_t>(key.p)];
            if (c != 0)
                W.add_term({key.k1, key.k2}, UElement(ctx, u, c));
        }
    }
    return W;
}

// True when nu is invariant under every twist-preserving relabeling of I;
// cells lie in one orbit exactly when their {(twist_j, d_j)} multisets agree.
inline bool is_symmetric(const ChamberIndex& nu)
{
    const MarkingSet& ctx = *nu.context();
    std::map<std::vector<std::array<int, 3>>, std::vector<Rational>> seen;
    for (const auto& [cell, vals] : nu.values()) {
        std::vector<std::array<int, 3>> key;
        key.reserve(cell.J.size());
        for (std::size_t i = 0; i < cell.J.size(); ++i) {
            const Marking& m = ctx.marking(cell.J[i]);
            key.push_back({m.a, m.b, cell.d[i]});
        }
        std::sort(key.begin(), key.end());
        auto [it, inserted] = seen.emplace(std::move(key), vals);
        if (!inserted && it->second != vals)
            return false;
    }
    return true;
}

namespace detail {

// Multisets A = {(alpha_i, beta_i, d_i)} realizable inside I with d <= dmax,
// together with a representative (J, d) using the smallest labels of each
// twist class. Includes the empty multiset.
struct SymMultiset {
    TMonomial monomial;       // canonical sorted factors = the multiset
    Rational aut_order = 1;   // |Aut(A)|
    CellKey representative;
};

inline std::vector<SymMultiset> enumerate_sym_multisets(const MarkingSet& ctx, int dmax)
{
    // Group labels by twist.
    std::map<std::pair<int, int>, std::vector<int>> classes;
    for (const Marking& m : ctx.markings())
        classes[{m.a, m.b}].push_back(m.label);

    std::vector<SymMultiset> out;
    SymMultiset current;
    std::function<void(std::map<std::pair<int, int>, std::vector<int>>::const_iterator)> rec =
        [&](auto it) {
            if (it == classes.end()) {
                SymMultiset item = current;
                std::sort(item.monomial.factors.begin(), item.monomial.factors.end());
                std::sort(item.representative.J.begin(), item.representative.J.end());
                // d entries follow sorted labels; within one twist class the
                // descendents were assigned in nondecreasing order already.
                out.push_back(std::move(item));
                return;
            }
            const auto& [twist, labels] = *it;
            auto next = std::next(it);
            // Choose a multiset of descendents (nondecreasing) of size
            // 0..|labels| for this class.
            std::vector<int> ds;
            std::function<void(int, int)> pick = [&](int count, int min_d) {
                // emit current choice
                {
                    const std::size_t base_m = current.monomial.factors.size();
                    const std::size_t base_J = current.representative.J.size();
                    Rational aut = current.aut_order;
                    for (std::size_t i = 0; i < ds.size(); ++i) {
                        current.monomial.factors.push_back({twist.first, twist.second, ds[i]});
                        current.representative.J.push_back(labels[i]);
                        current.representative.d.push_back(ds[i]);
                    }
                    // |Aut| gains count! per run of equal descendents.
                    std::size_t i = 0;
                    while (i < ds.size()) {
                        std::size_t j = i;
                        Rational run = 1;
                        while (j < ds.size() && ds[j] == ds[i])
                            run *= static_cast<long long>(++j - i);
                        current.aut_order *= run;
                        i = j;
                    }
                    rec(next);
                    current.monomial.factors.resize(base_m);
                    current.representative.J.resize(base_J);
                    current.representative.d.resize(base_J);
                    current.aut_order = aut;
                }
                if (count < static_cast<int>(labels.size()))
                    for (int d = min_d; d <= dmax; ++d) {
                        ds.push_back(d);
                        pick(count + 1, d);
                        ds.pop_back();
                    }
            };
            pick(0, 0);
        };
    rec(classes.begin());
    return out;
}

}  // namespace detail

// Symmetric potential over A_{I,sym}: for each realizable multiset A and
// balanced key, (-1)^{l-1} nu / |Aut(A)| * prod t * x^{k1} y^{k2}.
// Satisfies psi_I(W^{nu,sym}) = W^{nu}.
inline TPotential build_potential_sym(const ChamberIndex& nu)
{
    if (!is_symmetric(nu))
        throw std::invalid_argument("chamber index is not symmetric");
    const MarkingSetPtr& ctx = nu.context();
    const ModelParams& params = ctx->params();
    TPotential W(ctx, potential_weight_bound(nu));
    for (const detail::SymMultiset& A : detail::enumerate_sym_multisets(*ctx, nu.dmax())) {
        const CellKey& cell = A.representative;
        const TwistProfile prof = nu.profile(cell);
        if (prof.N < 0)
            continue;
        const Rational sign = sign_pow(static_cast<long long>(cell.J.size()) - 1);
        for (const BalancedKey& key : enumerate_balanced(params, prof)) {
            const Rational c = sign * nu.value(cell, key.p) / A.aut_order;
            if (c != 0)
                W.add_term({key.k1, key.k2}, TElement(ctx, A.monomial, c));
        }
    }
    return W;
}

// One integration-by-parts reduction of int x^{m1} y^{m2} e^{(x^r+y^s)/hbar}
// against the good-basis cycle (a,b): zero unless m1 = a (mod r) and
// m2 = b (mod s); otherwise with n1 = (m1-a)/r, n2 = (m2-b)/s the value is
// (-1)^{n1+n2} hbar^{n1+n2} RF((a+1)/r, n1) RF((b+1)/s, n2).
inline std::optional<std::pair<long long, Rational>> reduce_monomial(
    const ModelParams& params, long long m1, long long m2, const CycleLabel& cycle)
{
    validate_cycle(params, cycle);
    if (m1 < 0 || m2 < 0)
        throw std::invalid_argument("reduce_monomial requires m1,m2 >= 0");
    if ((m1 - cycle.a) % params.r != 0 || (m2 - cycle.b) % params.s != 0)
        return std::nullopt;
    const long long n1 = (m1 - cycle.a) / params.r;
    const long long n2 = (m2 - cycle.b) / params.s;
    const Rational factor = sign_pow(n1 + n2) *
                            gamma_ratio(Rational(cycle.a + 1, params.r), static_cast<int>(n1)) *
                            gamma_ratio(Rational(cycle.b + 1, params.s), static_cast<int>(n2));
    return std::make_pair(n1 + n2, factor);
}

// int_{Xi_{(a,b)}} e^{W/hbar} Omega as an exact hbar-Laurent polynomial:
// expand sum_h (W - x^r - y^s)^h / (h! hbar^h) and reduce every monomial.
// The exponential truncates at h = |I| since W - x^r - y^s has nilpotent
// coefficients with m^{|I|+1} = 0.
template <class M>
LaurentSeries<M> period_integral(const BivariateSeries<M>& W, const CycleLabel& cycle)
{
    const MarkingSetPtr& ctx = W.context();
    const ModelParams& params = ctx->params();
    validate_cycle(params, cycle);

    // Precondition: W = x^r + y^s modulo the maximal ideal.
    for (const auto& [k, c] : W.terms()) {
        const Rational head = c.constant_part();
        const bool is_xr = (k == SeriesKey<M>{params.r, 0});
        const bool is_ys = (k == SeriesKey<M>{0, params.s});
        if ((is_xr || is_ys) ? head != 1 : head != 0)
            throw std::invalid_argument("potential is not x^r + y^s modulo the maximal ideal");
    }
    if (W.coefficient({params.r, 0}).constant_part() != 1 ||
        W.coefficient({0, params.s}).constant_part() != 1)
        throw std::invalid_argument("potential is not x^r + y^s modulo the maximal ideal");

    BivariateSeries<M> P = W;
    P.add_term({params.r, 0}, Element<M>(ctx, Rational(-1)));
    P.add_term({0, params.s}, Element<M>(ctx, Rational(-1)));

    LaurentSeries<M> out(ctx);
    const int H = static_cast<int>(ctx->size());
    BivariateSeries<M> power(ctx);
    power.add_term({0, 0}, Element<M>(ctx, Rational(1)));
    Rational h_factorial = 1;
    for (int h = 0; h <= H; ++h) {
        if (h > 0) {
            power = power * P;  // untruncated; weights legitimately exceed any cell bound
            h_factorial *= h;
            if (power.is_zero())
                break;
        }
        for (const auto& [k, c] : power.terms())
            if (auto red = reduce_monomial(params, k.first, k.second, cycle))
                out.add_term(red->first - h, c * (red->second / h_factorial));
    }
    return out;
}

// All good-basis integrals of a potential (genuine cycles only).
template <class M>
std::map<CycleLabel, LaurentSeries<M>> period_table(const BivariateSeries<M>& W)
{
    const ModelParams& params = W.context()->params();
    std::map<CycleLabel, LaurentSeries<M>> out;
    for (int a = 0; a <= params.r - 2; ++a)
        for (int b = 0; b <= params.s - 2; ++b)
            out.emplace(CycleLabel{a, b}, period_integral(W, CycleLabel{a, b}));
    return out;
}

// Integrals over every residue class including the formal Ramond labels;
// this is the table amplitude extraction needs to see every cell.
template <class M>
std::map<CycleLabel, LaurentSeries<M>> period_table_extended(const BivariateSeries<M>& W)
{
    const ModelParams& params = W.context()->params();
    std::map<CycleLabel, LaurentSeries<M>> out;
    for (int a = 0; a <= params.r - 1; ++a)
        for (int b = 0; b <= params.s - 1; ++b)
            out.emplace(CycleLabel{a, b}, period_integral(W, CycleLabel{a, b}));
    return out;
}

// Inverts the period-integral coefficient relation: the u_{J,d} coefficient
// at cycle (r(J), s(J)) is (-1)^{|J|} (-hbar)^{-d(J,d)-2} A(J,d,nu), and it
// must vanish at every other cycle and exponent. Expects the extended table
// so that cells in the Ramond residue classes are visible.
inline std::map<CellKey, Rational> extract_amplitudes(
    const ChamberIndex& domain, const std::map<CycleLabel, UHbarSeries>& table)
{
    std::map<CellKey, Rational> out;
    for (const CellKey& cell : domain.domain_cells()) {
        if (cell.J.empty())
            continue;
        const TwistProfile prof = domain.profile(cell);
        if (!table.count(CycleLabel{prof.rJ, prof.sJ}))
            throw std::invalid_argument("integral table lacks the cycle of " + to_string(cell) +
                                        "; use the extended table");
        const UMonomial u = u_monomial(cell.J, cell.descendents());
        const long long expected_exp = -prof.dJ - 2;
        Rational value = 0;
        for (const auto& [cycle, series] : table) {
            for (const auto& [exponent, coeff] : series.terms()) {
                const Rational c = coeff.coefficient(u);
                if (c == 0)
                    continue;
                if (cycle != CycleLabel{prof.rJ, prof.sJ} || exponent != expected_exp)
                    throw std::logic_error("period integral has a nonconforming u_{J,d} "
                                           "coefficient at " + to_string(cell));
                value = c;
            }
        }
        out[cell] = sign_pow(static_cast<long long>(cell.J.size()) + prof.dJ) * value;
    }
    return out;
}

// psi_I applied coefficientwise to series.
inline UPotential psi_I(const TPotential& W)
{
    UPotential out(W.context(), W.weight_bound());
    for (const auto& [k, c] : W.terms())
        out.add_term(k, psi_I(c));
    return out;
}

inline UHbarSeries psi_I(const THbarSeries& s)
{
    UHbarSeries out(s.context());
    for (const auto& [e, c] : s.terms())
        out.add_term(e, psi_I(c));
    return out;
}

}  // namespace fjrw
