#pragma once

#include "fjrw/bmodel.hpp"
#include "fjrw/chamber.hpp"
#include "fjrw/series.hpp"

#include <random>
#include <string>
#include <vector>

namespace fjrw {

// A derivation sum_i c_i x^{k1_i} y^{k2_i} ((k2_i+1) x d/dx - (k1_i+1) y d/dy)
// with nilpotent coefficients c_i. Fields of this shape preserve dx^dy.
template <class M>
struct Derivation {
    struct Summand {
        Element<M> coefficient;
        long long k1 = 0;
        long long k2 = 0;
    };
    std::vector<Summand> summands;

    BivariateSeries<M> apply(const BivariateSeries<M>& s) const
    {
        BivariateSeries<M> out(s.context(), BivariateSeries<M>::unbounded);
        for (const Summand& v : summands)
            for (const auto& [k, c] : s.terms()) {
                // (k2_i+1) k1 - (k1_i+1) k2 times the shifted monomial
                const Rational scale = Rational((v.k2 + 1) * k.first - (v.k1 + 1) * k.second);
                if (scale == 0)
                    continue;
                const Element<M> coeff = v.coefficient * c * scale;
                if (!coeff.is_zero())
                    out.add_term({k.first + v.k1, k.second + v.k2}, coeff);
            }
        return out;
    }
};

// exp(v)(x) and exp(v)(y) as exact polynomials: sum_n v^n(x)/n!, which
// terminates because the coefficients lie in the nilpotent maximal ideal.
template <class M>
std::pair<BivariateSeries<M>, BivariateSeries<M>> exp_images(
    const Derivation<M>& v, const MarkingSetPtr& ctx,
    long long bound = BivariateSeries<M>::unbounded)
{
    const int nilpotency = static_cast<int>(ctx->size()) + 1;
    auto flow = [&](BivariateSeries<M> start) {
        BivariateSeries<M> total = start;
        BivariateSeries<M> term = std::move(start);
        Rational n_factorial = 1;
        for (int n = 1; !term.is_zero(); ++n) {
            if (n > nilpotency)
                throw std::invalid_argument("derivation coefficients are not nilpotent");
            term = v.apply(term);
            n_factorial *= n;
            BivariateSeries<M> scaled = term;
            scaled *= Rational(1) / n_factorial;
            total += scaled;
        }
        return weighted_truncate(total, bound);
    };
    return {flow(BivariateSeries<M>::variable_x(ctx)),
            flow(BivariateSeries<M>::variable_y(ctx))};
}

// exp(v) acting on a series: the automorphism is determined by its images,
// so this is substitution x -> exp(v)(x), y -> exp(v)(y).
template <class M>
BivariateSeries<M> exp_apply(const Derivation<M>& v, const BivariateSeries<M>& series)
{
    auto [xi, yi] = exp_images(v, series.context(), series.weight_bound());
    return substitute(series, xi, yi);
}

// Wall-crossing group generator: the coefficient c at the critical graph
// Lambda_{(J,d),p}, i.e. the field
//   c * u_{J,d} * x^{k1} y^{k2} ((k2+1) x d/dx - (k1+1) y d/dy)
// with k1 = k1(Lambda)-1 = r(J)+(p-1)r, k2 = k2(Lambda)-1 = s(J)+(N-p)s.
struct GeneratorField {
    CellKey cell;
    int p = 1;
    Rational c = 0;
    long long k1 = 0;
    long long k2 = 0;
};

inline GeneratorField make_generator(const MarkingSet& ctx, const CellKey& cell, int p,
                                     const Rational& c)
{
    if (cell.J.empty())
        throw std::invalid_argument("generator requires a non-empty marking set J");
    const TwistProfile prof = twist_profile(ctx, cell.J, cell.descendents());
    if (p < 1 || p > prof.N)
        throw std::invalid_argument("critical graph index p out of range at " + to_string(cell));
    GeneratorField g;
    g.cell = cell;
    g.p = p;
    g.c = c;
    g.k1 = prof.rJ + static_cast<long long>(p - 1) * ctx.params().r;
    g.k2 = prof.sJ + (prof.N - p) * ctx.params().s;
    // Membership identities of the generator subalgebra; these hold by
    // construction and guard against profile bugs.
    const ModelParams& pr = ctx.params();
    if (pr.s * g.k1 + pr.r * g.k2 != prof.m - static_cast<long long>(pr.r) * pr.s ||
        g.k1 % pr.r != prof.rJ % pr.r || g.k2 % pr.s != prof.sJ % pr.s)
        throw std::logic_error("generator membership identities violated");
    return g;
}

// Ordered product exp(v_n) o ... o exp(v_1); factors[0] acts first.
// Composition of group elements is list concatenation.
struct GroupElement {
    std::vector<GeneratorField> factors;

    bool is_identity() const { return factors.empty(); }
};

inline GroupElement compose(const GroupElement& second, const GroupElement& first)
{
    GroupElement out = first;
    out.factors.insert(out.factors.end(), second.factors.begin(), second.factors.end());
    return out;
}

inline Derivation<UMonomial> to_derivation(const MarkingSetPtr& ctx, const GeneratorField& g)
{
    Derivation<UMonomial> v;
    v.summands.push_back(
        {UElement(ctx, u_monomial(g.cell.J, g.cell.descendents()), g.c), g.k1, g.k2});
    return v;
}

inline UPotential exp_apply(const MarkingSetPtr& ctx, const GroupElement& g,
                            UPotential series)
{
    for (const GeneratorField& f : g.factors)
        series = exp_apply(to_derivation(ctx, f), series);
    return series;
}

// Symmetric lift of a generator: the field with t-coefficient
// c * T_A / |Aut(A)|, where A is the multiset of (twist, descendent) pairs
// of the cell. Its image under the coefficientwise psi homomorphism is the
// sum of the u-fields over all relabelings of the cell, so the two actions
// intertwine: psi(exp(w)(V)) = exp(psi(w))(psi(V)).
inline Derivation<TMonomial> symmetric_lift(const MarkingSetPtr& ctx, const GeneratorField& g)
{
    TMonomial A;
    Rational aut = 1;
    for (std::size_t i = 0; i < g.cell.J.size(); ++i) {
        const Marking& m = ctx->marking(g.cell.J[i]);
        A.factors.push_back({m.a, m.b, g.cell.d[i]});
    }
    std::sort(A.factors.begin(), A.factors.end());
    for (std::size_t i = 0; i < A.factors.size();) {
        std::size_t j = i;
        while (j < A.factors.size() && A.factors[j] == A.factors[i])
            aut *= static_cast<long long>(++j - i);
        i = j;
    }
    Derivation<TMonomial> w;
    w.summands.push_back({TElement(ctx, A, g.c / aut), g.k1, g.k2});
    return w;
}

// psi applied to a derivation, coefficientwise.
inline Derivation<UMonomial> psi_I(const Derivation<TMonomial>& w)
{
    Derivation<UMonomial> v;
    for (const auto& summand : w.summands)
        v.summands.push_back({psi_I(summand.coefficient), summand.k1, summand.k2});
    return v;
}

// Closed-form images of a single exponential (test oracle): for a != b,
// x -> x (1+(b-a) g q)^{(b+1)/(b-a)} with q = x^a y^b, expanded as a
// binomial series with rational exponent, which terminates by nilpotency;
// for a = b, x -> x exp((a+1) g q).
template <class M>
std::pair<BivariateSeries<M>, BivariateSeries<M>> exp_closed_form_images(
    const MarkingSetPtr& ctx, const Element<M>& g, long long a, long long b)
{
    BivariateSeries<M> q(ctx);
    q.add_term({a, b}, g);

    auto binomial_series = [&](const Rational& exponent, const BivariateSeries<M>& z) {
        // (1+z)^e = sum_k C(e,k) z^k, finite since z is nilpotent.
        BivariateSeries<M> total(ctx);
        total.add_term({0, 0}, Element<M>(ctx, Rational(1)));
        BivariateSeries<M> zpow = z;
        Rational coeff = exponent;  // C(e,1)
        for (int k = 1; !zpow.is_zero(); ++k) {
            BivariateSeries<M> scaled = zpow;
            scaled *= coeff;
            total += scaled;
            zpow = zpow * z;
            coeff *= (exponent - k) / (k + 1);
        }
        return total;
    };
    auto exp_series = [&](const BivariateSeries<M>& z) {
        BivariateSeries<M> total(ctx);
        total.add_term({0, 0}, Element<M>(ctx, Rational(1)));
        BivariateSeries<M> zpow = z;
        Rational inv_fact = 1;
        for (int k = 1; !zpow.is_zero(); ++k) {
            BivariateSeries<M> scaled = zpow;
            scaled *= inv_fact;
            total += scaled;
            zpow = zpow * z;
            inv_fact /= (k + 1);
        }
        return total;
    };

    BivariateSeries<M> fx(ctx), fy(ctx);
    if (a != b) {
        BivariateSeries<M> z = q;
        z *= Rational(b - a);
        fx = binomial_series(Rational(b + 1) / Rational(b - a), z);
        fy = binomial_series(Rational(a + 1) / Rational(a - b), z);
    } else {
        BivariateSeries<M> zx = q, zy = q;
        zx *= Rational(a + 1);
        zy *= Rational(-(a + 1));
        fx = exp_series(zx);
        fy = exp_series(zy);
    }
    return {BivariateSeries<M>::variable_x(ctx) * fx, BivariateSeries<M>::variable_y(ctx) * fy};
}

// Reads a chamber index off a potential: nu at (J,d,p) is (-1)^{|J|-1} times
// the u_{J,d} x^{k1} y^{k2} coefficient. Every monomial of the potential must
// sit on a balanced key of the declared domain.
inline ChamberIndex chamber_from_potential(const ChamberIndex& domain, const UPotential& W)
{
    const MarkingSetPtr& ctx = domain.context();
    const ModelParams& params = ctx->params();
    ChamberIndex out(ctx, domain.dmax());
    std::map<std::pair<CellKey, std::pair<long long, long long>>, int> key_of;
    for (const CellKey& cell : domain.domain_cells()) {
        const TwistProfile prof = domain.profile(cell);
        if (prof.N < 0)
            continue;
        out.set_cell(cell, std::vector<Rational>(static_cast<std::size_t>(prof.N) + 1, 0));
        for (const BalancedKey& key : enumerate_balanced(params, prof))
            key_of[{cell, {key.k1, key.k2}}] = key.p;
    }
    auto values = out.values();
    for (const auto& [k, elem] : W.terms())
        for (const auto& [u, c] : elem.terms()) {
            CellKey cell;
            for (const auto& [label, d] : u.factors) {
                cell.J.push_back(label);
                cell.d.push_back(d);
            }
            auto it = key_of.find({cell, k});
            if (it == key_of.end())
                throw std::logic_error("stray potential monomial off the balanced domain at " +
                                       to_string(cell) + ", x^" + std::to_string(k.first) +
                                       " y^" + std::to_string(k.second));
            values[cell][static_cast<std::size_t>(it->second)] =
                sign_pow(static_cast<long long>(cell.J.size()) - 1) * c;
        }
    for (auto& [cell, vals] : values)
        out.set_cell(cell, vals);
    return out;
}

inline ChamberIndex act_on_chamber(const GroupElement& g, const ChamberIndex& nu)
{
    const MarkingSetPtr& ctx = nu.context();
    for (const GeneratorField& f : g.factors) {
        if (!nu.in_domain(f.cell))
            throw std::invalid_argument("group element factor outside the chamber domain at " +
                                        to_string(f.cell));
    }
    return chamber_from_potential(nu, exp_apply(ctx, g, build_potential(nu)));
}

// Transitivity solver: finds g with act_on_chamber(g, nu) = nu2.
//
// Cells are swept by ascending |J| (a corrector at (J,d) only perturbs (J,d)
// itself and cells with strictly more markings), and inside a cell by
// ascending p, emitting the corrector exp(v) with coefficient
// (-1)^{|J|} (nu2 - cur)_p / (s (r(J)+pr+1)) at the critical graph
// Lambda_{J,p+1}. After the sweep the p = N value must agree on its own:
// both sides are chamber indices with equal amplitudes, all finer cells
// already match, and the remaining single linear condition has the positive
// pivot RF((1+s(J))/s, N).
inline GroupElement connect(const ChamberIndex& nu, const ChamberIndex& nu2)
{
    if (!same_context(nu.context(), nu2.context()) || nu.dmax() != nu2.dmax())
        throw std::invalid_argument("connect requires chamber indices on the same domain");
    if (!check_axioms(nu).pass() || !check_axioms(nu2).pass())
        throw std::invalid_argument("connect requires valid chamber indices");

    const MarkingSet& ctx = *nu.context();
    const long long s = ctx.params().s;
    const long long r = ctx.params().r;

    GroupElement g;
    ChamberIndex cur = nu;
    std::vector<CellKey> cells = nu.domain_cells();
    std::stable_sort(cells.begin(), cells.end(), [](const CellKey& x, const CellKey& y) {
        return x.J.size() < y.J.size();
    });
    for (const CellKey& cell : cells) {
        if (cell.J.empty())
            continue;
        const TwistProfile prof = nu.profile(cell);
        if (prof.N < 0)
            continue;
        for (int p = 0; p < prof.N; ++p) {
            const Rational delta = nu2.value(cell, p) - cur.value(cell, p);
            if (delta == 0)
                continue;
            const Rational coeff = sign_pow(static_cast<long long>(cell.J.size())) * delta /
                                   Rational(s * (prof.rJ + p * r + 1));
            const GeneratorField corrector = make_generator(ctx, cell, p + 1, coeff);
            cur = act_on_chamber(GroupElement{{corrector}}, cur);
            g.factors.push_back(corrector);
        }
        for (int p = 0; p <= prof.N; ++p)
            if (cur.value(cell, p) != nu2.value(cell, p))
                throw std::logic_error("torsor violation: uncorrectable difference at " +
                                       to_string(cell) + ", p=" + std::to_string(p));
    }
    return g;
}

// All critical keys of the declared domain, in deterministic order.
inline std::vector<std::pair<CellKey, int>> domain_critical_keys(const ChamberIndex& domain)
{
    std::vector<std::pair<CellKey, int>> keys;
    for (const CellKey& cell : domain.domain_cells()) {
        if (cell.J.empty())
            continue;
        const TwistProfile prof = domain.profile(cell);
        for (long long p = 1; p <= prof.N; ++p)
            keys.emplace_back(cell, static_cast<int>(p));
    }
    return keys;
}

// Random element with up to max_factors generator exponentials, coefficients
// drawn from the given pool. A pool of positive coefficients guarantees a
// non-identity element: the lowest u-degree part of log(g) is a positive
// combination of basis fields, which cannot vanish.
template <class Rng>
GroupElement random_group_element(const ChamberIndex& domain, Rng& rng, int max_factors,
                                  const std::vector<Rational>& pool = {
                                      Rational(1), Rational(-1), Rational(1, 2),
                                      Rational(-1, 2), Rational(2), Rational(-2)})
{
    const auto keys = domain_critical_keys(domain);
    GroupElement g;
    if (keys.empty() || max_factors < 1)
        return g;
    std::uniform_int_distribution<std::size_t> pick_key(0, keys.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_coeff(0, pool.size() - 1);
    std::uniform_int_distribution<int> pick_count(1, max_factors);
    const int count = pick_count(rng);
    for (int i = 0; i < count; ++i) {
        const auto& [cell, p] = keys[pick_key(rng)];
        g.factors.push_back(
            make_generator(*domain.context(), cell, p, pool[pick_coeff(rng)]));
    }
    return g;
}

struct PreservationReport {
    bool jacobian_ok = false;
    bool ideal_ok = false;
    bool weight_ok = false;
    bool congruence_ok = false;
    std::string detail;

    bool pass() const { return jacobian_ok && ideal_ok && weight_ok && congruence_ok; }
};

template <class M>
BivariateSeries<M> jacobian_determinant(const BivariateSeries<M>& X,
                                        const BivariateSeries<M>& Y)
{
    return partial_x(X) * partial_y(Y) - partial_y(X) * partial_x(Y);
}

// Verifies the defining requirements of the wall-crossing group on an
// element: unit Jacobian (volume form), preservation of the (xy) ideal,
// the Euler weight identity s k1 + r k2 = m(J,d) - rs on every factor, and
// the root-of-unity congruences k1 = r(J) (mod r), k2 = s(J) (mod s).
// The images are exact polynomials; weight_bound only caps the computation
// (default: none).
inline PreservationReport preservation_check(
    const MarkingSetPtr& ctx, const GroupElement& g,
    long long weight_bound = UPotential::unbounded)
{
    const ModelParams& params = ctx->params();
    PreservationReport report;

    UPotential X = UPotential::variable_x(ctx, weight_bound);
    UPotential Y = UPotential::variable_y(ctx, weight_bound);
    for (const GeneratorField& f : g.factors) {
        auto [xi, yi] = exp_images(to_derivation(ctx, f), ctx, weight_bound);
        X = substitute(X, xi, yi);
        Y = substitute(Y, xi, yi);
    }

    UPotential det = jacobian_determinant(X, Y);
    UPotential one(ctx, UPotential::unbounded);
    one.add_term({0, 0}, UElement(ctx, Rational(1)));
    report.jacobian_ok = (det == one);
    if (!report.jacobian_ok)
        report.detail += "jacobian determinant differs from 1; ";

    report.ideal_ok = true;
    for (const auto& [k, c] : X.terms())
        if (k.first < 1)
            report.ideal_ok = false;
    for (const auto& [k, c] : Y.terms())
        if (k.second < 1)
            report.ideal_ok = false;
    if (!report.ideal_ok)
        report.detail += "(xy) ideal not preserved; ";

    report.weight_ok = true;
    report.congruence_ok = true;
    for (const GeneratorField& f : g.factors) {
        const TwistProfile prof = twist_profile(*ctx, f.cell.J, f.cell.descendents());
        if (params.s * f.k1 + params.r * f.k2 !=
            prof.m - static_cast<long long>(params.r) * params.s)
            report.weight_ok = false;
        if (f.k1 % params.r != prof.rJ % params.r || f.k2 % params.s != prof.sJ % params.s)
            report.congruence_ok = false;
    }
    if (!report.weight_ok)
        report.detail += "Euler weight identity fails on a factor; ";
    if (!report.congruence_ok)
        report.detail += "twist congruence fails on a factor; ";
    return report;
}

}  // namespace fjrw
