#pragma once

#include "fjrw/combinatorics.hpp"
#include "fjrw/markings.hpp"
#include "fjrw/monomials.hpp"
#include "fjrw/rational.hpp"

#include <map>
#include <stdexcept>

namespace fjrw {

namespace detail {

inline std::optional<UMonomial> mul_monomials(const UMonomial& x, const UMonomial& y,
                                              const MarkingSet&)
{
    return mul(x, y);
}

inline std::optional<TMonomial> mul_monomials(const TMonomial& x, const TMonomial& y,
                                              const MarkingSet& ctx)
{
    return mul(x, y, ctx);
}

}  // namespace detail

// Element of A_I (M = UMonomial) or A_{I,sym} (M = TMonomial): a sparse
// rational combination of canonical monomials over a fixed marking context.
// Values are immutable in spirit: all operations return fresh elements.
template <class M>
class Element {
public:
    Element() = default;
    explicit Element(MarkingSetPtr ctx) : ctx_(std::move(ctx)) {}

    Element(MarkingSetPtr ctx, const Rational& c) : ctx_(std::move(ctx))
    {
        if (c != 0)
            terms_[M::unit()] = c;
    }

    Element(MarkingSetPtr ctx, const M& m, const Rational& c) : ctx_(std::move(ctx))
    {
        if (c != 0)
            terms_[m] = c;
    }

    const MarkingSetPtr& context() const { return ctx_; }
    const std::map<M, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    Rational coefficient(const M& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // Constant term (coefficient of the unit monomial).
    Rational constant_part() const { return coefficient(M::unit()); }

    // The part lying in the maximal ideal (non-unit monomials).
    Element ideal_part() const
    {
        Element out(ctx_);
        for (const auto& [m, c] : terms_)
            if (!m.is_unit())
                out.terms_[m] = c;
        return out;
    }

    void add_term(const M& m, const Rational& c)
    {
        if (c == 0)
            return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    Element& operator+=(const Element& o)
    {
        require_same_ring(o);
        if (!ctx_)
            ctx_ = o.ctx_;
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }

    Element& operator-=(const Element& o)
    {
        require_same_ring(o);
        if (!ctx_)
            ctx_ = o.ctx_;
        for (const auto& [m, c] : o.terms_)
            add_term(m, -c);
        return *this;
    }

    Element& operator*=(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, v] : terms_)
            v *= c;
        return *this;
    }

    friend Element operator+(Element x, const Element& y) { return x += y; }
    friend Element operator-(Element x, const Element& y) { return x -= y; }
    friend Element operator*(Element x, const Rational& c) { return x *= c; }
    friend Element operator*(const Rational& c, Element x) { return x *= c; }

    friend Element operator*(const Element& x, const Element& y)
    {
        x.require_same_ring(y);
        const MarkingSetPtr ctx = x.ctx_ ? x.ctx_ : y.ctx_;
        Element out(ctx);
        if (!ctx)
            return out;
        for (const auto& [mx, cx] : x.terms_)
            for (const auto& [my, cy] : y.terms_)
                if (auto m = detail::mul_monomials(mx, my, *ctx))
                    out.add_term(*m, cx * cy);
        return out;
    }

    friend bool operator==(const Element& x, const Element& y)
    {
        return x.terms_ == y.terms_;
    }

private:
    void require_same_ring(const Element& o) const
    {
        if (ctx_ && o.ctx_ && !same_context(ctx_, o.ctx_))
            throw std::invalid_argument("ring tag mismatch");
    }

    MarkingSetPtr ctx_;
    std::map<M, Rational> terms_;
};

using UElement = Element<UMonomial>;
using TElement = Element<TMonomial>;

// u_{J,d} = prod_{j in J} u_{j, d_j}.
inline UMonomial u_monomial(const std::vector<int>& J, const DescendentVector& d)
{
    UMonomial m;
    for (int label : J) {
        auto it = d.find(label);
        m.factors.emplace_back(label, it == d.end() ? 0 : it->second);
    }
    std::sort(m.factors.begin(), m.factors.end());
    return m;
}

// Ring homomorphism psi_I : A_{I,sym} -> A_I,
// t_{alpha,beta,d} |-> sum_{i in I, tw(i) = (alpha,beta)} u_{i,d}.
// Its kernel is exactly Ideal(I).
inline UElement psi_I(const TElement& e)
{
    const MarkingSetPtr& ctx = e.context();
    if (!ctx)
        throw std::invalid_argument("psi_I requires a marking context");
    UElement out(ctx);
    for (const auto& [m, c] : e.terms()) {
        UElement prod(ctx, Rational(1));
        for (const auto& f : m.factors) {
            UElement gen(ctx);
            for (const Marking& mk : ctx->markings())
                if (mk.a == f[0] && mk.b == f[1])
                    gen.add_term(UMonomial::single(mk.label, f[2]), 1);
            prod = prod * gen;
            if (prod.is_zero())
                break;
        }
        out += prod * c;
    }
    return out;
}

}  // namespace fjrw
