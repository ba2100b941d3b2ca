#pragma once

#include "fjrw/coefficient.hpp"

#include <limits>
#include <map>
#include <utility>

namespace fjrw {

// Bivariate polynomial/truncated series over a coefficient ring, graded by
// the weight s*k1 + r*k2 of x^{k1} y^{k2}. The weight bound is metadata:
// stored terms always satisfy weight <= weight_bound; substitution truncates
// to the bound, plain arithmetic widens it.
template <class M>
class BivariateSeries {
public:
    using Key = std::pair<long long, long long>;  // (k1, k2)
    static constexpr long long unbounded = std::numeric_limits<long long>::max() / 4;

    BivariateSeries() = default;
    explicit BivariateSeries(MarkingSetPtr ctx, long long weight_bound = unbounded)
        : ctx_(std::move(ctx)), bound_(weight_bound)
    {
    }

    const MarkingSetPtr& context() const { return ctx_; }
    long long weight_bound() const { return bound_; }
    const std::map<Key, Element<M>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    long long weight(const Key& k) const
    {
        const ModelParams& p = ctx_->params();
        return p.s * k.first + p.r * k.second;
    }

    void add_term(const Key& k, const Element<M>& c)
    {
        if (c.is_zero() || weight(k) > bound_)
            return;
        auto [it, inserted] = terms_.emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    Element<M> coefficient(const Key& k) const
    {
        auto it = terms_.find(k);
        return it == terms_.end() ? Element<M>(ctx_) : it->second;
    }

    static BivariateSeries variable_x(MarkingSetPtr ctx, long long bound = unbounded)
    {
        BivariateSeries s(ctx, bound);
        s.add_term({1, 0}, Element<M>(s.ctx_, Rational(1)));
        return s;
    }

    static BivariateSeries variable_y(MarkingSetPtr ctx, long long bound = unbounded)
    {
        BivariateSeries s(ctx, bound);
        s.add_term({0, 1}, Element<M>(s.ctx_, Rational(1)));
        return s;
    }

    BivariateSeries& operator+=(const BivariateSeries& o)
    {
        require_compatible(o);
        bound_ = std::max(bound_, o.bound_);
        for (const auto& [k, c] : o.terms_)
            add_term(k, c);
        return *this;
    }

    BivariateSeries& operator-=(const BivariateSeries& o)
    {
        require_compatible(o);
        bound_ = std::max(bound_, o.bound_);
        for (const auto& [k, c] : o.terms_)
            add_term(k, c * Rational(-1));
        return *this;
    }

    BivariateSeries& operator*=(const Rational& c)
    {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_)
            v *= c;
        return *this;
    }

    friend BivariateSeries operator+(BivariateSeries x, const BivariateSeries& y) { return x += y; }
    friend BivariateSeries operator-(BivariateSeries x, const BivariateSeries& y) { return x -= y; }
    friend BivariateSeries operator*(BivariateSeries x, const Rational& c) { return x *= c; }
    friend BivariateSeries operator*(const Rational& c, BivariateSeries x) { return x *= c; }

    // Plain polynomial product; the bound widens so nothing is dropped.
    friend BivariateSeries operator*(const BivariateSeries& x, const BivariateSeries& y)
    {
        x.require_compatible(y);
        BivariateSeries out(x.ctx_ ? x.ctx_ : y.ctx_,
                            (x.bound_ >= unbounded || y.bound_ >= unbounded)
                                ? unbounded
                                : x.bound_ + y.bound_);
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_) {
                const Element<M> c = cx * cy;
                if (!c.is_zero())
                    out.add_term({kx.first + ky.first, kx.second + ky.second}, c);
            }
        return out;
    }

    // Product truncated to weight <= bound; weights add, so truncating
    // intermediates never loses a term below the bound.
    static BivariateSeries mul_truncated(const BivariateSeries& x, const BivariateSeries& y,
                                         long long bound)
    {
        x.require_compatible(y);
        BivariateSeries out(x.ctx_ ? x.ctx_ : y.ctx_, bound);
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_) {
                const Key k{kx.first + ky.first, kx.second + ky.second};
                if (out.weight(k) > bound)
                    continue;
                const Element<M> c = cx * cy;
                if (!c.is_zero())
                    out.add_term(k, c);
            }
        return out;
    }

    friend bool operator==(const BivariateSeries& x, const BivariateSeries& y)
    {
        return x.terms_ == y.terms_;
    }

private:
    void require_compatible(const BivariateSeries& o) const
    {
        if (ctx_ && o.ctx_ && !same_context(ctx_, o.ctx_))
            throw std::invalid_argument("ring tag mismatch");
    }

    MarkingSetPtr ctx_;
    long long bound_ = unbounded;
    std::map<Key, Element<M>> terms_;
};

template <class M>
using SeriesKey = typename BivariateSeries<M>::Key;

using UPotential = BivariateSeries<UMonomial>;
using TPotential = BivariateSeries<TMonomial>;

// Drops terms of weight s*k1 + r*k2 > bound and tightens the stored bound.
template <class M>
BivariateSeries<M> weighted_truncate(const BivariateSeries<M>& s, long long bound)
{
    if (bound < 0)
        throw std::invalid_argument("weighted_truncate requires bound >= 0");
    BivariateSeries<M> out(s.context(), bound);
    for (const auto& [k, c] : s.terms())
        out.add_term(k, c);
    return out;
}

template <class M>
BivariateSeries<M> partial_x(const BivariateSeries<M>& s)
{
    BivariateSeries<M> out(s.context(), s.weight_bound());
    for (const auto& [k, c] : s.terms())
        if (k.first > 0)
            out.add_term({k.first - 1, k.second}, c * Rational(k.first));
    return out;
}

template <class M>
BivariateSeries<M> partial_y(const BivariateSeries<M>& s)
{
    BivariateSeries<M> out(s.context(), s.weight_bound());
    for (const auto& [k, c] : s.terms())
        if (k.second > 0)
            out.add_term({k.first, k.second - 1}, c * Rational(k.second));
    return out;
}

namespace detail {

// x_image^{k1} * y_image^{k2} truncated to the given weight bound, with the
// power cache shared across terms of one substitution.
template <class M>
const BivariateSeries<M>& cached_power(const BivariateSeries<M>& base, long long e,
                                       std::map<long long, BivariateSeries<M>>& cache,
                                       long long bound, const MarkingSetPtr& ctx)
{
    auto it = cache.find(e);
    if (it != cache.end())
        return it->second;
    BivariateSeries<M> value(ctx, bound);
    if (e == 0) {
        value.add_term({0, 0}, Element<M>(ctx, Rational(1)));
    } else {
        value = BivariateSeries<M>::mul_truncated(cached_power(base, e - 1, cache, bound, ctx),
                                                  base, bound);
    }
    return cache.emplace(e, std::move(value)).first->second;
}

}  // namespace detail

// Composition series |-> series(x_image, y_image), truncated to the series'
// own weight bound. The images must be x resp. y modulo the maximal ideal.
template <class M>
BivariateSeries<M> substitute(const BivariateSeries<M>& s, const BivariateSeries<M>& x_image,
                              const BivariateSeries<M>& y_image)
{
    const MarkingSetPtr& ctx = s.context();
    if (!same_context(ctx, x_image.context()) || !same_context(ctx, y_image.context()))
        throw std::invalid_argument("ring tag mismatch");
    auto congruent_to = [&](const BivariateSeries<M>& im, const SeriesKey<M>& var) {
        for (const auto& [k, c] : im.terms()) {
            const Rational head = c.constant_part();
            if (k == var) {
                if (head != 1)
                    return false;
            } else if (head != 0) {
                return false;
            }
        }
        return im.coefficient(var).constant_part() == 1;
    };
    if (!congruent_to(x_image, {1, 0}) || !congruent_to(y_image, {0, 1}))
        throw std::invalid_argument("substitution image is not x (resp. y) modulo the maximal ideal");

    const long long bound = s.weight_bound();
    BivariateSeries<M> out(ctx, bound);
    std::map<long long, BivariateSeries<M>> x_pows, y_pows;
    for (const auto& [k, c] : s.terms()) {
        const BivariateSeries<M>& xp =
            detail::cached_power(x_image, k.first, x_pows, bound, ctx);
        const BivariateSeries<M>& yp =
            detail::cached_power(y_image, k.second, y_pows, bound, ctx);
        BivariateSeries<M> term = BivariateSeries<M>::mul_truncated(xp, yp, bound);
        for (const auto& [tk, tc] : term.terms())
            out.add_term(tk, tc * c);
    }
    return out;
}

// Finite Laurent polynomial in hbar with ring coefficients.
template <class M>
class LaurentSeries {
public:
    LaurentSeries() = default;
    explicit LaurentSeries(MarkingSetPtr ctx) : ctx_(std::move(ctx)) {}

    const MarkingSetPtr& context() const { return ctx_; }
    const std::map<long long, Element<M>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(long long exponent, const Element<M>& c)
    {
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.emplace(exponent, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    Element<M> coefficient(long long exponent) const
    {
        auto it = terms_.find(exponent);
        return it == terms_.end() ? Element<M>(ctx_) : it->second;
    }

    LaurentSeries& operator+=(const LaurentSeries& o)
    {
        for (const auto& [e, c] : o.terms_)
            add_term(e, c);
        return *this;
    }

    friend bool operator==(const LaurentSeries& x, const LaurentSeries& y)
    {
        return x.terms_ == y.terms_;
    }

private:
    MarkingSetPtr ctx_;
    std::map<long long, Element<M>> terms_;
};

using UHbarSeries = LaurentSeries<UMonomial>;
using THbarSeries = LaurentSeries<TMonomial>;

}  // namespace fjrw
