#pragma once

#include "fjrw/combinatorics.hpp"
#include "fjrw/markings.hpp"
#include "fjrw/rational.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace fjrw {

// One cell (J, d): a subset of marking labels (sorted) with its descendent
// vector aligned entrywise to J. Each cell carries N+1 balanced-graph values.
struct CellKey {
    std::vector<int> J;
    std::vector<int> d;

    DescendentVector descendents() const
    {
        DescendentVector out;
        for (std::size_t i = 0; i < J.size(); ++i)
            out[J[i]] = d[i];
        return out;
    }

    friend bool operator==(const CellKey&, const CellKey&) = default;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

inline CellKey make_cell(std::vector<int> J, const DescendentVector& d)
{
    std::sort(J.begin(), J.end());
    CellKey c;
    c.d.reserve(J.size());
    for (int label : J) {
        auto it = d.find(label);
        c.d.push_back(it == d.end() ? 0 : it->second);
    }
    c.J = std::move(J);
    return c;
}

inline std::string to_string(const CellKey& c)
{
    std::string out = "J={";
    for (std::size_t i = 0; i < c.J.size(); ++i)
        out += (i ? "," : "") + std::to_string(c.J[i]);
    out += "}, d=(";
    for (std::size_t i = 0; i < c.d.size(); ++i)
        out += (i ? "," : "") + std::to_string(c.d[i]);
    return out + ")";
}

// Exact-rational assignment to every balanced graph key (J, d, p) with
// J subseteq I and d_i <= dmax; the artifact's model of a system of open
// invariants. Values are stored cell-major: values[cell][p].
class ChamberIndex {
public:
    ChamberIndex(MarkingSetPtr ctx, int dmax) : ctx_(std::move(ctx)), dmax_(dmax)
    {
        if (dmax_ < 0)
            throw std::invalid_argument("dmax must be >= 0");
    }

    const MarkingSetPtr& context() const { return ctx_; }
    int dmax() const { return dmax_; }

    TwistProfile profile(const CellKey& cell) const
    {
        return twist_profile(*ctx_, cell.J, cell.descendents());
    }

    bool in_domain(const CellKey& cell) const
    {
        if (cell.J.size() != cell.d.size())
            return false;
        for (std::size_t i = 0; i < cell.J.size(); ++i) {
            if (!ctx_->has_label(cell.J[i]))
                return false;
            if (i > 0 && cell.J[i - 1] >= cell.J[i])
                return false;
            if (cell.d[i] < 0 || cell.d[i] > dmax_)
                return false;
        }
        return true;
    }

    // All cells of the declared domain (including J = emptyset), in
    // (|J|, J, d) lexicographic order.
    std::vector<CellKey> domain_cells() const
    {
        const std::vector<int> labels = ctx_->labels();
        const std::size_t n = labels.size();
        std::vector<CellKey> cells;
        for (std::size_t size = 0; size <= n; ++size) {
            std::vector<CellKey> of_size;
            std::vector<int> pick;
            std::function<void(std::size_t)> choose = [&](std::size_t from) {
                if (pick.size() == size) {
                    CellKey cell;
                    cell.J = pick;
                    cell.d.assign(size, 0);
                    std::function<void(std::size_t)> fill = [&](std::size_t i) {
                        if (i == size) {
                            of_size.push_back(cell);
                            return;
                        }
                        for (int v = 0; v <= dmax_; ++v) {
                            cell.d[i] = v;
                            fill(i + 1);
                        }
                    };
                    fill(0);
                    return;
                }
                for (std::size_t j = from; j < n; ++j) {
                    pick.push_back(labels[j]);
                    choose(j + 1);
                    pick.pop_back();
                }
            };
            choose(0);
            std::sort(of_size.begin(), of_size.end());
            cells.insert(cells.end(), of_size.begin(), of_size.end());
        }
        return cells;
    }

    const std::vector<Rational>* cell_values(const CellKey& cell) const
    {
        auto it = values_.find(cell);
        return it == values_.end() ? nullptr : &it->second;
    }

    Rational value(const CellKey& cell, int p) const
    {
        auto it = values_.find(cell);
        if (it == values_.end() || p < 0 || p >= static_cast<int>(it->second.size()))
            throw std::invalid_argument("chamber value out of domain: " + to_string(cell) +
                                        ", p=" + std::to_string(p));
        return it->second[static_cast<std::size_t>(p)];
    }

    void set_cell(const CellKey& cell, std::vector<Rational> vals)
    {
        values_[cell] = std::move(vals);
    }

    const std::map<CellKey, std::vector<Rational>>& values() const { return values_; }

    friend bool operator==(const ChamberIndex& x, const ChamberIndex& y)
    {
        return *x.ctx_ == *y.ctx_ && x.dmax_ == y.dmax_ && x.values_ == y.values_;
    }

private:
    MarkingSetPtr ctx_;
    int dmax_ = 0;
    std::map<CellKey, std::vector<Rational>> values_;
};

namespace detail {

// Partition sum of Notation A(J): over ordered partitions into h >= min_h
// non-empty blocks and one balanced key per block,
//   1/h! * RF((1+r(J))/r, n1) * RF((1+s(J))/s, n2) * prod nu,
// with n1 = (sum k1(i) - r(J))/r, n2 analogous.
inline Rational amplitude_sum(const ChamberIndex& nu, const std::vector<int>& J,
                              const DescendentVector& d, int min_h)
{
    const MarkingSet& ctx = *nu.context();
    const ModelParams& params = ctx.params();
    const TwistProfile whole = twist_profile(ctx, J, d);
    const Rational cx((1 + whole.rJ), params.r);
    const Rational cy((1 + whole.sJ), params.s);

    Rational total = 0;
    Rational h_factorial = 1;
    for (int h = 1; h <= static_cast<int>(J.size()); ++h) {
        h_factorial *= h;
        if (h < min_h)
            continue;
        Rational h_total = 0;
        for_each_ordered_partition(J, h, [&](const std::vector<std::vector<int>>& blocks) {
            struct BlockData {
                CellKey cell;
                std::vector<BalancedKey> keys;
            };
            std::vector<BlockData> data;
            data.reserve(blocks.size());
            for (const auto& block : blocks) {
                BlockData bd;
                bd.cell = make_cell(block, d);
                bd.keys = enumerate_balanced(params, nu.profile(bd.cell));
                if (bd.keys.empty())
                    return;  // Balanced(J_i, d) empty: partition contributes 0
                data.push_back(std::move(bd));
            }
            // Cartesian product over per-block balanced keys.
            std::vector<std::size_t> idx(data.size(), 0);
            while (true) {
                long long sum_k1 = 0, sum_k2 = 0;
                Rational prod = 1;
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const BalancedKey& key = data[i].keys[idx[i]];
                    sum_k1 += key.k1;
                    sum_k2 += key.k2;
                    prod *= nu.value(data[i].cell, key.p);
                }
                if (prod != 0) {
                    const long long n1 = (sum_k1 - whole.rJ) / params.r;
                    const long long n2 = (sum_k2 - whole.sJ) / params.s;
                    h_total += gamma_ratio(cx, static_cast<int>(n1)) *
                               gamma_ratio(cy, static_cast<int>(n2)) * prod;
                }
                std::size_t i = 0;
                while (i < idx.size() && ++idx[i] == data[i].keys.size())
                    idx[i++] = 0;
                if (i == idx.size())
                    break;
            }
        });
        total += h_total / h_factorial;
    }
    return total;
}

}  // namespace detail

// A(J, d, nu), exact.
inline Rational amplitude(const ChamberIndex& nu, const std::vector<int>& J,
                          const DescendentVector& d)
{
    if (J.empty())
        throw std::invalid_argument("amplitude requires a non-empty J");
    const CellKey cell = make_cell(J, d);
    if (!nu.in_domain(cell))
        throw std::invalid_argument("amplitude out of domain: " + to_string(cell));
    return detail::amplitude_sum(nu, cell.J, d, 1);
}

// Canonical ("minimal") chamber index: J = emptyset keys are -1, singleton
// d = 0 keys are 1; in every constrained cell the values at p >= 1 are fixed
// to 0 and the single linear condition is solved for p = 0. Built by
// induction on |J| -- a cell's condition only references strictly smaller
// cells through finer partitions.
inline ChamberIndex build_minimal_chamber(MarkingSetPtr ctx, int dmax)
{
    ChamberIndex nu(std::move(ctx), dmax);
    const MarkingSet& ms = *nu.context();
    const ModelParams& params = ms.params();

    for (const CellKey& cell : nu.domain_cells()) {
        const TwistProfile prof = nu.profile(cell);
        if (prof.N < 0)
            continue;  // Balanced(J,d) is empty; nothing to store
        const std::size_t nkeys = static_cast<std::size_t>(prof.N) + 1;
        if (cell.J.empty()) {
            nu.set_cell(cell, std::vector<Rational>(nkeys, Rational(-1)));
            continue;
        }
        std::vector<Rational> vals(nkeys, Rational(0));
        // Constraint: A(J, d) = (-1)^{sum d} for singletons, 0 for |J| >= 2
        // (the |J| >= 2 condition applies exactly when N >= 0). With the
        // p >= 1 values gauged to 0, the h = 1 term is ratio_0 * nu_0.
        Rational target = 0;
        if (cell.J.size() == 1)
            target = sign_pow(cell.d[0]);
        const Rational finer =
            detail::amplitude_sum(nu, cell.J, cell.descendents(), 2);
        // ratio_0 = RF((1+rJ)/r, 0) * RF((1+sJ)/s, N) > 0: nonzero pivot.
        const Rational ratio0 =
            gamma_ratio(Rational(1 + prof.sJ, params.s), static_cast<int>(prof.N));
        vals[0] = (target - finer) / ratio0;
        nu.set_cell(cell, std::move(vals));
    }
    return nu;
}

struct AxiomViolation {
    int condition = 0;  // 1, 2, or 3 as in the chamber-index definition
    CellKey cell;
    std::string detail;
};

struct AxiomReport {
    std::vector<AxiomViolation> violations;
    bool pass() const { return violations.empty(); }
};

// Checks the three chamber-index conditions over the whole declared domain.
inline AxiomReport check_axioms(const ChamberIndex& nu)
{
    AxiomReport report;
    const MarkingSet& ctx = *nu.context();
    for (const CellKey& cell : nu.domain_cells()) {
        const TwistProfile prof = nu.profile(cell);
        if (prof.N < 0)
            continue;
        const bool zero_d =
            std::all_of(cell.d.begin(), cell.d.end(), [](int v) { return v == 0; });
        if (cell.J.empty()) {
            for (long long p = 0; p <= prof.N; ++p)
                if (nu.value(cell, static_cast<int>(p)) != -1)
                    report.violations.push_back(
                        {1, cell, "empty-J value at p=" + std::to_string(p) + " is not -1"});
            continue;
        }
        if (cell.J.size() == 1 && zero_d) {
            for (long long p = 0; p <= prof.N; ++p)
                if (nu.value(cell, static_cast<int>(p)) != 1)
                    report.violations.push_back(
                        {1, cell, "singleton d=0 value at p=" + std::to_string(p) + " is not 1"});
        }
        if (cell.J.size() == 1) {
            const Rational a = amplitude(nu, cell.J, cell.descendents());
            const Rational want = sign_pow(cell.d[0]);
            if (a != want)
                report.violations.push_back(
                    {2, cell, "singleton amplitude " + rational_str(a) + " != " + rational_str(want)});
        } else {
            const long long rhs =
                static_cast<long long>(ctx.params().s) * prof.rJ +
                static_cast<long long>(ctx.params().r) * prof.sJ;
            if (prof.m >= rhs) {
                const Rational a = amplitude(nu, cell.J, cell.descendents());
                if (a != 0)
                    report.violations.push_back(
                        {3, cell, "constrained amplitude " + rational_str(a) + " != 0"});
            }
        }
    }
    return report;
}

}  // namespace fjrw
