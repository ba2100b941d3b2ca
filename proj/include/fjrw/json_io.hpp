#pragma once

#include "fjrw/chamber.hpp"
#include "fjrw/series.hpp"
#include "fjrw/wallcross.hpp"

#include <json.hpp>

#include <string>

namespace fjrw {

using Json = nlohmann::json;

// All serialization is canonical: rationals as "p/q" strings, monomials as
// sorted factor lists, objects keyed deterministically.

inline Json to_json(const Rational& q) { return rational_str(q); }

inline Rational rational_from_json(const Json& j)
{
    if (!j.is_string())
        throw std::invalid_argument("rational values must be strings, got " + j.dump());
    return rational_parse(j.get<std::string>());
}

inline Json to_json(const UMonomial& m)
{
    Json out = Json::array();
    for (const auto& [label, d] : m.factors)
        out.push_back(Json::array({label, d}));
    return out;
}

inline Json to_json(const TMonomial& m)
{
    Json out = Json::array();
    for (const auto& f : m.factors)
        out.push_back(Json::array({f[0], f[1], f[2]}));
    return out;
}

inline UMonomial umonomial_from_json(const Json& j)
{
    UMonomial m;
    for (const Json& f : j)
        m.factors.emplace_back(f.at(0).get<int>(), f.at(1).get<int>());
    std::sort(m.factors.begin(), m.factors.end());
    return m;
}

inline TMonomial tmonomial_from_json(const Json& j)
{
    TMonomial m;
    for (const Json& f : j)
        m.factors.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    std::sort(m.factors.begin(), m.factors.end());
    return m;
}

template <class M>
Json to_json(const Element<M>& e)
{
    Json out = Json::array();
    for (const auto& [m, c] : e.terms())
        out.push_back(Json{{"m", to_json(m)}, {"c", to_json(c)}});
    return out;
}

inline UElement uelement_from_json(const MarkingSetPtr& ctx, const Json& j)
{
    UElement out(ctx);
    for (const Json& t : j)
        out.add_term(umonomial_from_json(t.at("m")), rational_from_json(t.at("c")));
    return out;
}

inline TElement telement_from_json(const MarkingSetPtr& ctx, const Json& j)
{
    TElement out(ctx);
    for (const Json& t : j)
        out.add_term(tmonomial_from_json(t.at("m")), rational_from_json(t.at("c")));
    return out;
}

inline Json to_json(const MarkingSet& ctx)
{
    Json ms = Json::array();
    for (const Marking& m : ctx.markings())
        ms.push_back(Json{{"label", m.label}, {"a", m.a}, {"b", m.b}});
    return Json{{"r", ctx.params().r}, {"s", ctx.params().s}, {"markings", ms}};
}

inline MarkingSetPtr marking_set_from_json(const Json& j)
{
    std::vector<Marking> ms;
    for (const Json& m : j.at("markings"))
        ms.push_back({m.at("label").get<int>(), m.at("a").get<int>(), m.at("b").get<int>()});
    return make_marking_set({j.at("r").get<int>(), j.at("s").get<int>()}, std::move(ms));
}

inline Json cell_json(const CellKey& cell, int p)
{
    Json d = Json::object();
    for (std::size_t i = 0; i < cell.J.size(); ++i)
        d[std::to_string(cell.J[i])] = cell.d[i];
    return Json{{"J", cell.J}, {"d", d}, {"p", p}};
}

inline std::pair<CellKey, int> cell_from_json(const Json& j)
{
    CellKey cell;
    for (const Json& label : j.at("J"))
        cell.J.push_back(label.get<int>());
    std::sort(cell.J.begin(), cell.J.end());
    const Json& d = j.at("d");
    for (int label : cell.J) {
        auto it = d.find(std::to_string(label));
        cell.d.push_back(it == d.end() ? 0 : it->get<int>());
    }
    return {cell, j.value("p", 0)};
}

// Chamber index: flat list of balanced-graph keys with values, one record
// per (J, d, p).
inline Json to_json(const ChamberIndex& nu)
{
    Json values = Json::array();
    for (const auto& [cell, vals] : nu.values())
        for (std::size_t p = 0; p < vals.size(); ++p) {
            Json rec = cell_json(cell, static_cast<int>(p));
            rec["value"] = to_json(vals[p]);
            values.push_back(std::move(rec));
        }
    Json out = to_json(*nu.context());
    out["dmax"] = nu.dmax();
    out["values"] = std::move(values);
    return out;
}

inline ChamberIndex chamber_from_json(const Json& j)
{
    const MarkingSetPtr ctx = marking_set_from_json(j);
    ChamberIndex nu(ctx, j.at("dmax").get<int>());
    std::map<CellKey, std::map<int, Rational>> staged;
    for (const Json& rec : j.at("values")) {
        auto [cell, p] = cell_from_json(rec);
        if (!nu.in_domain(cell))
            throw std::invalid_argument("chamber value outside the declared domain at " +
                                        to_string(cell));
        staged[cell][p] = rational_from_json(rec.at("value"));
    }
    for (const CellKey& cell : nu.domain_cells()) {
        const TwistProfile prof = nu.profile(cell);
        if (prof.N < 0)
            continue;
        std::vector<Rational> vals(static_cast<std::size_t>(prof.N) + 1, 0);
        auto it = staged.find(cell);
        if (it != staged.end())
            for (const auto& [p, v] : it->second) {
                if (p < 0 || p > prof.N)
                    throw std::invalid_argument("balanced index p out of range at " +
                                                to_string(cell));
                vals[static_cast<std::size_t>(p)] = v;
            }
        nu.set_cell(cell, std::move(vals));
    }
    return nu;
}

// Group element: ordered list of {J, d, p, c} records, first factor applied
// first.
inline Json to_json(const GroupElement& g)
{
    Json out = Json::array();
    for (const GeneratorField& f : g.factors) {
        Json rec = cell_json(f.cell, f.p);
        rec["c"] = to_json(f.c);
        out.push_back(std::move(rec));
    }
    return out;
}

inline GroupElement group_from_json(const MarkingSet& ctx, const Json& j)
{
    GroupElement g;
    for (const Json& rec : j) {
        auto [cell, p] = cell_from_json(rec);
        g.factors.push_back(make_generator(ctx, cell, p, rational_from_json(rec.at("c"))));
    }
    return g;
}

template <class M>
Json to_json(const BivariateSeries<M>& W)
{
    Json terms = Json::array();
    for (const auto& [k, c] : W.terms())
        terms.push_back(Json{{"k1", k.first}, {"k2", k.second}, {"coeff", to_json(c)}});
    Json out{{"terms", std::move(terms)}};
    if (W.weight_bound() < BivariateSeries<M>::unbounded)
        out["weight_bound"] = W.weight_bound();
    return out;
}

template <class M>
Json to_json(const LaurentSeries<M>& s)
{
    Json out = Json::object();
    for (const auto& [exponent, c] : s.terms())
        out[std::to_string(exponent)] = to_json(c);
    return out;
}

inline UHbarSeries uhbar_from_json(const MarkingSetPtr& ctx, const Json& j)
{
    UHbarSeries out(ctx);
    for (auto it = j.begin(); it != j.end(); ++it)
        out.add_term(std::stoll(it.key()), uelement_from_json(ctx, it.value()));
    return out;
}

}  // namespace fjrw
