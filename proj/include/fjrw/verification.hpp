#pragma once

#include "fjrw/invariants.hpp"
#include "fjrw/json_io.hpp"

#include <chrono>
#include <future>
#include <sstream>
#include <vector>

namespace fjrw {

// One acceptance criterion: exact checks plus a wall-clock budget.
struct CriterionResult {
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
};

namespace acceptance {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail << what << "; ";
        }
    }
};

inline MarkingSetPtr assorted_context(const ModelParams& p)
{
    return make_marking_set(
        p, {{1, 1, 1}, {2, p.r - 1, p.s - 1}, {3, 0, 0}});
}

inline MarkingSetPtr criterion3_context()
{
    return make_marking_set({3, 3}, {{1, 1, 1}, {2, 1, 1}, {3, 2, 2}});
}

// 1. Forced simple invariants: nu = -1 on both empty-J graphs and +1 on
// every singleton d = 0 graph, for (r,s) in {(2,3),(3,3),(3,4)}.
inline Outcome forced_simple_invariants()
{
    Outcome out;
    for (const ModelParams p : {ModelParams{2, 3}, ModelParams{3, 3}, ModelParams{3, 4}}) {
        const ChamberIndex nu = build_minimal_chamber(assorted_context(p), 1);
        const CellKey empty{};
        out.require(nu.value(empty, 0) == -1 && nu.value(empty, 1) == -1,
                    "empty-J values differ from -1 at (" + std::to_string(p.r) + "," +
                        std::to_string(p.s) + ")");
        for (const CellKey& cell : nu.domain_cells()) {
            if (cell.J.size() != 1 || cell.d[0] != 0)
                continue;
            const TwistProfile prof = nu.profile(cell);
            for (long long q = 0; q <= prof.N; ++q)
                out.require(nu.value(cell, static_cast<int>(q)) == 1,
                            "singleton d=0 value differs from 1 at " + to_string(cell));
        }
    }
    return out;
}

// 2. Singleton amplitudes A({i},(d)) = (-1)^d for d <= 4 and all twists.
inline Outcome singleton_amplitudes()
{
    Outcome out;
    for (const ModelParams p : {ModelParams{2, 3}, ModelParams{3, 3}, ModelParams{3, 4}})
        for (int a = 0; a <= p.r - 1; ++a)
            for (int b = 0; b <= p.s - 1; ++b) {
                const ChamberIndex nu =
                    build_minimal_chamber(make_marking_set(p, {{1, a, b}}), 4);
                for (int d = 0; d <= 4; ++d)
                    out.require(amplitude(nu, {1}, {{1, d}}) == sign_pow(d),
                                "A({i},(d)) != (-1)^d at twist (" + std::to_string(a) + "," +
                                    std::to_string(b) + "), d=" + std::to_string(d));
            }
    return out;
}

// 3. Period-integral identity on (3,3), twists (1,1),(1,1),(2,2), dmax = 1.
inline Outcome period_integral_identity()
{
    Outcome out;
    const ChamberIndex nu = build_minimal_chamber(criterion3_context(), 1);
    const auto table = period_table_extended(build_potential(nu));
    const auto extracted = extract_amplitudes(nu, table);
    for (const CellKey& cell : nu.domain_cells()) {
        if (cell.J.empty())
            continue;
        auto it = extracted.find(cell);
        out.require(it != extracted.end(), "missing extraction at " + to_string(cell));
        if (it != extracted.end())
            out.require(it->second == amplitude(nu, cell.J, cell.descendents()),
                        "extracted amplitude differs at " + to_string(cell));
    }
    return out;
}

// 4. Chamber independence: amplitudes of g(nu) equal those of nu for 20
// random group elements with <= 5 factors and coefficients in {1,-1,1/2,-1/2,2,-2}.
inline Outcome chamber_independence()
{
    Outcome out;
    const ChamberIndex nu = build_minimal_chamber(criterion3_context(), 1);
    std::mt19937 rng(424243);
    for (int trial = 0; trial < 20; ++trial) {
        const GroupElement g = random_group_element(nu, rng, 5);
        const ChamberIndex moved = act_on_chamber(g, nu);
        for (const CellKey& cell : nu.domain_cells()) {
            if (cell.J.empty())
                continue;
            if (amplitude(nu, cell.J, cell.descendents()) !=
                amplitude(moved, cell.J, cell.descendents())) {
                out.require(false, "amplitude moved at " + to_string(cell) + " (trial " +
                                       std::to_string(trial) + ")");
                break;
            }
        }
    }
    return out;
}

// 5. Torsor round trip: connect(nu, g(nu)) transports nu exactly to g(nu),
// and non-identity elements move nu.
inline Outcome torsor_round_trip()
{
    Outcome out;
    const ChamberIndex nu = build_minimal_chamber(criterion3_context(), 1);
    out.require(connect(nu, nu).is_identity(), "connect(nu,nu) is not the identity");
    std::mt19937 rng(551137);
    const std::vector<Rational> positive{Rational(1), Rational(1, 2), Rational(2)};
    for (int trial = 0; trial < 10; ++trial) {
        const GroupElement g = random_group_element(nu, rng, 4, positive);
        const ChamberIndex target = act_on_chamber(g, nu);
        out.require(!(target == nu),
                    "non-identity element fixes nu (trial " + std::to_string(trial) + ")");
        const ChamberIndex back = act_on_chamber(connect(nu, target), nu);
        out.require(back == target,
                    "torsor round trip failed (trial " + std::to_string(trial) + ")");
    }
    return out;
}

// 6. Automorphism preservation: unit Jacobian, (xy)-ideal preservation and
// the Euler weight identity for every generator and for random products.
inline Outcome automorphism_preservation()
{
    Outcome out;
    const MarkingSetPtr ctx = criterion3_context();
    const ChamberIndex nu = build_minimal_chamber(ctx, 1);
    for (const auto& [cell, p] : domain_critical_keys(nu)) {
        const GroupElement g{{make_generator(*ctx, cell, p, Rational(1))}};
        const PreservationReport rep = preservation_check(ctx, g);
        out.require(rep.pass(), "generator at " + to_string(cell) + ", p=" + std::to_string(p) +
                                    " fails: " + rep.detail);
    }
    std::mt19937 rng(424243);
    for (int trial = 0; trial < 20; ++trial) {
        const GroupElement g = random_group_element(nu, rng, 5);
        const PreservationReport rep = preservation_check(ctx, g);
        out.require(rep.pass(), "random product fails preservation: " + rep.detail);
    }
    return out;
}

// 7. Open TRR: both identities vanish exactly on (3,3) with twists drawn
// from {(1,1),(2,2),(1,2)} and descendents bounded by 1.
inline Outcome open_trr()
{
    Outcome out;
    const ModelParams p33{3, 3};
    const std::vector<std::pair<int, int>> pool{{1, 1}, {2, 2}, {1, 2}};
    std::vector<std::vector<std::pair<int, int>>> twist_sets;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        twist_sets.push_back({pool[i]});
        for (std::size_t j = i; j < pool.size(); ++j) {
            twist_sets.push_back({pool[i], pool[j]});
            for (std::size_t k = j; k < pool.size(); ++k)
                twist_sets.push_back({pool[i], pool[j], pool[k]});
        }
    }
    for (const auto& twists : twist_sets) {
        std::vector<Marking> ms;
        for (std::size_t i = 0; i < twists.size(); ++i)
            ms.push_back({static_cast<int>(i) + 1, twists[i].first, twists[i].second});
        const MarkingSetPtr ctx = make_marking_set(p33, ms);
        const int n = static_cast<int>(twists.size());
        std::vector<DescendentVector> dvecs;
        DescendentVector d;
        std::function<void(int)> fill = [&](int i) {
            if (i == n) {
                dvecs.push_back(d);
                return;
            }
            for (int v = 0; v <= 1; ++v) {
                d[i + 1] = v;
                fill(i + 1);
            }
        };
        fill(0);
        for (const DescendentVector& dv : dvecs)
            for (int j1 = 1; j1 <= n; ++j1) {
                const Rational res1 = verify_open_trr(ctx, dv, j1);
                out.require(res1 == 0, "first open TRR residual " + rational_str(res1) +
                                           " at |I|=" + std::to_string(n));
                if (n >= 2) {
                    const int j2 = j1 == 1 ? 2 : 1;
                    const Rational res2 = verify_open_trr(ctx, dv, j1, j2);
                    out.require(res2 == 0, "second open TRR residual " + rational_str(res2) +
                                               " at |I|=" + std::to_string(n));
                }
            }
    }
    return out;
}

// 8. Closed TRR and convention calibration: under exactly one convention all
// residuals (n in {3,4}, d1 = 1) vanish AND the distinguished-insertion
// choice does not matter; the other convention fails at least one instance.
inline Outcome closed_trr_calibration()
{
    Outcome out;
    const ModelParams p33{3, 3};
    const std::vector<std::pair<int, int>> pool{{1, 1}, {2, 2}, {1, 2}, {0, 0}};

    std::vector<std::vector<ClosedInsertion>> instances;
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j) {
            instances.push_back({{-1, -1, 1},
                                 {pool[i].first, pool[i].second, 0},
                                 {pool[j].first, pool[j].second, 0}});
            instances.push_back({{pool[i].first, pool[i].second, 1},
                                 {-1, -1, 0},
                                 {pool[j].first, pool[j].second, 0}});
            for (std::size_t k = 0; k < pool.size(); ++k) {
                instances.push_back({{pool[i].first, pool[i].second, 1},
                                     {pool[j].first, pool[j].second, 0},
                                     {pool[k].first, pool[k].second, 0}});
                instances.push_back({{-1, -1, 1},
                                     {pool[i].first, pool[i].second, 0},
                                     {pool[j].first, pool[j].second, 0},
                                     {pool[k].first, pool[k].second, 0}});
                instances.push_back({{pool[i].first, pool[i].second, 1},
                                     {pool[j].first, pool[j].second, 0},
                                     {pool[k].first, pool[k].second, 0},
                                     {0, 0, 0}});
            }
        }

    auto convention_passes = [&](SignConvention conv, std::string* first_failure) {
        for (const auto& ins : instances) {
            const Rational res = verify_closed_trr(p33, ins, conv);
            if (res != 0) {
                if (first_failure)
                    *first_failure = "closed TRR residual " + rational_str(res);
                return false;
            }
            const auto choices = ext_invariant_all_choices(p33, ins, conv);
            for (const Rational& v : choices)
                if (v != choices.front()) {
                    if (first_failure)
                        *first_failure = "distinguished-insertion choice changes the value";
                    return false;
                }
        }
        return true;
    };

    std::string default_failure;
    out.require(convention_passes(kDefaultConvention, &default_failure),
                "calibrated convention fails: " + default_failure);
    const SignConvention other = kDefaultConvention == SignConvention::OpenMS
                                     ? SignConvention::MirrorA
                                     : SignConvention::OpenMS;
    out.require(!convention_passes(other, nullptr),
                "rejected convention unexpectedly passes every instance");

    // At least one instance must be genuinely nonzero for the test to bite.
    bool some_nonzero = false;
    for (const auto& ins : instances)
        some_nonzero = some_nonzero ||
                       ext_invariant_term(p33, ins, kDefaultConvention,
                                          ChamberCache::global()) != 0;
    out.require(some_nonzero, "every calibration instance vanished");
    return out;
}

// 9. Symmetric/non-symmetric compatibility and the flat-coordinate head on
// a symmetrized two-equal-twist instance.
inline Outcome symmetric_compatibility()
{
    Outcome out;
    const MarkingSetPtr ctx = make_marking_set({3, 3}, {{1, 1, 1}, {2, 1, 1}});
    const ChamberIndex nu = build_minimal_chamber(ctx, 1);
    out.require(psi_I(build_potential_sym(nu)) == build_potential(nu),
                "psi_I(W^{nu,sym}) != W^{nu}");
    const MirrorReport report = verify_mirror(nu);
    out.require(report.flat_ok, "flat-coordinate head fails: " + report.detail);
    out.require(report.head_ok, "hbar^{d-1} head fails: " + report.detail);
    return out;
}

// 10. Worked values: A({1,2}, 0) = 1 and nu_{Gamma_{{1},0},(1)} = -3/2.
inline Outcome worked_values()
{
    Outcome out;
    const ChamberIndex pair =
        build_minimal_chamber(make_marking_set({3, 3}, {{1, 1, 1}, {2, 1, 1}}), 1);
    out.require(amplitude(pair, {1, 2}, {}) == 1, "A({1,2},0) != 1");
    const ChamberIndex single =
        build_minimal_chamber(make_marking_set({3, 3}, {{1, 1, 1}}), 1);
    out.require(single.value(CellKey{{1}, {1}}, 0) == Rational(-3, 2),
                "nu at Gamma_{{1},0}, d=(1) != -3/2");
    return out;
}

}  // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(int jobs = 1)
{
    struct Entry {
        const char* name;
        double budget;
        acceptance::Outcome (*run)();
    };
    const std::vector<Entry> entries{
        {"forced-simple-invariants", 1.0, &acceptance::forced_simple_invariants},
        {"singleton-amplitudes", 5.0, &acceptance::singleton_amplitudes},
        {"period-integral-identity", 60.0, &acceptance::period_integral_identity},
        {"chamber-independence", 60.0, &acceptance::chamber_independence},
        {"torsor-round-trip", 60.0, &acceptance::torsor_round_trip},
        {"automorphism-preservation", 10.0, &acceptance::automorphism_preservation},
        {"open-trr", 300.0, &acceptance::open_trr},
        {"closed-trr-calibration", 300.0, &acceptance::closed_trr_calibration},
        {"symmetric-compatibility", 30.0, &acceptance::symmetric_compatibility},
        {"worked-values", 1.0, &acceptance::worked_values},
    };

    auto run_one = [](const Entry& entry) {
        const auto start = std::chrono::steady_clock::now();
        acceptance::Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.detail << "exception: " << e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        CriterionResult result;
        result.name = entry.name;
        result.seconds = seconds;
        result.budget_seconds = entry.budget;
        result.pass = outcome.ok && seconds < entry.budget;
        result.detail = outcome.detail.str();
        if (outcome.ok && seconds >= entry.budget)
            result.detail += "time budget exceeded";
        return result;
    };

    std::vector<CriterionResult> results(entries.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i)
            results[i] = run_one(entries[i]);
    } else {
        std::vector<std::future<CriterionResult>> futures;
        futures.reserve(entries.size());
        for (const Entry& entry : entries)
            futures.push_back(std::async(std::launch::async, run_one, entry));
        for (std::size_t i = 0; i < entries.size(); ++i)
            results[i] = futures[i].get();
    }
    return results;
}

}  // namespace fjrw
