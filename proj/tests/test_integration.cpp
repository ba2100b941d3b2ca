// Whole-pipeline consistency on randomized domains: minimal chamber, axiom
// checker, both amplitude routes, torsor round trips, and the recursions at
// model parameters other than (3,3).
#include "fjrw/invariants.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace fjrw;

TEST_CASE("randomized domains: axioms, dual amplitude routes, torsor")
{
    std::mt19937 rng(20250817);
    const std::vector<ModelParams> models{{2, 3}, {3, 3}, {3, 4}, {4, 3}};
    for (int trial = 0; trial < 14; ++trial) {
        const ModelParams p = models[trial % models.size()];
        std::uniform_int_distribution<int> nsize(1, 3);
        const int n = nsize(rng);
        const int dmax = (n >= 3) ? (trial % 2) : 1;
        std::uniform_int_distribution<int> a_dist(0, p.r - 1), b_dist(0, p.s - 1);
        std::vector<Marking> ms;
        for (int i = 1; i <= n; ++i)
            ms.push_back({i, a_dist(rng), b_dist(rng)});
        CAPTURE(p.r, p.s, n, dmax, trial);

        const MarkingSetPtr ctx = make_marking_set(p, ms);
        const ChamberIndex nu = build_minimal_chamber(ctx, dmax);
        REQUIRE(check_axioms(nu).pass());

        // Coefficient-extraction route agrees with the combinatorial one on
        // every cell.
        const auto extracted =
            extract_amplitudes(nu, period_table_extended(build_potential(nu)));
        for (const CellKey& cell : nu.domain_cells()) {
            if (cell.J.empty())
                continue;
            REQUIRE(extracted.count(cell) == 1);
            CHECK(extracted.at(cell) == amplitude(nu, cell.J, cell.descendents()));
        }

        // Transport along a random group element and return.
        const GroupElement g = random_group_element(nu, rng, 3);
        const ChamberIndex moved = act_on_chamber(g, nu);
        CHECK(check_axioms(moved).pass());
        CHECK(act_on_chamber(connect(nu, moved), nu) == moved);
        CHECK(preservation_check(ctx, g).pass());
    }
}

TEST_CASE("mirror report on mixed model parameters")
{
    for (const ModelParams p : {ModelParams{2, 3}, ModelParams{3, 4}}) {
        const MarkingSetPtr ctx = make_marking_set(p, {{1, 1, 1}, {2, 1, 1}});
        const ChamberIndex nu = build_minimal_chamber(ctx, 1);
        REQUIRE(is_symmetric(nu));
        const MirrorReport report = verify_mirror(nu);
        INFO(p.r << "," << p.s << ": " << report.detail);
        CHECK(report.pass());
    }
}

TEST_CASE("open TRR at other model parameters")
{
    for (const ModelParams p : {ModelParams{2, 3}, ModelParams{3, 4}}) {
        const std::vector<std::pair<int, int>> pool{
            {1, 1}, {p.r - 1, p.s - 1}, {0, p.s - 2}};
        for (const auto& [a1, b1] : pool)
            for (const auto& [a2, b2] : pool) {
                const MarkingSetPtr ctx = make_marking_set(p, {{1, a1, b1}, {2, a2, b2}});
                for (int d1 = 0; d1 <= 1; ++d1) {
                    const DescendentVector d{{1, d1}, {2, 0}};
                    CAPTURE(p.r, p.s, a1, b1, a2, b2, d1);
                    CHECK(verify_open_trr(ctx, d, 1) == 0);
                    CHECK(verify_open_trr(ctx, d, 1, 2) == 0);
                }
            }
    }
}

TEST_CASE("closed TRR at other model parameters")
{
    for (const ModelParams p : {ModelParams{2, 3}, ModelParams{3, 4}}) {
        const std::vector<std::pair<int, int>> pool{{1, 1}, {0, 0}, {p.r - 1, p.s - 1}};
        for (const auto& [a2, b2] : pool)
            for (const auto& [a3, b3] : pool) {
                const std::vector<ClosedInsertion> ins{
                    {-1, -1, 1}, {a2, b2, 0}, {a3, b3, 0}, {1, 1, 0}};
                CAPTURE(p.r, p.s, a2, b2, a3, b3);
                CHECK(verify_closed_trr(p, ins) == 0);
            }
    }
}

TEST_CASE("four markings at dmax 0: full dual-route agreement")
{
    const MarkingSetPtr ctx =
        make_marking_set({3, 3}, {{1, 1, 1}, {2, 1, 1}, {3, 2, 2}, {4, 1, 2}});
    const ChamberIndex nu = build_minimal_chamber(ctx, 0);
    REQUIRE(check_axioms(nu).pass());
    const auto extracted =
        extract_amplitudes(nu, period_table_extended(build_potential(nu)));
    for (const CellKey& cell : nu.domain_cells()) {
        if (cell.J.empty())
            continue;
        REQUIRE(extracted.count(cell) == 1);
        CHECK(extracted.at(cell) == amplitude(nu, cell.J, cell.descendents()));
    }
    // Symmetric route as well: three equal twists make |Aut| = 6 terms.
    const MarkingSetPtr ctx3 =
        make_marking_set({3, 3}, {{1, 1, 1}, {2, 1, 1}, {3, 1, 1}});
    const ChamberIndex nu3 = build_minimal_chamber(ctx3, 0);
    CHECK(psi_I(build_potential_sym(nu3)) == build_potential(nu3));
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b)
            CHECK(psi_I(period_integral(build_potential_sym(nu3), {a, b})) ==
                  period_integral(build_potential(nu3), {a, b}));
}
