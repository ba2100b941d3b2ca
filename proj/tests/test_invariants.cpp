#include "fjrw/invariants.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

using namespace fjrw;

namespace {
const ModelParams p33{3, 3};
}

TEST_CASE("closed extended invariants: worked values and gates")
{
    SECTION("basic extended three-point value")
    {
        CHECK(ext_invariant(p33, {{-1, -1, 0}, {1, 1, 0}, {1, 1, 0}}) == 1);
        // The rejected convention flips the sign at even d(J,d); the
        // magnitude is fixed by A({1,2},0) = 1.
        CHECK(ext_invariant(p33, {{-1, -1, 0}, {1, 1, 0}, {1, 1, 0}},
                            SignConvention::MirrorA) == -1);
    }
    SECTION("selection-rule zeros")
    {
        CHECK(ext_invariant(p33, {{1, 1, 1}, {1, 1, 0}, {2, 2, 0}}) == 0);  // dimension
        CHECK(ext_invariant(p33, {{1, 1, 0}, {1, 1, 0}, {0, 1, 0}}) == 0);  // integrality
        CHECK(ext_invariant(p33, {{2, 0, 0}, {2, 0, 0}, {0, 1, 0}, {0, 0, 0}}) == 0);  // Ramond
        CHECK(ext_invariant(p33, {{1, 1, 0}, {1, 1, 0}}) == 0);  // two-point
    }
    SECTION("hard errors")
    {
        CHECK_THROWS_AS(ext_invariant(p33, {{-1, 1, 0}, {-1, 1, 0}, {1, 1, 0}}),
                        DoubleNegativeError);
        // Mixed -1 coordinates at different insertions pass every gate but
        // admit no distinguished insertion.
        CHECK_THROWS_AS(ext_invariant(p33, {{-1, 1, 0}, {1, -1, 0}, {1, 1, 0}}),
                        NoDistinguishedInsertion);
    }
    SECTION("permutation invariance")
    {
        std::vector<ClosedInsertion> ins{{-1, -1, 1}, {1, 1, 0}, {0, 0, 0}, {1, 1, 1}};
        const Rational base = ext_invariant(p33, ins);
        std::sort(ins.begin(), ins.end(), [](const ClosedInsertion& x, const ClosedInsertion& y) {
            return std::tuple(x.a, x.b, x.d) < std::tuple(y.a, y.b, y.d);
        });
        do {
            CHECK(ext_invariant(p33, ins) == base);
        } while (std::next_permutation(
            ins.begin(), ins.end(), [](const ClosedInsertion& x, const ClosedInsertion& y) {
                return std::tuple(x.a, x.b, x.d) < std::tuple(y.a, y.b, y.d);
            }));
    }
}

TEST_CASE("distinguished-insertion independence calibrates the convention")
{
    // Four eligible distinguished insertions with mixed descendent parities:
    // the surviving convention agrees across all of them, the rejected one
    // does not.
    const std::vector<ClosedInsertion> ins{{1, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}};

    const auto good = ext_invariant_all_choices(p33, ins, SignConvention::OpenMS);
    REQUIRE(good.size() == 4);
    for (const Rational& v : good)
        CHECK(v == good.front());
    CHECK(good.front() != 0);

    const auto bad = ext_invariant_all_choices(p33, ins, SignConvention::MirrorA);
    REQUIRE(bad.size() == 4);
    CHECK_FALSE(std::all_of(bad.begin(), bad.end(),
                            [&](const Rational& v) { return v == bad.front(); }));
}

TEST_CASE("open topological recursion")
{
    SECTION("|I| = 1: reduces to A({1}, d+1) = -A({1}, d)")
    {
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b)
                for (int d = 0; d <= 1; ++d) {
                    auto ctx = make_marking_set(p33, {{1, a, b}});
                    CHECK(verify_open_trr(ctx, {{1, d}}, 1) == 0);
                }
    }
    SECTION("|I| = 2: both identities vanish on small twists")
    {
        const std::vector<std::pair<int, int>> pool{{1, 1}, {2, 2}, {1, 2}};
        for (const auto& [a1, b1] : pool)
            for (const auto& [a2, b2] : pool) {
                auto ctx = make_marking_set(p33, {{1, a1, b1}, {2, a2, b2}});
                for (int d1 = 0; d1 <= 1; ++d1)
                    for (int d2 = 0; d2 <= 1; ++d2) {
                        const DescendentVector d{{1, d1}, {2, d2}};
                        CHECK(verify_open_trr(ctx, d, 1) == 0);
                        CHECK(verify_open_trr(ctx, d, 1, 2) == 0);
                        CHECK(verify_open_trr(ctx, d, 2, 1) == 0);
                    }
            }
    }
    SECTION("marking selection is validated")
    {
        auto ctx = make_marking_set(p33, {{1, 1, 1}});
        CHECK_THROWS_AS(verify_open_trr(ctx, {}, 2), std::invalid_argument);
        CHECK_THROWS_AS(verify_open_trr(ctx, {}, 1, 1), std::invalid_argument);
    }
    SECTION("solved form: A(I,d) equals the recursion difference")
    {
        // Subtracting the two identities expresses A(I,d) itself as the
        // splitting sum with marking 2 forced to the closed side.
        const std::vector<std::pair<int, int>> pool{{1, 1}, {2, 2}, {1, 2}};
        for (const auto& [a1, b1] : pool)
            for (const auto& [a2, b2] : pool) {
                auto ctx = make_marking_set(p33, {{1, a1, b1}, {2, a2, b2}, {3, 1, 1}});
                const DescendentVector d{{1, 0}, {2, 0}, {3, 0}};
                Rational direct = amplitude_of_multiset(
                    p33, {{a1, b1, 0}, {a2, b2, 0}, {1, 1, 0}});
                Rational sum = 0;
                for (int a = -1; a <= 1; ++a)
                    for (int b = -1; b <= 1; ++b)
                        for (int in_A = 0; in_A <= 1; ++in_A) {
                            std::vector<ClosedInsertion> bracket{
                                {a, b, 0}, {a1, b1, 0}, {a2, b2, 0}};
                            std::vector<std::tuple<int, int, int>> amp{
                                {p33.r - 2 - a, p33.s - 2 - b, 0}};
                            if (in_A)
                                bracket.push_back({1, 1, 0});
                            else
                                amp.emplace_back(1, 1, 0);
                            const Rational closed = ext_invariant_term(
                                p33, bracket, kDefaultConvention, ChamberCache::global());
                            if (closed != 0)
                                sum += closed * amplitude_of_multiset(p33, amp);
                        }
                CHECK(direct == sum);
            }
    }
}

TEST_CASE("closed topological recursion")
{
    SECTION("trivially vanishing instances")
    {
        CHECK(verify_closed_trr(p33, {{1, 1, 1}, {2, 2, 0}, {2, 2, 0}}) == 0);
    }
    SECTION("nonzero instances under the calibrated convention")
    {
        const std::vector<std::vector<ClosedInsertion>> instances{
            {{-1, -1, 1}, {1, 1, 0}, {1, 1, 0}, {1, 1, 0}},
            {{1, 1, 1}, {0, 0, 0}, {0, 0, 0}, {1, 1, 0}},
            {{0, 0, 1}, {1, 1, 0}, {0, 0, 0}, {0, 0, 0}},
            {{-1, -1, 1}, {2, 2, 0}, {1, 1, 0}, {0, 0, 0}},
        };
        for (const auto& ins : instances) {
            CHECK(verify_closed_trr(p33, ins) == 0);
            CHECK(verify_closed_trr(p33, ins, SignConvention::MirrorA) == 0);
        }
        // At least one of these has a genuinely nonzero left-hand side.
        bool some_nonzero = false;
        for (const auto& ins : instances)
            some_nonzero =
                some_nonzero || ext_invariant_term(p33, ins, kDefaultConvention,
                                                   ChamberCache::global()) != 0;
        CHECK(some_nonzero);
    }
    SECTION("input validation")
    {
        CHECK_THROWS_AS(verify_closed_trr(p33, {{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("mirror report")
{
    auto ctx = make_marking_set(p33, {{1, 1, 1}, {2, 1, 1}});
    const ChamberIndex nu = build_minimal_chamber(ctx, 1);

    SECTION("minimal index passes")
    {
        const MirrorReport report = verify_mirror(nu);
        INFO(report.detail);
        CHECK(report.head_ok);
        CHECK(report.generating_ok);
        CHECK(report.flat_ok);
        CHECK(report.wallcross_ok);
    }
    SECTION("a symmetric transported index passes identically")
    {
        // Move along a symmetric direction: equal correction at the two
        // equal-twist singleton cells.
        const Rational c(1, 3);
        GroupElement g;
        g.factors.push_back(make_generator(*ctx, CellKey{{1}, {1}}, 1, c));
        g.factors.push_back(make_generator(*ctx, CellKey{{2}, {1}}, 1, c));
        const ChamberIndex moved = act_on_chamber(g, nu);
        REQUIRE(is_symmetric(moved));
        const MirrorReport report = verify_mirror(moved);
        INFO(report.detail);
        CHECK(report.pass());
    }
}
