#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "asmplan/io.hpp"
#include "asmplan/planner.hpp"
#include "doctest.h"
#include "scenes.hpp"

using namespace asmplan;

namespace {

const Tolerances kTol{};

OrderEvaluation scored(double score, bool assisted = false) {
    OrderEvaluation e;
    e.score = score;
    if (assisted) {
        AssistResult a;
        a.held = {{0}};
        a.feasible = true;
        e.assist = a;
    }
    return e;
}

OrderEvaluation dead() {
    OrderEvaluation e;
    AssistResult a;
    a.held = {{0, 1}};
    a.feasible = false;
    e.assist = a;
    return e;
}

}  // namespace

TEST_CASE("permutation counts") {
    CHECK(permutation_count(1) == 1);
    CHECK(permutation_count(3) == 6);
    CHECK(permutation_count(4) == 24);
    CHECK(permutation_count(7) == 5040);
    CHECK(permutation_count(8) == 40320);
    CHECK_THROWS_AS(permutation_count(9), TooManyPieces);
    CHECK(permutation_count(9, 9) == 362880);
    CHECK_THROWS_AS(permutation_count(0), InvalidOrder);
}

TEST_CASE("permutation enumeration is complete and lexicographic") {
    for (int n : {3, 4, 7}) {
        std::vector<BodyId> ids(static_cast<std::size_t>(n));
        std::iota(ids.begin(), ids.end(), 0);
        std::set<std::vector<BodyId>> seen;
        std::vector<BodyId> prev;
        std::uint64_t k = 0;
        for_each_permutation(ids, 8, [&](std::span<const BodyId> order) {
            std::vector<BodyId> v(order.begin(), order.end());
            if (!prev.empty()) CHECK(std::lexicographical_compare(prev.begin(), prev.end(), v.begin(), v.end()));
            CHECK(nth_permutation(ids, k) == v);
            seen.insert(v);
            prev = v;
            ++k;
        });
        CHECK(seen.size() == permutation_count(n));
    }
    const std::vector<BodyId> three = {0, 1, 2};
    const std::vector<std::vector<BodyId>> expected = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (std::uint64_t k = 0; k < 6; ++k) CHECK(nth_permutation(three, k) == expected[k]);
}

TEST_CASE("too many pieces") {
    std::vector<testscene::PieceSpec> pieces;
    for (int k = 0; k < 9; ++k) pieces.push_back({"p" + std::to_string(k), {{0, 0, 0}}, Vec3(0.05 * k, 0, 0)});
    const Scene scene = testscene::voxel_scene(pieces);
    const SceneModel model(scene, kTol);
    CHECK_THROWS_AS(plan(model, PlannerConfig{}), TooManyPieces);
}

TEST_CASE("order validation") {
    const Scene scene = load_scene(testscene::fixture("soma3.json"));
    const SceneModel model(scene, kTol);
    const std::vector<BodyId> ok = {2, 0, 1};
    CHECK_NOTHROW(check_order(model, ok));
    for (const std::vector<BodyId>& bad :
         std::vector<std::vector<BodyId>>{{0, 1}, {0, 1, 1}, {0, 1, 3}, {0, 1, 2, 0}, {-1, 0, 1}}) {
        CHECK_THROWS_AS(check_order(model, bad), InvalidOrder);
        CHECK_THROWS_AS(evaluate_order(model, bad, PlannerConfig{}), InvalidOrder);
    }
}

TEST_CASE("order score") {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<int> g = {12, 4, 9};
    const std::vector<double> a = {1.0, 0.75, 0.5};
    SUBCASE("plain product of minima") {
        const std::vector<StabilityQuality> s = {StabilityQuality(0.3), StabilityQuality(0.2), StabilityQuality(0.9)};
        CHECK(order_score(s, g, a, 10.0) == 0.2 * 4 * 0.5);
    }
    SUBCASE("infinite entries are skipped") {
        const std::vector<StabilityQuality> s = {StabilityQuality(inf), StabilityQuality(0.2), StabilityQuality(0.9)};
        CHECK(order_score(s, g, a, 10.0) == 0.2 * 4 * 0.5);
    }
    SUBCASE("all infinite falls back to the cap") {
        const std::vector<StabilityQuality> s = {StabilityQuality(inf), StabilityQuality(inf), StabilityQuality(inf)};
        CHECK(order_score(s, g, a, 10.0) == 10.0 * 4 * 0.5);
        CHECK(order_score(s, g, a, 2.5) == 2.5 * 4 * 0.5);
    }
    SUBCASE("zero factors") {
        const std::vector<StabilityQuality> s = {StabilityQuality(0.3), StabilityQuality(0.2), StabilityQuality(0.9)};
        const std::vector<int> g0 = {12, 0, 9};
        const std::vector<double> a0 = {1.0, 0.0, 0.5};
        CHECK(order_score(s, g0, a, 10.0) == 0.0);
        CHECK(order_score(s, g, a0, 10.0) == 0.0);
    }
}

TEST_CASE("cached plan rows equal direct evaluation") {
    const Scene scene = load_scene(testscene::fixture("soma3.json"));
    const SceneModel model(scene, kTol);
    PlannerConfig config;
    config.threads = 1;
    const PlanResult result = plan(model, config);
    REQUIRE(result.evaluations.size() == 6);
    for (const auto& cached : result.evaluations) {
        const auto direct = evaluate_order(model, cached.order, config);
        CHECK(direct.g_row == cached.g_row);
        for (std::size_t k = 0; k < cached.order.size(); ++k) {
            CHECK(direct.raw_s[k].value() == doctest::Approx(cached.raw_s[k].value()).epsilon(1e-12));
            CHECK(direct.a_row[k] == doctest::Approx(cached.a_row[k]).epsilon(1e-12));
            if (cached.s_row[k].is_infinite())
                CHECK(direct.s_row[k].is_infinite());
            else
                CHECK(direct.s_row[k].value() == doctest::Approx(cached.s_row[k].value()).epsilon(1e-12));
        }
        CHECK(direct.uses_assist() == cached.uses_assist());
        CHECK(direct.score == doctest::Approx(cached.score).epsilon(1e-12));
    }
    const auto& best = result.evaluations[result.optimal_index];
    for (const auto& e : result.evaluations) CHECK(e.score <= best.score + 1e-12);
    CHECK(result.optimal.order == best.order);
    CHECK(result.optimal.grasps.size() == 3);
}

TEST_CASE("winner selection") {
    SUBCASE("seeded tie break") {
        const std::vector<OrderEvaluation> evs = {scored(0), scored(3), scored(3), scored(1)};
        for (std::uint64_t seed : {0ull, 1ull, 7ull, 12345ull}) {
            const std::size_t w = select_index(evs, seed, true);
            std::mt19937_64 rng(seed);
            const std::vector<std::size_t> ties = {1, 2};
            CHECK(w == ties[rng() % ties.size()]);
            CHECK(select_index(evs, seed, true) == w);
        }
    }
    SUBCASE("unassisted orders win ties") {
        const std::vector<OrderEvaluation> evs = {scored(3, true), scored(3, false), scored(3, true)};
        for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(select_index(evs, seed, true) == 1);
        std::set<std::size_t> seen;
        for (std::uint64_t seed = 0; seed < 40; ++seed) seen.insert(select_index(evs, seed, false));
        CHECK(seen.size() == 3);
    }
    SUBCASE("a higher assisted score still wins") {
        const std::vector<OrderEvaluation> evs = {scored(2, false), scored(3, true)};
        CHECK(select_index(evs, 0, true) == 1);
    }
    SUBCASE("no feasible order") {
        const std::vector<OrderEvaluation> evs = {dead(), dead()};
        CHECK_THROWS_AS(select_index(evs, 0, true), NoFeasibleOrder);
        const std::vector<OrderEvaluation> none;
        CHECK_THROWS_AS(select_index(none, 0, true), NoFeasibleOrder);
    }
}

TEST_CASE("cantilever pair needs a second hand") {
    const Scene scene = load_scene(testscene::fixture("cantilever_pair.json"));
    const SceneModel model(scene, kTol);
    PlannerConfig config;
    config.assist.extra_hands = 1;
    const auto one = plan(model, config);
    CHECK(one.optimal.score == 0.0);
    config.assist.extra_hands = 2;
    const auto two = plan(model, config);
    CHECK(two.optimal.score > 0.0);
    CHECK(two.used_assist);
}

TEST_CASE("thread count does not change the result") {
    const Scene scene = load_scene(testscene::fixture("soma3.json"));
    const SceneModel model(scene, kTol);
    PlannerConfig config;
    config.threads = 1;
    const auto a = plan(model, config);
    config.threads = 4;
    const auto b = plan(model, config);
    REQUIRE(a.evaluations.size() == b.evaluations.size());
    for (std::size_t k = 0; k < a.evaluations.size(); ++k) {
        CHECK(a.evaluations[k].order == b.evaluations[k].order);
        CHECK(a.evaluations[k].score == b.evaluations[k].score);
    }
    CHECK(a.optimal_index == b.optimal_index);
}
