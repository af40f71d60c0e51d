#include <cmath>
#include <numbers>
#include <random>

#include "asmplan/stability.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace asmplan;

namespace {

const Tolerances kTol{};

Eigen::VectorXd up_query() {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(6);
    q(2) = 1.0;
    return q;
}

double s_of(const SceneModel& model, BodyId piece, std::vector<BodyId> fixed, const StabilityParams& p = {}) {
    return stability_quality(model, piece, fixed, resolve_params(model.scene(), p)).value();
}

Scene rotated_about_z(Scene scene, double angle) {
    const Pose r{Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(), Vec3::Zero()};
    for (auto& w : scene.workpieces) w.goal = r * w.goal;
    return scene;
}

}  // namespace

TEST_CASE("friction pyramid") {
    SUBCASE("frictionless edges equal the normal") {
        const Vec3 n = Vec3(1, 2, 3).normalized();
        for (const auto& e : friction_pyramid(n, 0.0, 6)) CHECK((e - n).norm() < 1e-15);
    }
    SUBCASE("upright cone, mu 0.5") {
        const auto edges = friction_pyramid(Vec3::UnitZ(), 0.5, 6);
        REQUIRE(edges.size() == 6);
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = edges[k];
            CHECK(std::hypot(e.x(), e.y()) / e.z() == doctest::Approx(0.5).epsilon(1e-12));
            const auto& f = edges[(k + 1) % edges.size()];
            const double angle = std::acos(Vec2(e.x(), e.y()).normalized().dot(Vec2(f.x(), f.y()).normalized()));
            CHECK(angle == doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));
        }
    }
    SUBCASE("edges lie on the cone for random normals") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
            const double mu = u(rng);
            for (const auto& e : friction_pyramid(n, mu, 3 + trial % 6)) {
                CHECK(std::abs(e.dot(n) - 1.0) < 1e-9);
                CHECK(std::abs((e - e.dot(n) * n).norm() - mu) < 1e-9);
            }
        }
    }
}

TEST_CASE("wrench set construction") {
    const Scene scene = testscene::voxel_scene({{"cube", {{0, 0, 0}}, Vec3::Zero()}}, 0.05, 0.3);
    const SceneModel model(scene, kTol);
    const auto params = resolve_params(scene, {});
    const auto patches = support_patches(model, 0, {});
    const Vec3 com = model.com_world(0);
    const auto ws = build_wrench_set(patches, com, model.mass(0), friction_model(model, 6), params, scene.gravity);

    SUBCASE("six generators per contact point") { CHECK(ws.generators.size() == 6 * 4); }

    SUBCASE("gravity wrench is normalized") {
        Wrench expected = Wrench::Zero();
        expected(2) = -1.0;
        CHECK((ws.gravity_wrench - expected).norm() < 1e-12);
    }

    SUBCASE("matches the per-edge construction oracle") {
        const auto ref = oracle::contact_wrenches(patches, com, 0.3, 6);
        CHECK(ws.rho == doctest::Approx(ref.rho).epsilon(1e-12));
        CHECK(ws.force_scale == doctest::Approx(10.0).epsilon(1e-12));
        REQUIRE(ref.unit.size() == ws.generators.size());
        for (const auto& w : ref.unit) {
            double best = 1e9;
            for (const auto& g : ws.generators) best = std::min(best, (g - ws.force_scale * w).cwiseAbs().maxCoeff());
            CHECK(best <= 1e-9);
        }
    }

    SUBCASE("contact at the com has no torque") {
        ContactPatch p;
        p.normal = Vec3::UnitZ();
        p.contact_points = {com};
        const std::vector<ContactPatch> one = {p};
        StabilityParams fixed = params;
        fixed.rho_mode = RhoMode::Fixed;
        const auto single = build_wrench_set(one, com, model.mass(0), friction_model(model, 6), fixed, scene.gravity);
        CHECK(single.generators.size() == 6);
        for (const auto& g : single.generators) CHECK(g.tail<3>().norm() == 0.0);
    }

    SUBCASE("no patches") {
        const std::vector<ContactPatch> none;
        CHECK_THROWS_AS(build_wrench_set(none, com, model.mass(0), friction_model(model, 6), params, scene.gravity),
                        NoContacts);
    }
}

TEST_CASE("cube on the table") {
    const Scene scene = testscene::voxel_scene({{"cube", {{0, 0, 0}}, Vec3::Zero()}}, 0.05, 0.3);
    const SceneModel model(scene, kTol);
    const double s = s_of(model, 0, {});
    CHECK(s > 0);
    const auto patches = support_patches(model, 0, {});
    const auto ref = oracle::contact_wrenches(patches, model.com_world(0), 0.3, 6);
    const auto slack = oracle::wrench_lp_slack(ref.unit, up_query(), 10.0);
    REQUIRE(slack.has_value());
    CHECK(*slack > 0);
    const auto facets = oracle::double_description_facets([&] {
        std::vector<Eigen::VectorXd> pts = {Eigen::VectorXd::Zero(6)};
        for (const auto& w : ref.unit) pts.push_back(10.0 * w);
        return pts;
    }());
    CHECK(s == doctest::Approx(oracle::facet_margin(facets, up_query())).epsilon(1e-9));
}

TEST_CASE("floating block is unstable") {
    const Scene scene = testscene::voxel_scene({{"cube", {{0, 0, 0}}, Vec3(0, 0, 0.1)}}, 0.05, 0.3);
    const SceneModel model(scene, kTol);
    CHECK(s_of(model, 0, {}) == 0.0);
}

TEST_CASE("com outside the support polygon tips") {
    Scene scene = testscene::voxel_scene({{"cube", {{0, 0, 0}}, Vec3::Zero()}}, 0.05, 0.3);
    scene.workpieces[0].com_local = Vec3(0.06, 0.025, 0.025);
    scene.workpieces[0].given_com = scene.workpieces[0].com_local;
    const SceneModel model(scene, kTol);
    CHECK(s_of(model, 0, {}) == 0.0);
}

TEST_CASE("frictionless contact cannot resist in six dimensions") {
    const Scene scene = testscene::voxel_scene({{"cube", {{0, 0, 0}}, Vec3::Zero()}}, 0.05, 0.0);
    const SceneModel model(scene, kTol);
    CHECK(s_of(model, 0, {}) == 0.0);
}

TEST_CASE("stability rows of a two cube stack") {
    const Scene scene = testscene::cube_stack();
    const SceneModel model(scene, kTol);
    const auto params = resolve_params(scene, {});
    const std::vector<BodyId> up = {0, 1}, down = {1, 0};
    const auto row_up = stability_row(model, up, params);
    REQUIRE(row_up.size() == 2);
    CHECK(row_up[0].positive());
    CHECK(row_up[1].positive());
    for (int k = 0; k < 2; ++k) {
        const std::vector<BodyId> fixed(up.begin(), up.begin() + k);
        const auto ref = oracle::contact_wrenches(support_patches(model, up[k], fixed), model.com_world(up[k]), 0.5, 6);
        CHECK(*oracle::wrench_lp_slack(ref.unit, up_query(), 10.0) > 0);
    }
    const auto row_down = stability_row(model, down, params);
    CHECK(row_down[0].is_zero());
    CHECK(row_down[1].positive());
    const std::vector<BodyId> three = {0, 1};
    CHECK(stability_row(model, three, params).size() == 2);
}

TEST_CASE("margin sign agrees with the force budget LP on resting scenes") {
    std::mt19937_64 rng(9);
    int positive = 0, zero = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const double mu = 0.1 + 0.9 * (rng() % 1000) / 1000.0;
        const Scene scene = testscene::resting_scene(rng, 0.02, mu);
        const SceneModel model(scene, kTol);
        const auto params = resolve_params(scene, {});
        const std::vector<BodyId> fixed = {0};
        const double s = stability_quality(model, 1, fixed, params).value();
        const auto patches = support_patches(model, 1, fixed);
        const auto ref = oracle::contact_wrenches(patches, model.com_world(1), mu, 6);
        const double budget = params.force_cap / (model.mass(1) * scene.gravity.norm());
        const auto slack = oracle::wrench_lp_slack(ref.unit, up_query(), budget);
        REQUIRE(slack.has_value());
        std::vector<Eigen::VectorXd> pts = {Eigen::VectorXd::Zero(6)};
        for (const auto& w : ref.unit) pts.push_back(budget * w);
        const double exact = oracle::facet_margin(oracle::double_description_facets(pts), up_query());
        CHECK((s > 0) == (*slack > 0 && exact >= params.min_margin));
        if (s > 0) CHECK(s == doctest::Approx(exact).epsilon(1e-6));
        (s > 0 ? positive : zero)++;
    }
    CHECK(positive > 5);
    CHECK(zero > 2);
}

TEST_CASE("stability grows with friction") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Scene base = testscene::resting_scene(rng, 0.02, 0.3);
        double previous = 0.0;
        for (double mu : {0.05, 0.1, 0.2, 0.4, 0.8, 1.2}) {
            Scene scene = base;
            scene.friction.default_mu = mu;
            const SceneModel model(scene, kTol);
            const double s = s_of(model, 1, {0});
            CHECK(previous <= s + 1e-9);
            previous = s;
        }
    }
}

TEST_CASE("stability is invariant to mass scaling") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        Scene scene = testscene::resting_scene(rng, 0.02, 0.5);
        const SceneModel model(scene, kTol);
        const double s = s_of(model, 1, {0});
        Scene heavy = scene;
        for (auto& w : heavy.workpieces) w.mass *= 7.3;
        const SceneModel heavy_model(heavy, kTol);
        CHECK(std::abs(s_of(heavy_model, 1, {0}) - s) <= 1e-9);
    }
}

TEST_CASE("stability is invariant to sixth turns about gravity") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const Scene scene = testscene::resting_scene(rng, 0.02, 0.5);
        const SceneModel model(scene, kTol);
        const double s = s_of(model, 1, {0});
        for (int k = 1; k < 6; ++k) {
            const Scene turned = rotated_about_z(scene, k * std::numbers::pi / 3);
            const SceneModel turned_model(turned, kTol);
            CHECK(std::abs(s_of(turned_model, 1, {0}) - s) <= 1e-6);
        }
    }
}

TEST_CASE("stability is invariant to arbitrary rotations about gravity") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> yaw(0.0, 2 * std::numbers::pi);
    for (int trial = 0; trial < 40; ++trial) {
        const Scene scene = testscene::resting_scene(rng, 0.02, 0.5);
        const SceneModel model(scene, kTol);
        const double s = s_of(model, 1, {0});
        const Scene turned = rotated_about_z(scene, yaw(rng));
        const SceneModel turned_model(turned, kTol);
        CHECK(std::abs(s_of(turned_model, 1, {0}) - s) <= 1e-6);
    }
}

TEST_CASE("unknown body") {
    const Scene scene = testscene::cube_stack();
    const SceneModel model(scene, kTol);
    const std::vector<BodyId> none;
    CHECK_THROWS_AS(stability_quality(model, 5, none, resolve_params(scene, {})), UnknownBody);
}

TEST_CASE("the pyramid turns with the body frame") {
    const Mat3 r = Eigen::AngleAxisd(0.4, Vec3::UnitZ()).toRotationMatrix();
    const auto base = friction_pyramid(Vec3::UnitZ(), 0.4, 6);
    const auto turned = friction_pyramid(Vec3::UnitZ(), 0.4, 6, r);
    for (std::size_t k = 0; k < base.size(); ++k) CHECK((turned[k] - r * base[k]).norm() < 1e-12);
}
