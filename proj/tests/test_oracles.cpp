#include <random>

#include "doctest.h"
#include "oracles.hpp"

using oracle::VectorXd;

namespace {

std::vector<VectorXd> random_points(std::mt19937_64& rng, int n, int d) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<VectorXd> pts;
    for (int i = 0; i < n; ++i) {
        VectorXd p(d);
        for (int k = 0; k < d; ++k) p(k) = u(rng);
        pts.push_back(p);
    }
    return pts;
}

}  // namespace

TEST_CASE("simplex solves a small textbook problem") {
    // max 3x + 2y, x + y + s1 = 4, x + 3y + s2 = 6
    oracle::MatrixXd A(2, 4);
    A << 1, 1, 1, 0, 1, 3, 0, 1;
    VectorXd b(2), c(4);
    b << 4, 6;
    c << 3, 2, 0, 0;
    const auto r = oracle::simplex_max(A, b, c);
    REQUIRE(r.status == oracle::LpResult::Optimal);
    CHECK(r.value == doctest::Approx(12.0));
    CHECK(r.x(0) == doctest::Approx(4.0));
}

TEST_CASE("simplex reports infeasibility") {
    oracle::MatrixXd A(2, 1);
    A << 1, 1;
    VectorXd b(2), c(1);
    b << 1, 2;
    c << 1;
    CHECK(oracle::simplex_max(A, b, c).status == oracle::LpResult::Infeasible);
}

TEST_CASE("interior slack of the square") {
    std::vector<VectorXd> sq;
    for (auto [x, y] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}) {
        VectorXd p(2);
        p << x, y;
        sq.push_back(p);
    }
    VectorXd centre(2), edge(2), out(2);
    centre << 0.5, 0.5;
    edge << 1.0, 0.5;
    out << 1.5, 0.5;
    CHECK(*oracle::interior_slack(sq, centre) == doctest::Approx(0.25));
    CHECK(*oracle::interior_slack(sq, edge) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(*oracle::interior_slack(sq, out) < 0.0);
}

TEST_CASE("double description agrees with brute force facets") {
    std::mt19937_64 rng(7);
    for (int d = 2; d <= 5; ++d) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto pts = random_points(rng, d + 8, d);
            const auto bf = oracle::brute_force_facets(pts);
            const auto dd = oracle::double_description_facets(pts);
            CHECK(bf.size() == dd.size());
            const auto qs = random_points(rng, 10, d);
            for (const auto& q : qs)
                CHECK(oracle::facet_margin(bf, q) == doctest::Approx(oracle::facet_margin(dd, q)).epsilon(1e-9));
        }
    }
}

TEST_CASE("double description copes with coplanar points") {
    // cube corners plus face centres: 6 facets
    std::vector<VectorXd> pts;
    for (int c = 0; c < 8; ++c) {
        VectorXd p(3);
        p << (c & 1), (c >> 1 & 1), (c >> 2 & 1);
        pts.push_back(p);
    }
    for (int k = 0; k < 3; ++k)
        for (double s : {0.0, 1.0}) {
            VectorXd p = VectorXd::Constant(3, 0.5);
            p(k) = s;
            pts.push_back(p);
        }
    CHECK(oracle::double_description_facets(pts).size() == 6);
    CHECK(oracle::brute_force_facets(pts).size() == 6);
}

TEST_CASE("support polygon margin is signed") {
    std::vector<oracle::Vec2> sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 0}};
    CHECK(oracle::support_polygon_margin(sq, {1, 1}) == doctest::Approx(1.0));
    CHECK(oracle::support_polygon_margin(sq, {1.5, 1}) == doctest::Approx(0.5));
    CHECK(oracle::support_polygon_margin(sq, {3, 1}) == doctest::Approx(-1.0));
}

TEST_CASE("icosphere vertex counts") {
    for (int l = 0; l <= 5; ++l) CHECK(oracle::icosphere(l).size() == 10u * (1u << (2 * l)) + 2u);
}

TEST_CASE("exposed face counting") {
    CHECK(oracle::exposed_faces({{0, 0, 0}}) == 6);
    CHECK(oracle::exposed_faces({{0, 0, 0}, {1, 0, 0}}) == 10);
    CHECK(oracle::exposed_faces({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}) == 14);
}
