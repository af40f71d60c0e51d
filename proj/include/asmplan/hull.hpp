#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "asmplan/error.hpp"

namespace asmplan {

using VecX = Eigen::VectorXd;

/// Supporting hyperplane normal . x <= offset, |normal| = 1.
struct Hyperplane {
    VecX normal;
    double offset = 0.0;
};

/// Simplicial convex hull in d dimensions (2 <= d <= 6).
struct ConvexHull {
    int dim = 0;
    std::vector<std::vector<int>> facet_vertices;
    std::vector<Hyperplane> facets;
};

/// Quickhull over the given points. Throws DegenerateHull if the points are not
/// full-dimensional. Points within a relative 1e-11 of a facet plane count as inside.
ConvexHull compute_hull(std::span<const VecX> points);

/// Dimension of the affine hull of the points.
int affine_rank(std::span<const VecX> points, double rel_tol = 1e-10);

/// Euclidean distance from query to conv(points), 0 when inside (min-norm-point iteration).
double hull_distance(std::span<const VecX> points, const VecX& query);

/// Unit directions: integer vectors of L1 norm 4, normalized (cross-polytope facets subdivided twice).
std::vector<VecX> sampling_directions(int dim);

struct HullMarginOptions {
    std::size_t max_exact_points = 200;
};

/// Signed distance from query to the boundary of conv(points): positive inside (distance
/// to the nearest facet), 0 on the boundary, negative outside (minus the distance to the
/// hull). Above max_exact_points the inside depth is the minimum support gap over
/// sampling_directions(d), an upper bound on the exact value.
///
/// Throws DegenerateHull when the points are not full-dimensional.
double convex_hull_margin(std::span<const VecX> points, const VecX& query, const HullMarginOptions& options = {});

}  // namespace asmplan
