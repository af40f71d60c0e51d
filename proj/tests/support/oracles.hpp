#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's hull, contact or grasp code.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "asmplan/geometry.hpp"
#include "asmplan/gripper.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using asmplan::Cell;
using asmplan::Vec2;
using asmplan::Vec3;

/// max c.x subject to A x = b, x >= 0 (dense two-phase simplex, Bland's rule).
struct LpResult {
    enum Status { Optimal, Infeasible, Unbounded } status = Infeasible;
    double value = 0.0;
    VectorXd x;
};
LpResult simplex_max(const MatrixXd& A, const VectorXd& b, const VectorXd& c);

/// Largest t with q = sum l_i p_i, sum l_i = 1, every l_i >= t. For a full-dimensional
/// point set t > 0 iff q is interior, t < 0 iff q is outside. nullopt when q is not in
/// the affine hull.
std::optional<double> interior_slack(const std::vector<VectorXd>& points, const VectorXd& q);

/// Wrench-space test: exists l >= 0 with sum l_e w_e = target and sum l_e <= budget,
/// with slack (the interior_slack of target in conv({0} U budget*w_e)).
std::optional<double> wrench_lp_slack(const std::vector<VectorXd>& unit_normal_wrenches, const VectorXd& target,
                                      double budget);

struct Plane {
    VectorXd normal;  // unit, outward
    double offset = 0.0;
};

/// Facets of a full-dimensional conv(P) by checking every d-subset (small inputs only).
std::vector<Plane> brute_force_facets(const std::vector<VectorXd>& points);

/// Facets of a full-dimensional conv(P) by the double description method.
std::vector<Plane> double_description_facets(const std::vector<VectorXd>& points);

/// min over facets of (offset - n.q): distance to the boundary, negative outside.
double facet_margin(const std::vector<Plane>& facets, const VectorXd& q);

/// Signed distance from p to the boundary of the convex hull of pts (positive inside).
double support_polygon_margin(const std::vector<Vec2>& pts, const Vec2& p);

/// Vertices of the icosahedron subdivided `level` times, on the unit sphere.
std::vector<Vec3> icosphere(int level);

/// Count of cell faces not shared with another cell.
int exposed_faces(const std::vector<Cell>& cells);

/// Exposed faces as unit squares: axis, sign, the coordinate of the face plane
/// (in cells) and the two in-plane cell coordinates.
struct UnitFace {
    int axis;
    int sign;
    int plane;
    int a;
    int b;
};
std::vector<UnitFace> unit_faces(const std::vector<Cell>& cells);

/// Antipodal grasp contacts on a polycube, from first principles on the unit-face grid:
/// coplanar face components via flood fill, overlaps as shared grid squares.
struct GraspSample {
    Vec3 contact_pos;  // on the +normal jaw face (outward normal of that face)
    Vec3 contact_neg;
    Vec3 jaw;          // outward normal at contact_pos
    int roll = 0;
};
/// Number of (+face component, -face component) pairs along one axis that share a
/// unit square and fit the opening.
int polycube_pair_count(const std::vector<Cell>& cells, double size, double max_opening);
std::vector<GraspSample> polycube_grasps(const std::vector<Cell>& cells, double size, double max_opening,
                                         double pitch, int rolls);

/// Unit-normal-force contact wrenches (f, (p - com) x f / rho), rebuilt from the patch
/// contact points. The pyramid tangent is x (y when the normal is near x) in the body
/// frame `frame`, projected onto the contact plane.
struct ContactWrenches {
    std::vector<VectorXd> unit;
    double rho = 0.0;
};
ContactWrenches contact_wrenches(const std::vector<asmplan::ContactPatch>& patches, const Vec3& com, double mu,
                                 int sides, const asmplan::Mat3& frame = asmplan::Mat3::Identity());

/// Axis-aligned box for interval-overlap tests.
struct Box {
    Vec3 lo;
    Vec3 hi;
};
/// Interiors overlap by more than `gap` along every axis.
bool boxes_overlap(const Box& a, const Box& b, double gap);
/// Box swept along an axis-aligned direction by `distance`.
Box swept(const Box& b, const Vec3& direction, double distance);

/// Gripper boxes for a grasp whose frame axes are all aligned with world axes.
std::array<Box, 3> aligned_gripper_boxes(const asmplan::GripperSpec& spec, const asmplan::Grasp& grasp);

}  // namespace oracle
