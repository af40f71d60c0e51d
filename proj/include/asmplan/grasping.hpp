#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asmplan/geometry.hpp"
#include "asmplan/gripper.hpp"
#include "asmplan/scene.hpp"

namespace asmplan {

/// Connected set of coplanar facets sharing one outward normal.
struct FacetCluster {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;               // normal . x on the plane
    std::vector<int> facets;           // indices into Shape::facets
};

struct FacetPair {
    int cluster_a = 0;                 // the +y jaw touches cluster_a
    int cluster_b = 0;
    Vec3 normal = Vec3::UnitZ();       // outward normal of cluster_a
    double separation = 0.0;
    Vec3 u = Vec3::UnitX();            // projection basis on the plane of cluster_a
    Vec3 v = Vec3::UnitY();
    std::vector<planar::Polygon> overlap;  // convex pieces of the projected overlap
};

struct GraspSampling {
    double pitch = 0.01;
    int rolls = 2;

    bool valid() const { return pitch > 0 && rolls >= 1; }
};

std::vector<FacetCluster> facet_clusters(const Shape& shape);

/// Anti-parallel cluster pairs that fit the jaw and overlap in projection, each unordered pair once.
std::vector<FacetPair> enumerate_facet_pairs(const Shape& shape, const GripperSpec& gripper);

/// Antipodal grasps in the shape's frame, ordered by pair, grid index, roll.
/// Roll 0 approaches along `preferred_approach` projected off the jaw axis.
std::vector<Grasp> sample_grasps(const Shape& shape, const GripperSpec& gripper, const GraspSampling& sampling,
                                 const Vec3& preferred_approach = -Vec3::UnitZ());

/// Why a grasp (expressed in the world at the piece's goal) is blocked.
struct GraspBlockers {
    bool self = false;
    bool table = false;
    std::uint32_t bodies = 0;  // bit k: collides with workpiece k
};

GraspBlockers grasp_blockers(const GripperSpec& spec, const Grasp& grasp, const SceneModel& model, BodyId piece);

/// Grasps whose boxes clear the piece itself (touching its jaw faces is allowed),
/// every obstacle, and, when given, the table half-space.
std::vector<Grasp> filter_accessible(std::span<const Grasp> grasps, const GripperSpec& spec, const PlacedShape& piece,
                                     std::span<const PlacedShape* const> obstacles,
                                     const std::optional<double>& table_height, const Tolerances& tol);

/// Candidate grasps of a workpiece at its goal pose, world frame, approach defaulting to gravity.
std::vector<Grasp> candidate_grasps(const SceneModel& model, BodyId piece, const GraspSampling& sampling);

/// Accessible subset of `grasps` against the table and the workpieces in `obstacle_mask`.
std::vector<Grasp> accessible_grasps(const SceneModel& model, BodyId piece, std::span<const Grasp> grasps,
                                     std::uint32_t obstacle_mask);

struct GraspabilityRow {
    std::vector<int> counts;
    std::vector<std::vector<Grasp>> grasps;
};

GraspabilityRow graspability_row(const SceneModel& model, std::span<const BodyId> order,
                                 const GraspSampling& sampling);

}  // namespace asmplan
