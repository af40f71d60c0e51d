#pragma once

#include <span>
#include <vector>

#include "asmplan/geometry.hpp"
#include "asmplan/scene.hpp"

namespace asmplan {

/// Unit contact normals pointing from the assembled component into the upcoming piece.
struct DirectionConstraintSet {
    std::vector<Vec3> normals;
};

/// Insertion motion direction and its clearance margin min_j(-direction . n_j).
struct AssemblyDirection {
    Vec3 direction = -Vec3::UnitZ();
    double margin = 1.0;
};

/// Deduplicates (within 1e-6 rad) and normalizes.
DirectionConstraintSet make_constraint_set(std::span<const Vec3> normals);

DirectionConstraintSet constraint_normals(const SceneModel& model, BodyId piece, std::span<const BodyId> prefix);
DirectionConstraintSet constraint_normals(const SceneModel& model, BodyId piece, std::uint32_t prefix_mask);

double direction_margin(const DirectionConstraintSet& c, const Vec3& d);

/// Exact maximizer over the unit sphere by critical-direction enumeration; ties go to the
/// direction closest to `gravity_dir`, then to the lexicographically smallest vector.
AssemblyDirection optimal_direction(const DirectionConstraintSet& c, const Vec3& gravity_dir = -Vec3::UnitZ());

/// 0 when blocked (margin < 0), else (1 + margin) / 2.
double assemblability_quality(const AssemblyDirection& dir);

struct AssemblabilityRow {
    std::vector<double> qualities;
    std::vector<AssemblyDirection> directions;
};

AssemblabilityRow assemblability_row(const SceneModel& model, std::span<const BodyId> order);

}  // namespace asmplan
