#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "asmplan/grasping.hpp"
#include "asmplan/scene.hpp"
#include "asmplan/stability.hpp"

namespace asmplan {

struct AssistParams {
    int extra_hands = 1;
    double retract_distance = 0.15;
};

struct AssistResult {
    std::vector<StabilityQuality> updated_s;
    std::vector<std::vector<BodyId>> held;            // pieces held at each step, ascending
    std::vector<std::vector<Grasp>> assist_grasps;    // surviving assisting grasps at each step
    std::vector<std::vector<std::optional<Grasp>>> chosen;  // per held piece, parallel to held
    bool feasible = true;                             // never more held pieces than extra hands
    bool grasps_available = true;                     // every held interval has a grasp valid throughout

    bool any_held() const;
    std::optional<BodyId> held_at(std::size_t step) const;
};

/// Per-context queries the analyzer needs; masks are bit sets over workpiece indices.
/// The planner supplies cached versions.
struct AssistQueries {
    std::function<StabilityQuality(BodyId piece, std::uint32_t fixed_mask)> stability;
    std::function<std::vector<Grasp>(BodyId piece, std::uint32_t obstacle_mask)> accessible;
    std::function<Vec3(BodyId piece, std::uint32_t prefix_mask)> direction;
};

AssistQueries direct_queries(const SceneModel& model, const StabilityParams& params, const GraspSampling& sampling);

/// Filters `candidates` against the next piece at its goal and swept back along
/// -next_direction by `retract_distance`. Returns the input when there is no next piece.
/// Throws NoAssistGrasp when nothing survives.
std::vector<Grasp> assist_grasps(const SceneModel& model, BodyId held, std::optional<BodyId> next_preparing,
                                 const Vec3& next_direction, std::span<const Grasp> candidates,
                                 double retract_distance);

AssistResult assist_analyze(const SceneModel& model, std::span<const BodyId> order, const AssistParams& assist,
                            const AssistQueries& queries);
AssistResult assist_analyze(const SceneModel& model, std::span<const BodyId> order, const StabilityParams& params,
                            const AssistParams& assist, const GraspSampling& sampling);

}  // namespace asmplan
