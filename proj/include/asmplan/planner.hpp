#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asmplan/assemblability.hpp"
#include "asmplan/assist.hpp"
#include "asmplan/grasping.hpp"
#include "asmplan/scene.hpp"
#include "asmplan/stability.hpp"

namespace asmplan {

struct PlannerConfig {
    StabilityParams stability;
    GraspSampling sampling;
    AssistParams assist;
    Tolerances tolerances;
    double s_cap = 10.0;
    bool prefer_no_assist = true;
    std::uint64_t seed = 0;
    int max_pieces = 8;
    int threads = 0;  // 0: hardware concurrency
};

struct OrderEvaluation {
    std::vector<BodyId> order;
    std::vector<StabilityQuality> raw_s;
    std::vector<StabilityQuality> s_row;   // raw_s, or the assist analyzer's updated values
    std::vector<int> g_row;
    std::vector<double> a_row;
    std::vector<AssemblyDirection> directions;
    std::vector<std::vector<Grasp>> grasps;  // filled for detailed evaluations only
    std::optional<AssistResult> assist;
    double score = 0.0;

    bool uses_assist() const { return assist && assist->any_held(); }
};

struct PlanResult {
    OrderEvaluation optimal;
    std::size_t optimal_index = 0;
    std::vector<OrderEvaluation> evaluations;  // every order, lexicographic, without grasp lists
    bool used_assist = false;
    std::uint64_t seed = 0;
};

/// n! for n within the cap; throws TooManyPieces otherwise.
std::uint64_t permutation_count(int n, int cap = 8);
/// k-th permutation of `ids` in lexicographic order of positions.
std::vector<BodyId> nth_permutation(std::span<const BodyId> ids, std::uint64_t k);
/// Streams every permutation of `ids` in lexicographic order.
void for_each_permutation(std::span<const BodyId> ids, int cap,
                          const std::function<void(std::span<const BodyId>)>& visit);

/// Throws InvalidOrder unless `order` is a permutation of 0..n-1.
void check_order(const SceneModel& model, std::span<const BodyId> order);

/// min*(s) . min(g) . min(a): +inf entries skipped, all +inf -> s_cap.
double order_score(std::span<const StabilityQuality> s, std::span<const int> g, std::span<const double> a,
                   double s_cap);

/// Uncached evaluation of one order with full details.
OrderEvaluation evaluate_order(const SceneModel& model, std::span<const BodyId> order, const PlannerConfig& config);

/// Winner index by the seeded, assist-aware tie rule. Throws NoFeasibleOrder.
std::size_t select_index(std::span<const OrderEvaluation> evaluations, std::uint64_t seed, bool prefer_no_assist);

PlanResult plan(const SceneModel& model, const PlannerConfig& config);

}  // namespace asmplan
