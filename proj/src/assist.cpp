#include "asmplan/assist.hpp"

#include <algorithm>
#include <limits>

#include "asmplan/assemblability.hpp"

namespace asmplan {

namespace {

bool same_grasp(const Grasp& a, const Grasp& b) {
    return a.pair_index == b.pair_index && a.grid_index == b.grid_index && a.roll_index == b.roll_index &&
           a.pose.translation == b.pose.translation;
}

std::uint32_t mask_of(std::span<const BodyId> ids) {
    std::uint32_t m = 0;
    for (BodyId b : ids) m |= 1u << b;
    return m;
}

}  // namespace

bool AssistResult::any_held() const {
    return std::any_of(held.begin(), held.end(), [](const auto& h) { return !h.empty(); });
}

std::optional<BodyId> AssistResult::held_at(std::size_t step) const {
    if (step >= held.size() || held[step].empty()) return std::nullopt;
    return held[step].front();
}

AssistQueries direct_queries(const SceneModel& model, const StabilityParams& params, const GraspSampling& sampling) {
    AssistQueries q;
    q.stability = [&model, params](BodyId piece, std::uint32_t mask) {
        return stability_quality(model, piece, mask & ~(1u << piece), params);
    };
    q.accessible = [&model, sampling](BodyId piece, std::uint32_t mask) {
        const auto candidates = candidate_grasps(model, piece, sampling);
        return accessible_grasps(model, piece, candidates, mask & ~(1u << piece));
    };
    q.direction = [&model](BodyId piece, std::uint32_t mask) {
        const Vec3 g = model.scene().gravity.normalized();
        return optimal_direction(constraint_normals(model, piece, mask & ~(1u << piece)), g).direction;
    };
    return q;
}

std::vector<Grasp> assist_grasps(const SceneModel& model, BodyId held, std::optional<BodyId> next_preparing,
                                 const Vec3& next_direction, std::span<const Grasp> candidates,
                                 double retract_distance) {
    model.check_body(held);
    if (!next_preparing) {
        if (candidates.empty()) throw NoAssistGrasp("no assisting grasp for " + model.scene().id_of(held));
        return {candidates.begin(), candidates.end()};
    }
    const double gap = model.tolerances().contact_gap;
    const PlacedShape& next = model.placed(*next_preparing);
    const Vec3 retreat = -next_direction.normalized();

    std::vector<Grasp> out;
    for (const auto& g : candidates) {
        bool blocked = false;
        for (const auto& part : gripper_parts(model.scene().gripper, g)) {
            for (const auto& piece_part : next.parts) {
                if (max_swept_penetration(piece_part, retreat, retract_distance, part) > gap) {
                    blocked = true;
                    break;
                }
            }
            if (blocked) break;
        }
        if (!blocked) out.push_back(g);
    }
    if (out.empty()) throw NoAssistGrasp("every assisting grasp for " + model.scene().id_of(held) +
                                         " blocks " + model.scene().id_of(*next_preparing));
    return out;
}

AssistResult assist_analyze(const SceneModel& model, std::span<const BodyId> order, const AssistParams& assist,
                            const AssistQueries& queries) {
    const std::size_t n = order.size();
    AssistResult r;
    r.updated_s.resize(n);
    r.held.resize(n);
    r.assist_grasps.resize(n);
    r.chosen.resize(n);

    std::vector<StabilityQuality> raw(n);
    for (std::size_t j = 0; j < n; ++j) raw[j] = queries.stability(order[j], mask_of(order.subspan(0, j)));
    if (std::all_of(raw.begin(), raw.end(), [](StabilityQuality s) { return s.positive(); })) {
        r.updated_s = raw;
        return r;
    }

    for (std::size_t j = 0; j < n; ++j) {
        const auto group = order.subspan(0, j + 1);
        const std::uint32_t mask = mask_of(group);
        double best = std::numeric_limits<double>::infinity();
        for (BodyId p : group) {
            const StabilityQuality q = p == order[j] ? raw[j] : queries.stability(p, mask);
            if (q.positive()) {
                best = std::min(best, q.value());
            } else {
                r.held[j].push_back(p);
            }
        }
        std::sort(r.held[j].begin(), r.held[j].end());
        r.updated_s[j] = StabilityQuality(best);
        if (static_cast<int>(r.held[j].size()) > assist.extra_hands) r.feasible = false;

        std::optional<BodyId> next;
        Vec3 next_dir = model.scene().gravity.normalized();
        if (j + 1 < n) {
            next = order[j + 1];
            next_dir = queries.direction(*next, mask);
        }
        for (BodyId p : r.held[j]) {
            const auto candidates = queries.accessible(p, mask);
            try {
                auto kept = assist_grasps(model, p, next, next_dir, candidates, assist.retract_distance);
                r.assist_grasps[j].insert(r.assist_grasps[j].end(), kept.begin(), kept.end());
            } catch (const NoAssistGrasp&) {
            }
        }
    }

    // one grasp per held interval: the first candidate that survives every step of it
    for (std::size_t j = 0; j < n; ++j) r.chosen[j].resize(r.held[j].size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t h = 0; h < r.held[j].size(); ++h) {
            const BodyId p = r.held[j][h];
            if (j > 0 && std::find(r.held[j - 1].begin(), r.held[j - 1].end(), p) != r.held[j - 1].end()) continue;
            std::size_t end = j;
            while (end + 1 < n && std::find(r.held[end + 1].begin(), r.held[end + 1].end(), p) != r.held[end + 1].end())
                ++end;
            auto in_step = [&](const Grasp& g, std::size_t k) {
                return std::any_of(r.assist_grasps[k].begin(), r.assist_grasps[k].end(),
                                   [&](const Grasp& o) { return same_grasp(o, g); });
            };
            std::optional<Grasp> pick;
            const auto& ca = queries.accessible(p, mask_of(order.subspan(0, j + 1)));
            for (const auto& g : ca) {
                if (!in_step(g, j)) continue;
                bool all = true;
                for (std::size_t k = j + 1; k <= end && all; ++k) all = in_step(g, k);
                if (all) {
                    pick = g;
                    break;
                }
            }
            if (!pick) r.grasps_available = false;
            for (std::size_t k = j; k <= end; ++k) {
                const auto pos = std::find(r.held[k].begin(), r.held[k].end(), p) - r.held[k].begin();
                r.chosen[k][static_cast<std::size_t>(pos)] = pick;
            }
        }
    }
    return r;
}

AssistResult assist_analyze(const SceneModel& model, std::span<const BodyId> order, const StabilityParams& params,
                            const AssistParams& assist, const GraspSampling& sampling) {
    return assist_analyze(model, order, assist, direct_queries(model, params, sampling));
}

}  // namespace asmplan
