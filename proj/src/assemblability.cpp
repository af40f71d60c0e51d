#include "asmplan/assemblability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace asmplan {

namespace {

constexpr double kDedupAngle = 1e-6;
constexpr double kTieTol = 1e-9;

Vec3 gravity_direction(const Scene& scene) {
    const double g = scene.gravity.norm();
    return g > 0 ? Vec3(scene.gravity / g) : Vec3(-Vec3::UnitZ());
}

bool lex_less(const Vec3& a, const Vec3& b) {
    for (int k = 0; k < 3; ++k) {
        if (a[k] < b[k]) return true;
        if (a[k] > b[k]) return false;
    }
    return false;
}

}  // namespace

DirectionConstraintSet make_constraint_set(std::span<const Vec3> normals) {
    DirectionConstraintSet c;
    for (const auto& raw : normals) {
        const double len = raw.norm();
        if (!(len > 0)) continue;
        const Vec3 n = raw / len;
        bool dup = false;
        for (const auto& m : c.normals) {
            if (std::acos(std::clamp(n.dot(m), -1.0, 1.0)) <= kDedupAngle) {
                dup = true;
                break;
            }
        }
        if (!dup) c.normals.push_back(n);
    }
    return c;
}

DirectionConstraintSet constraint_normals(const SceneModel& model, BodyId piece, std::span<const BodyId> prefix) {
    std::vector<Vec3> normals;
    for (const auto& p : model.contacts(kTableId, piece)) normals.push_back(p.normal);
    for (BodyId b : prefix) {
        if (b == piece || b == kTableId) continue;
        for (const auto& p : model.contacts(b, piece)) normals.push_back(p.normal);
    }
    return make_constraint_set(normals);
}

DirectionConstraintSet constraint_normals(const SceneModel& model, BodyId piece, std::uint32_t prefix_mask) {
    std::vector<BodyId> prefix;
    for (int k = 0; k < model.size(); ++k)
        if (prefix_mask & (1u << k)) prefix.push_back(k);
    return constraint_normals(model, piece, prefix);
}

double direction_margin(const DirectionConstraintSet& c, const Vec3& d) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& n : c.normals) m = std::min(m, -d.dot(n));
    return m;
}

AssemblyDirection optimal_direction(const DirectionConstraintSet& c, const Vec3& gravity_dir) {
    const Vec3 g = gravity_dir.normalized();
    if (c.normals.empty()) return {g, 1.0};

    const auto& n = c.normals;
    const std::size_t m = n.size();
    std::vector<Vec3> candidates;
    auto add = [&](const Vec3& d) {
        const double len = d.norm();
        if (len > 1e-9) candidates.push_back(d / len);
    };

    add(g);
    for (std::size_t i = 0; i < m; ++i) {
        add(-n[i]);
        add(g - g.dot(n[i]) * n[i]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if ((n[i] + n[j]).norm() > 1e-9) add(-(n[i] + n[j]));
            const Vec3 axis = n[i].cross(n[j]);
            if (axis.norm() > 1e-9) add(axis.dot(g) >= 0 ? axis : Vec3(-axis));
            for (std::size_t k = j + 1; k < m; ++k) {
                const Vec3 cc = (n[i] - n[j]).cross(n[i] - n[k]);
                add(cc);
                add(-cc);
            }
        }
    }

    AssemblyDirection best{candidates.front(), -std::numeric_limits<double>::infinity()};
    for (const auto& d : candidates) {
        const double margin = direction_margin(c, d);
        if (margin > best.margin + kTieTol) {
            best = {d, margin};
            continue;
        }
        if (margin < best.margin - kTieTol) continue;
        const double da = d.dot(g), db = best.direction.dot(g);
        if (da > db + kTieTol || (da >= db - kTieTol && lex_less(d, best.direction))) {
            best = {d, std::max(margin, best.margin)};
        }
    }
    best.margin = direction_margin(c, best.direction);
    if (std::abs(best.margin) < 1e-12) best.margin = 0.0;  // rounding of exactly-grazing contacts
    return best;
}

double assemblability_quality(const AssemblyDirection& dir) {
    if (dir.margin < 0) return 0.0;
    return 0.5 * (1.0 + std::min(dir.margin, 1.0));
}

AssemblabilityRow assemblability_row(const SceneModel& model, std::span<const BodyId> order) {
    AssemblabilityRow row;
    const Vec3 g = gravity_direction(model.scene());
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto c = constraint_normals(model, order[j], order.subspan(0, j));
        const auto dir = optimal_direction(c, g);
        row.directions.push_back(dir);
        row.qualities.push_back(assemblability_quality(dir));
    }
    return row;
}

}  // namespace asmplan
