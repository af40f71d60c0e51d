#include "asmplan/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace asmplan {

StabilityParams resolve_params(const Scene& scene, StabilityParams params) {
    if (params.force_cap <= 0) {
        double heaviest = 0.0;
        for (const auto& w : scene.workpieces) heaviest = std::max(heaviest, w.mass);
        params.force_cap = 10.0 * heaviest * scene.gravity.norm();
    }
    return params;
}

FrictionModel friction_model(const SceneModel& model, int cone_sides) {
    FrictionModel fm;
    fm.default_mu = model.scene().friction.default_mu;
    fm.cone_sides = cone_sides;
    for (const auto& o : model.scene().friction.overrides) {
        BodyId a = model.scene().index_of(o.a), b = model.scene().index_of(o.b);
        fm.overrides[{std::min(a, b), std::max(a, b)}] = o.mu;
    }
    return fm;
}

std::vector<Vec3> friction_pyramid(const Vec3& normal, double mu, int sides, const Mat3& frame) {
    auto [lu, lv] = tangent_basis(frame.transpose() * normal);
    const Vec3 u = frame * lu, v = frame * lv;
    std::vector<Vec3> edges;
    edges.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        double theta = 2.0 * std::numbers::pi * k / sides;
        edges.push_back(normal + mu * (std::cos(theta) * u + std::sin(theta) * v));
    }
    return edges;
}

WrenchSet build_wrench_set(std::span<const ContactPatch> patches, const Vec3& com, double mass,
                           const FrictionModel& friction, const StabilityParams& params, const Vec3& gravity,
                           const Mat3& body_frame) {
    const double weight = mass * gravity.norm();
    if (!(weight > 0)) throw Error("mass and gravity must be positive");

    WrenchSet ws;
    for (const auto& patch : patches)
        for (const auto& p : patch.contact_points) ws.rho = std::max(ws.rho, (p - com).norm());
    if (ws.rho == 0.0 && patches.empty()) throw NoContacts("no contact points");
    if (params.rho_mode == RhoMode::Fixed) ws.rho = params.fixed_rho;
    if (!(ws.rho > 0)) ws.rho = 1.0;  // every contact sits at the COM; torques vanish anyway

    ws.force_scale = params.force_cap / weight;
    ws.gravity_wrench.head<3>() = gravity / gravity.norm();
    for (const auto& patch : patches) {
        const double mu = friction.mu(patch.body_a, patch.body_b);
        const auto edges = friction_pyramid(patch.normal, mu, friction.cone_sides, body_frame);
        for (const auto& p : patch.contact_points) {
            const Vec3 lever = p - com;
            for (const auto& f : edges) {
                Wrench w;
                w.head<3>() = ws.force_scale * f;
                w.tail<3>() = ws.force_scale * lever.cross(f) / ws.rho;
                ws.generators.push_back(w);
                ws.edge_forces.push_back(f);
                ws.edge_normals.push_back(patch.normal);
            }
        }
    }
    if (ws.generators.empty()) throw NoContacts("no contact points");
    return ws;
}

StabilityQuality stability_from_wrenches(const WrenchSet& ws, const StabilityParams& params) {
    std::vector<VecX> points;
    points.reserve(ws.generators.size() + 1);
    points.push_back(VecX::Zero(6));
    for (const auto& g : ws.generators) {
        bool duplicate = false;
        for (const auto& p : points) {
            if ((p - g).cwiseAbs().maxCoeff() < 1e-12) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) points.emplace_back(g);
    }
    const VecX query = -ws.gravity_wrench;
    try {
        double margin = convex_hull_margin(points, query, params.hull);
        if (margin < params.min_margin) return StabilityQuality(0.0);
        return StabilityQuality(margin);
    } catch (const DegenerateHull&) {
        return StabilityQuality(0.0);
    }
}

std::vector<ContactPatch> support_patches(const SceneModel& model, BodyId piece, std::span<const BodyId> fixed) {
    model.check_body(piece);
    std::vector<ContactPatch> patches = model.contacts(kTableId, piece);
    for (BodyId b : fixed) {
        if (b == kTableId || b == piece) continue;
        const auto& c = model.contacts(b, piece);
        patches.insert(patches.end(), c.begin(), c.end());
    }
    return patches;
}

StabilityQuality stability_quality(const SceneModel& model, BodyId piece, std::span<const BodyId> fixed,
                                   const StabilityParams& params) {
    const auto patches = support_patches(model, piece, fixed);
    if (patches.empty()) return StabilityQuality(0.0);
    const FrictionModel fm = friction_model(model, params.cone_sides);
    try {
        const WrenchSet ws =
            build_wrench_set(patches, model.com_world(piece), model.mass(piece), fm, params, model.scene().gravity,
                             model.scene().workpieces[static_cast<std::size_t>(piece)].goal.rotation);
        return stability_from_wrenches(ws, params);
    } catch (const NoContacts&) {
        return StabilityQuality(0.0);
    }
}

StabilityQuality stability_quality(const SceneModel& model, BodyId piece, std::uint32_t fixed_mask,
                                   const StabilityParams& params) {
    std::vector<BodyId> fixed;
    for (int k = 0; k < model.size(); ++k)
        if (fixed_mask & (1u << k)) fixed.push_back(k);
    return stability_quality(model, piece, fixed, params);
}

std::vector<StabilityQuality> stability_row(const SceneModel& model, std::span<const BodyId> order,
                                            const StabilityParams& params) {
    std::vector<StabilityQuality> row;
    row.reserve(order.size());
    for (std::size_t j = 0; j < order.size(); ++j)
        row.push_back(stability_quality(model, order[j], order.subspan(0, j), params));
    return row;
}

}  // namespace asmplan
