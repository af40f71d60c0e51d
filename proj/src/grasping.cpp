#include "asmplan/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace asmplan {

namespace {

constexpr double kAngleTol = 1e-6;

double shape_scale(const Shape& s) {
    double r = 0.0;
    for (const auto& v : s.vertices) r = std::max(r, v.cwiseAbs().maxCoeff());
    return std::max(r, 1e-9);
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

bool share_edge(const Facet& a, const Facet& b, double eps) {
    int shared = 0;
    for (const auto& p : a.loop)
        for (const auto& q : b.loop)
            if ((p - q).cwiseAbs().maxCoeff() <= eps) ++shared;
    return shared >= 2;
}

planar::Polygon project(const std::vector<Vec3>& loop, const Vec3& u, const Vec3& v, bool reverse) {
    planar::Polygon poly;
    poly.reserve(loop.size());
    for (const auto& p : loop) poly.emplace_back(p.dot(u), p.dot(v));
    if (reverse) std::reverse(poly.begin(), poly.end());
    return poly;
}

Aabb part_box(const ConvexPart& part) {
    Aabb b;
    for (const auto& v : part.vertices) b.extend(v);
    return b;
}

bool part_hits(const ConvexPart& part, const Aabb& box, const PlacedShape& body, double gap) {
    if (!box.overlaps(body.box, gap)) return false;
    for (std::size_t k = 0; k < body.parts.size(); ++k) {
        if (!box.overlaps(body.part_boxes[k], gap)) continue;
        if (penetration_depth(part, body.parts[k]) > gap) return true;
    }
    return false;
}

Vec3 gravity_direction(const Scene& scene) {
    const double g = scene.gravity.norm();
    return g > 0 ? Vec3(scene.gravity / g) : Vec3(-Vec3::UnitZ());
}

}  // namespace

std::vector<FacetCluster> facet_clusters(const Shape& shape) {
    const double eps = 1e-9 * shape_scale(shape);
    const int n = static_cast<int>(shape.facets.size());
    std::vector<double> offsets(n);
    for (int i = 0; i < n; ++i) offsets[i] = shape.facets[i].normal.dot(shape.facets[i].loop.front());

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = shape.facets[i];
            const auto& b = shape.facets[j];
            if ((a.normal - b.normal).norm() > kAngleTol) continue;
            if (std::abs(offsets[i] - offsets[j]) > eps) continue;
            if (!share_edge(a, b, eps)) continue;
            parent[find_root(parent, j)] = find_root(parent, i);
        }
    }

    std::vector<FacetCluster> clusters;
    std::vector<int> cluster_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find_root(parent, i);
        if (cluster_of[r] < 0) {
            cluster_of[r] = static_cast<int>(clusters.size());
            clusters.push_back({shape.facets[i].normal, offsets[i], {}});
        }
        clusters[cluster_of[r]].facets.push_back(i);
    }
    return clusters;
}

std::vector<FacetPair> enumerate_facet_pairs(const Shape& shape, const GripperSpec& gripper) {
    const double scale = shape_scale(shape);
    const double min_area = 1e-12 * scale * scale;
    const auto clusters = facet_clusters(shape);
    std::vector<FacetPair> pairs;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            const auto& a = clusters[i];
            const auto& b = clusters[j];
            if ((a.normal + b.normal).norm() > kAngleTol) continue;
            const double sep = a.offset + b.offset;
            if (!(sep > 0) || sep > gripper.max_opening) continue;

            FacetPair pair;
            pair.cluster_a = static_cast<int>(i);
            pair.cluster_b = static_cast<int>(j);
            pair.normal = a.normal;
            pair.separation = sep;
            std::tie(pair.u, pair.v) = tangent_basis(a.normal);
            for (int fa : a.facets) {
                const auto pa = project(shape.facets[fa].loop, pair.u, pair.v, false);
                for (int fb : b.facets) {
                    const auto pb = project(shape.facets[fb].loop, pair.u, pair.v, true);
                    auto piece = planar::clip_convex(pa, pb);
                    if (piece.size() >= 3 && planar::signed_area(piece) > min_area) pair.overlap.push_back(std::move(piece));
                }
            }
            if (!pair.overlap.empty()) pairs.push_back(std::move(pair));
        }
    }
    return pairs;
}

std::vector<Grasp> sample_grasps(const Shape& shape, const GripperSpec& gripper, const GraspSampling& sampling,
                                 const Vec3& preferred_approach) {
    if (!sampling.valid()) throw Error("grasp sampling needs pitch > 0 and at least one roll");
    const auto clusters = facet_clusters(shape);
    const auto pairs = enumerate_facet_pairs(shape, gripper);
    const double eps = 1e-9 * shape_scale(shape);

    std::vector<Grasp> grasps;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& pair = pairs[pi];
        Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
        Vec2 hi = -lo;
        for (const auto& poly : pair.overlap)
            for (const auto& p : poly) {
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
            }
        const Vec2 extent = hi - lo;
        const int nu = std::max(1, static_cast<int>(std::floor(extent.x() / sampling.pitch + 1e-9)));
        const int nv = std::max(1, static_cast<int>(std::floor(extent.y() / sampling.pitch + 1e-9)));

        const Vec3 y = pair.normal;
        Vec3 base = preferred_approach - preferred_approach.dot(y) * y;
        if (base.norm() < 1e-6) base = tangent_basis(y).first;
        base.normalize();
        const Vec3 side = y.cross(base);
        const double off_a = clusters[pair.cluster_a].offset;

        for (int i = 0; i < nu; ++i) {
            for (int j = 0; j < nv; ++j) {
                const Vec2 q(lo.x() + (i + 0.5) * extent.x() / nu, lo.y() + (j + 0.5) * extent.y() / nv);
                const bool inside = std::any_of(pair.overlap.begin(), pair.overlap.end(),
                                                [&](const planar::Polygon& poly) { return planar::contains(poly, q, eps); });
                if (!inside) continue;
                const Vec3 ca = off_a * y + q.x() * pair.u + q.y() * pair.v;
                const Vec3 cb = ca - pair.separation * y;
                for (int r = 0; r < sampling.rolls; ++r) {
                    const double theta = std::numbers::pi * r / sampling.rolls;
                    const Vec3 approach = std::cos(theta) * base + std::sin(theta) * side;
                    Grasp g;
                    g.pose.rotation.col(1) = y;
                    g.pose.rotation.col(2) = -approach;
                    g.pose.rotation.col(0) = y.cross(Vec3(-approach));
                    g.pose.translation = 0.5 * (ca + cb);
                    g.opening = pair.separation;
                    g.contacts = {ca, cb};
                    g.pair_index = static_cast<int>(pi);
                    g.grid_index = i * nv + j;
                    g.roll_index = r;
                    grasps.push_back(g);
                }
            }
        }
    }
    return grasps;
}

std::array<ConvexPart, 3> gripper_parts(const GripperSpec& spec, const Grasp& grasp) {
    const double hw = 0.5 * spec.finger_width;
    const double o = 0.5 * grasp.opening;
    const double t = spec.finger_thickness;
    const double z0 = -hw, z1 = spec.finger_length - hw, z2 = z1 + spec.palm_depth;
    const double py = 0.5 * spec.max_opening + t;
    return {make_box_part(Vec3(-hw, o, z0), Vec3(hw, o + t, z1)).transformed(grasp.pose),
            make_box_part(Vec3(-hw, -o - t, z0), Vec3(hw, -o, z1)).transformed(grasp.pose),
            make_box_part(Vec3(-hw, -py, z1), Vec3(hw, py, z2)).transformed(grasp.pose)};
}

std::array<Shape, 3> gripper_box_shapes(const GripperSpec& spec, double opening) {
    const double hw = 0.5 * spec.finger_width;
    const double o = 0.5 * opening;
    const double t = spec.finger_thickness;
    const double z0 = -hw, z1 = spec.finger_length - hw, z2 = z1 + spec.palm_depth;
    const double py = 0.5 * spec.max_opening + t;
    return {build_box_shape(Vec3(-hw, o, z0), Vec3(hw, o + t, z1)),
            build_box_shape(Vec3(-hw, -o - t, z0), Vec3(hw, -o, z1)),
            build_box_shape(Vec3(-hw, -py, z1), Vec3(hw, py, z2))};
}

GraspBlockers grasp_blockers(const GripperSpec& spec, const Grasp& grasp, const SceneModel& model, BodyId piece) {
    const double gap = model.tolerances().contact_gap;
    const double h = model.scene().table_height;
    GraspBlockers out;
    for (const auto& part : gripper_parts(spec, grasp)) {
        const Aabb box = part_box(part);
        if (!out.table && box.lo.z() < h + gap && halfspace_penetration(part, h) > gap) out.table = true;
        for (int k = 0; k < model.size(); ++k) {
            if (k == piece) {
                if (!out.self && part_hits(part, box, model.placed(k), gap)) out.self = true;
            } else if (!(out.bodies & (1u << k)) && part_hits(part, box, model.placed(k), gap)) {
                out.bodies |= 1u << k;
            }
        }
    }
    return out;
}

std::vector<Grasp> filter_accessible(std::span<const Grasp> grasps, const GripperSpec& spec, const PlacedShape& piece,
                                     std::span<const PlacedShape* const> obstacles,
                                     const std::optional<double>& table_height, const Tolerances& tol) {
    const double gap = tol.contact_gap;
    std::vector<Grasp> out;
    for (const auto& g : grasps) {
        bool blocked = false;
        for (const auto& part : gripper_parts(spec, g)) {
            const Aabb box = part_box(part);
            if (table_height && halfspace_penetration(part, *table_height) > gap) blocked = true;
            if (!blocked && part_hits(part, box, piece, gap)) blocked = true;
            for (std::size_t k = 0; !blocked && k < obstacles.size(); ++k)
                if (part_hits(part, box, *obstacles[k], gap)) blocked = true;
            if (blocked) break;
        }
        if (!blocked) out.push_back(g);
    }
    return out;
}

std::vector<Grasp> candidate_grasps(const SceneModel& model, BodyId piece, const GraspSampling& sampling) {
    const auto& w = model.scene().workpieces.at(static_cast<std::size_t>(piece));
    const Vec3 down_local = w.goal.rotation.transpose() * gravity_direction(model.scene());
    auto grasps = sample_grasps(w.shape, model.scene().gripper, sampling, down_local);
    for (auto& g : grasps) g = g.transformed(w.goal);
    return grasps;
}

std::vector<Grasp> accessible_grasps(const SceneModel& model, BodyId piece, std::span<const Grasp> grasps,
                                     std::uint32_t obstacle_mask) {
    std::vector<const PlacedShape*> obstacles;
    for (int k = 0; k < model.size(); ++k)
        if (k != piece && (obstacle_mask & (1u << k))) obstacles.push_back(&model.placed(k));
    return filter_accessible(grasps, model.scene().gripper, model.placed(piece), obstacles, model.scene().table_height,
                             model.tolerances());
}

GraspabilityRow graspability_row(const SceneModel& model, std::span<const BodyId> order,
                                 const GraspSampling& sampling) {
    GraspabilityRow row;
    std::uint32_t mask = 0;
    for (BodyId piece : order) {
        const auto candidates = candidate_grasps(model, piece, sampling);
        row.grasps.push_back(accessible_grasps(model, piece, candidates, mask));
        row.counts.push_back(static_cast<int>(row.grasps.back().size()));
        mask |= 1u << piece;
    }
    return row;
}

}  // namespace asmplan
