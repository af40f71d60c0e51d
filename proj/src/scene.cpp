#include "asmplan/scene.hpp"

#include <algorithm>

namespace asmplan {

BodyId Scene::index_of(const std::string& id) const {
    if (id == "table") return kTableId;
    for (int i = 0; i < size(); ++i)
        if (workpieces[i].id == id) return i;
    throw UnknownBody("unknown body id '" + id + "'");
}

const std::string& Scene::id_of(BodyId b) const {
    static const std::string table = "table";
    if (b == kTableId) return table;
    if (b < 0 || b >= size()) throw UnknownBody("unknown body index " + std::to_string(b));
    return workpieces[b].id;
}

Workpiece make_voxel_piece(std::string id, const std::vector<Cell>& voxels, double voxel_size, const Pose& goal,
                           double density) {
    Workpiece w;
    w.name = id;
    w.id = std::move(id);
    w.shape = build_shape(voxels, voxel_size);
    w.goal = goal;
    w.density = density;
    w.mass = density * w.shape.volume;
    w.com_local = w.shape.centroid;
    return w;
}

namespace {

ContactPatch flipped(const ContactPatch& p) {
    ContactPatch f = p;
    std::swap(f.body_a, f.body_b);
    f.normal = -p.normal;
    std::reverse(f.polygon.begin(), f.polygon.end());
    for (auto& h : f.holes) std::reverse(h.begin(), h.end());
    return f;
}

}  // namespace

SceneModel::SceneModel(const Scene& scene, const Tolerances& tol) : scene_(&scene), tol_(tol) {
    const int n = scene.size();
    if (n > 32) throw TooManyPieces("at most 32 workpieces are supported by the scene model");
    placed_.reserve(n);
    for (const auto& w : scene.workpieces) placed_.emplace_back(w.shape, w.goal);

    contacts_.assign(n + 1, std::vector<std::vector<ContactPatch>>(n));
    neighbors_.assign(n, 0u);
    for (int i = 0; i < n; ++i) contacts_[0][i] = detect_table_contacts(placed_[i], scene.table_height, tol, i);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            auto patches = detect_contacts(placed_[i], placed_[j], tol, i, j);
            if (patches.empty()) continue;
            neighbors_[i] |= 1u << j;
            neighbors_[j] |= 1u << i;
            for (const auto& p : patches) contacts_[j + 1][i].push_back(flipped(p));
            contacts_[i + 1][j] = std::move(patches);
        }
    }

    for (const auto& o : scene.friction.overrides) {
        BodyId a = scene.index_of(o.a), b = scene.index_of(o.b);
        mu_overrides_[{std::min(a, b), std::max(a, b)}] = o.mu;
    }
}

void SceneModel::check_body(BodyId b) const {
    if (b < 0 || b >= size()) throw UnknownBody("unknown workpiece index " + std::to_string(b));
}

const PlacedShape& SceneModel::placed(BodyId b) const {
    check_body(b);
    return placed_[b];
}

Vec3 SceneModel::com_world(BodyId b) const {
    check_body(b);
    return scene_->workpieces[b].com_world();
}

double SceneModel::mass(BodyId b) const {
    check_body(b);
    return scene_->workpieces[b].mass;
}

const std::vector<ContactPatch>& SceneModel::contacts(BodyId support, BodyId piece) const {
    check_body(piece);
    if (support != kTableId) check_body(support);
    return contacts_[support + 1][piece];
}

std::uint32_t SceneModel::neighbor_mask(BodyId piece) const {
    check_body(piece);
    return neighbors_[piece];
}

double SceneModel::mu(BodyId a, BodyId b) const {
    auto it = mu_overrides_.find({std::min(a, b), std::max(a, b)});
    return it == mu_overrides_.end() ? scene_->friction.default_mu : it->second;
}

}  // namespace asmplan
