#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmplan/geometry.hpp"
#include "asmplan/gripper.hpp"

namespace asmplan {

struct Workpiece {
    std::string id;
    std::string name;
    Shape shape;
    Pose goal;
    double mass = 0.0;
    Vec3 com_local = Vec3::Zero();
    std::string color;

    // how the piece was specified, kept for canonical re-serialization
    std::optional<double> density;
    std::optional<double> given_mass;
    std::optional<Vec3> given_com;
    std::string mesh_path;

    Vec3 com_world() const { return goal.apply(com_local); }
};

struct FrictionOverride {
    std::string a;
    std::string b;
    double mu = 0.0;
};

struct FrictionSpec {
    double default_mu = 0.3;
    std::vector<FrictionOverride> overrides;
};

struct Scene {
    std::vector<Workpiece> workpieces;
    double table_height = 0.0;
    Vec3 gravity = Vec3(0.0, 0.0, -9.81);
    FrictionSpec friction;
    GripperSpec gripper;

    int size() const { return static_cast<int>(workpieces.size()); }
    /// Index of the workpiece with this id; "table" maps to kTableId. Throws UnknownBody.
    BodyId index_of(const std::string& id) const;
    const std::string& id_of(BodyId b) const;
};

/// Builds a workpiece from voxels, deriving mass from a density (kg/m^3) and the COM
/// from the cells unless overridden.
Workpiece make_voxel_piece(std::string id, const std::vector<Cell>& voxels, double voxel_size, const Pose& goal,
                           double density = 700.0);

/// Scene prepared for analysis: bodies placed at their goal poses and every pairwise
/// contact computed once. Immutable after construction.
class SceneModel {
public:
    SceneModel(const Scene& scene, const Tolerances& tol);

    const Scene& scene() const { return *scene_; }
    const Tolerances& tolerances() const { return tol_; }
    int size() const { return scene_->size(); }

    const PlacedShape& placed(BodyId b) const;
    Vec3 com_world(BodyId b) const;
    double mass(BodyId b) const;

    /// Patches between `support` (a workpiece or kTableId) and `piece`, normal from support into piece.
    const std::vector<ContactPatch>& contacts(BodyId support, BodyId piece) const;

    /// Bit k set iff workpiece k touches `piece`.
    std::uint32_t neighbor_mask(BodyId piece) const;
    bool touches_table(BodyId piece) const { return !contacts(kTableId, piece).empty(); }

    double mu(BodyId a, BodyId b) const;
    void check_body(BodyId b) const;

private:
    const Scene* scene_;
    Tolerances tol_;
    std::vector<PlacedShape> placed_;
    // contacts_[support + 1][piece]
    std::vector<std::vector<std::vector<ContactPatch>>> contacts_;
    std::vector<std::uint32_t> neighbors_;
    std::map<std::pair<BodyId, BodyId>, double> mu_overrides_;
};

}  // namespace asmplan
