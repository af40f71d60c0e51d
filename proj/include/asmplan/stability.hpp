#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "asmplan/geometry.hpp"
#include "asmplan/hull.hpp"
#include "asmplan/scene.hpp"

namespace asmplan {

using Wrench = Eigen::Matrix<double, 6, 1>;

struct FrictionModel {
    double default_mu = 0.3;
    std::map<std::pair<BodyId, BodyId>, double> overrides;  // keyed (min id, max id)
    int cone_sides = 6;

    double mu(BodyId a, BodyId b) const {
        auto it = overrides.find({std::min(a, b), std::max(a, b)});
        return it == overrides.end() ? default_mu : it->second;
    }
};

/// Resistable wrenches of one body's contacts: generators in normalized units
/// (force / (m |g|), torque / (m |g| rho)) plus the normalized gravity wrench.
struct WrenchSet {
    std::vector<Wrench> generators;
    std::vector<Vec3> edge_forces;  // unit-normal cone edge behind each generator
    std::vector<Vec3> edge_normals; // contact normal of that edge
    Wrench gravity_wrench = Wrench::Zero();
    double rho = 0.0;
    double force_scale = 0.0;       // force_cap / (m |g|)
};

/// Extended non-negative stability margin: 0, finite positive, or +inf (held piece).
class StabilityQuality {
public:
    constexpr StabilityQuality() = default;
    constexpr explicit StabilityQuality(double v) : value_(v) {}
    static constexpr StabilityQuality infinite() { return StabilityQuality(std::numeric_limits<double>::infinity()); }

    constexpr double value() const { return value_; }
    constexpr bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
    constexpr bool is_zero() const { return value_ == 0.0; }
    constexpr bool positive() const { return value_ > 0.0; }

    friend constexpr bool operator==(StabilityQuality a, StabilityQuality b) { return a.value_ == b.value_; }
    friend constexpr bool operator<(StabilityQuality a, StabilityQuality b) { return a.value_ < b.value_; }

private:
    double value_ = 0.0;
};

enum class RhoMode { MaxContactDistance, Fixed };

struct StabilityParams {
    double force_cap = 0.0;  // newtons; <= 0 means 10 x m|g| of the heaviest workpiece
    RhoMode rho_mode = RhoMode::MaxContactDistance;
    double fixed_rho = 0.05;
    double min_margin = 1e-6;
    int cone_sides = 6;
    HullMarginOptions hull;
};

/// Params with force_cap resolved against the scene.
StabilityParams resolve_params(const Scene& scene, StabilityParams params);

FrictionModel friction_model(const SceneModel& model, int cone_sides);

/// Edges of the linearized friction cone: unit component along the normal and
/// tangential magnitude mu, at evenly spaced azimuths. The first azimuth is
/// tangent_basis of the normal expressed in `frame` (the analyzed body's orientation),
/// so the pyramid turns with the body.
std::vector<Vec3> friction_pyramid(const Vec3& normal, double mu, int sides, const Mat3& frame = Mat3::Identity());

/// Throws NoContacts when there are no contact points.
WrenchSet build_wrench_set(std::span<const ContactPatch> patches, const Vec3& com, double mass,
                           const FrictionModel& friction, const StabilityParams& params, const Vec3& gravity,
                           const Mat3& body_frame = Mat3::Identity());

/// Margin of -gravity_wrench inside conv({0} U generators); 0 when degenerate or below min_margin.
StabilityQuality stability_from_wrenches(const WrenchSet& ws, const StabilityParams& params);

/// Patches acting on `piece` from the table and every body in `fixed`.
std::vector<ContactPatch> support_patches(const SceneModel& model, BodyId piece, std::span<const BodyId> fixed);

StabilityQuality stability_quality(const SceneModel& model, BodyId piece, std::span<const BodyId> fixed,
                                   const StabilityParams& params);
/// Same, with the fixed set given as a bit mask over workpiece indices.
StabilityQuality stability_quality(const SceneModel& model, BodyId piece, std::uint32_t fixed_mask,
                                   const StabilityParams& params);

std::vector<StabilityQuality> stability_row(const SceneModel& model, std::span<const BodyId> order,
                                            const StabilityParams& params);

}  // namespace asmplan
