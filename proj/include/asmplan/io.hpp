#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/planner.hpp"
#include "asmplan/scene.hpp"

namespace asmplan {

inline constexpr const char* kToolVersion = "0.1.0";

/// Parses and validates a scene file. Throws ParseError (malformed JSON or a field of
/// the wrong type, with its location), ValidationError (every broken invariant) or IoError.
Scene load_scene(const std::filesystem::path& path);
Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir = ".");
/// Canonical JSON text of a scene (sorted keys, %.9g numbers).
std::string scene_to_json(const Scene& scene);
void save_scene(const Scene& scene, const std::filesystem::path& path);

/// Reads an OBJ file (v / f records, polygons fan-triangulated).
std::pair<std::vector<Vec3>, std::vector<std::array<int, 3>>> read_obj(const std::filesystem::path& path);

struct PlanGrasp {
    Vec3 position = Vec3::Zero();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    double opening = 0.0;

    static PlanGrasp from(const Grasp& g);
    Pose pose() const { return Pose::from_quaternion(rotation, position); }
};

struct PlanStep {
    std::string workpiece;
    double stability = 0.0;      // may be +inf
    double raw_stability = 0.0;
    int graspability = 0;
    double assemblability = 0.0;
    double margin = 0.0;
    Vec3 direction = -Vec3::UnitZ();
    std::vector<PlanGrasp> grasps;
    std::optional<PlanGrasp> assisting_grasp;
    std::optional<std::string> held;
};

struct PlanMatrices {
    std::vector<std::vector<std::string>> orders;
    std::vector<std::vector<double>> stability;
    std::vector<std::vector<int>> graspability;
    std::vector<std::vector<double>> assemblability;
    std::vector<std::vector<Vec3>> directions;
    std::vector<double> scores;
};

struct PlanMetadata {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string tool_version = kToolVersion;
    bool surrogate_quality = true;
    double retract_distance = 0.15;
};

struct PlanFile {
    std::vector<std::string> order;
    std::vector<PlanStep> steps;
    double score = 0.0;
    bool used_assist = false;
    std::optional<PlanMatrices> matrices;
    PlanMetadata metadata;
};

/// FNV-1a (64-bit, hex) of the canonical configuration text.
std::string config_hash(const PlannerConfig& config);
std::string config_to_json(const PlannerConfig& config);

PlanFile make_plan_file(const Scene& scene, const OrderEvaluation& ev, const PlannerConfig& config);
PlanFile make_plan_file(const Scene& scene, const PlanResult& result, const PlannerConfig& config, bool full);

/// Canonical plan text: sorted keys, numbers in shortest round-trip form.
std::string plan_to_json(const PlanFile& plan);
PlanFile parse_plan(const std::string& text);
void save_plan(const PlanFile& plan, const std::filesystem::path& path);
PlanFile load_plan(const std::filesystem::path& path);

/// Writes step_1.obj .. step_n.obj into `dir`, one group per body and gripper.
void export_steps(const PlanFile& plan, const Scene& scene, const std::filesystem::path& dir);

}  // namespace asmplan
