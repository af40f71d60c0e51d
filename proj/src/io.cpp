#include "asmplan/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace asmplan {

using json = nlohmann::json;

namespace {

double r9(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return r9(x);
}

json vec(const Vec3& v) { return json::array({num(v.x()), num(v.y()), num(v.z())}); }

// plan quantities keep every bit so stored rows reproduce stored scores
json exact(double x) {
    if (!std::isfinite(x)) return num(x);
    return x;
}

json exact_vec(const Vec3& v) { return json::array({exact(v.x()), exact(v.y()), exact(v.z())}); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(what + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what());
    }
}

/// Typed access to a JSON tree that reports the dotted field path on mismatch.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

    Reader at(const char* key) const {
        if (!has(key)) fail(sub(key), "missing required field");
        return {j_.at(key), sub(key)};
    }
    Reader at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

    double number() const {
        if (j_.is_number()) return j_.get<double>();
        if (j_.is_string()) {
            const auto& s = j_.get_ref<const std::string&>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        }
        fail(path_, "expected a number");
    }
    long long integer() const {
        if (!j_.is_number_integer()) fail(path_, "expected an integer");
        return j_.get<long long>();
    }
    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0))
            fail(path_, "expected a non-negative integer");
        return j_.get<std::uint64_t>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) fail(path_, "expected true or false");
        return j_.get<bool>();
    }
    std::string string() const {
        if (!j_.is_string()) fail(path_, "expected a string");
        return j_.get<std::string>();
    }
    std::size_t array_size() const {
        if (!j_.is_array()) fail(path_, "expected an array");
        return j_.size();
    }
    void object() const {
        if (!j_.is_object()) fail(path_, "expected an object");
    }
    template <int N>
    Eigen::Matrix<double, N, 1> vector() const {
        if (array_size() != static_cast<std::size_t>(N)) fail(path_, "expected " + std::to_string(N) + " numbers");
        Eigen::Matrix<double, N, 1> v;
        for (int k = 0; k < N; ++k) v[k] = at(static_cast<std::size_t>(k)).number();
        return v;
    }

    double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ParseError("field '" + where + "': " + what);
    }

private:
    std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
};

json quaternion_json(const Eigen::Quaterniond& q) {
    return json::array({num(q.w()), num(q.x()), num(q.y()), num(q.z())});
}

Eigen::Quaterniond quaternion_from(const Reader& r) {
    const Eigen::Vector4d q = r.vector<4>();
    return Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
}

json grasp_json(const PlanGrasp& g) {
    const auto& q = g.rotation;
    return json{{"opening", exact(g.opening)},
                {"position", exact_vec(g.position)},
                {"rotation", json::array({exact(q.w()), exact(q.x()), exact(q.y()), exact(q.z())})}};
}

PlanGrasp grasp_from(const Reader& r) {
    PlanGrasp g;
    g.opening = r.at("opening").number();
    g.position = r.at("position").vector<3>();
    g.rotation = quaternion_from(r.at("rotation"));
    return g;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

std::pair<std::vector<Vec3>, std::vector<std::array<int, 3>>> read_obj(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        auto bad = [&](const std::string& why) {
            throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": " + why);
        };
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z())) bad("vertex needs three coordinates");
            vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                const int i = std::atoi(tok.substr(0, tok.find('/')).c_str());
                if (i == 0) bad("invalid face index '" + tok + "'");
                idx.push_back(i > 0 ? i - 1 : static_cast<int>(vertices.size()) + i);
            }
            if (idx.size() < 3) bad("face needs at least three vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) triangles.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return {std::move(vertices), std::move(triangles)};
}

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_json(text, "scene");
    const Reader root(doc, "");
    root.object();

    Scene scene;
    std::vector<std::string> problems;
    scene.table_height = root.number_or("table_height", 0.0);
    if (root.has("gravity")) scene.gravity = root.at("gravity").vector<3>();
    if (!(scene.gravity.norm() > 0)) problems.push_back("gravity must be non-zero");

    if (root.has("friction")) {
        const Reader f = root.at("friction");
        f.object();
        scene.friction.default_mu = f.number_or("default_mu", scene.friction.default_mu);
        if (f.has("overrides")) {
            const Reader list = f.at("overrides");
            for (std::size_t i = 0; i < list.array_size(); ++i) {
                const Reader o = list.at(i);
                scene.friction.overrides.push_back({o.at("a").string(), o.at("b").string(), o.at("mu").number()});
            }
        }
    }
    if (!(scene.friction.default_mu >= 0)) problems.push_back("friction.default_mu must be >= 0");

    if (root.has("gripper")) {
        const Reader g = root.at("gripper");
        g.object();
        auto& G = scene.gripper;
        G.max_opening = g.number_or("max_opening", G.max_opening);
        G.finger_width = g.number_or("finger_width", G.finger_width);
        G.finger_length = g.number_or("finger_length", G.finger_length);
        G.finger_thickness = g.number_or("finger_thickness", G.finger_thickness);
        G.palm_depth = g.number_or("palm_depth", G.palm_depth);
    }
    if (!scene.gripper.valid())
        problems.push_back("gripper dimensions must be positive and finger_length must exceed finger_width");

    const Reader list = root.at("workpieces");
    if (list.array_size() == 0) problems.push_back("workpieces must not be empty");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.array_size(); ++i) {
        const Reader r = list.at(i);
        r.object();
        const std::string where = r.path();
        Workpiece w;
        w.id = r.at("id").string();
        w.name = r.has("name") ? r.at("name").string() : w.id;
        if (r.has("color")) w.color = r.at("color").string();
        if (w.id.empty()) problems.push_back(where + ": id must not be empty");
        if (w.id == "table") problems.push_back(where + ": id 'table' is reserved");
        if (!ids.insert(w.id).second) problems.push_back("duplicate workpiece id '" + w.id + "'");

        if (r.has("goal_pose")) {
            const Reader p = r.at("goal_pose");
            p.object();
            Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
            if (p.has("rotation")) q = quaternion_from(p.at("rotation"));
            const Vec3 t = p.has("translation") ? Vec3(p.at("translation").vector<3>()) : Vec3::Zero();
            if (std::abs(q.norm() - 1.0) > 1e-6) {
                problems.push_back(where + ".goal_pose.rotation: quaternion must have unit length");
            } else {
                w.goal = Pose::from_quaternion(q, t);
            }
        }

        const bool has_voxels = r.has("voxels"), has_mesh = r.has("mesh_path");
        if (has_voxels == has_mesh) {
            problems.push_back(where + ": exactly one of voxels or mesh_path is required");
        } else {
            try {
                if (has_voxels) {
                    const Reader v = r.at("voxels");
                    std::vector<Cell> cells;
                    for (std::size_t k = 0; k < v.array_size(); ++k) {
                        const Reader c = v.at(k);
                        if (c.array_size() != 3) Reader::fail(c.path(), "expected three integers");
                        cells.push_back({static_cast<int>(c.at(std::size_t{0}).integer()),
                                         static_cast<int>(c.at(std::size_t{1}).integer()),
                                         static_cast<int>(c.at(std::size_t{2}).integer())});
                    }
                    const double size = r.at("voxel_size").number();
                    if (!(size > 0)) {
                        problems.push_back(where + ".voxel_size must be positive");
                    } else {
                        w.shape = build_shape(cells, size);
                    }
                } else {
                    w.mesh_path = r.at("mesh_path").string();
                    auto [verts, tris] = read_obj(base_dir / w.mesh_path);
                    w.shape = build_mesh_shape(std::move(verts), std::move(tris));
                }
            } catch (const EmptyShape& e) {
                problems.push_back(where + ": " + e.what());
            } catch (const Disconnected& e) {
                problems.push_back(where + ": " + e.what());
            } catch (const InvalidMesh& e) {
                problems.push_back(where + ": " + e.what());
            }
        }

        if (r.has("density") == r.has("mass")) {
            problems.push_back(where + ": exactly one of density or mass is required");
        } else if (r.has("density")) {
            w.density = r.at("density").number();
            if (!(*w.density > 0)) problems.push_back(where + ".density must be positive");
            w.mass = *w.density * w.shape.volume;
        } else {
            w.given_mass = r.at("mass").number();
            if (!(*w.given_mass > 0)) problems.push_back(where + ".mass must be positive");
            w.mass = *w.given_mass;
        }
        if (r.has("com")) w.given_com = r.at("com").vector<3>();
        w.com_local = w.given_com ? *w.given_com : w.shape.centroid;
        scene.workpieces.push_back(std::move(w));
    }

    for (const auto& o : scene.friction.overrides) {
        for (const auto* id : {&o.a, &o.b})
            if (*id != "table" && !ids.count(*id)) problems.push_back("friction override names unknown body '" + *id + "'");
        if (!(o.mu >= 0)) problems.push_back("friction override mu must be >= 0");
    }
    if (scene.size() > 32) problems.push_back("at most 32 workpieces are supported");

    if (problems.empty()) {
        try {
            const SceneModel model(scene, Tolerances{});
            (void)model;
        } catch (const Interpenetration& e) {
            problems.push_back(e.what());
        }
        for (const auto& w : scene.workpieces) {
            const PlacedShape placed(w.shape, w.goal);
            if (collides_with_table(placed, scene.table_height, Tolerances{}.contact_gap))
                problems.push_back("workpiece '" + w.id + "' penetrates the table");
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return scene;
}

Scene load_scene(const std::filesystem::path& path) {
    return parse_scene(read_file(path), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string scene_to_json(const Scene& scene) {
    json doc;
    doc["table_height"] = num(scene.table_height);
    doc["gravity"] = vec(scene.gravity);
    json overrides = json::array();
    for (const auto& o : scene.friction.overrides) overrides.push_back({{"a", o.a}, {"b", o.b}, {"mu", num(o.mu)}});
    doc["friction"] = {{"default_mu", num(scene.friction.default_mu)}, {"overrides", overrides}};
    const auto& g = scene.gripper;
    doc["gripper"] = {{"max_opening", num(g.max_opening)},       {"finger_width", num(g.finger_width)},
                      {"finger_length", num(g.finger_length)},   {"finger_thickness", num(g.finger_thickness)},
                      {"palm_depth", num(g.palm_depth)}};
    json pieces = json::array();
    for (const auto& w : scene.workpieces) {
        json p;
        p["id"] = w.id;
        p["name"] = w.name;
        if (!w.color.empty()) p["color"] = w.color;
        if (w.mesh_path.empty()) {
            json cells = json::array();
            for (const auto& c : w.shape.voxels) cells.push_back({c[0], c[1], c[2]});
            p["voxels"] = cells;
            p["voxel_size"] = num(w.shape.voxel_size);
        } else {
            p["mesh_path"] = w.mesh_path;
        }
        p["goal_pose"] = {{"rotation", quaternion_json(w.goal.quaternion())}, {"translation", vec(w.goal.translation)}};
        if (w.given_mass) {
            p["mass"] = num(*w.given_mass);
        } else {
            p["density"] = num(w.density.value_or(w.mass / w.shape.volume));
        }
        if (w.given_com) p["com"] = vec(*w.given_com);
        pieces.push_back(p);
    }
    doc["workpieces"] = pieces;
    return doc.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::filesystem::path& path) { write_file(path, scene_to_json(scene)); }

PlanGrasp PlanGrasp::from(const Grasp& g) {
    PlanGrasp p;
    p.position = g.pose.translation;
    p.rotation = g.pose.quaternion();
    p.opening = g.opening;
    return p;
}

std::string config_to_json(const PlannerConfig& c) {
    json doc;
    doc["assist"] = {{"extra_hands", c.assist.extra_hands}, {"retract_distance", num(c.assist.retract_distance)}};
    doc["max_pieces"] = c.max_pieces;
    doc["prefer_no_assist"] = c.prefer_no_assist;
    doc["s_cap"] = num(c.s_cap);
    doc["sampling"] = {{"pitch", num(c.sampling.pitch)}, {"rolls", c.sampling.rolls}};
    doc["stability"] = {{"cone_sides", c.stability.cone_sides},
                        {"fixed_rho", num(c.stability.fixed_rho)},
                        {"force_cap", num(c.stability.force_cap)},
                        {"max_exact_points", c.stability.hull.max_exact_points},
                        {"min_margin", num(c.stability.min_margin)},
                        {"rho_mode", c.stability.rho_mode == RhoMode::Fixed ? "fixed" : "max_contact_distance"}};
    doc["tolerances"] = {{"contact_gap", num(c.tolerances.contact_gap)},
                         {"min_patch_area", num(c.tolerances.min_patch_area)},
                         {"sweep_steps", c.tolerances.sweep_steps}};
    return doc.dump();
}

std::string config_hash(const PlannerConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config_to_json(config))));
    return buf;
}

PlanFile make_plan_file(const Scene& scene, const OrderEvaluation& ev, const PlannerConfig& config) {
    PlanFile plan;
    plan.metadata.seed = config.seed;
    plan.metadata.config_hash = config_hash(config);
    plan.metadata.retract_distance = config.assist.retract_distance;
    plan.score = ev.score;
    plan.used_assist = ev.uses_assist();
    for (std::size_t j = 0; j < ev.order.size(); ++j) {
        PlanStep step;
        step.workpiece = scene.id_of(ev.order[j]);
        step.stability = ev.s_row[j].value();
        step.raw_stability = ev.raw_s[j].value();
        step.graspability = ev.g_row[j];
        step.assemblability = ev.a_row[j];
        step.margin = ev.directions[j].margin;
        step.direction = ev.directions[j].direction;
        if (j < ev.grasps.size())
            for (const auto& g : ev.grasps[j]) step.grasps.push_back(PlanGrasp::from(g));
        if (ev.assist) {
            if (auto held = ev.assist->held_at(j)) {
                step.held = scene.id_of(*held);
                if (!ev.assist->chosen[j].empty() && ev.assist->chosen[j].front())
                    step.assisting_grasp = PlanGrasp::from(*ev.assist->chosen[j].front());
            }
        }
        plan.order.push_back(step.workpiece);
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

PlanFile make_plan_file(const Scene& scene, const PlanResult& result, const PlannerConfig& config, bool full) {
    PlanFile plan = make_plan_file(scene, result.optimal, config);
    plan.metadata.seed = result.seed;
    if (full) {
        PlanMatrices m;
        for (const auto& ev : result.evaluations) {
            std::vector<std::string> ids;
            std::vector<double> s;
            std::vector<Vec3> d;
            for (std::size_t j = 0; j < ev.order.size(); ++j) {
                ids.push_back(scene.id_of(ev.order[j]));
                s.push_back(ev.s_row[j].value());
                d.push_back(ev.directions[j].direction);
            }
            m.orders.push_back(std::move(ids));
            m.stability.push_back(std::move(s));
            m.graspability.push_back(ev.g_row);
            m.assemblability.push_back(ev.a_row);
            m.directions.push_back(std::move(d));
            m.scores.push_back(ev.score);
        }
        plan.matrices = std::move(m);
    }
    return plan;
}

std::string plan_to_json(const PlanFile& plan) {
    json doc;
    doc["metadata"] = {{"config_hash", plan.metadata.config_hash},
                       {"retract_distance", exact(plan.metadata.retract_distance)},
                       {"seed", plan.metadata.seed},
                       {"surrogate_quality", plan.metadata.surrogate_quality},
                       {"tool_version", plan.metadata.tool_version}};
    doc["order"] = plan.order;
    doc["score"] = exact(plan.score);
    doc["used_assist"] = plan.used_assist;
    json steps = json::array();
    for (const auto& s : plan.steps) {
        json grasps = json::array();
        for (const auto& g : s.grasps) grasps.push_back(grasp_json(g));
        steps.push_back({{"workpiece", s.workpiece},
                         {"stability", exact(s.stability)},
                         {"raw_stability", exact(s.raw_stability)},
                         {"graspability", s.graspability},
                         {"assemblability", exact(s.assemblability)},
                         {"margin", exact(s.margin)},
                         {"direction", exact_vec(s.direction)},
                         {"grasps", grasps},
                         {"assisting_grasp", s.assisting_grasp ? grasp_json(*s.assisting_grasp) : json(nullptr)},
                         {"held", s.held ? json(*s.held) : json(nullptr)}});
    }
    doc["steps"] = steps;
    if (plan.matrices) {
        const auto& m = *plan.matrices;
        json S = json::array(), A = json::array(), D = json::array(), scores = json::array();
        for (const auto& row : m.stability) {
            json r = json::array();
            for (double v : row) r.push_back(exact(v));
            S.push_back(r);
        }
        for (const auto& row : m.assemblability) {
            json r = json::array();
            for (double v : row) r.push_back(exact(v));
            A.push_back(r);
        }
        for (const auto& row : m.directions) {
            json r = json::array();
            for (const auto& v : row) r.push_back(exact_vec(v));
            D.push_back(r);
        }
        for (double v : m.scores) scores.push_back(exact(v));
        doc["matrices"] = {{"orders", m.orders},   {"stability", S},           {"graspability", m.graspability},
                           {"assemblability", A},  {"directions", D},          {"scores", scores}};
    }
    return doc.dump(2) + "\n";
}

PlanFile parse_plan(const std::string& text) {
    const json doc = parse_json(text, "plan");
    const Reader root(doc, "");
    root.object();
    PlanFile plan;
    const Reader meta = root.at("metadata");
    plan.metadata.config_hash = meta.at("config_hash").string();
    plan.metadata.retract_distance = meta.number_or("retract_distance", 0.15);
    plan.metadata.seed = meta.at("seed").unsigned_integer();
    plan.metadata.surrogate_quality = meta.at("surrogate_quality").boolean();
    plan.metadata.tool_version = meta.at("tool_version").string();
    const Reader order = root.at("order");
    for (std::size_t i = 0; i < order.array_size(); ++i) plan.order.push_back(order.at(i).string());
    plan.score = root.at("score").number();
    plan.used_assist = root.at("used_assist").boolean();
    const Reader steps = root.at("steps");
    for (std::size_t i = 0; i < steps.array_size(); ++i) {
        const Reader s = steps.at(i);
        PlanStep step;
        step.workpiece = s.at("workpiece").string();
        step.stability = s.at("stability").number();
        step.raw_stability = s.at("raw_stability").number();
        step.graspability = static_cast<int>(s.at("graspability").integer());
        step.assemblability = s.at("assemblability").number();
        step.margin = s.at("margin").number();
        step.direction = s.at("direction").vector<3>();
        const Reader grasps = s.at("grasps");
        for (std::size_t k = 0; k < grasps.array_size(); ++k) step.grasps.push_back(grasp_from(grasps.at(k)));
        if (s.has("assisting_grasp")) step.assisting_grasp = grasp_from(s.at("assisting_grasp"));
        if (s.has("held")) step.held = s.at("held").string();
        plan.steps.push_back(std::move(step));
    }
    if (root.has("matrices")) {
        const Reader m = root.at("matrices");
        PlanMatrices mat;
        const Reader orders = m.at("orders"), S = m.at("stability"), G = m.at("graspability"),
                     A = m.at("assemblability"), D = m.at("directions"), scores = m.at("scores");
        for (std::size_t r = 0; r < orders.array_size(); ++r) {
            std::vector<std::string> ids;
            std::vector<double> s, a;
            std::vector<int> g;
            std::vector<Vec3> d;
            for (std::size_t c = 0; c < orders.at(r).array_size(); ++c) {
                ids.push_back(orders.at(r).at(c).string());
                s.push_back(S.at(r).at(c).number());
                g.push_back(static_cast<int>(G.at(r).at(c).integer()));
                a.push_back(A.at(r).at(c).number());
                d.push_back(D.at(r).at(c).vector<3>());
            }
            mat.orders.push_back(std::move(ids));
            mat.stability.push_back(std::move(s));
            mat.graspability.push_back(std::move(g));
            mat.assemblability.push_back(std::move(a));
            mat.directions.push_back(std::move(d));
            mat.scores.push_back(scores.at(r).number());
        }
        plan.matrices = std::move(mat);
    }
    return plan;
}

void save_plan(const PlanFile& plan, const std::filesystem::path& path) { write_file(path, plan_to_json(plan)); }

PlanFile load_plan(const std::filesystem::path& path) { return parse_plan(read_file(path)); }

namespace {

class ObjWriter {
public:
    void group(const std::string& name) { out_ << "g " << name << "\n"; }

    void mesh(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& triangles, const Pose& pose) {
        char buf[96];
        for (const auto& v : vertices) {
            const Vec3 w = pose.apply(v);
            std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", w.x(), w.y(), w.z());
            out_ << buf;
        }
        for (const auto& t : triangles)
            out_ << "f " << base_ + t[0] + 1 << ' ' << base_ + t[1] + 1 << ' ' << base_ + t[2] + 1 << "\n";
        base_ += static_cast<int>(vertices.size());
    }

    void gripper(const GripperSpec& spec, const PlanGrasp& g, const Vec3& offset) {
        Pose pose = g.pose();
        pose.translation += offset;
        for (const auto& box : gripper_box_shapes(spec, g.opening)) mesh(box.vertices, box.triangles, pose);
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    int base_ = 0;
};

}  // namespace

void export_steps(const PlanFile& plan, const Scene& scene, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        ObjWriter obj;
        for (std::size_t j = 0; j < k; ++j) {
            const auto& w = scene.workpieces.at(static_cast<std::size_t>(scene.index_of(plan.steps[j].workpiece)));
            obj.group("prefix_" + w.id);
            obj.mesh(w.shape.vertices, w.shape.triangles, w.goal);
        }
        const auto& step = plan.steps[k];
        const auto& w = scene.workpieces.at(static_cast<std::size_t>(scene.index_of(step.workpiece)));
        const Vec3 offset = -plan.metadata.retract_distance * step.direction;
        Pose incoming = w.goal;
        incoming.translation += offset;
        obj.group("incoming_" + w.id);
        obj.mesh(w.shape.vertices, w.shape.triangles, incoming);
        if (!step.grasps.empty()) {
            obj.group("gripper");
            obj.gripper(scene.gripper, step.grasps.front(), offset);
        }
        if (step.assisting_grasp) {
            obj.group("assist_gripper");
            obj.gripper(scene.gripper, *step.assisting_grasp, Vec3::Zero());
        }
        write_file(dir / ("step_" + std::to_string(k + 1) + ".obj"), obj.str());
    }
}

}  // namespace asmplan
