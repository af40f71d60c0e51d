#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "asmplan/io.hpp"
#include "asmplan/planner.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kNoFeasible = 3, kIo = 4 };

struct CommonOptions {
    std::uint64_t seed = 0;
    double mu = -1.0;
    int extra_hands = 1;
    bool prefer_no_assist = true;
    int threads = 0;
    double pitch = 0.01;
    int rolls = 2;
    double retract = 0.15;
    double s_cap = 10.0;
};

void add_planner_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seed, "Tie-break seed")->capture_default_str();
    cmd->add_option("--mu", o.mu, "Override the scene's default friction coefficient");
    cmd->add_option("--extra-hands", o.extra_hands, "Hands available for assisting grasps")->capture_default_str();
    cmd->add_option("--prefer-no-assist", o.prefer_no_assist, "Break score ties toward assist-free orders")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads, 0 for all cores (ASMPLAN_THREADS overrides)")
        ->capture_default_str();
    cmd->add_option("--pitch", o.pitch, "Grasp sampling grid pitch in meters")->capture_default_str();
    cmd->add_option("--rolls", o.rolls, "Gripper rolls per grasp sample")->capture_default_str();
    cmd->add_option("--retract", o.retract, "Retract distance for next-piece clearance in meters")
        ->capture_default_str();
    cmd->add_option("--s-cap", o.s_cap, "Stability factor used when every entry is +inf")->capture_default_str();
}

asmplan::PlannerConfig make_config(const CommonOptions& o) {
    asmplan::PlannerConfig c;
    c.seed = o.seed;
    c.assist.extra_hands = o.extra_hands;
    c.assist.retract_distance = o.retract;
    c.prefer_no_assist = o.prefer_no_assist;
    c.sampling.pitch = o.pitch;
    c.sampling.rolls = o.rolls;
    c.s_cap = o.s_cap;
    c.threads = o.threads;
    if (const char* env = std::getenv("ASMPLAN_THREADS")) {
        try {
            c.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw asmplan::ValidationError({"ASMPLAN_THREADS must be an integer"});
        }
    }
    if (c.threads < 0) throw asmplan::ValidationError({"thread count must be >= 0"});
    if (c.assist.extra_hands < 0) throw asmplan::ValidationError({"--extra-hands must be >= 0"});
    if (!c.sampling.valid()) throw asmplan::ValidationError({"--pitch must be > 0 and --rolls >= 1"});
    return c;
}

asmplan::Scene load_with_overrides(const std::string& path, const CommonOptions& o) {
    asmplan::Scene scene = asmplan::load_scene(path);
    if (o.mu >= 0) scene.friction.default_mu = o.mu;
    return scene;
}

std::vector<asmplan::BodyId> parse_order(const asmplan::Scene& scene, const std::string& text) {
    std::vector<asmplan::BodyId> order;
    std::stringstream ss(text);
    std::string id;
    while (std::getline(ss, id, ',')) {
        try {
            order.push_back(scene.index_of(id));
        } catch (const asmplan::UnknownBody& e) {
            throw asmplan::InvalidOrder(e.what());
        }
    }
    return order;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-arm assembly sequence planner"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string scene_path, out_path, order_text, plan_path, dir;
    bool full = false;

    auto* plan_cmd = app.add_subcommand("plan", "Score every order and write the best plan");
    plan_cmd->add_option("scene", scene_path, "Scene JSON")->required();
    plan_cmd->add_option("--out", out_path, "Plan JSON to write")->required();
    plan_cmd->add_flag("--full", full, "Include the full S/G/A/direction matrices");
    add_planner_options(plan_cmd, opts);

    auto* eval_cmd = app.add_subcommand("eval-order", "Evaluate one order");
    eval_cmd->add_option("scene", scene_path, "Scene JSON")->required();
    eval_cmd->add_option("--order", order_text, "Comma-separated workpiece ids")->required();
    eval_cmd->add_option("--out", out_path, "Evaluation JSON to write")->required();
    add_planner_options(eval_cmd, opts);

    auto* export_cmd = app.add_subcommand("export", "Write per-step OBJ snapshots of a plan");
    export_cmd->add_option("plan", plan_path, "Plan JSON")->required();
    export_cmd->add_option("scene", scene_path, "Scene JSON")->required();
    export_cmd->add_option("--dir", dir, "Output directory")->required();

    auto* validate_cmd = app.add_subcommand("validate", "Check a scene file");
    validate_cmd->add_option("scene", scene_path, "Scene JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*plan_cmd) {
            const auto scene = load_with_overrides(scene_path, opts);
            const auto config = make_config(opts);
            const asmplan::SceneModel model(scene, config.tolerances);
            const auto result = asmplan::plan(model, config);
            asmplan::save_plan(asmplan::make_plan_file(scene, result, config, full), out_path);
            std::cout << "score " << result.optimal.score << (result.used_assist ? " (assisted)" : "") << "\norder";
            for (auto b : result.optimal.order) std::cout << ' ' << scene.id_of(b);
            std::cout << "\n";
        } else if (*eval_cmd) {
            const auto scene = load_with_overrides(scene_path, opts);
            const auto config = make_config(opts);
            const asmplan::SceneModel model(scene, config.tolerances);
            const auto order = parse_order(scene, order_text);
            const auto ev = asmplan::evaluate_order(model, order, config);
            asmplan::save_plan(asmplan::make_plan_file(scene, ev, config), out_path);
            std::cout << "score " << ev.score << "\n";
        } else if (*export_cmd) {
            const auto scene = asmplan::load_scene(scene_path);
            asmplan::export_steps(asmplan::load_plan(plan_path), scene, dir);
        } else if (*validate_cmd) {
            const auto scene = asmplan::load_scene(scene_path);
            std::cout << "ok: " << scene.size() << " workpieces\n";
        }
    } catch (const asmplan::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    } catch (const asmplan::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kInvalid;
    } catch (const asmplan::InvalidOrder& e) {
        std::cerr << "invalid order: " << e.what() << "\n";
        return kInvalid;
    } catch (const asmplan::UnknownBody& e) {
        std::cerr << "unknown body: " << e.what() << "\n";
        return kInvalid;
    } catch (const asmplan::TooManyPieces& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    } catch (const asmplan::NoFeasibleOrder& e) {
        std::cerr << "no feasible order: " << e.what() << "\n";
        return kNoFeasible;
    } catch (const asmplan::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
