#include "asmplan/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace asmplan {

namespace {

Vec3 gravity_direction(const Scene& scene) {
    const double g = scene.gravity.norm();
    return g > 0 ? Vec3(scene.gravity / g) : Vec3(-Vec3::UnitZ());
}

int worker_count(int requested, std::size_t jobs) {
    int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    t = std::max(1, t);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(jobs, 1)));
}

/// Runs job(i) for i in [0, count) on `threads` workers; each index runs exactly once.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
    const int workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void finish_score(OrderEvaluation& ev, double s_cap) {
    ev.score = order_score(ev.s_row, ev.g_row, ev.a_row, s_cap);
    if (ev.assist && (!ev.assist->feasible || !ev.assist->grasps_available)) ev.score = 0.0;
}

/// Every per-context quantity an order evaluation needs, computed once per scene.
class Evaluator {
public:
    Evaluator(const SceneModel& model, const PlannerConfig& config) : model_(model), config_(config) {
        n_ = model.size();
        const std::uint32_t full = n_ == 32 ? ~0u : (1u << n_) - 1;
        params_ = resolve_params(model.scene(), config.stability);
        gravity_ = gravity_direction(model.scene());

        struct Task {
            BodyId piece;
            std::uint32_t mask;
        };
        std::vector<Task> tasks;
        neighbors_.resize(n_);
        stability_.resize(n_);
        direction_.resize(n_);
        for (BodyId p = 0; p < n_; ++p) {
            neighbors_[p] = model.neighbor_mask(p) & full;
            stability_[p].assign(std::size_t{1} << n_, StabilityQuality());
            direction_[p].assign(std::size_t{1} << n_, AssemblyDirection());
            // every subset of the neighbor mask
            std::uint32_t sub = neighbors_[p];
            for (;;) {
                tasks.push_back({p, sub});
                if (sub == 0) break;
                sub = (sub - 1) & neighbors_[p];
            }
        }
        parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
            const auto [p, m] = tasks[i];
            stability_[p][m] = stability_quality(model_, p, m, params_);
            direction_[p][m] = optimal_direction(constraint_normals(model_, p, m), gravity_);
        });

        candidates_.resize(n_);
        blockers_.resize(n_);
        parallel_for(static_cast<std::size_t>(n_), config.threads, [&](std::size_t i) {
            const BodyId p = static_cast<BodyId>(i);
            candidates_[p] = candidate_grasps(model_, p, config_.sampling);
            blockers_[p].reserve(candidates_[p].size());
            for (const auto& g : candidates_[p]) blockers_[p].push_back(grasp_blockers(model_.scene().gripper, g, model_, p));
        });

        counts_.resize(n_);
        for (BodyId p = 0; p < n_; ++p) {
            counts_[p].assign(std::size_t{1} << n_, 0);
            for (std::uint32_t m = 0; m <= full; ++m) {
                if (m & (1u << p)) continue;
                int c = 0;
                for (const auto& b : blockers_[p])
                    if (!b.self && !b.table && !(b.bodies & m)) ++c;
                counts_[p][m] = c;
                if (m == full) break;
            }
        }

        queries_.stability = [this](BodyId p, std::uint32_t m) { return stability_[p][m & neighbors_[p]]; };
        queries_.accessible = [this](BodyId p, std::uint32_t m) { return accessible(p, m); };
        queries_.direction = [this](BodyId p, std::uint32_t m) { return direction_[p][m & neighbors_[p]].direction; };
    }

    std::vector<Grasp> accessible(BodyId p, std::uint32_t mask) const {
        mask &= ~(1u << p);
        std::vector<Grasp> out;
        for (std::size_t k = 0; k < candidates_[p].size(); ++k) {
            const auto& b = blockers_[p][k];
            if (!b.self && !b.table && !(b.bodies & mask)) out.push_back(candidates_[p][k]);
        }
        return out;
    }

    OrderEvaluation evaluate(std::span<const BodyId> order, bool details) const {
        OrderEvaluation ev;
        ev.order.assign(order.begin(), order.end());
        std::uint32_t mask = 0;
        for (BodyId p : order) {
            const std::uint32_t key = mask & neighbors_[p];
            ev.raw_s.push_back(stability_[p][key]);
            ev.g_row.push_back(counts_[p][mask]);
            ev.directions.push_back(direction_[p][key]);
            ev.a_row.push_back(assemblability_quality(direction_[p][key]));
            if (details) ev.grasps.push_back(accessible(p, mask));
            mask |= 1u << p;
        }
        const bool any_zero = std::any_of(ev.raw_s.begin(), ev.raw_s.end(), [](StabilityQuality s) { return !s.positive(); });
        if (any_zero) {
            ev.assist = assist_analyze(model_, order, config_.assist, queries_);
            ev.s_row = ev.assist->updated_s;
            if (!details) ev.assist->assist_grasps.clear();
        } else {
            ev.s_row = ev.raw_s;
        }
        finish_score(ev, config_.s_cap);
        return ev;
    }

private:
    const SceneModel& model_;
    const PlannerConfig& config_;
    StabilityParams params_;
    Vec3 gravity_;
    int n_ = 0;
    std::vector<std::uint32_t> neighbors_;
    std::vector<std::vector<StabilityQuality>> stability_;
    std::vector<std::vector<AssemblyDirection>> direction_;
    std::vector<std::vector<Grasp>> candidates_;
    std::vector<std::vector<GraspBlockers>> blockers_;
    std::vector<std::vector<int>> counts_;
    AssistQueries queries_;
};

}  // namespace

std::uint64_t permutation_count(int n, int cap) {
    if (n < 1) throw InvalidOrder("need at least one workpiece");
    if (n > cap) throw TooManyPieces(std::to_string(n) + " workpieces exceed the limit of " + std::to_string(cap));
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

std::vector<BodyId> nth_permutation(std::span<const BodyId> ids, std::uint64_t k) {
    std::vector<BodyId> pool(ids.begin(), ids.end());
    std::vector<BodyId> out;
    out.reserve(pool.size());
    std::uint64_t f = 1;
    for (std::size_t i = 2; i < pool.size(); ++i) f *= i;
    while (!pool.empty()) {
        const std::size_t idx = static_cast<std::size_t>(k / f);
        k %= f;
        out.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
        if (pool.size() > 1) f /= pool.size();
    }
    return out;
}

void for_each_permutation(std::span<const BodyId> ids, int cap,
                          const std::function<void(std::span<const BodyId>)>& visit) {
    permutation_count(static_cast<int>(ids.size()), cap);
    std::vector<std::size_t> pos(ids.size());
    std::iota(pos.begin(), pos.end(), 0);
    std::vector<BodyId> order(ids.size());
    do {
        for (std::size_t i = 0; i < pos.size(); ++i) order[i] = ids[pos[i]];
        visit(order);
    } while (std::next_permutation(pos.begin(), pos.end()));
}

void check_order(const SceneModel& model, std::span<const BodyId> order) {
    const int n = model.size();
    if (static_cast<int>(order.size()) != n) throw InvalidOrder("order must list every workpiece exactly once");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (BodyId b : order) {
        if (b < 0 || b >= n || seen[static_cast<std::size_t>(b)]) throw InvalidOrder("order is not a permutation");
        seen[static_cast<std::size_t>(b)] = true;
    }
}

double order_score(std::span<const StabilityQuality> s, std::span<const int> g, std::span<const double> a,
                   double s_cap) {
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& q : s)
        if (!q.is_infinite()) smin = std::min(smin, q.value());
    if (smin == std::numeric_limits<double>::infinity()) smin = s_cap;
    int gmin = std::numeric_limits<int>::max();
    for (int c : g) gmin = std::min(gmin, c);
    double amin = std::numeric_limits<double>::infinity();
    for (double q : a) amin = std::min(amin, q);
    if (g.empty() || a.empty()) return 0.0;
    return smin * static_cast<double>(gmin) * amin;
}

OrderEvaluation evaluate_order(const SceneModel& model, std::span<const BodyId> order, const PlannerConfig& config) {
    check_order(model, order);
    const StabilityParams params = resolve_params(model.scene(), config.stability);
    OrderEvaluation ev;
    ev.order.assign(order.begin(), order.end());
    ev.raw_s = stability_row(model, order, params);
    auto g = graspability_row(model, order, config.sampling);
    ev.g_row = std::move(g.counts);
    ev.grasps = std::move(g.grasps);
    auto a = assemblability_row(model, order);
    ev.a_row = std::move(a.qualities);
    ev.directions = std::move(a.directions);
    const bool any_zero = std::any_of(ev.raw_s.begin(), ev.raw_s.end(), [](StabilityQuality s) { return !s.positive(); });
    if (any_zero) {
        ev.assist = assist_analyze(model, order, params, config.assist, config.sampling);
        ev.s_row = ev.assist->updated_s;
    } else {
        ev.s_row = ev.raw_s;
    }
    finish_score(ev, config.s_cap);
    return ev;
}

std::size_t select_index(std::span<const OrderEvaluation> evaluations, std::uint64_t seed, bool prefer_no_assist) {
    if (evaluations.empty()) throw NoFeasibleOrder("no orders to select from");
    const bool all_dead = std::all_of(evaluations.begin(), evaluations.end(), [](const OrderEvaluation& e) {
        return e.score == 0.0 && e.assist && !e.assist->feasible;
    });
    if (all_dead) throw NoFeasibleOrder("every order needs more assisting hands than available");

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : evaluations) best = std::max(best, e.score);
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < evaluations.size(); ++i)
        if (evaluations[i].score >= best - 1e-12) ties.push_back(i);
    if (prefer_no_assist) {
        std::vector<std::size_t> plain;
        for (std::size_t i : ties)
            if (!evaluations[i].uses_assist()) plain.push_back(i);
        if (!plain.empty()) ties = std::move(plain);
    }
    std::mt19937_64 rng(seed);
    return ties[static_cast<std::size_t>(rng() % ties.size())];
}

PlanResult plan(const SceneModel& model, const PlannerConfig& config) {
    const int n = model.size();
    const std::uint64_t total = permutation_count(n, config.max_pieces);
    std::vector<BodyId> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);

    const Evaluator evaluator(model, config);
    PlanResult result;
    result.seed = config.seed;
    result.evaluations.resize(static_cast<std::size_t>(total));
    parallel_for(static_cast<std::size_t>(total), config.threads, [&](std::size_t k) {
        result.evaluations[k] = evaluator.evaluate(nth_permutation(ids, k), false);
    });

    result.optimal_index = select_index(result.evaluations, config.seed, config.prefer_no_assist);
    result.optimal = evaluator.evaluate(result.evaluations[result.optimal_index].order, true);
    result.used_assist = result.optimal.uses_assist();
    return result;
}

}  // namespace asmplan
