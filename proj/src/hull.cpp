#include "asmplan/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Dense>

namespace asmplan {

namespace {

constexpr int kMaxDim = 6;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

struct HullBuildFailure {};

class Quickhull {
public:
    Quickhull(std::span<const VecX> points, int dim, double eps) : dim_(dim), eps_(eps) {
        coords_.reserve(points.size() * static_cast<std::size_t>(dim));
        for (const auto& p : points)
            for (int k = 0; k < dim; ++k) coords_.push_back(p[k]);
        count_ = points.size();
    }

    ConvexHull run() {
        initial_simplex();
        std::deque<int> work;
        for (int f = 0; f < static_cast<int>(facets_.size()); ++f) work.push_back(f);
        while (!work.empty()) {
            int fi = work.front();
            work.pop_front();
            if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
            int apex = -1;
            double best = -1.0;
            for (int p : facets_[fi].outside) {
                double d = distance(facets_[fi], p);
                if (d > best) {
                    best = d;
                    apex = p;
                }
            }
            for (int nf : add_point(fi, apex)) work.push_back(nf);
        }

        ConvexHull hull;
        hull.dim = dim_;
        for (const auto& f : facets_) {
            if (!f.alive) continue;
            hull.facet_vertices.emplace_back(f.verts.begin(), f.verts.begin() + dim_);
            Hyperplane h;
            h.normal.resize(dim_);
            for (int k = 0; k < dim_; ++k) h.normal[k] = f.normal[k];
            h.offset = f.offset;
            hull.facets.push_back(std::move(h));
        }
        return hull;
    }

private:
    struct Facet {
        std::array<int, kMaxDim> verts{};
        std::array<int, kMaxDim> neighbors{};
        std::array<double, kMaxDim> normal{};
        double offset = 0.0;
        std::vector<int> outside;
        bool alive = true;
        unsigned visit = 0;
    };

    const double* point(int i) const { return coords_.data() + static_cast<std::size_t>(i) * dim_; }

    double distance(const Facet& f, int p) const {
        const double* x = point(p);
        double s = -f.offset;
        for (int k = 0; k < dim_; ++k) s += f.normal[k] * x[k];
        return s;
    }

    void set_plane(Facet& f) const {
        SmallMat a(dim_, dim_ - 1);
        const double* base = point(f.verts[0]);
        for (int r = 1; r < dim_; ++r) {
            const double* x = point(f.verts[r]);
            for (int k = 0; k < dim_; ++k) a(k, r - 1) = x[k] - base[k];
        }
        Eigen::HouseholderQR<SmallMat> qr(a);
        SmallMat q = qr.householderQ();
        double norm = 0.0;
        for (int k = 0; k < dim_; ++k) norm += q(k, dim_ - 1) * q(k, dim_ - 1);
        norm = std::sqrt(norm);
        if (!(norm > 0)) throw HullBuildFailure{};
        double side = 0.0;
        for (int k = 0; k < dim_; ++k) {
            f.normal[k] = q(k, dim_ - 1) / norm;
            side += f.normal[k] * (interior_[k] - base[k]);
        }
        if (side > 0)
            for (int k = 0; k < dim_; ++k) f.normal[k] = -f.normal[k];
        f.offset = 0.0;
        for (int k = 0; k < dim_; ++k) f.offset += f.normal[k] * base[k];
        if (std::abs(side) < eps_ * 1e-3) throw HullBuildFailure{};
    }

    void initial_simplex() {
        std::vector<int> chosen;
        int first = 0;
        for (std::size_t i = 1; i < count_; ++i)
            if (point(static_cast<int>(i))[0] < point(first)[0]) first = static_cast<int>(i);
        chosen.push_back(first);
        std::vector<SmallVec> basis;
        while (static_cast<int>(chosen.size()) < dim_ + 1) {
            int best = -1;
            double best_res = eps_;
            SmallVec best_dir;
            for (std::size_t i = 0; i < count_; ++i) {
                SmallVec r(dim_);
                for (int k = 0; k < dim_; ++k) r[k] = point(static_cast<int>(i))[k] - point(first)[k];
                for (const auto& b : basis) r -= r.dot(b) * b;
                double n = r.norm();
                if (n > best_res) {
                    best_res = n;
                    best = static_cast<int>(i);
                    best_dir = r / n;
                }
            }
            if (best < 0) throw DegenerateHull("points are not full-dimensional");
            chosen.push_back(best);
            basis.push_back(best_dir);
        }

        interior_.assign(dim_, 0.0);
        for (int c : chosen)
            for (int k = 0; k < dim_; ++k) interior_[k] += point(c)[k] / (dim_ + 1);

        for (int skip = 0; skip <= dim_; ++skip) {
            Facet f;
            int slot = 0;
            for (int j = 0; j <= dim_; ++j) {
                if (j == skip) continue;
                f.verts[slot] = chosen[j];
                f.neighbors[slot] = j;  // facet that omits chosen[j]
                ++slot;
            }
            set_plane(f);
            facets_.push_back(std::move(f));
        }

        std::vector<bool> in_simplex(count_, false);
        for (int c : chosen) in_simplex[c] = true;
        for (std::size_t i = 0; i < count_; ++i) {
            if (in_simplex[i]) continue;
            for (auto& f : facets_) {
                if (distance(f, static_cast<int>(i)) > eps_) {
                    f.outside.push_back(static_cast<int>(i));
                    break;
                }
            }
        }
    }

    std::vector<int> add_point(int start, int apex) {
        ++stamp_;
        struct Ridge {
            int facet, slot, neighbor;
        };
        std::vector<int> visible{start};
        std::vector<Ridge> horizon;
        facets_[start].visit = stamp_;
        for (std::size_t head = 0; head < visible.size(); ++head) {
            int fi = visible[head];
            for (int s = 0; s < dim_; ++s) {
                int g = facets_[fi].neighbors[s];
                if (facets_[g].visit == stamp_) continue;
                if (distance(facets_[g], apex) > eps_) {
                    facets_[g].visit = stamp_;
                    visible.push_back(g);
                }
            }
        }
        for (int fi : visible) {
            for (int s = 0; s < dim_; ++s) {
                int g = facets_[fi].neighbors[s];
                if (facets_[g].visit != stamp_) horizon.push_back({fi, s, g});
            }
        }

        std::vector<int> created;
        std::map<std::array<int, kMaxDim>, std::pair<int, int>> subridges;
        for (const auto& r : horizon) {
            Facet nf;
            nf.verts = facets_[r.facet].verts;
            nf.verts[r.slot] = apex;
            nf.neighbors[r.slot] = r.neighbor;
            set_plane(nf);
            int id = static_cast<int>(facets_.size());
            // re-point the surviving neighbour across the horizon ridge
            Facet& g = facets_[r.neighbor];
            bool relinked = false;
            for (int s = 0; s < dim_; ++s) {
                if (g.neighbors[s] == r.facet) {
                    g.neighbors[s] = id;
                    relinked = true;
                    break;
                }
            }
            if (!relinked) throw HullBuildFailure{};
            for (int s = 0; s < dim_; ++s) {
                if (s == r.slot) continue;
                std::array<int, kMaxDim> key;
                key.fill(std::numeric_limits<int>::max());
                int m = 0;
                for (int t = 0; t < dim_; ++t)
                    if (t != s) key[m++] = nf.verts[t];
                std::sort(key.begin(), key.begin() + m);
                auto it = subridges.find(key);
                if (it == subridges.end()) {
                    subridges.emplace(key, std::make_pair(id, s));
                } else {
                    nf.neighbors[s] = it->second.first;
                    facets_[it->second.first].neighbors[it->second.second] = id;
                    subridges.erase(it);
                }
            }
            facets_.push_back(std::move(nf));
            created.push_back(id);
        }
        if (!subridges.empty()) throw HullBuildFailure{};

        std::vector<int> orphaned;
        for (int fi : visible) {
            facets_[fi].alive = false;
            for (int p : facets_[fi].outside)
                if (p != apex) orphaned.push_back(p);
            facets_[fi].outside.clear();
            facets_[fi].outside.shrink_to_fit();
        }
        for (int p : orphaned) {
            for (int id : created) {
                if (distance(facets_[id], p) > eps_) {
                    facets_[id].outside.push_back(p);
                    break;
                }
            }
        }
        return created;
    }

    int dim_;
    double eps_;
    std::vector<double> coords_;
    std::size_t count_ = 0;
    std::vector<double> interior_;
    std::vector<Facet> facets_;
    unsigned stamp_ = 0;
};

double spread(std::span<const VecX> points) {
    VecX lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return std::max((hi - lo).norm(), 1e-300);
}

}  // namespace

int affine_rank(std::span<const VecX> points, double rel_tol) {
    if (points.empty()) return -1;
    const double tol = rel_tol * spread(points);
    Eigen::MatrixXd diffs(points[0].size(), static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) diffs.col(static_cast<Eigen::Index>(i)) = points[i] - points[0];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > tol) ++rank;
    return rank;
}

ConvexHull compute_hull(std::span<const VecX> points) {
    if (points.empty()) throw DegenerateHull("no points");
    const int dim = static_cast<int>(points[0].size());
    if (dim < 2 || dim > kMaxDim) throw Error("hull dimension must be between 2 and 6");
    if (static_cast<int>(points.size()) < dim + 1) throw DegenerateHull("fewer than d+1 points");
    const double eps = 1e-11 * spread(points);
    try {
        return Quickhull(points, dim, eps).run();
    } catch (const HullBuildFailure&) {
    }
    // Numerically inconsistent visibility: retry on slightly joggled input, the same
    // remedy qhull applies with 'QJ'. The seed is fixed so results stay reproducible.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (int attempt = 1; attempt <= 4; ++attempt) {
        const double amount = spread(points) * 1e-10 * std::pow(10.0, attempt);
        std::vector<VecX> joggled(points.begin(), points.end());
        for (auto& p : joggled)
            for (int k = 0; k < dim; ++k) p[k] += amount * jitter(rng);
        try {
            return Quickhull(joggled, dim, eps).run();
        } catch (const HullBuildFailure&) {
        }
    }
    throw DegenerateHull("hull construction failed to converge");
}

double hull_distance(std::span<const VecX> points, const VecX& query) {
    const std::size_t n = points.size();
    if (n == 0) throw DegenerateHull("no points");
    const Eigen::Index d = query.size();
    Eigen::MatrixXd p(d, static_cast<Eigen::Index>(n));
    double max_norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p.col(static_cast<Eigen::Index>(i)) = points[i] - query;
        max_norm2 = std::max(max_norm2, p.col(static_cast<Eigen::Index>(i)).squaredNorm());
    }
    if (max_norm2 == 0.0) return 0.0;

    // Wolfe's minimum-norm-point algorithm on the translated points.
    std::vector<int> active;
    std::vector<double> weights;
    {
        Eigen::Index best = 0;
        p.colwise().squaredNorm().minCoeff(&best);
        active.push_back(static_cast<int>(best));
        weights.push_back(1.0);
    }
    VecX x = p.col(active[0]);
    const double tol = 1e-14 * max_norm2;

    auto affine_minimizer = [&](const std::vector<int>& set) {
        const Eigen::Index m = static_cast<Eigen::Index>(set.size());
        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) sys(i, j) = p.col(set[i]).dot(p.col(set[j]));
            sys(i, m) = 1.0;
            sys(m, i) = 1.0;
        }
        rhs[m] = 1.0;
        Eigen::VectorXd sol = sys.colPivHouseholderQr().solve(rhs);
        return Eigen::VectorXd(sol.head(m));
    };

    for (int major = 0; major < 10000; ++major) {
        Eigen::Index j = 0;
        (x.transpose() * p).minCoeff(&j);
        if (x.squaredNorm() - x.dot(p.col(j)) <= tol) break;
        if (std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end()) break;
        if (static_cast<Eigen::Index>(active.size()) > d + 1) break;
        active.push_back(static_cast<int>(j));
        weights.push_back(0.0);

        for (int minor = 0; minor < 100; ++minor) {
            Eigen::VectorXd alpha = affine_minimizer(active);
            bool interior = true;
            for (Eigen::Index i = 0; i < alpha.size(); ++i) interior = interior && alpha[i] > 1e-12;
            if (interior) {
                for (std::size_t i = 0; i < active.size(); ++i) weights[i] = alpha[static_cast<Eigen::Index>(i)];
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < active.size(); ++i) {
                double a = alpha[static_cast<Eigen::Index>(i)];
                if (a <= 1e-12) theta = std::min(theta, weights[i] / (weights[i] - a));
            }
            std::vector<int> next_active;
            std::vector<double> next_weights;
            for (std::size_t i = 0; i < active.size(); ++i) {
                double w = theta * alpha[static_cast<Eigen::Index>(i)] + (1.0 - theta) * weights[i];
                if (w > 1e-12) {
                    next_active.push_back(active[i]);
                    next_weights.push_back(w);
                }
            }
            if (next_active.empty()) {
                next_active.push_back(active.back());
                next_weights.push_back(1.0);
            }
            double total = 0.0;
            for (double w : next_weights) total += w;
            for (double& w : next_weights) w /= total;
            active = std::move(next_active);
            weights = std::move(next_weights);
        }
        x.setZero();
        for (std::size_t i = 0; i < active.size(); ++i) x += weights[i] * p.col(active[i]);
    }
    return x.norm();
}

std::vector<VecX> sampling_directions(int dim) {
    std::vector<VecX> out;
    std::vector<int> v(dim, 0);
    auto recurse = [&](auto&& self, int k, int remaining) -> void {
        if (k == dim - 1) {
            for (int sign : {-1, 1}) {
                if (remaining == 0 && sign > 0) continue;
                v[k] = sign * remaining;
                VecX d(dim);
                for (int i = 0; i < dim; ++i) d[i] = v[i];
                out.push_back(d.normalized());
            }
            return;
        }
        for (int a = -remaining; a <= remaining; ++a) {
            v[k] = a;
            self(self, k + 1, remaining - std::abs(a));
        }
    };
    recurse(recurse, 0, 4);
    std::sort(out.begin(), out.end(), [](const VecX& a, const VecX& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    return out;
}

double convex_hull_margin(std::span<const VecX> points, const VecX& query, const HullMarginOptions& options) {
    if (points.empty()) throw DegenerateHull("no points");
    const int dim = static_cast<int>(query.size());
    for (const auto& p : points)
        if (p.size() != dim) throw Error("point dimension mismatch");
    if (affine_rank(points) < dim) throw DegenerateHull("points are not full-dimensional");

    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, (p - query).norm());
    const double outside_tol = 1e-12 * std::max(scale, 1.0);
    const double dist = hull_distance(points, query);
    if (dist > outside_tol) return -dist;

    double margin = std::numeric_limits<double>::infinity();
    if (points.size() <= options.max_exact_points) {
        ConvexHull hull = compute_hull(points);
        for (const auto& f : hull.facets) margin = std::min(margin, f.offset - f.normal.dot(query));
    } else {
        static thread_local std::map<int, std::vector<VecX>> directions_cache;
        auto it = directions_cache.find(dim);
        if (it == directions_cache.end()) it = directions_cache.emplace(dim, sampling_directions(dim)).first;
        for (const auto& u : it->second) {
            double support = -std::numeric_limits<double>::infinity();
            for (const auto& p : points) support = std::max(support, u.dot(p));
            margin = std::min(margin, support - u.dot(query));
        }
    }
    return std::max(margin, 0.0);
}

}  // namespace asmplan
