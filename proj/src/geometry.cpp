#include "asmplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "asmplan/hull.hpp"

namespace asmplan {

// ---------------------------------------------------------------- Pose

Pose Pose::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
    return {q.normalized().toRotationMatrix(), t};
}

Pose Pose::operator*(const Pose& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
}

Pose Pose::inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
}

Eigen::Quaterniond Pose::quaternion() const {
    Eigen::Quaterniond q(rotation);
    q.normalize();
    // canonical hemisphere so serialization is unique
    if (q.w() < 0 || (q.w() == 0 && (q.x() < 0 || (q.x() == 0 && (q.y() < 0 || (q.y() == 0 && q.z() < 0))))))
        q.coeffs() = -q.coeffs();
    return q;
}

bool Pose::is_valid(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
    Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 u = (seed - seed.dot(n) * n).normalized();
    Vec3 v = n.cross(u);
    return {u, v};
}

// ---------------------------------------------------------------- convex parts

ConvexPart ConvexPart::transformed(const Pose& pose) const {
    ConvexPart out;
    out.vertices.reserve(vertices.size());
    for (const auto& v : vertices) out.vertices.push_back(pose.apply(v));
    for (const auto& n : face_normals) out.face_normals.push_back(pose.rotation * n);
    for (const auto& e : edge_directions) out.edge_directions.push_back(pose.rotation * e);
    return out;
}

ConvexPart ConvexPart::translated(const Vec3& offset) const {
    ConvexPart out = *this;
    for (auto& v : out.vertices) v += offset;
    return out;
}

ConvexPart make_box_part(const Vec3& lo, const Vec3& hi) {
    ConvexPart part;
    for (int i = 0; i < 8; ++i)
        part.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
    part.face_normals = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    part.edge_directions = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    return part;
}

// ---------------------------------------------------------------- shapes

double Shape::surface_area() const {
    double area = 0.0;
    for (const auto& t : triangles)
        area += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
    return area;
}

double Shape::signed_volume() const {
    double vol = 0.0;
    for (const auto& t : triangles) vol += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
    return vol;
}

namespace {

constexpr std::array<Cell, 6> kNeighborOffsets{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

Cell add(const Cell& a, const Cell& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

// Corner offsets (in lattice units) of the unit face in direction `dir`, ordered
// counter-clockwise about the outward normal.
std::array<Cell, 4> face_corners(const Cell& c, int dir) {
    const int x = c[0], y = c[1], z = c[2];
    switch (dir) {
        case 0: return {{{x + 1, y, z}, {x + 1, y + 1, z}, {x + 1, y + 1, z + 1}, {x + 1, y, z + 1}}};
        case 1: return {{{x, y, z}, {x, y, z + 1}, {x, y + 1, z + 1}, {x, y + 1, z}}};
        case 2: return {{{x, y + 1, z}, {x, y + 1, z + 1}, {x + 1, y + 1, z + 1}, {x + 1, y + 1, z}}};
        case 3: return {{{x, y, z}, {x + 1, y, z}, {x + 1, y, z + 1}, {x, y, z + 1}}};
        case 4: return {{{x, y, z + 1}, {x + 1, y, z + 1}, {x + 1, y + 1, z + 1}, {x, y + 1, z + 1}}};
        default: return {{{x, y, z}, {x, y + 1, z}, {x + 1, y + 1, z}, {x + 1, y, z}}};
    }
}

Vec3 offset_normal(int dir) {
    const auto& o = kNeighborOffsets[dir];
    return Vec3(o[0], o[1], o[2]);
}

void set_mass_properties_from_mesh(Shape& s) {
    double vol = 0.0;
    Vec3 weighted = Vec3::Zero();
    for (const auto& t : s.triangles) {
        const Vec3 &a = s.vertices[t[0]], &b = s.vertices[t[1]], &c = s.vertices[t[2]];
        double v = a.dot(b.cross(c)) / 6.0;
        vol += v;
        weighted += v * (a + b + c) / 4.0;
    }
    s.volume = vol;
    s.centroid = vol > 0 ? Vec3(weighted / vol) : Vec3::Zero();
}

}  // namespace

Shape build_shape(std::span<const Cell> voxels, double voxel_size) {
    if (voxels.empty()) throw EmptyShape("voxel set is empty");
    if (!(voxel_size > 0)) throw Error("voxel_size must be positive");

    std::set<Cell> cells(voxels.begin(), voxels.end());
    {
        std::set<Cell> seen{*cells.begin()};
        std::queue<Cell> frontier;
        frontier.push(*cells.begin());
        while (!frontier.empty()) {
            Cell c = frontier.front();
            frontier.pop();
            for (const auto& o : kNeighborOffsets) {
                Cell nb = add(c, o);
                if (cells.count(nb) && seen.insert(nb).second) frontier.push(nb);
            }
        }
        if (seen.size() != cells.size()) throw Disconnected("voxel set is not 6-connected");
    }

    Shape s;
    s.kind = ShapeKind::Voxels;
    s.voxels.assign(cells.begin(), cells.end());
    s.voxel_size = voxel_size;

    std::map<Cell, int> vertex_index;
    auto vertex = [&](const Cell& corner) {
        auto [it, inserted] = vertex_index.emplace(corner, static_cast<int>(s.vertices.size()));
        if (inserted) s.vertices.emplace_back(corner[0] * voxel_size, corner[1] * voxel_size, corner[2] * voxel_size);
        return it->second;
    };

    Vec3 centroid = Vec3::Zero();
    for (const auto& c : s.voxels) {
        Vec3 lo(c[0] * voxel_size, c[1] * voxel_size, c[2] * voxel_size);
        s.parts.push_back(make_box_part(lo, lo + Vec3::Constant(voxel_size)));
        centroid += lo + Vec3::Constant(0.5 * voxel_size);
        for (int dir = 0; dir < 6; ++dir) {
            if (cells.count(add(c, kNeighborOffsets[dir]))) continue;
            auto corners = face_corners(c, dir);
            std::array<int, 4> idx{};
            Facet facet;
            facet.normal = offset_normal(dir);
            for (int k = 0; k < 4; ++k) {
                idx[k] = vertex(corners[k]);
                facet.loop.push_back(s.vertices[idx[k]]);
            }
            s.triangles.push_back({idx[0], idx[1], idx[2]});
            s.triangles.push_back({idx[0], idx[2], idx[3]});
            s.facets.push_back(std::move(facet));
        }
    }
    s.volume = static_cast<double>(s.voxels.size()) * voxel_size * voxel_size * voxel_size;
    s.centroid = centroid / static_cast<double>(s.voxels.size());
    return s;
}

Shape build_box_shape(const Vec3& lo, const Vec3& hi) {
    if (!((hi - lo).array() > 0).all()) throw EmptyShape("box has non-positive extent");
    Shape s;
    s.kind = ShapeKind::Box;
    ConvexPart part = make_box_part(lo, hi);
    s.vertices = part.vertices;
    // vertex i has bit0 -> x, bit1 -> y, bit2 -> z
    const std::array<std::array<int, 4>, 6> quads{{{1, 3, 7, 5}, {0, 4, 6, 2}, {2, 6, 7, 3}, {0, 1, 5, 4}, {4, 5, 7, 6}, {0, 2, 3, 1}}};
    for (int dir = 0; dir < 6; ++dir) {
        const auto& q = quads[dir];
        s.triangles.push_back({q[0], q[1], q[2]});
        s.triangles.push_back({q[0], q[2], q[3]});
        Facet f;
        f.normal = offset_normal(dir);
        for (int k : q) f.loop.push_back(s.vertices[k]);
        s.facets.push_back(std::move(f));
    }
    s.parts.push_back(std::move(part));
    s.volume = (hi - lo).prod();
    s.centroid = 0.5 * (lo + hi);
    return s;
}

Shape build_mesh_shape(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles) {
    if (vertices.empty() || triangles.empty()) throw EmptyShape("mesh has no triangles");
    const int nv = static_cast<int>(vertices.size());
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) throw InvalidMesh("triangle index out of range");
            if (++directed[{t[k], t[(k + 1) % 3]}] > 1) throw InvalidMesh("mesh is not orientable or has a repeated edge");
        }
    }
    for (const auto& [edge, count] : directed) {
        if (!directed.count({edge.second, edge.first})) throw InvalidMesh("mesh is not closed");
    }

    Shape s;
    s.kind = ShapeKind::Mesh;
    s.vertices = std::move(vertices);
    s.triangles = std::move(triangles);
    set_mass_properties_from_mesh(s);
    if (!(s.volume > 0)) throw InvalidMesh("mesh has non-positive signed volume (inward orientation?)");

    for (const auto& t : s.triangles) {
        Vec3 n = (s.vertices[t[1]] - s.vertices[t[0]]).cross(s.vertices[t[2]] - s.vertices[t[0]]);
        if (n.norm() < 1e-18) continue;
        s.facets.push_back({{s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]}, n.normalized()});
    }

    std::vector<VecX> pts;
    pts.reserve(s.vertices.size());
    for (const auto& v : s.vertices) pts.push_back(v);
    ConvexHull hull = compute_hull(pts);
    ConvexPart part;
    std::set<int> used;
    for (const auto& fv : hull.facet_vertices) used.insert(fv.begin(), fv.end());
    for (int i : used) part.vertices.push_back(s.vertices[i]);
    auto add_unique = [](std::vector<Vec3>& list, Vec3 d) {
        d.normalize();
        for (const auto& e : list)
            if (std::abs(std::abs(e.dot(d)) - 1.0) < 1e-9) return;
        list.push_back(d);
    };
    for (std::size_t f = 0; f < hull.facets.size(); ++f) {
        add_unique(part.face_normals, Vec3(hull.facets[f].normal));
        const auto& fv = hull.facet_vertices[f];
        for (int k = 0; k < 3; ++k) add_unique(part.edge_directions, s.vertices[fv[(k + 1) % 3]] - s.vertices[fv[k]]);
    }
    s.parts.push_back(std::move(part));
    return s;
}

PlacedShape::PlacedShape(const Shape& s, const Pose& p) : shape(&s), pose(p) {
    facets.reserve(s.facets.size());
    for (const auto& f : s.facets) {
        Facet w;
        w.normal = p.rotation * f.normal;
        for (const auto& v : f.loop) w.loop.push_back(p.apply(v));
        facets.push_back(std::move(w));
    }
    for (const auto& part : s.parts) {
        parts.push_back(part.transformed(p));
        Aabb b;
        for (const auto& v : parts.back().vertices) {
            b.extend(v);
            box.extend(v);
        }
        part_boxes.push_back(b);
    }
}

// ---------------------------------------------------------------- collision

namespace {

void projection(const ConvexPart& part, const Vec3& axis, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& v : part.vertices) {
        double d = v.dot(axis);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
}

template <class F>
void for_each_axis(const ConvexPart& a, const ConvexPart& b, F&& f) {
    for (const auto& n : a.face_normals) f(n);
    for (const auto& n : b.face_normals) f(n);
    for (const auto& ea : a.edge_directions) {
        for (const auto& eb : b.edge_directions) {
            Vec3 c = ea.cross(eb);
            double len = c.norm();
            if (len > 1e-9) f(Vec3(c / len));
        }
    }
}

}  // namespace

double penetration_depth(const ConvexPart& a, const ConvexPart& b) {
    double depth = std::numeric_limits<double>::infinity();
    for_each_axis(a, b, [&](const Vec3& axis) {
        double alo, ahi, blo, bhi;
        projection(a, axis, alo, ahi);
        projection(b, axis, blo, bhi);
        depth = std::min(depth, std::min(ahi - blo, bhi - alo));
    });
    return depth;
}

double halfspace_penetration(const ConvexPart& a, double height) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : a.vertices) lo = std::min(lo, v.z());
    return height - lo;
}

bool shapes_collide(const PlacedShape& a, const PlacedShape& b, double gap) {
    if (!a.box.overlaps(b.box, -gap)) return false;
    for (std::size_t i = 0; i < a.parts.size(); ++i) {
        for (std::size_t j = 0; j < b.parts.size(); ++j) {
            if (!a.part_boxes[i].overlaps(b.part_boxes[j], -gap)) continue;
            if (penetration_depth(a.parts[i], b.parts[j]) > gap) return true;
        }
    }
    return false;
}

bool collides_with_table(const PlacedShape& a, double table_height, double gap) {
    return a.box.lo.z() < table_height - gap;
}

double max_swept_penetration(const ConvexPart& a, const Vec3& direction, double distance, const ConvexPart& b) {
    // Penetration along every axis is min(two lines in t); the total is their lower
    // envelope, which is concave. Its maximum over [0, distance] is at an end point or
    // where a rising line meets a falling one.
    struct Line {
        double c, m;
    };
    std::vector<Line> lines;
    for_each_axis(a, b, [&](const Vec3& axis) {
        double alo, ahi, blo, bhi;
        projection(a, axis, alo, ahi);
        projection(b, axis, blo, bhi);
        double s = direction.dot(axis);
        lines.push_back({bhi - alo, -s});
        lines.push_back({ahi - blo, s});
    });
    auto envelope = [&](double t) {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& l : lines) v = std::min(v, l.c + l.m * t);
        return v;
    };
    double best = std::max(envelope(0.0), envelope(distance));
    if (distance <= 0) return envelope(0.0);
    for (const auto& up : lines) {
        if (up.m <= 0) continue;
        for (const auto& down : lines) {
            if (down.m >= 0) continue;
            double t = (down.c - up.c) / (up.m - down.m);
            if (t > 0 && t < distance) best = std::max(best, envelope(t));
        }
    }
    return best;
}

bool swept_collision(const PlacedShape& moving, const Vec3& direction, double distance,
                     std::span<const PlacedShape* const> obstacles, const Tolerances& tol) {
    const double d = std::max(distance, 0.0);
    Aabb swept = moving.box;
    swept.extend(moving.box.lo + d * direction);
    swept.extend(moving.box.hi + d * direction);
    for (const PlacedShape* obs : obstacles) {
        if (!swept.overlaps(obs->box, -tol.contact_gap)) continue;
        for (std::size_t i = 0; i < moving.parts.size(); ++i) {
            Aabb pb = moving.part_boxes[i];
            pb.extend(moving.part_boxes[i].lo + d * direction);
            pb.extend(moving.part_boxes[i].hi + d * direction);
            for (std::size_t j = 0; j < obs->parts.size(); ++j) {
                if (!pb.overlaps(obs->part_boxes[j], -tol.contact_gap)) continue;
                if (max_swept_penetration(moving.parts[i], direction, d, obs->parts[j]) > tol.contact_gap) return true;
            }
        }
    }
    return false;
}

bool swept_collision(const Shape& shape, const Pose& start_pose, const Vec3& direction, double distance,
                     std::span<const Obstacle> obstacles, const Tolerances& tol) {
    PlacedShape moving(shape, start_pose);
    std::vector<PlacedShape> placed;
    placed.reserve(obstacles.size());
    for (const auto& o : obstacles) placed.emplace_back(*o.shape, o.pose);
    std::vector<const PlacedShape*> ptrs;
    for (const auto& p : placed) ptrs.push_back(&p);
    return swept_collision(moving, direction.normalized(), distance, ptrs, tol);
}

// ---------------------------------------------------------------- planar helpers

double polygon_area(std::span<const Vec3> loop, const Vec3& normal) {
    Vec3 acc = Vec3::Zero();
    for (std::size_t i = 0; i < loop.size(); ++i) acc += loop[i].cross(loop[(i + 1) % loop.size()]);
    return 0.5 * acc.dot(normal);
}

namespace planar {

namespace {
double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
}  // namespace

double signed_area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    Polygon out = subject;
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % clip.size()];
        Vec2 edge = b - a;
        Polygon in = std::move(out);
        out.clear();
        for (std::size_t k = 0; k < in.size(); ++k) {
            const Vec2& p = in[k];
            const Vec2& q = in[(k + 1) % in.size()];
            double dp = cross2(edge, p - a);
            double dq = cross2(edge, q - a);
            if (dp >= 0) out.push_back(p);
            if ((dp >= 0) != (dq >= 0)) {
                double t = dp / (dp - dq);
                out.push_back(p + t * (q - p));
            }
        }
    }
    return out;
}

bool contains(const Polygon& convex_ccw, const Vec2& p, double eps) {
    for (std::size_t i = 0; i < convex_ccw.size(); ++i) {
        const Vec2& a = convex_ccw[i];
        const Vec2& b = convex_ccw[(i + 1) % convex_ccw.size()];
        Vec2 e = b - a;
        double len = e.norm();
        if (len < 1e-300) continue;
        if (cross2(e, p - a) / len < -eps) return false;
    }
    return true;
}

namespace {

struct Segment {
    Vec2 a, b;
};

double point_segment_param(const Vec2& p, const Segment& s, double eps, bool& on_segment) {
    Vec2 d = s.b - s.a;
    double len2 = d.squaredNorm();
    double t = (p - s.a).dot(d) / len2;
    Vec2 closest = s.a + t * d;
    on_segment = (p - closest).norm() <= eps && t > 0 && t < 1;
    return t;
}

Polygon simplify(const Polygon& loop, double eps) {
    Polygon cur = loop;
    bool changed = true;
    while (changed && cur.size() > 3) {
        changed = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const Vec2& prev = cur[(i + cur.size() - 1) % cur.size()];
            const Vec2& here = cur[i];
            const Vec2& next = cur[(i + 1) % cur.size()];
            Vec2 d1 = here - prev, d2 = next - here;
            double n1 = d1.norm(), n2 = d2.norm();
            bool degenerate = n1 <= eps || n2 <= eps;
            bool collinear = !degenerate && std::abs(cross2(d1, d2)) / (n1 + n2) <= eps && d1.dot(d2) > 0;
            if (degenerate || collinear) {
                cur.erase(cur.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
        }
    }
    return cur;
}

}  // namespace

std::vector<Polygon> union_boundary(const std::vector<Polygon>& pieces, double eps) {
    std::vector<Vec2> all_vertices;
    for (const auto& p : pieces) all_vertices.insert(all_vertices.end(), p.begin(), p.end());

    std::vector<Segment> segments;
    for (const auto& piece : pieces) {
        for (std::size_t i = 0; i < piece.size(); ++i) {
            Segment s{piece[i], piece[(i + 1) % piece.size()]};
            if ((s.b - s.a).norm() <= eps) continue;
            std::vector<double> cuts;
            for (const auto& v : all_vertices) {
                bool on = false;
                double t = point_segment_param(v, s, eps, on);
                if (on) cuts.push_back(t);
            }
            std::sort(cuts.begin(), cuts.end());
            Vec2 start = s.a;
            for (double t : cuts) {
                Vec2 p = s.a + t * (s.b - s.a);
                if ((p - start).norm() > eps) {
                    segments.push_back({start, p});
                    start = p;
                }
            }
            if ((s.b - start).norm() > eps) segments.push_back({start, s.b});
        }
    }

    std::vector<bool> dead(segments.size(), false);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (dead[i]) continue;
        for (std::size_t j = i + 1; j < segments.size(); ++j) {
            if (dead[j]) continue;
            if ((segments[i].a - segments[j].b).norm() <= eps && (segments[i].b - segments[j].a).norm() <= eps) {
                dead[i] = dead[j] = true;
                break;
            }
        }
    }

    std::vector<Polygon> loops;
    std::vector<bool> used = dead;
    for (std::size_t start = 0; start < segments.size(); ++start) {
        if (used[start]) continue;
        Polygon loop{segments[start].a};
        used[start] = true;
        Vec2 cursor = segments[start].b;
        Vec2 heading = segments[start].b - segments[start].a;
        std::size_t guard = 0;
        while ((cursor - loop.front()).norm() > eps && guard++ < segments.size()) {
            // Among the outgoing candidates take the sharpest left turn, which keeps
            // loops separate at pinch vertices.
            std::size_t best = segments.size();
            double best_angle = -10.0;
            for (std::size_t k = 0; k < segments.size(); ++k) {
                if (used[k] || (segments[k].a - cursor).norm() > eps) continue;
                Vec2 d = segments[k].b - segments[k].a;
                double angle = std::atan2(cross2(heading, d), heading.dot(d));
                if (angle > best_angle) {
                    best_angle = angle;
                    best = k;
                }
            }
            if (best == segments.size()) break;
            used[best] = true;
            loop.push_back(cursor);
            heading = segments[best].b - segments[best].a;
            cursor = segments[best].b;
        }
        loop = simplify(loop, eps);
        if (loop.size() >= 3 && std::abs(signed_area(loop)) > eps * eps) loops.push_back(std::move(loop));
    }
    return loops;
}

}  // namespace planar

// ---------------------------------------------------------------- contacts

namespace {

struct PlaneGroup {
    Vec3 normal;
    double offset_sum = 0.0;
    double offset_ref = 0.0;
    Vec3 u, v;
    std::vector<planar::Polygon> pieces;
    std::vector<double> areas;
};

planar::Polygon project(const std::vector<Vec3>& loop, const Vec3& u, const Vec3& v, bool reverse) {
    planar::Polygon out;
    out.reserve(loop.size());
    for (const auto& p : loop) out.emplace_back(p.dot(u), p.dot(v));
    if (reverse) std::reverse(out.begin(), out.end());
    return out;
}

void add_piece(std::vector<PlaneGroup>& groups, const Vec3& normal, double offset, const std::vector<Vec3>& loop_a,
               bool reverse_a, const std::vector<Vec3>* loop_b, bool reverse_b, double gap) {
    PlaneGroup* group = nullptr;
    for (auto& g : groups) {
        if (g.normal.dot(normal) > 1.0 - 1e-9 && std::abs(g.offset_ref - offset) <= gap) {
            group = &g;
            break;
        }
    }
    if (!group) {
        PlaneGroup g;
        g.normal = normal;
        g.offset_ref = offset;
        std::tie(g.u, g.v) = tangent_basis(normal);
        groups.push_back(std::move(g));
        group = &groups.back();
    }
    planar::Polygon pa = project(loop_a, group->u, group->v, reverse_a);
    planar::Polygon piece = pa;
    if (loop_b) piece = planar::clip_convex(pa, project(*loop_b, group->u, group->v, reverse_b));
    if (piece.size() < 3) return;
    double area = planar::signed_area(piece);
    if (area <= 0) return;
    group->pieces.push_back(std::move(piece));
    group->areas.push_back(area);
    group->offset_sum += offset;
}

bool touching(const planar::Polygon& a, const planar::Polygon& b, double eps) {
    auto near_edge = [&](const Vec2& p, const planar::Polygon& poly) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            Vec2 s = poly[i], e = poly[(i + 1) % poly.size()];
            Vec2 d = e - s;
            double t = std::clamp((p - s).dot(d) / d.squaredNorm(), 0.0, 1.0);
            if ((s + t * d - p).norm() <= eps) return true;
        }
        return false;
    };
    for (const auto& p : a)
        if (near_edge(p, b)) return true;
    for (const auto& p : b)
        if (near_edge(p, a)) return true;
    return false;
}

std::vector<ContactPatch> groups_to_patches(std::vector<PlaneGroup>& groups, const Tolerances& tol, BodyId id_a,
                                            BodyId id_b) {
    std::vector<ContactPatch> patches;
    const double eps = std::max(1e-9, tol.contact_gap * 1e-3);
    for (auto& g : groups) {
        if (g.pieces.empty()) continue;
        const double offset = g.offset_sum / static_cast<double>(g.pieces.size());
        const std::size_t m = g.pieces.size();
        std::vector<std::size_t> parent(m);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (touching(g.pieces[i], g.pieces[j], eps)) parent[find(i)] = find(j);

        std::map<std::size_t, std::vector<std::size_t>> components;
        for (std::size_t i = 0; i < m; ++i) components[find(i)].push_back(i);

        auto lift = [&](const Vec2& p) { return Vec3(offset * g.normal + p.x() * g.u + p.y() * g.v); };
        for (const auto& [root, members] : components) {
            std::vector<planar::Polygon> pieces;
            double area = 0.0;
            for (std::size_t i : members) {
                pieces.push_back(g.pieces[i]);
                area += g.areas[i];
            }
            if (area < tol.min_patch_area) continue;
            auto loops = planar::union_boundary(pieces, eps);
            if (loops.empty()) continue;
            std::size_t outer = 0;
            for (std::size_t k = 1; k < loops.size(); ++k)
                if (planar::signed_area(loops[k]) > planar::signed_area(loops[outer])) outer = k;
            ContactPatch patch;
            patch.body_a = id_a;
            patch.body_b = id_b;
            patch.normal = g.normal;
            patch.area = area;
            for (std::size_t k = 0; k < loops.size(); ++k) {
                std::vector<Vec3> loop3;
                for (const auto& p : loops[k]) loop3.push_back(lift(p));
                patch.contact_points.insert(patch.contact_points.end(), loop3.begin(), loop3.end());
                if (k == outer)
                    patch.polygon = std::move(loop3);
                else
                    patch.holes.push_back(std::move(loop3));
            }
            patches.push_back(std::move(patch));
        }
    }
    std::sort(patches.begin(), patches.end(), [](const ContactPatch& a, const ContactPatch& b) {
        for (int k = 0; k < 3; ++k)
            if (std::abs(a.normal[k] - b.normal[k]) > 1e-9) return a.normal[k] < b.normal[k];
        Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
        for (const auto& p : a.polygon) ca += p;
        for (const auto& p : b.polygon) cb += p;
        ca /= static_cast<double>(a.polygon.size());
        cb /= static_cast<double>(b.polygon.size());
        for (int k = 0; k < 3; ++k)
            if (std::abs(ca[k] - cb[k]) > 1e-12) return ca[k] < cb[k];
        return false;
    });
    return patches;
}

}  // namespace

std::vector<ContactPatch> detect_contacts(const PlacedShape& a, const PlacedShape& b, const Tolerances& tol,
                                          BodyId id_a, BodyId id_b) {
    const double gap = tol.contact_gap;
    if (!a.box.overlaps(b.box, gap)) return {};
    if (shapes_collide(a, b, gap))
        throw Interpenetration("bodies " + std::to_string(id_a) + " and " + std::to_string(id_b) +
                               " overlap beyond the contact gap");

    std::vector<PlaneGroup> groups;
    for (const auto& fa : a.facets) {
        const double da = fa.normal.dot(fa.loop.front());
        for (const auto& fb : b.facets) {
            if (fa.normal.dot(fb.normal) > -1.0 + 1e-9) continue;
            const double db = fa.normal.dot(fb.loop.front());
            if (std::abs(db - da) > gap) continue;
            bool coplanar = true;
            for (const auto& p : fb.loop) coplanar = coplanar && std::abs(fa.normal.dot(p) - da) <= gap;
            if (!coplanar) continue;
            add_piece(groups, fa.normal, 0.5 * (da + db), fa.loop, false, &fb.loop, true, gap);
        }
    }
    return groups_to_patches(groups, tol, id_a, id_b);
}

std::vector<ContactPatch> detect_contacts(const Shape& shape_a, const Pose& pose_a, const Shape& shape_b,
                                          const Pose& pose_b, const Tolerances& tol, BodyId id_a, BodyId id_b) {
    return detect_contacts(PlacedShape(shape_a, pose_a), PlacedShape(shape_b, pose_b), tol, id_a, id_b);
}

std::vector<ContactPatch> detect_table_contacts(const PlacedShape& s, double table_height, const Tolerances& tol,
                                                BodyId id) {
    const double gap = tol.contact_gap;
    if (collides_with_table(s, table_height, gap))
        throw Interpenetration("body " + std::to_string(id) + " penetrates the worktable");
    if (s.box.lo.z() > table_height + gap) return {};
    std::vector<PlaneGroup> groups;
    const Vec3 up = Vec3::UnitZ();
    for (const auto& f : s.facets) {
        if (f.normal.dot(up) > -1.0 + 1e-9) continue;
        bool on_table = true;
        for (const auto& p : f.loop) on_table = on_table && std::abs(p.z() - table_height) <= gap;
        if (!on_table) continue;
        add_piece(groups, up, table_height, f.loop, true, nullptr, false, gap);
    }
    return groups_to_patches(groups, tol, kTableId, id);
}

}  // namespace asmplan
