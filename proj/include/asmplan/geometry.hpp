#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "asmplan/error.hpp"

namespace asmplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Cell = std::array<int, 3>;

/// Integer id of a body in a scene. Workpieces are 0..n-1; the worktable is kTableId.
using BodyId = int;
inline constexpr BodyId kTableId = -1;

/// Rigid transform x -> R x + t.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }
    static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
    static Pose from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
    Pose operator*(const Pose& rhs) const;
    Pose inverse() const;
    Eigen::Quaterniond quaternion() const;
    bool is_valid(double tol = 1e-9) const;
};

/// Orthonormal tangent pair (u, v) with u x v = n, seeded deterministically from n.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n);

/// Planar convex polygon with counter-clockwise loop about its outward normal.
struct Facet {
    std::vector<Vec3> loop;
    Vec3 normal = Vec3::UnitZ();
};

/// Convex polyhedron used for collision queries (separating-axis test).
struct ConvexPart {
    std::vector<Vec3> vertices;
    std::vector<Vec3> face_normals;
    std::vector<Vec3> edge_directions;

    ConvexPart transformed(const Pose& pose) const;
    ConvexPart translated(const Vec3& offset) const;
};

ConvexPart make_box_part(const Vec3& lo, const Vec3& hi);

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    bool overlaps(const Aabb& o, double slack) const {
        return (lo.array() <= o.hi.array() + slack).all() && (o.lo.array() <= hi.array() + slack).all();
    }
};

enum class ShapeKind { Voxels, Mesh, Box };

/// Rigid body geometry in its own frame.
///
/// Every shape carries three views of the same solid: a closed outward triangle
/// mesh (export and mass properties), planar convex facets (contact and grasp
/// analysis) and a convex decomposition (collision). Polycubes decompose into
/// their cells; imported meshes use their convex hull as collision proxy.
struct Shape {
    ShapeKind kind = ShapeKind::Voxels;
    std::vector<Cell> voxels;
    double voxel_size = 0.0;

    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Facet> facets;
    std::vector<ConvexPart> parts;

    double volume = 0.0;
    Vec3 centroid = Vec3::Zero();

    double surface_area() const;
    double signed_volume() const;
};

Shape build_shape(std::span<const Cell> voxels, double voxel_size);
Shape build_box_shape(const Vec3& lo, const Vec3& hi);
/// Closed, outward-oriented triangle mesh. Throws InvalidMesh otherwise.
Shape build_mesh_shape(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles);

struct Tolerances {
    double contact_gap = 1e-4;
    double min_patch_area = 1e-10;
    int sweep_steps = 16;

    bool valid() const { return contact_gap > 0 && min_patch_area > 0 && sweep_steps > 0; }
};

/// Coplanar contact region between two bodies. The normal points from body_a into body_b.
struct ContactPatch {
    BodyId body_a = 0;
    BodyId body_b = 1;
    Vec3 normal = Vec3::UnitZ();
    std::vector<Vec3> polygon;                  // outer boundary loop
    std::vector<std::vector<Vec3>> holes;
    std::vector<Vec3> contact_points;           // vertices of all boundary loops
    double area = 0.0;
};

/// A shape placed in the world, with world-frame facets and parts cached.
struct PlacedShape {
    const Shape* shape = nullptr;
    Pose pose;
    std::vector<Facet> facets;
    std::vector<ConvexPart> parts;
    std::vector<Aabb> part_boxes;
    Aabb box;

    PlacedShape() = default;
    PlacedShape(const Shape& s, const Pose& p);
};

struct Obstacle {
    const Shape* shape = nullptr;
    Pose pose;
};

/// Minimum overlap over candidate separating axes; positive means interpenetration depth.
double penetration_depth(const ConvexPart& a, const ConvexPart& b);

/// Penetration depth of a into the half-space z <= height (negative when clear of it).
double halfspace_penetration(const ConvexPart& a, double height);

bool shapes_collide(const PlacedShape& a, const PlacedShape& b, double gap);
bool collides_with_table(const PlacedShape& a, double table_height, double gap);

std::vector<ContactPatch> detect_contacts(const PlacedShape& a, const PlacedShape& b, const Tolerances& tol,
                                          BodyId id_a = 0, BodyId id_b = 1);
std::vector<ContactPatch> detect_contacts(const Shape& shape_a, const Pose& pose_a, const Shape& shape_b,
                                          const Pose& pose_b, const Tolerances& tol, BodyId id_a = 0,
                                          BodyId id_b = 1);

/// Contacts between the worktable (half-space z <= table_height, body_a) and a shape.
std::vector<ContactPatch> detect_table_contacts(const PlacedShape& s, double table_height, const Tolerances& tol,
                                                BodyId id);

/// True iff the shape translated from start_pose along direction over [0, distance]
/// intersects an obstacle beyond the contact gap. The sweep is evaluated exactly
/// (continuous in the translation parameter), so the result is monotone in distance.
bool swept_collision(const Shape& shape, const Pose& start_pose, const Vec3& direction, double distance,
                     std::span<const Obstacle> obstacles, const Tolerances& tol);
bool swept_collision(const PlacedShape& moving, const Vec3& direction, double distance,
                     std::span<const PlacedShape* const> obstacles, const Tolerances& tol);

/// Exact maximum over t in [0, distance] of the penetration of (a + t*direction) into b.
double max_swept_penetration(const ConvexPart& a, const Vec3& direction, double distance, const ConvexPart& b);

double polygon_area(std::span<const Vec3> loop, const Vec3& normal);

namespace planar {

using Polygon = std::vector<Vec2>;

double signed_area(const Polygon& poly);
/// Intersection of two convex counter-clockwise polygons.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
bool contains(const Polygon& convex_ccw, const Vec2& p, double eps);

/// Boundary loops of the union of interior-disjoint convex pieces.
std::vector<Polygon> union_boundary(const std::vector<Polygon>& pieces, double eps);

}  // namespace planar

}  // namespace asmplan
