#pragma once

#include <array>

#include "asmplan/geometry.hpp"

namespace asmplan {

/// Parallel-jaw gripper modelled as three boxes (two fingers and a palm) in the
/// gripper frame: jaw axis = local y, approach = local -z. Each finger pad is a
/// finger_width square centred on its contact point; the finger runs back along
/// +z for finger_length, then the palm spans the full stroke.
struct GripperSpec {
    double max_opening = 0.085;
    double finger_width = 0.02;
    double finger_length = 0.065;
    double finger_thickness = 0.008;
    double palm_depth = 0.03;

    bool valid() const {
        return max_opening > 0 && finger_width > 0 && finger_length > finger_width && finger_thickness > 0 &&
               palm_depth > 0;
    }
};

struct Grasp {
    Pose pose;                       // gripper frame, in the frame the grasp is expressed in
    double opening = 0.0;
    std::array<Vec3, 2> contacts{};  // contact on +y jaw, then on -y jaw
    int pair_index = 0;
    int grid_index = 0;
    int roll_index = 0;

    Grasp transformed(const Pose& p) const {
        Grasp g = *this;
        g.pose = p * pose;
        g.contacts = {p.apply(contacts[0]), p.apply(contacts[1])};
        return g;
    }
    Vec3 jaw_axis() const { return pose.rotation.col(1); }
    Vec3 approach() const { return -pose.rotation.col(2); }
};

/// Collision boxes (finger +y, finger -y, palm) in the grasp's frame.
std::array<ConvexPart, 3> gripper_parts(const GripperSpec& spec, const Grasp& grasp);
/// The same boxes as one shape per box, each expressed in the gripper frame.
std::array<Shape, 3> gripper_box_shapes(const GripperSpec& spec, double opening);

}  // namespace asmplan
