#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tacmap/error.hpp"

namespace tacmap {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rigid transform x -> R x + t with R stored as a unit quaternion.
class RigidPose {
 public:
  static constexpr double kUnitTolerance = 1e-9;

  RigidPose() : rotation_(Quat::Identity()), translation_(Vec3::Zero()) {}

  RigidPose(const Quat& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {
    const double norm = rotation.coeffs().norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitTolerance) {
      std::ostringstream msg;
      msg << "rotation quaternion must have unit norm (got " << norm << ")";
      throw InputError(msg.str());
    }
    if (!translation.allFinite()) throw InputError("translation must be finite");
  }

  // Accepts a quaternion whose norm is within `tolerance` of one and
  // renormalizes it. Used for values read from text, which rarely carry
  // enough digits to be unit to 1e-9.
  static RigidPose from_approximate(const Quat& rotation, const Vec3& translation,
                                    double tolerance = 1e-6) {
    const double norm = rotation.coeffs().norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > tolerance) {
      std::ostringstream msg;
      msg << "quaternion norm " << norm << " is not within " << tolerance << " of 1";
      throw InputError(msg.str());
    }
    return RigidPose(rotation.normalized(), translation);
  }

  static RigidPose identity() { return {}; }
  static RigidPose from_translation(const Vec3& t) { return RigidPose(Quat::Identity(), t); }
  static RigidPose from_rotation(const Quat& q) { return RigidPose(q, Vec3::Zero()); }
  static RigidPose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero()) {
    return RigidPose(Quat(Eigen::AngleAxisd(angle, axis.normalized())), t);
  }

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply_point(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_vector(const Vec3& v) const { return rotation_ * v; }

  RigidPose inverse() const {
    const Quat inv = rotation_.conjugate();
    return RigidPose(inv, -(inv * translation_));
  }

  // (a * b).apply(x) == a.apply(b.apply(x))
  friend RigidPose operator*(const RigidPose& a, const RigidPose& b) {
    Quat q = a.rotation_ * b.rotation_;
    q.normalize();
    return RigidPose(q, a.rotation_ * b.translation_ + a.translation_);
  }

 private:
  Quat rotation_;
  Vec3 translation_;
};

inline RigidPose compose(const RigidPose& a, const RigidPose& b) { return a * b; }
inline RigidPose inverse(const RigidPose& pose) { return pose.inverse(); }

}  // namespace tacmap
