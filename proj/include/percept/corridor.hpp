#pragma once

#include "percept/errors.hpp"

namespace percept::corridor {

/// Planar pose of the camera vehicle in the world frame. The corridor walls
/// sit at x = -R (left) and x = +R (right); theta = pi/2 is parallel to the
/// walls, heading in +y.
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

/// Corridor geometry constants. The focal length is tan(phi) of the pinhole
/// camera; the critical heading angles are phi and pi - phi.
struct CorridorScene {
    CorridorScene(double half_width_R, double focal_length_f, double speed_v);
    double half_width_R;
    double focal_length_f;
    double speed_v;
};

/// A wall feature in world coordinates.
struct FeaturePoint {
    double xr = 0.0;
    double yr = 0.0;
};

struct TauPair {
    double tau_left = 0.0;
    double tau_right = 0.0;
};

enum class WallSide { left, right };

/// Time-to-transit of a world feature seen from a moving vehicle:
/// [cos(theta)(xr - x) + sin(theta)(yr - y)] / v.
double tau_of_feature(const VehicleState& state, const CorridorScene& scene,
                      const FeaturePoint& feat);

/// Time-to-transit from an image-plane track: d_i / d_i_dot. Throws
/// UndefinedTauError when |d_i_dot| <= 1e-12 (feature at transit or
/// stationary gaze).
double tau_from_image_track(double d_i, double d_i_dot);

/// True iff the heading is strictly inside the critical cone
/// phi < theta < pi - phi (tan phi = f), so both photoreceptor gazes
/// intersect their intended walls.
bool inside_critical_cone(double theta, double focal_length_f);

/// World coordinates of the wall feature registered at image position
/// image_pos on the body y-axis (the photoreceptor location). Positive
/// positions look across the focal point at the right wall, negative at the
/// left wall. Throws NoIntersectionError when the gaze misses the wall.
FeaturePoint wall_feature_at(const VehicleState& state, const CorridorScene& scene,
                             double image_pos);

/// Wall feature for the nominal receptors at image positions -1 (left wall)
/// and +1 (right wall).
FeaturePoint wall_feature_world(const VehicleState& state, const CorridorScene& scene,
                                WallSide side);

/// Exact time-to-transit of the wall feature registered at image position
/// image_pos, scaled by 1/v. Non-throwing variant: returns false when the
/// gaze misses the wall.
bool tau_receptor_maybe(const VehicleState& state, const CorridorScene& scene,
                        double image_pos, double& tau_out) noexcept;

/// Throwing wrapper around tau_receptor_maybe.
double tau_receptor(const VehicleState& state, const CorridorScene& scene,
                    double image_pos);

/// Exact times to transit the two wall features registered at image
/// positions +-1, scaled by 1/v.
TauPair tau_pair_exact(const VehicleState& state, const CorridorScene& scene);

/// Closed form of the steering command k(tau_l - tau_r):
///   -2 f k (f cos(theta)(sin(theta) + R) + x sin(theta))
///   / (f^2 cos^2(theta) - sin^2(theta)) / v.
/// Throws CriticalHeadingError when the denominator magnitude is below 1e-12.
double tau_balance_closed_form(const VehicleState& state, const CorridorScene& scene,
                               double gain_k);

} // namespace percept::corridor
