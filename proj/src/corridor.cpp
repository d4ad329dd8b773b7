#include "percept/corridor.hpp"

#include <cmath>

namespace percept::corridor {

CorridorScene::CorridorScene(double half_width_R_, double focal_length_f_, double speed_v_)
    : half_width_R(half_width_R_), focal_length_f(focal_length_f_), speed_v(speed_v_) {
    if (!(half_width_R > 0.0)) throw ParameterError("CorridorScene: half_width_R must be > 0");
    if (!(focal_length_f > 0.0)) throw ParameterError("CorridorScene: focal_length_f must be > 0");
    if (!(speed_v > 0.0)) throw ParameterError("CorridorScene: speed_v must be > 0");
}

double tau_of_feature(const VehicleState& state, const CorridorScene& scene,
                      const FeaturePoint& feat) {
    return (std::cos(state.theta) * (feat.xr - state.x) +
            std::sin(state.theta) * (feat.yr - state.y)) /
           scene.speed_v;
}

double tau_from_image_track(double d_i, double d_i_dot) {
    if (std::abs(d_i_dot) <= 1e-12)
        throw UndefinedTauError("tau_from_image_track: image velocity below 1e-12");
    return d_i / d_i_dot;
}

bool inside_critical_cone(double theta, double focal_length_f) {
    const double s = std::sin(theta), c = std::cos(theta);
    // Both gaze-ray denominators positive <=> phi < theta < pi - phi.
    return (s - focal_length_f * c) > 1e-12 && (s + focal_length_f * c) > 1e-12;
}

FeaturePoint wall_feature_at(const VehicleState& state, const CorridorScene& scene,
                             double image_pos) {
    const double f = scene.focal_length_f;
    const double R = scene.half_width_R;
    const double s = std::sin(state.theta), c = std::cos(state.theta);

    // Ray from the image point at body (0, image_pos) through the pinhole at
    // body (f, 0), extended into the scene.
    const double dir_x = f * c + image_pos * s;
    const double dir_y = f * s - image_pos * c;
    const double wall_x = image_pos > 0.0 ? R : -R;
    if (image_pos == 0.0)
        throw NoIntersectionError("wall_feature_at: receptor at the focus of expansion");
    const double denom = image_pos > 0.0 ? dir_x : -dir_x;
    if (denom <= 1e-12)
        throw NoIntersectionError("wall_feature_at: gaze does not reach wall x = " +
                                  std::to_string(wall_x));
    const double tpar = (wall_x - state.x - f * c) / dir_x;
    if (tpar <= 0.0)
        throw NoIntersectionError("wall_feature_at: wall point lies behind the pinhole");
    return FeaturePoint{wall_x, state.y + f * s + tpar * dir_y};
}

FeaturePoint wall_feature_world(const VehicleState& state, const CorridorScene& scene,
                                WallSide side) {
    return wall_feature_at(state, scene, side == WallSide::right ? 1.0 : -1.0);
}

bool tau_receptor_maybe(const VehicleState& state, const CorridorScene& scene,
                        double image_pos, double& tau_out) noexcept {
    const double f = scene.focal_length_f;
    const double d = image_pos;
    const double s = std::sin(state.theta), c = std::cos(state.theta);
    const double wall = d > 0.0 ? scene.half_width_R : -scene.half_width_R;

    const double denom = f * c + d * s;
    if (d == 0.0) return false;
    if (d > 0.0 ? denom <= 1e-12 : denom >= -1e-12) return false;
    const double ratio = (wall - state.x - f * c) / denom;
    if (ratio <= 0.0) return false; // wall point behind the pinhole

    // Same closed form as in the Theorem 1 proof at d = +-1 (unit speed),
    // then scaled by 1/v.
    tau_out = (c * (wall - state.x) + s * (f * s + (f * s - d * c) * ratio)) / scene.speed_v;
    return true;
}

double tau_receptor(const VehicleState& state, const CorridorScene& scene,
                    double image_pos) {
    double tau = 0.0;
    if (!tau_receptor_maybe(state, scene, image_pos, tau))
        throw NoIntersectionError("tau_receptor: gaze misses the wall");
    return tau;
}

TauPair tau_pair_exact(const VehicleState& state, const CorridorScene& scene) {
    if (!inside_critical_cone(state.theta, scene.focal_length_f))
        throw NoIntersectionError("tau_pair_exact: heading outside the critical cone");
    return TauPair{tau_receptor(state, scene, -1.0), tau_receptor(state, scene, 1.0)};
}

double tau_balance_closed_form(const VehicleState& state, const CorridorScene& scene,
                               double gain_k) {
    const double f = scene.focal_length_f;
    const double R = scene.half_width_R;
    const double s = std::sin(state.theta), c = std::cos(state.theta);
    const double denom = f * f * c * c - s * s;
    if (std::abs(denom) < 1e-12)
        throw CriticalHeadingError("tau_balance_closed_form: heading at a critical angle");
    const double num = f * c * (s + R) + state.x * s;
    return -2.0 * f * gain_k * num / denom / scene.speed_v;
}

} // namespace percept::corridor
