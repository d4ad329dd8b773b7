#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "percept/corridor.hpp"

using namespace percept;
using namespace percept::corridor;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent geometry oracle: intersect the ray from the image point at
// body (0, d) through the pinhole at body (f, 0) with the wall, using plain
// 2-D vector arithmetic.
FeaturePoint ray_oracle(const VehicleState& st, const CorridorScene& sc, double d) {
    const double s = std::sin(st.theta), c = std::cos(st.theta);
    const double ix = st.x - d * s, iy = st.y + d * c;          // image point, world frame
    const double px = st.x + sc.focal_length_f * c;             // pinhole, world frame
    const double py = st.y + sc.focal_length_f * s;
    const double dirx = px - ix, diry = py - iy;
    const double wall = d > 0.0 ? sc.half_width_R : -sc.half_width_R;
    const double t = (wall - px) / dirx;
    return FeaturePoint{wall, py + t * diry};
}

} // namespace

TEST_CASE("tau_of_feature fixtures") {
    const CorridorScene scene(2.0, 1.0, 1.0);
    SUBCASE("straight-ahead feature at unit speed") {
        CHECK(tau_of_feature({0.0, 0.0, 0.0}, scene, {5.0, 0.0}) == doctest::Approx(5.0));
    }
    SUBCASE("feature directly abeam transits now") {
        CHECK(tau_of_feature({0.0, 3.0, kPi / 2.0}, scene, {1.7, 3.0}) ==
              doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("general heading with speed 2") {
        const CorridorScene fast(2.0, 1.0, 2.0);
        CHECK(tau_of_feature({0.0, 0.0, kPi / 2.0}, fast, {3.0, 4.0}) == doctest::Approx(2.0));
    }
}

TEST_CASE("tau_from_image_track") {
    CHECK(tau_from_image_track(1.0, 0.5) == doctest::Approx(2.0));
    CHECK(tau_from_image_track(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(tau_from_image_track(1.0, 0.0), UndefinedTauError);
    CHECK_THROWS_AS(tau_from_image_track(1.0, 1e-13), UndefinedTauError);

    // Similar-triangles substitution: d_i = f D / x~, d_i_dot = v d_i / x~
    // gives tau = x~ / v.
    const double f = 1.0, D = 2.0, xt = 4.0, v = 1.0;
    const double d_i = f * D / xt;
    const double d_i_dot = v * d_i / xt;
    CHECK(tau_from_image_track(d_i, d_i_dot) == doctest::Approx(xt / v));
}

TEST_CASE("wall_feature_world fixtures") {
    const CorridorScene scene(2.0, 1.0, 1.0);
    const VehicleState centered{0.0, 0.0, kPi / 2.0};

    SUBCASE("right wall feature from the centered aligned pose") {
        const FeaturePoint o = wall_feature_world(centered, scene, WallSide::right);
        CHECK(o.xr == 2.0); // exactly +R
        CHECK(o.yr == doctest::Approx(3.0).epsilon(1e-14)); // f + (R - x) f = 3
    }
    SUBCASE("left wall x-coordinate is exactly -R") {
        const FeaturePoint o = wall_feature_world(centered, scene, WallSide::left);
        CHECK(o.xr == -2.0);
    }
    SUBCASE("left/right symmetry at the centered aligned pose") {
        const FeaturePoint l = wall_feature_world(centered, scene, WallSide::left);
        const FeaturePoint r = wall_feature_world(centered, scene, WallSide::right);
        CHECK(l.yr == doctest::Approx(r.yr).epsilon(1e-14));
    }
    SUBCASE("heading outside the critical cone misses the wall") {
        CHECK_THROWS_AS(wall_feature_world({0.0, 0.0, kPi / 6.0}, scene, WallSide::left),
                        NoIntersectionError);
    }
}

TEST_CASE("wall features match the ray-intersection oracle") {
    const CorridorScene scene(1.5, 0.8, 1.0);
    for (double x : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
        for (double theta_deg : {48.0, 70.0, 90.0, 110.0, 131.0}) {
            const VehicleState st{x, 0.7, theta_deg * kPi / 180.0};
            for (double d : {-1.0, 1.0, -0.8, 1.2}) {
                const FeaturePoint got = wall_feature_at(st, scene, d);
                const FeaturePoint want = ray_oracle(st, scene, d);
                CHECK(got.xr == want.xr);
                CHECK(got.yr == doctest::Approx(want.yr).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("tau_pair_exact") {
    SUBCASE("centered aligned pose gives tau = f (1 + R) on both sides") {
        const CorridorScene scene(2.0, 1.0, 1.0);
        const TauPair p = tau_pair_exact({0.0, 0.0, kPi / 2.0}, scene);
        CHECK(p.tau_left == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(p.tau_right == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("centerline symmetry for any aligned pose") {
        const CorridorScene scene(1.2, 0.7, 2.0);
        const TauPair p = tau_pair_exact({0.0, 5.0, kPi / 2.0}, scene);
        CHECK(p.tau_left == doctest::Approx(p.tau_right).epsilon(1e-14));
    }
    SUBCASE("matches tau_of_feature composed with wall_feature_world on a grid") {
        const CorridorScene scene(2.0, 1.0, 1.3);
        for (int ix = 0; ix < 10; ++ix) {
            for (int it = 0; it < 10; ++it) {
                const double x = -1.6 + 3.2 * ix / 9.0;
                const double theta = (50.0 + 80.0 * it / 9.0) * kPi / 180.0;
                const VehicleState st{x, -2.0, theta};
                const TauPair p = tau_pair_exact(st, scene);
                const double tl =
                    tau_of_feature(st, scene, wall_feature_world(st, scene, WallSide::left));
                const double tr =
                    tau_of_feature(st, scene, wall_feature_world(st, scene, WallSide::right));
                CHECK(p.tau_left == doctest::Approx(tl).epsilon(1e-12));
                CHECK(p.tau_right == doctest::Approx(tr).epsilon(1e-12));
            }
        }
    }
    SUBCASE("cone violation") {
        const CorridorScene scene(2.0, 1.0, 1.0);
        CHECK_THROWS_AS(tau_pair_exact({0.0, 0.0, kPi / 5.0}, scene), NoIntersectionError);
    }
}

TEST_CASE("tau_balance_closed_form") {
    SUBCASE("rest point: no turn command on the centerline") {
        const CorridorScene scene(1.0, 1.0, 1.0);
        CHECK(std::abs(tau_balance_closed_form({0.0, 4.0, kPi / 2.0}, scene, 1.0)) < 1e-14);
    }
    SUBCASE("worked substitution at f=1, R=1, k=1, x=0.1") {
        const CorridorScene scene(1.0, 1.0, 1.0);
        CHECK(tau_balance_closed_form({0.1, 0.0, kPi / 2.0}, scene, 1.0) ==
              doctest::Approx(0.2).epsilon(1e-14));
    }
    SUBCASE("matches k (tau_l - tau_r) on a 1000-state grid to 1e-10") {
        const CorridorScene scene(2.0, 0.9, 1.1);
        const double k = 0.37;
        int checked = 0;
        for (int ix = 0; ix < 40; ++ix) {
            for (int it = 0; it < 25; ++it) {
                const double x = -1.8 + 3.6 * ix / 39.0;
                const double theta = (55.0 + 70.0 * it / 24.0) * kPi / 180.0;
                const VehicleState st{x, 0.0, theta};
                const TauPair p = tau_pair_exact(st, scene);
                CHECK(tau_balance_closed_form(st, scene, k) ==
                      doctest::Approx(k * (p.tau_left - p.tau_right)).epsilon(1e-10));
                ++checked;
            }
        }
        CHECK(checked == 1000);
    }
    SUBCASE("steers away from the near wall") {
        // Off-center to the right and aligned: the right-wall tau is smaller,
        // so u = k (tau_l - tau_r) > 0 turns the heading leftward; mirrored
        // on the other side.
        const CorridorScene scene(2.0, 1.0, 1.0);
        CHECK(tau_balance_closed_form({0.5, 0.0, kPi / 2.0}, scene, 0.3) > 0.0);
        CHECK(tau_balance_closed_form({-0.5, 0.0, kPi / 2.0}, scene, 0.3) < 0.0);
    }
    SUBCASE("critical heading is rejected") {
        const CorridorScene scene(1.0, 1.0, 1.0);
        CHECK_THROWS_AS(tau_balance_closed_form({0.0, 0.0, kPi / 4.0}, scene, 1.0),
                        CriticalHeadingError);
    }
}

TEST_CASE("tau is maximized when the heading points at the feature") {
    const CorridorScene scene(2.0, 1.0, 1.0);
    for (const FeaturePoint feat : {FeaturePoint{1.5, 4.0}, FeaturePoint{-1.0, 2.0},
                                    FeaturePoint{0.5, 8.0}}) {
        const VehicleState base{0.2, -1.0, 0.0};
        double best_theta = 0.0, best_tau = -1e300;
        for (double theta = 0.0; theta < kPi; theta += 1e-4) {
            const double tau =
                tau_of_feature({base.x, base.y, theta}, scene, feat);
            if (tau > best_tau) {
                best_tau = tau;
                best_theta = theta;
            }
        }
        const double aim = std::atan2(feat.yr - base.y, feat.xr - base.x);
        CHECK(std::abs(best_theta - aim) < 1e-4);
    }
}

TEST_CASE("scene invariants are enforced") {
    CHECK_THROWS_AS(CorridorScene(-1.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(CorridorScene(1.0, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(CorridorScene(1.0, 1.0, -2.0), ParameterError);
}
