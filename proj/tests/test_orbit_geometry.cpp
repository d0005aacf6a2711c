// SPDX-License-Identifier: Apache-2.0
//
// dtsiot: LoRa direct-to-satellite IoT uplink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dtsiot/orbit_geometry.hpp"
#include "dtsiot/random.hpp"

using namespace dtsiot;

namespace {

OrbitConfig reference_orbit() {
    OrbitConfig orbit;
    orbit.altitude_m = 550e3;
    orbit.ground_speed_mps = 7000.0;
    orbit.min_elevation_deg = 30.0;
    return orbit;
}

// Independent inverse of the elevation formula: bisection on
// elevation_from_ground_geometry over the central angle.
double bisect_central_angle(double alpha_deg, const OrbitConfig& orbit) {
    double lo = 0.0;
    double hi = std::acos(orbit.earth_radius_m / (orbit.earth_radius_m + orbit.altitude_m));
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2.0;
        double a = elevation_from_ground_geometry(orbit.earth_radius_m * mid, orbit);
        (a > alpha_deg ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

} // namespace

TEST_CASE("slant range collapses to the altitude at zenith", "[orbit]") {
    auto orbit = reference_orbit();
    CHECK(slant_range(90.0, orbit) == Catch::Approx(550e3).epsilon(1e-12));
}

TEST_CASE("slant range at the horizon matches the tangent geometry", "[orbit]") {
    auto orbit = reference_orbit();
    double r = orbit.earth_radius_m, rh = r + orbit.altitude_m;
    CHECK(slant_range(0.0, orbit) == Catch::Approx(std::sqrt(rh * rh - r * r)).epsilon(1e-12));
    // frozen from an independent high-precision evaluation
    CHECK(slant_range(0.0, orbit) == Catch::Approx(2705235.6644107736).epsilon(1e-12));
}

TEST_CASE("slant range at 30 degrees matches the pinned constant", "[orbit]") {
    // frozen from an independent high-precision evaluation
    CHECK(slant_range(30.0, reference_orbit()) ==
          Catch::Approx(992868.1232195737).epsilon(1e-12));
}

TEST_CASE("slant range is strictly decreasing in elevation", "[orbit]") {
    auto orbit = reference_orbit();
    double prev = slant_range(0.0, orbit);
    for (int i = 1; i <= 900; ++i) {
        double d = slant_range(i * 0.1, orbit);
        REQUIRE(d < prev);
        prev = d;
    }
}

TEST_CASE("slant range rejects out-of-range elevations", "[orbit]") {
    auto orbit = reference_orbit();
    CHECK_THROWS_AS(slant_range(-0.1, orbit), std::domain_error);
    CHECK_THROWS_AS(slant_range(90.1, orbit), std::domain_error);
}

TEST_CASE("elevation is 90 degrees under the satellite", "[orbit]") {
    CHECK(elevation_from_ground_geometry(0.0, reference_orbit()) ==
          Catch::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("elevation drops below zero past the horizon", "[orbit]") {
    auto orbit = reference_orbit();
    double horizon = std::acos(orbit.earth_radius_m / (orbit.earth_radius_m + orbit.altitude_m));
    CHECK(elevation_from_ground_geometry(orbit.earth_radius_m * (horizon + 0.01), orbit) < 0.0);
}

TEST_CASE("bisection on the elevation formula recovers the 30 degree offset", "[orbit]") {
    auto orbit = reference_orbit();
    double psi = bisect_central_angle(30.0, orbit);
    CHECK(elevation_from_ground_geometry(orbit.earth_radius_m * psi, orbit) ==
          Catch::Approx(30.0).margin(1e-9));
    CHECK(psi == Catch::Approx(central_angle_for_elevation(30.0, orbit)).epsilon(1e-10));
}

TEST_CASE("elevation and slant range are exact inverses", "[orbit]") {
    auto orbit = reference_orbit();
    RngStream rng(42);
    for (int i = 0; i < 1000; ++i) {
        double alpha = rng.uniform(orbit.min_elevation_deg, 90.0);
        double psi = central_angle_for_elevation(alpha, orbit);
        double back = elevation_from_ground_geometry(orbit.earth_radius_m * psi, orbit);
        REQUIRE(back == Catch::Approx(alpha).margin(1e-6));
        // chord distance at this central angle equals the slant range
        REQUIRE(chord_distance(psi, orbit) ==
                Catch::Approx(slant_range(alpha, orbit)).epsilon(1e-6));
    }
}

TEST_CASE("on-track pass peaks at zenith", "[orbit]") {
    auto orbit = reference_orbit();
    // closest approach at t = 20 s, exactly on the sampling grid
    DeviceLocation dev{0.0, 20.0 * orbit.ground_speed_mps};
    auto pass = compute_pass(dev, orbit, 1.0);
    REQUIRE(pass.has_window());
    CHECK(pass.max_elevation_deg == Catch::Approx(90.0).margin(1e-9));
    CHECK(pass.max_elevation_time_s == 20.0);
    double d_min = pass.distance_at(pass.max_elevation_time_s);
    CHECK(d_min == Catch::Approx(orbit.altitude_m).epsilon(1e-9));
}

TEST_CASE("pass invariants hold over random devices", "[orbit]") {
    auto orbit = reference_orbit();
    RngStream rng(7);
    double d_edge = slant_range(orbit.min_elevation_deg, orbit);
    int nonempty = 0;
    for (int trial = 0; trial < 50; ++trial) {
        DeviceLocation dev{rng.uniform(-500e3, 500e3), rng.uniform(-900e3, 900e3)};
        auto pass = compute_pass(dev, orbit, 1.0, trial);
        if (!pass.has_window()) continue;
        ++nonempty;
        std::size_t peak = 0;
        for (std::size_t i = 0; i < pass.samples.size(); ++i) {
            const auto& s = pass.samples[i];
            REQUIRE(s.elevation_deg >= orbit.min_elevation_deg);
            REQUIRE(s.distance_m >= orbit.altitude_m * (1.0 - 1e-12));
            REQUIRE(s.distance_m <= d_edge * (1.0 + 1e-12));
            if (pass.samples[i].elevation_deg > pass.samples[peak].elevation_deg) peak = i;
        }
        // unimodal: ascending then descending around the peak
        for (std::size_t i = 1; i <= peak; ++i)
            REQUIRE(pass.samples[i].elevation_deg >= pass.samples[i - 1].elevation_deg);
        for (std::size_t i = peak + 1; i < pass.samples.size(); ++i)
            REQUIRE(pass.samples[i].elevation_deg <= pass.samples[i - 1].elevation_deg);
        // distance is minimal exactly at maximum elevation
        for (const auto& s : pass.samples)
            REQUIRE(s.distance_m >= pass.samples[peak].distance_m);
        if (pass.samples.size() > 2) {
            REQUIRE(pass.rise_time_s < pass.max_elevation_time_s);
            REQUIRE(pass.max_elevation_time_s < pass.set_time_s);
        }
    }
    REQUIRE(nonempty > 20);
}

TEST_CASE("a device just inside the footprint gets a short low peak window", "[orbit]") {
    auto orbit = reference_orbit();
    double psi_vis = central_angle_for_elevation(orbit.min_elevation_deg, orbit);
    DeviceLocation dev{0.97 * orbit.earth_radius_m * psi_vis, 0.0};
    auto pass = compute_pass(dev, orbit, 1.0);
    REQUIRE(pass.has_window());
    CHECK(pass.max_elevation_deg < 35.0);
    CHECK(pass.max_elevation_deg >= 30.0);

    // window endpoints agree with the bisection oracle: the device is visible
    // while the along-track arc keeps the total central angle inside psi_vis
    double b = dev.cross_track_m / orbit.earth_radius_m;
    double cos_half = std::cos(psi_vis) / std::cos(b);
    double half_arc = orbit.earth_radius_m * std::acos(cos_half);
    double t_rise_exact = (dev.along_track_m - half_arc) / orbit.ground_speed_mps;
    double t_set_exact = (dev.along_track_m + half_arc) / orbit.ground_speed_mps;
    CHECK(pass.rise_time_s >= t_rise_exact - 1.0);
    CHECK(pass.rise_time_s <= t_rise_exact + 1.0);
    CHECK(pass.set_time_s >= t_set_exact - 1.0);
    CHECK(pass.set_time_s <= t_set_exact + 1.0);
}

TEST_CASE("beyond the footprint the window is empty", "[orbit]") {
    auto orbit = reference_orbit();
    double psi_vis = central_angle_for_elevation(orbit.min_elevation_deg, orbit);
    DeviceLocation dev{1.05 * orbit.earth_radius_m * psi_vis, 0.0};
    CHECK_FALSE(compute_pass(dev, orbit, 1.0).has_window());
}

TEST_CASE("coarsening the sample period moves rise/set by at most one period", "[orbit]") {
    auto orbit = reference_orbit();
    RngStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        DeviceLocation dev{rng.uniform(-400e3, 400e3), rng.uniform(-600e3, 600e3)};
        auto fine = compute_pass(dev, orbit, 1.0);
        auto coarse = compute_pass(dev, orbit, 2.0);
        if (!fine.has_window() || !coarse.has_window()) continue;
        REQUIRE(std::abs(fine.rise_time_s - coarse.rise_time_s) <= 2.0);
        REQUIRE(std::abs(fine.set_time_s - coarse.set_time_s) <= 2.0);
    }
}

TEST_CASE("max-elevation times cluster while visibility windows spread", "[orbit]") {
    // a France-sized field: the span between first and last maximum-elevation
    // time is several times shorter than the union of visibility windows
    auto orbit = reference_orbit();
    RngStream rng(3);
    double first_peak = 1e30, last_peak = -1e30;
    double union_rise = 1e30, union_set = -1e30;
    int windows = 0;
    for (int i = 0; i < 40; ++i) {
        DeviceLocation dev{rng.uniform(-500e3, 500e3), rng.uniform(-300e3, 300e3)};
        auto pass = compute_pass(dev, orbit, 1.0, i);
        if (!pass.has_window()) continue;
        ++windows;
        first_peak = std::min(first_peak, pass.max_elevation_time_s);
        last_peak = std::max(last_peak, pass.max_elevation_time_s);
        union_rise = std::min(union_rise, pass.rise_time_s);
        union_set = std::max(union_set, pass.set_time_s);
    }
    REQUIRE(windows > 30);
    double peak_interval = last_peak - first_peak;
    double total_window = union_set - union_rise;
    CHECK(peak_interval * 3.0 < total_window);
}
