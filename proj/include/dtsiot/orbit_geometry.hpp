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

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dtsiot/units.hpp"

namespace dtsiot {

/// Circular-orbit pass model: the sub-satellite point moves along a straight
/// ground track at constant speed, and device geometry is exact spherical
/// trigonometry on top of that track.
struct OrbitConfig {
    double altitude_m = 550e3;
    double ground_speed_mps = 7000.0;
    double earth_radius_m = 6.378e6;
    double min_elevation_deg = 30.0;
};

/// Device position relative to the ground track. cross_track_m is the
/// perpendicular great-circle offset, along_track_m the position of the
/// closest-approach point measured along the track from the lap origin.
struct DeviceLocation {
    double cross_track_m = 0.0;
    double along_track_m = 0.0;
};

struct PassSample {
    double time_s;
    double elevation_deg;
    double distance_m;
};

/// One device's view of a satellite lap: elevation/distance samples over the
/// contiguous interval where elevation >= min_elevation_deg. Empty samples
/// mean the device never sees the satellite this lap.
struct PassGeometry {
    int device_id = 0;
    std::vector<PassSample> samples;
    double rise_time_s = 0.0;
    double set_time_s = 0.0;
    double max_elevation_deg = 0.0;
    double max_elevation_time_s = 0.0;

    bool has_window() const { return !samples.empty(); }
    double window_length_s() const { return has_window() ? set_time_s - rise_time_s : 0.0; }

    /// Piecewise-linear interpolation over the samples; t is clamped to the window.
    double distance_at(double t) const { return interpolate(t, &PassSample::distance_m); }
    double elevation_at(double t) const { return interpolate(t, &PassSample::elevation_deg); }

  private:
    double interpolate(double t, double PassSample::*field) const {
        const auto& s = samples;
        if (t <= s.front().time_s) return s.front().*field;
        if (t >= s.back().time_s) return s.back().*field;
        auto it = std::upper_bound(s.begin(), s.end(), t,
                                   [](double v, const PassSample& p) { return v < p.time_s; });
        const PassSample& b = *it;
        const PassSample& a = *(it - 1);
        double w = (t - a.time_s) / (b.time_s - a.time_s);
        return a.*field + w * (b.*field - a.*field);
    }
};

/// Slant range d(alpha) = sqrt((R+H)^2 - (R cos a)^2) - R sin a, strictly
/// decreasing in elevation.
inline double slant_range(double alpha_deg, const OrbitConfig& orbit) {
    if (!(alpha_deg >= 0.0 && alpha_deg <= 90.0))
        throw std::domain_error("slant_range: elevation must be in [0, 90] degrees");
    double a = deg_to_rad(alpha_deg);
    double r = orbit.earth_radius_m;
    double rh = r + orbit.altitude_m;
    double rc = r * std::cos(a);
    return std::sqrt(rh * rh - rc * rc) - r * std::sin(a);
}

/// Elevation seen from a device whose Earth-central angle to the sub-satellite
/// point is psi_c = subsat_offset_m / R. Negative below the local horizon.
inline double elevation_from_ground_geometry(double subsat_offset_m, const OrbitConfig& orbit) {
    double psi = subsat_offset_m / orbit.earth_radius_m;
    double ratio = orbit.earth_radius_m / (orbit.earth_radius_m + orbit.altitude_m);
    return rad_to_deg(std::atan2(std::cos(psi) - ratio, std::sin(psi)));
}

/// Central angle at which the elevation equals alpha_deg (inverse of the
/// formula above, solved in closed form from the Earth-device-satellite triangle).
inline double central_angle_for_elevation(double alpha_deg, const OrbitConfig& orbit) {
    double a = deg_to_rad(alpha_deg);
    double r = orbit.earth_radius_m;
    double rh = r + orbit.altitude_m;
    return kPi / 2.0 - a - std::asin(r * std::cos(a) / rh);
}

/// Straight-line (chord) distance implied by a central angle. Agrees with
/// slant_range when psi and alpha describe the same geometry.
inline double chord_distance(double psi_rad, const OrbitConfig& orbit) {
    double r = orbit.earth_radius_m;
    double rh = r + orbit.altitude_m;
    return std::sqrt(r * r + rh * rh - 2.0 * r * rh * std::cos(psi_rad));
}

namespace detail {

// Great-circle central angle between the device and a sub-satellite point at
// along-track position subsat_along_m. The along- and cross-track arcs are
// perpendicular, so cos(psi) = cos(a) * cos(b).
inline double pass_central_angle(const DeviceLocation& dev, double subsat_along_m,
                                 const OrbitConfig& orbit) {
    double a = (dev.along_track_m - subsat_along_m) / orbit.earth_radius_m;
    double b = dev.cross_track_m / orbit.earth_radius_m;
    double c = std::cos(a) * std::cos(b);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace detail

/// Sweeps the sub-satellite point along the track (position = ground_speed * t,
/// samples on the global grid t = k * sample_period_s) and keeps the contiguous
/// interval where the device sees the satellite at or above min_elevation_deg.
inline PassGeometry compute_pass(const DeviceLocation& dev, const OrbitConfig& orbit,
                                 double sample_period_s, int device_id = 0) {
    if (!(sample_period_s > 0.0))
        throw std::domain_error("compute_pass: sample_period_s must be > 0");

    PassGeometry pass;
    pass.device_id = device_id;

    // Sweep only where visibility is geometrically possible: the on-track
    // visibility angle bounds the off-track one.
    double psi_vis = central_angle_for_elevation(orbit.min_elevation_deg, orbit);
    double reach_m = orbit.earth_radius_m * psi_vis;
    double t_lo = (dev.along_track_m - reach_m) / orbit.ground_speed_mps - sample_period_s;
    double t_hi = (dev.along_track_m + reach_m) / orbit.ground_speed_mps + sample_period_s;
    auto k_lo = static_cast<long long>(std::floor(t_lo / sample_period_s));
    auto k_hi = static_cast<long long>(std::ceil(t_hi / sample_period_s));

    std::size_t peak = 0;
    for (long long k = k_lo; k <= k_hi; ++k) {
        double t = static_cast<double>(k) * sample_period_s;
        double psi = detail::pass_central_angle(dev, orbit.ground_speed_mps * t, orbit);
        double alpha = elevation_from_ground_geometry(orbit.earth_radius_m * psi, orbit);
        if (alpha < orbit.min_elevation_deg) {
            if (!pass.samples.empty()) break; // window is contiguous
            continue;
        }
        pass.samples.push_back({t, alpha, chord_distance(psi, orbit)});
        if (pass.samples.back().elevation_deg > pass.samples[peak].elevation_deg)
            peak = pass.samples.size() - 1;
    }

    if (!pass.samples.empty()) {
        pass.rise_time_s = pass.samples.front().time_s;
        pass.set_time_s = pass.samples.back().time_s;
        pass.max_elevation_deg = pass.samples[peak].elevation_deg;
        pass.max_elevation_time_s = pass.samples[peak].time_s;
    }
    return pass;
}

} // namespace dtsiot
