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

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dtsiot/channel.hpp"
#include "dtsiot/lora_phy.hpp"
#include "dtsiot/orbit_geometry.hpp"
#include "dtsiot/strategies.hpp"

namespace dtsiot {

/// Deployment rectangle in ground-track coordinates, centered on the track.
/// The default spans are calibrated: they set the contention density that
/// reproduces the reference goodput levels checked by the acceptance suite.
struct Region {
    double along_min_m = -550e3;
    double along_max_m = 550e3;
    double cross_min_m = -700e3;
    double cross_max_m = 700e3;

    double along_span_m() const { return along_max_m - along_min_m; }
    double cross_span_m() const { return cross_max_m - cross_min_m; }
};

class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Full simulation input. Defaults reproduce the reference configuration:
/// SF12 LoRa at 868 MHz to a 550 km gateway, two received-power levels inside
/// the band reachable at the 14 dBm cap (see default_power_levels).
struct Scenario {
    int num_devices = 100;
    OrbitConfig orbit;
    LinkBudget link;
    FadingConfig fading;
    LoraParams lora;
    StrategyConfig strategy;
    Region region;
    double sample_period_s = 1.0;
    int replications = 200;
    std::uint64_t seed = 1;
};

/// Default gateway power levels, in dBm. They sit inside the received-power
/// band a max-power device can produce across a 550 km pass (about -123.7 dBm
/// at the 30 degree edge to -118.5 dBm at zenith), separated by more than the
/// capture threshold plus margin so two-level SIC has room to work.
inline PowerLevels default_power_levels() {
    return PowerLevels{{dbm_to_w(-123.5), dbm_to_w(-121.0)}};
}

inline Scenario default_scenario() {
    Scenario scn;
    scn.strategy.levels = default_power_levels();
    return scn;
}

/// Checks every invariant a runnable scenario must satisfy; throws
/// ValidationError naming the violated one.
inline void validate(const Scenario& scn) {
    auto fail = [](const std::string& msg) { throw ValidationError("invalid scenario: " + msg); };

    if (scn.num_devices < 1) fail("num_devices must be >= 1");
    if (scn.replications < 1) fail("replications must be >= 1");
    if (!(scn.sample_period_s > 0)) fail("sample_period_s must be > 0");
    if (!(scn.orbit.altitude_m > 0)) fail("altitude_m must be > 0");
    if (!(scn.orbit.earth_radius_m > 0)) fail("earth_radius_m must be > 0");
    if (!(scn.orbit.ground_speed_mps > 0)) fail("ground_speed_mps must be > 0");
    if (!(scn.orbit.min_elevation_deg > 0 && scn.orbit.min_elevation_deg < 90))
        fail("min_elevation_deg must be in (0, 90)");
    if (!(scn.link.carrier_hz > 0)) fail("carrier_hz must be > 0");
    if (!(scn.link.bandwidth_hz > 0)) fail("bandwidth_hz must be > 0");
    if (!(scn.link.tx_gain_lin > 0) || !(scn.link.rx_gain_lin > 0))
        fail("antenna gains must be > 0");
    if (!(scn.lora.toa_s > 0)) fail("toa_s must be > 0");
    if (scn.lora.payload_bytes <= 0) fail("payload_bytes must be > 0");
    if (scn.lora.max_sic_levels < 1) fail("max_sic_levels must be >= 1");
    if (scn.lora.sic_residual < 0 || scn.lora.sic_residual > 1)
        fail("sic_residual must be in [0, 1]");
    if (!(scn.strategy.p_max_w > 0)) fail("max transmit power must be > 0");
    if (scn.region.along_span_m() <= 0 || scn.region.cross_span_m() <= 0)
        fail("region spans must be > 0");

    const auto& lv = scn.strategy.levels.levels_w;
    if (lv.empty()) fail("at least one power level is required");
    for (std::size_t i = 0; i < lv.size(); ++i) {
        if (!(lv[i] > 0)) fail("power levels must be > 0");
        if (i > 0) {
            if (lv[i] <= lv[i - 1]) fail("power levels must be strictly increasing");
            double sep_db = lin_to_db(lv[i] / lv[i - 1]);
            double need_db = scn.lora.sir_threshold_db + scn.strategy.level_margin_db;
            if (sep_db < need_db - 1e-9) // tolerance for dBm -> watts round trips
                fail("adjacent power levels must be separated by at least the SIR "
                     "threshold plus level_margin_db");
        }
    }
}

} // namespace dtsiot
