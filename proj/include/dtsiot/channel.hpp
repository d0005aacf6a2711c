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

#include "dtsiot/random.hpp"
#include "dtsiot/units.hpp"

namespace dtsiot {

struct LinkBudget {
    double carrier_hz = 868e6;
    double tx_gain_lin = 1.0;               // 0 dBi
    double rx_gain_lin = 22.38721138568338; // 13.5 dBi
    double bandwidth_hz = 125e3;
    double noise_figure_db = 6.0;
    double speed_of_light_mps = kSpeedOfLightMps;

    double wavelength_m() const { return speed_of_light_mps / carrier_hz; }
};

/// How the Rice-factor polynomial output is interpreted.
enum class RiceKUnits { Db, Linear };
/// How the shadowing-mean polynomial output is interpreted: directly as the
/// mean of ln S, or as a dB value scaled by beta = ln(10)/20.
enum class MuUnits { Natural, Db };

struct FadingConfig {
    RiceKUnits rice_k_units = RiceKUnits::Db;
    MuUnits mu_units = MuUnits::Db;
    double sigma_floor_db = 0.1;
    bool enabled = true; // false forces S = h = 1 (deterministic link)
};

/// Raw outputs of the elevation-fit polynomials for the rural tree-shadowed
/// Corazza-Vatalaro channel; unit interpretation is applied separately.
struct FadingParams {
    double k;        // Rice factor, units per RiceKUnits
    double mu;       // shadowing mean, units per MuUnits
    double sigma_db; // shadowing spread, dB (floored)
};

inline constexpr double kShadowingBeta = 0.11512925464970228; // ln(10)/20

/// Empirical fits versus elevation angle (degrees); inputs are clamped to
/// [0, 90]. The quadratic K coefficient is positive: the fit dips slightly
/// below 20 degrees and then grows monotonically, so higher passes see a
/// stronger line-of-sight component.
inline FadingParams fading_coeffs(double alpha_deg) {
    double a = std::clamp(alpha_deg, 0.0, 90.0);
    FadingParams p;
    p.k = 2.731 - 1.0474e-1 * a + 2.7740e-3 * a * a;
    p.mu = -2.331 + 1.142e-1 * a - 1.939e-3 * a * a - 1.094e-5 * a * a * a;
    p.sigma_db = 4.5 - 0.05 * a;
    if (p.sigma_db < 0.1) p.sigma_db = 0.1; // linear fit crosses zero above 88 deg
    return p;
}

inline double rice_k_linear(double k_raw, RiceKUnits units) {
    if (units == RiceKUnits::Db) return db_to_lin(k_raw);
    return k_raw > 0.0 ? k_raw : 0.0;
}

inline double shadowing_mu_natural(double mu_raw, MuUnits units) {
    return units == MuUnits::Natural ? mu_raw : kShadowingBeta * mu_raw;
}

/// Free-space gain g = Gt * Gr * (lambda / (4 pi d))^2.
inline double path_loss_gain(double distance_m, const LinkBudget& lb) {
    if (!(distance_m > 0.0))
        throw std::domain_error("path_loss_gain: distance must be > 0");
    double x = lb.wavelength_m() / (4.0 * kPi * distance_m);
    return lb.tx_gain_lin * lb.rx_gain_lin * x * x;
}

/// Thermal noise power: -174 + F + 10 log10(B) dBm.
inline double noise_power_w(const LinkBudget& lb) {
    return dbm_to_w(-174.0 + lb.noise_figure_db + 10.0 * std::log10(lb.bandwidth_hz));
}

/// Lognormal shadowing scale: ln S ~ Normal(mu, (beta * sigma)^2).
inline double sample_shadowing(const FadingParams& p, MuUnits mu_units, RngStream& rng) {
    double mu = shadowing_mu_natural(p.mu, mu_units);
    return std::exp(rng.normal(mu, kShadowingBeta * p.sigma_db));
}

/// Rice envelope with E[h^2] = omega, drawn as the magnitude of a complex
/// Gaussian with a deterministic component of power omega*K/(K+1); exact in
/// distribution without evaluating the Bessel-function density.
inline double sample_rice_envelope(double k_lin, double omega, RngStream& rng) {
    if (!(k_lin >= 0.0) || !(omega > 0.0))
        throw std::domain_error("sample_rice_envelope: need K >= 0 and omega > 0");
    double los = std::sqrt(omega * k_lin / (k_lin + 1.0));
    double s = std::sqrt(omega / (2.0 * (k_lin + 1.0)));
    return std::hypot(los + s * rng.normal(), s * rng.normal());
}

/// One fading + shadowing realization and the resulting received power.
struct ChannelDraw {
    double shadowing_s = 1.0;
    double fading_h = 1.0;
    double rx_power_w = 0.0;
};

/// Received power for one transmission: P * g(d) * h^2 with the envelope h
/// drawn from the elevation-dependent Rice-lognormal composite. One draw per
/// packet; the envelope is held constant for the packet duration.
inline ChannelDraw received_power(double p_tx_w, double distance_m, double alpha_deg,
                                  const LinkBudget& lb, const FadingConfig& cfg, RngStream& rng) {
    ChannelDraw draw;
    double g = path_loss_gain(distance_m, lb);
    if (cfg.enabled) {
        FadingParams p = fading_coeffs(alpha_deg);
        draw.shadowing_s = sample_shadowing(p, cfg.mu_units, rng);
        double omega = draw.shadowing_s * draw.shadowing_s;
        draw.fading_h = sample_rice_envelope(rice_k_linear(p.k, cfg.rice_k_units), omega, rng);
    }
    draw.rx_power_w = p_tx_w * g * draw.fading_h * draw.fading_h;
    return draw;
}

} // namespace dtsiot
