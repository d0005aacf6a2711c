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
#include <optional>
#include <stdexcept>
#include <vector>

#include "dtsiot/channel.hpp"
#include "dtsiot/lora_phy.hpp"
#include "dtsiot/orbit_geometry.hpp"
#include "dtsiot/random.hpp"

namespace dtsiot {

/// Target average received powers at the gateway, strictly ascending.
struct PowerLevels {
    std::vector<double> levels_w;

    std::size_t count() const { return levels_w.size(); }
    double level_w(int level_index) const { return levels_w.at(level_index - 1); }
};

enum class StrategyKind { Aloha, Ftp, Ctp };

struct StrategyConfig {
    StrategyKind kind = StrategyKind::Aloha;
    double p_max_w = 0.025118864315095794; // 14 dBm
    PowerLevels levels;
    double level_margin_db = 1.5; // required separation beyond the SIR threshold
    bool ctp_fallback = false;    // drop to the next lower level when infeasible
};

/// Distance at which a transmission at p_tx_w is received at level_w under
/// free-space conditions (inverse of path_loss_gain).
inline double ftp_target_distance(double level_w, double p_tx_w, const LinkBudget& lb) {
    return lb.wavelength_m() * std::sqrt(p_tx_w * lb.tx_gain_lin * lb.rx_gain_lin / level_w) /
           (4.0 * kPi);
}

/// Transmit power required to land level_w at the gateway from distance d
/// (free-space inverse; exact inverse of path_loss_gain).
inline double ctp_power(double distance_m, double level_w, const LinkBudget& lb) {
    if (!(distance_m > 0.0)) throw std::domain_error("ctp_power: distance must be > 0");
    double lam = lb.wavelength_m();
    return 16.0 * kPi * kPi * distance_m * distance_m * level_w /
           (lam * lam * lb.tx_gain_lin * lb.rx_gain_lin);
}

struct PositionCandidate {
    double start_s;    // packet start, midpoint-aligned to the distance crossing
    int level_index;   // 1-based
};

namespace detail {

// First time in the sampled phase where the distance crosses target_m.
// `ascending` walks the pre-peak samples (distance decreasing), otherwise the
// post-peak samples (distance increasing). When the crossing falls exactly on
// a sample, the earlier sample wins.
inline std::optional<double> phase_crossing(const PassGeometry& pass, double target_m,
                                            bool ascending) {
    const auto& s = pass.samples;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].elevation_deg > s[peak].elevation_deg) peak = i;

    auto lerp_time = [&](std::size_t a, std::size_t b) -> std::optional<double> {
        double da = s[a].distance_m, db = s[b].distance_m;
        if (da == target_m) return s[a].time_s; // crossing on a sample: earlier sample wins
        bool brackets = ascending ? (da > target_m && target_m > db)
                                  : (da < target_m && target_m < db);
        if (!brackets) return std::nullopt;
        double w = (target_m - da) / (db - da);
        return s[a].time_s + w * (s[b].time_s - s[a].time_s);
    };

    if (ascending) {
        for (std::size_t i = 0; i < peak; ++i)
            if (auto t = lerp_time(i, i + 1)) return t;
        if (s[peak].distance_m == target_m) return s[peak].time_s;
    } else {
        for (std::size_t i = peak; i + 1 < s.size(); ++i)
            if (auto t = lerp_time(i, i + 1)) return t;
        if (s.size() > peak + 1 && s.back().distance_m == target_m) return s.back().time_s;
    }
    return std::nullopt;
}

inline double clip_start(double t_mid, double toa_s, const PassGeometry& pass) {
    double start = t_mid - toa_s / 2.0;
    return std::clamp(start, pass.rise_time_s, pass.set_time_s - toa_s);
}

} // namespace detail

/// Transmit-position candidates under fixed transmit power: for each level,
/// the ascending- and descending-phase times where the pass distance crosses
/// the level's target distance. Levels needing a shorter distance than the
/// pass minimum are unreachable and omitted; up to 2 * L candidates.
inline std::vector<PositionCandidate> ftp_positions(const PassGeometry& pass,
                                                    const StrategyConfig& cfg,
                                                    const LinkBudget& lb,
                                                    const LoraParams& lora) {
    std::vector<PositionCandidate> candidates;
    if (!pass.has_window() || pass.window_length_s() < lora.toa_s) return candidates;
    for (int l = 1; l <= static_cast<int>(cfg.levels.count()); ++l) {
        double d_target = ftp_target_distance(cfg.levels.level_w(l), cfg.p_max_w, lb);
        for (bool ascending : {true, false}) {
            if (auto t = detail::phase_crossing(pass, d_target, ascending))
                candidates.push_back({detail::clip_start(*t, lora.toa_s, pass), l});
        }
    }
    return candidates;
}

/// FTP: transmit at maximum power at one of the feasible positions, chosen
/// uniformly at random. Skips the lap when no level is reachable.
inline std::optional<TransmissionAttempt> ftp_schedule(const PassGeometry& pass,
                                                       const StrategyConfig& cfg,
                                                       const LinkBudget& lb,
                                                       const LoraParams& lora, RngStream& rng) {
    auto candidates = ftp_positions(pass, cfg, lb, lora);
    if (candidates.empty()) return std::nullopt;
    const PositionCandidate& pick = candidates[rng.uniform_index(candidates.size())];
    TransmissionAttempt attempt;
    attempt.device_id = pass.device_id;
    attempt.start_s = pick.start_s;
    attempt.toa_s = lora.toa_s;
    attempt.p_tx_w = cfg.p_max_w;
    attempt.level_index = pick.level_index;
    attempt.pilot_id = pick.level_index;
    return attempt;
}

/// CTP: pick a level, find the time span where the required power stays under
/// the cap (distance at the packet midpoint at most the level's max-power
/// distance), transmit at a uniform time within it with exactly the required
/// power. Falls back to lower levels when the chosen one is infeasible.
inline std::optional<TransmissionAttempt> ctp_schedule(const PassGeometry& pass,
                                                       const StrategyConfig& cfg,
                                                       const LinkBudget& lb,
                                                       const LoraParams& lora, RngStream& rng) {
    if (!pass.has_window() || pass.window_length_s() < lora.toa_s) return std::nullopt;

    int first_choice = static_cast<int>(rng.uniform_index(cfg.levels.count())) + 1;
    for (int l = first_choice; l >= 1; --l) {
        double level_w = cfg.levels.level_w(l);
        double d_max = ftp_target_distance(level_w, cfg.p_max_w, lb);
        if (d_max < pass.distance_at(pass.max_elevation_time_s)) {
            if (!cfg.ctp_fallback) break;
            continue;
        }
        // Midpoints must sit where d(t) <= d_max; that set is one interval
        // around maximum elevation because d(t) is unimodal.
        double t_lo = pass.rise_time_s;
        double t_hi = pass.set_time_s;
        if (pass.samples.front().distance_m > d_max)
            if (auto t = detail::phase_crossing(pass, d_max, true)) t_lo = *t;
        if (pass.samples.back().distance_m > d_max)
            if (auto t = detail::phase_crossing(pass, d_max, false)) t_hi = *t;

        double start_lo = std::max(pass.rise_time_s, t_lo - lora.toa_s / 2.0);
        double start_hi = std::min(pass.set_time_s - lora.toa_s, t_hi - lora.toa_s / 2.0);
        if (start_lo > start_hi) {
            if (!cfg.ctp_fallback) break;
            continue;
        }

        TransmissionAttempt attempt;
        attempt.device_id = pass.device_id;
        attempt.start_s = start_lo == start_hi ? start_lo : rng.uniform(start_lo, start_hi);
        attempt.toa_s = lora.toa_s;
        double d_mid = pass.distance_at(attempt.start_s + lora.toa_s / 2.0);
        attempt.p_tx_w = std::min(ctp_power(d_mid, level_w, lb), cfg.p_max_w);
        attempt.level_index = l;
        attempt.pilot_id = l;
        return attempt;
    }
    return std::nullopt;
}

/// ALOHA: maximum power at a start time uniform over the whole window.
inline std::optional<TransmissionAttempt> aloha_schedule(const PassGeometry& pass,
                                                         const StrategyConfig& cfg,
                                                         const LoraParams& lora, RngStream& rng) {
    if (!pass.has_window() || pass.window_length_s() < lora.toa_s) return std::nullopt;
    double hi = pass.set_time_s - lora.toa_s;
    TransmissionAttempt attempt;
    attempt.device_id = pass.device_id;
    attempt.start_s = pass.rise_time_s == hi ? hi : rng.uniform(pass.rise_time_s, hi);
    attempt.toa_s = lora.toa_s;
    attempt.p_tx_w = cfg.p_max_w;
    attempt.level_index = 0;
    attempt.pilot_id = 0;
    return attempt;
}

/// Dispatch helper used by the simulation engine.
inline std::optional<TransmissionAttempt> schedule_attempt(const PassGeometry& pass,
                                                           const StrategyConfig& cfg,
                                                           const LinkBudget& lb,
                                                           const LoraParams& lora,
                                                           RngStream& rng) {
    switch (cfg.kind) {
        case StrategyKind::Aloha: return aloha_schedule(pass, cfg, lora, rng);
        case StrategyKind::Ftp: return ftp_schedule(pass, cfg, lb, lora, rng);
        case StrategyKind::Ctp: return ctp_schedule(pass, cfg, lb, lora, rng);
    }
    return std::nullopt;
}

} // namespace dtsiot
