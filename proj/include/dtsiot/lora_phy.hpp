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
#include <cstddef>
#include <span>
#include <vector>

#include "dtsiot/units.hpp"

namespace dtsiot {

struct LoraParams {
    int sf = 12;
    double bandwidth_hz = 125e3;
    double toa_s = 1.8104;
    int payload_bytes = 20;
    double snr_threshold_db = -20.0; // gamma
    double sir_threshold_db = 1.0;   // psi
    double sensitivity_dbm = -137.0;
    bool aloha_capture = false; // let the ALOHA baseline capture the strongest
    bool aloha_sic = false;     // give the ALOHA baseline a full SIC receiver
    int max_sic_levels = 2;     // decoded messages per overlap group
    double sic_residual = 0.0;  // fraction of a cancelled signal left behind
};

/// One scheduled uplink packet. level_index/pilot_id are 0 for plain ALOHA and
/// the 1-based power-level index for FTP/CTP (one orthogonal pilot per level).
struct TransmissionAttempt {
    int device_id = 0;
    double start_s = 0.0;
    double toa_s = 0.0;
    double p_tx_w = 0.0;
    int level_index = 0;
    int pilot_id = 0;
    double rx_power_w = 0.0;
};

enum class CollisionClass { None, Simple, Multiple };

enum class FailureReason { None, SnrBelowGamma, SirBelowPsi, SamePilot, MultipleUnresolved };

struct DecodingOutcome {
    int device_id = 0;
    bool decoded = false;
    CollisionClass collision_class = CollisionClass::None;
    int sic_stage = 0; // 0 = no SIC needed, k = k-th message decoded in its group
    FailureReason failure_reason = FailureReason::None;
};

/// SNR condition: rx at least gamma above noise (boundary inclusive).
inline bool check_c1(double rx_power_w, double noise_w, const LoraParams& params) {
    return rx_power_w >= noise_w * db_to_lin(params.snr_threshold_db);
}

/// SIR condition against the sum of concurrent interference; vacuous when
/// there is none (boundary inclusive).
inline bool check_c2(double rx_power_w, double interference_sum_w, const LoraParams& params) {
    if (interference_sum_w <= 0.0) return true;
    return rx_power_w >= interference_sum_w * db_to_lin(params.sir_threshold_db);
}

/// Partitions attempts (sorted by start_s) into maximal groups connected by
/// pairwise time overlap; [start, start+toa) intervals, chain closure. Groups
/// are contiguous runs of the sorted input, returned as views into it.
inline std::vector<std::span<const TransmissionAttempt>>
overlap_groups(std::span<const TransmissionAttempt> attempts) {
    std::vector<std::span<const TransmissionAttempt>> groups;
    std::size_t begin = 0;
    double group_end = 0.0;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        if (i == begin) {
            group_end = attempts[i].start_s + attempts[i].toa_s;
            continue;
        }
        if (attempts[i].start_s < group_end) {
            group_end = std::max(group_end, attempts[i].start_s + attempts[i].toa_s);
        } else {
            groups.push_back(attempts.subspan(begin, i - begin));
            begin = i;
            group_end = attempts[i].start_s + attempts[i].toa_s;
        }
    }
    if (begin < attempts.size()) groups.push_back(attempts.subspan(begin));
    return groups;
}

namespace detail {

// Shared receiver core. Messages are attempted strongest-first; a decoded
// message is removed from the interference pool only when the receiver
// cancels (SIC). Failed messages keep interfering with everyone below them.
inline std::vector<DecodingOutcome> decode_group(std::span<const TransmissionAttempt> group,
                                                 double noise_w, const LoraParams& params,
                                                 int max_decoded, bool cancel_decoded,
                                                 bool use_pilots) {
    const std::size_t n = group.size();
    CollisionClass cls = n == 1   ? CollisionClass::None
                         : n == 2 ? CollisionClass::Simple
                                  : CollisionClass::Multiple;

    std::vector<DecodingOutcome> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].device_id = group[i].device_id;
        out[i].collision_class = cls;
    }

    if (n == 1) {
        out[0].decoded = check_c1(group[0].rx_power_w, noise_w, params);
        if (!out[0].decoded) out[0].failure_reason = FailureReason::SnrBelowGamma;
        return out;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (group[a].rx_power_w != group[b].rx_power_w)
            return group[a].rx_power_w > group[b].rx_power_w;
        return group[a].device_id < group[b].device_id;
    });

    // Interference is the sum over concurrent signals still on the air; a
    // cancelled signal leaves only its residual fraction behind.
    std::vector<bool> cancelled(n, false);
    auto interference_for = [&](std::size_t idx) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == idx) continue;
            sum += cancelled[j] ? group[j].rx_power_w * params.sic_residual
                                : group[j].rx_power_w;
        }
        return sum;
    };

    std::vector<int> decoded_pilots;
    int decoded_count = 0;
    for (std::size_t idx : order) {
        const TransmissionAttempt& m = group[idx];
        DecodingOutcome& o = out[idx];
        if (use_pilots && std::find(decoded_pilots.begin(), decoded_pilots.end(), m.pilot_id) !=
                              decoded_pilots.end()) {
            // the channel of a same-pilot signal cannot be estimated apart
            // from the one already decoded
            o.failure_reason = FailureReason::SamePilot;
            continue;
        }
        if (!check_c1(m.rx_power_w, noise_w, params)) {
            o.failure_reason = FailureReason::SnrBelowGamma;
            continue;
        }
        if (!check_c2(m.rx_power_w, interference_for(idx), params)) {
            o.failure_reason = FailureReason::SirBelowPsi;
            continue;
        }
        if (decoded_count >= max_decoded) {
            o.failure_reason = FailureReason::MultipleUnresolved;
            continue;
        }
        o.decoded = true;
        o.sic_stage = ++decoded_count;
        decoded_pilots.push_back(m.pilot_id);
        if (cancel_decoded) cancelled[idx] = true;
    }
    return out;
}

} // namespace detail

/// Gateway receiver with successive interference cancellation: the strongest
/// message in an overlap group decodes under C1 and C2, is cancelled, and the
/// next strongest is attempted, as long as pilots stay orthogonal and at most
/// params.max_sic_levels messages per group.
inline std::vector<DecodingOutcome> sic_decode(std::span<const TransmissionAttempt> group,
                                               double noise_w, const LoraParams& params) {
    return detail::decode_group(group, noise_w, params, params.max_sic_levels,
                                /*cancel_decoded=*/true, /*use_pilots=*/true);
}

/// Capture-only baseline receiver: at most the strongest message of a group
/// decodes (C1 and C2), nothing is cancelled.
inline std::vector<DecodingOutcome> aloha_decode(std::span<const TransmissionAttempt> group,
                                                 double noise_w, const LoraParams& params) {
    return detail::decode_group(group, noise_w, params, /*max_decoded=*/1,
                                /*cancel_decoded=*/false, /*use_pilots=*/false);
}

/// Collision-channel baseline receiver: only isolated messages decode (C1);
/// any temporal overlap destroys all messages involved.
inline std::vector<DecodingOutcome> nocapture_decode(std::span<const TransmissionAttempt> group,
                                                     double noise_w, const LoraParams& params) {
    auto out = detail::decode_group(group, noise_w, params, /*max_decoded=*/1,
                                    /*cancel_decoded=*/false, /*use_pilots=*/false);
    if (group.size() > 1) {
        for (auto& o : out) {
            if (o.decoded) {
                o.decoded = false;
                o.sic_stage = 0;
                o.failure_reason = FailureReason::SirBelowPsi;
            }
        }
    }
    return out;
}

/// Reference LoRa time-on-air for an explicit-header, CRC-on uplink frame.
/// Provided for documentation; the simulator uses the configured constant.
inline double toa_from_formula(int sf, double bandwidth_hz, int payload_bytes,
                               double preamble_symbols = 8.0, int coding_rate = 1) {
    double t_sym = std::pow(2.0, sf) / bandwidth_hz;
    bool ldro = sf >= 11 && bandwidth_hz <= 125e3;
    double num = 8.0 * payload_bytes - 4.0 * sf + 28.0 + 16.0;
    double den = 4.0 * (sf - (ldro ? 2 : 0));
    double payload_symbols = 8.0 + std::max(std::ceil(num / den) * (coding_rate + 4.0), 0.0);
    return (preamble_symbols + 4.25 + payload_symbols) * t_sym;
}

} // namespace dtsiot
