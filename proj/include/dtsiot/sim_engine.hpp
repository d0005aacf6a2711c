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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "dtsiot/scenario.hpp"

namespace dtsiot {

/// Per-message collision bookkeeping: counts by collision class and decode
/// result. Every attempt of a lap lands in exactly one cell.
struct CollisionHistogram {
    double none_decoded = 0, none_lost = 0;
    double simple_decoded = 0, simple_lost = 0;
    double multiple_decoded = 0, multiple_lost = 0;

    double total() const {
        return none_decoded + none_lost + simple_decoded + simple_lost + multiple_decoded +
               multiple_lost;
    }
    double none_events() const { return none_decoded + none_lost; }

    void add(CollisionClass cls, bool decoded) {
        switch (cls) {
            case CollisionClass::None: (decoded ? none_decoded : none_lost) += 1; break;
            case CollisionClass::Simple: (decoded ? simple_decoded : simple_lost) += 1; break;
            case CollisionClass::Multiple: (decoded ? multiple_decoded : multiple_lost) += 1; break;
        }
    }
};

/// Outcome of one satellite lap under one strategy.
struct LapReport {
    StrategyKind strategy = StrategyKind::Aloha;
    int num_devices = 0;
    int attempts = 0;
    int skipped_devices = 0;
    int decoded_count = 0;                // M
    double goodput_bytes = 0.0;           // G = M * b
    double mean_tx_power_w = 0.0;         // P-bar over devices that transmitted
    double energy_eff = 0.0;              // E = G / (U * P-bar)
    double energy_eff_per_joule = 0.0;    // G / (U * P-bar * ToA), supplementary
    CollisionHistogram histogram;
    // Simple groups whose two messages both decoded, total and with distinct
    // power levels; the receiver should only produce the latter kind.
    int simple_both_decoded = 0;
    int simple_both_decoded_distinct_levels = 0;
    bool degenerate = false; // no device transmitted
};

/// U i.i.d. uniform device locations over the region.
inline std::vector<DeviceLocation> deploy_devices(const Region& region, int count,
                                                  RngStream& rng) {
    std::vector<DeviceLocation> devices;
    devices.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        DeviceLocation d;
        d.along_track_m = rng.uniform(region.along_min_m, region.along_max_m);
        d.cross_track_m = rng.uniform(region.cross_min_m, region.cross_max_m);
        devices.push_back(d);
    }
    return devices;
}

/// One full lap: deploy, build passes, schedule one attempt per device, draw
/// the channel per attempt, run the gateway receiver per overlap group, and
/// aggregate the lap metrics. Each device owns derived scheduling and channel
/// substreams, so its fading realization does not depend on what other
/// devices drew or on the strategy's draw pattern.
inline LapReport run_lap(const Scenario& scn, RngStream& rng) {
    LapReport report;
    report.strategy = scn.strategy.kind;
    report.num_devices = scn.num_devices;

    auto devices = deploy_devices(scn.region, scn.num_devices, rng);
    const std::uint64_t lap_salt = rng.next_u64();

    std::vector<TransmissionAttempt> attempts;
    attempts.reserve(devices.size());
    for (std::size_t i = 0; i < devices.size(); ++i) {
        auto pass = compute_pass(devices[i], scn.orbit, scn.sample_period_s, static_cast<int>(i));
        auto sched_rng = RngStream::derive(lap_salt, static_cast<std::uint64_t>(i), 1);
        auto attempt = schedule_attempt(pass, scn.strategy, scn.link, scn.lora, sched_rng);
        if (!attempt) {
            ++report.skipped_devices;
            continue;
        }
        double t_mid = attempt->start_s + attempt->toa_s / 2.0;
        auto chan_rng = RngStream::derive(lap_salt, static_cast<std::uint64_t>(i), 2);
        auto draw = received_power(attempt->p_tx_w, pass.distance_at(t_mid),
                                   pass.elevation_at(t_mid), scn.link, scn.fading, chan_rng);
        attempt->rx_power_w = draw.rx_power_w;
        attempts.push_back(*attempt);
    }

    report.attempts = static_cast<int>(attempts.size());
    if (attempts.empty()) {
        report.degenerate = true;
        return report;
    }

    std::sort(attempts.begin(), attempts.end(), [](const auto& a, const auto& b) {
        if (a.start_s != b.start_s) return a.start_s < b.start_s;
        return a.device_id < b.device_id;
    });

    const double noise_w = noise_power_w(scn.link);
    const bool is_aloha = scn.strategy.kind == StrategyKind::Aloha;
    const bool with_sic = !is_aloha || scn.lora.aloha_sic;
    double tx_power_sum = 0.0;
    for (const auto& a : attempts) tx_power_sum += a.p_tx_w;

    for (auto group : overlap_groups(attempts)) {
        auto outcomes = with_sic              ? sic_decode(group, noise_w, scn.lora)
                        : scn.lora.aloha_capture ? aloha_decode(group, noise_w, scn.lora)
                                                 : nocapture_decode(group, noise_w, scn.lora);
        int group_decoded = 0;
        for (const auto& o : outcomes) {
            report.histogram.add(o.collision_class, o.decoded);
            if (o.decoded) {
                ++report.decoded_count;
                ++group_decoded;
            }
        }
        if (group.size() == 2 && group_decoded == 2) {
            ++report.simple_both_decoded;
            if (group[0].level_index != group[1].level_index)
                ++report.simple_both_decoded_distinct_levels;
        }
    }

    report.goodput_bytes = static_cast<double>(report.decoded_count) * scn.lora.payload_bytes;
    report.mean_tx_power_w = tx_power_sum / static_cast<double>(attempts.size());
    report.energy_eff =
        report.goodput_bytes / (static_cast<double>(scn.num_devices) * report.mean_tx_power_w);
    report.energy_eff_per_joule = report.energy_eff / scn.lora.toa_s;
    return report;
}

/// Mean and 95% confidence half-width over replications for one
/// (strategy, device count) sweep point.
struct CampaignPoint {
    StrategyKind strategy = StrategyKind::Aloha;
    int num_devices = 0;
    int replications = 0;
    double goodput_mean = 0.0, goodput_ci95 = 0.0;
    double energy_mean = 0.0, energy_ci95 = 0.0;
    double energy_per_joule_mean = 0.0;
    double decoded_mean = 0.0;
    double mean_tx_power_w = 0.0;
    double skipped_mean = 0.0;
    CollisionHistogram histogram; // mean counts per lap
    double simple_both_decoded_mean = 0.0;
    double simple_both_decoded_distinct_levels_mean = 0.0;
};

namespace detail {

struct MeanVar {
    double mean = 0.0, ci95 = 0.0;
};

inline MeanVar mean_ci(const std::vector<double>& xs) {
    MeanVar mv;
    auto n = static_cast<double>(xs.size());
    for (double x : xs) mv.mean += x;
    mv.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mv.mean) * (x - mv.mean);
        mv.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return mv;
}

} // namespace detail

/// Runs `scn.replications` independent laps for every (strategy, U) pair.
/// Each lap owns a random stream derived from (seed, U, replication), so
/// results are identical for any worker count and the three strategies face
/// the same sequence of device fields (paired comparison).
inline std::vector<CampaignPoint> run_campaign(const Scenario& base,
                                               const std::vector<int>& device_sweep,
                                               const std::vector<StrategyKind>& strategies,
                                               unsigned workers = 0) {
    struct Task {
        StrategyKind strategy;
        int num_devices;
        int replication;
    };
    std::vector<Task> tasks;
    for (auto s : strategies)
        for (int u : device_sweep)
            for (int r = 0; r < base.replications; ++r) tasks.push_back({s, u, r});

    std::vector<LapReport> laps(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            const Task& t = tasks[i];
            Scenario scn = base;
            scn.num_devices = t.num_devices;
            scn.strategy.kind = t.strategy;
            auto rng = RngStream::derive(base.seed, static_cast<std::uint64_t>(t.num_devices),
                                         static_cast<std::uint64_t>(t.replication));
            laps[i] = run_lap(scn, rng);
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<CampaignPoint> points;
    std::size_t idx = 0;
    for (auto s : strategies) {
        for (int u : device_sweep) {
            CampaignPoint p;
            p.strategy = s;
            p.num_devices = u;
            p.replications = base.replications;
            std::vector<double> goodput, energy;
            for (int r = 0; r < base.replications; ++r, ++idx) {
                const LapReport& lap = laps[idx];
                goodput.push_back(lap.goodput_bytes);
                energy.push_back(lap.energy_eff);
                p.energy_per_joule_mean += lap.energy_eff_per_joule;
                p.decoded_mean += lap.decoded_count;
                p.mean_tx_power_w += lap.mean_tx_power_w;
                p.skipped_mean += lap.skipped_devices;
                p.histogram.none_decoded += lap.histogram.none_decoded;
                p.histogram.none_lost += lap.histogram.none_lost;
                p.histogram.simple_decoded += lap.histogram.simple_decoded;
                p.histogram.simple_lost += lap.histogram.simple_lost;
                p.histogram.multiple_decoded += lap.histogram.multiple_decoded;
                p.histogram.multiple_lost += lap.histogram.multiple_lost;
                p.simple_both_decoded_mean += lap.simple_both_decoded;
                p.simple_both_decoded_distinct_levels_mean +=
                    lap.simple_both_decoded_distinct_levels;
            }
            auto n = static_cast<double>(base.replications);
            auto g = detail::mean_ci(goodput);
            auto e = detail::mean_ci(energy);
            p.goodput_mean = g.mean;
            p.goodput_ci95 = g.ci95;
            p.energy_mean = e.mean;
            p.energy_ci95 = e.ci95;
            p.energy_per_joule_mean /= n;
            p.decoded_mean /= n;
            p.mean_tx_power_w /= n;
            p.skipped_mean /= n;
            p.histogram.none_decoded /= n;
            p.histogram.none_lost /= n;
            p.histogram.simple_decoded /= n;
            p.histogram.simple_lost /= n;
            p.histogram.multiple_decoded /= n;
            p.histogram.multiple_lost /= n;
            p.simple_both_decoded_mean /= n;
            p.simple_both_decoded_distinct_levels_mean /= n;
            points.push_back(p);
        }
    }
    return points;
}

} // namespace dtsiot
