#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gait/temporal.hpp"

namespace gait {

struct ClockModel {
    double offset = 0.0;        // seconds: device clock = true time + offset
    double drift_rate = 0.0;    // s/s, modeled but corrected as constant offset only
    double jitter_sigma = 0.0;  // per-message path jitter, seconds
};

struct RttConfig {
    double mean = 0.004169;  // seconds, round trip
};

struct SyncEstimate {
    double offset_estimate = 0.0;        // estimated device-clock offset
    std::vector<double> rtt_samples;     // seconds
};

// Simulates n request/response exchanges against a reference-clock server and
// estimates the device offset as the median of per-probe midpoint estimates
// (symmetric-path assumption). Deterministic given seed.
SyncEstimate estimate_offset(const ClockModel& client, int n_probes, uint64_t seed,
                             const RttConfig& rtt = {});

// Subtracts each device's estimated offset, merges and canonicalizes.
// Throws AlignmentError when the corrected interleaving still violates the
// temporal module's input invariants.
std::vector<FootfallEvent> align_streams(const std::vector<FootfallEvent>& left_events,
                                         const std::vector<FootfallEvent>& right_events,
                                         const SyncEstimate& left_est,
                                         const SyncEstimate& right_est);

struct SyncReport {
    SyncEstimate left;
    SyncEstimate right;
};

std::string sync_report_json(const SyncReport& report);
SyncReport parse_sync_report(const std::string& text, const std::string& origin);

}  // namespace gait
