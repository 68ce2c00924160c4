#include "gait/sync.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace gait {

SyncEstimate estimate_offset(const ClockModel& client, int n_probes, uint64_t seed,
                             const RttConfig& rtt) {
    if (n_probes < 1)
        throw ArgumentError("estimate_offset: need at least one probe");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, client.jitter_sigma);

    SyncEstimate est;
    std::vector<double> probes;
    probes.reserve(n_probes);
    double now = 0.0;  // true time at the server
    for (int i = 0; i < n_probes; ++i) {
        double d1 = rtt.mean / 2.0;  // request path
        double d2 = rtt.mean / 2.0;  // response path
        if (client.jitter_sigma > 0.0) {
            d1 = std::max(1e-6, d1 + jitter(rng));
            d2 = std::max(1e-6, d2 + jitter(rng));
        }
        const double t1 = now + client.offset + client.drift_rate * now;  // client send stamp
        const double t2 = now + d1;                                       // server receive
        const double t3 = t2;                                             // server reply
        const double t4 = now + d1 + d2;
        const double t4c = t4 + client.offset + client.drift_rate * t4;   // client receive stamp
        probes.push_back(((t1 - t2) + (t4c - t3)) / 2.0);
        est.rtt_samples.push_back(d1 + d2);
        now = t4 + 0.01;  // next probe
    }

    std::sort(probes.begin(), probes.end());
    const size_t n = probes.size();
    est.offset_estimate = n % 2 == 1 ? probes[n / 2]
                                     : (probes[n / 2 - 1] + probes[n / 2]) / 2.0;
    return est;
}

std::vector<FootfallEvent> align_streams(const std::vector<FootfallEvent>& left_events,
                                         const std::vector<FootfallEvent>& right_events,
                                         const SyncEstimate& left_est,
                                         const SyncEstimate& right_est) {
    std::vector<FootfallEvent> merged;
    merged.reserve(left_events.size() + right_events.size());
    for (FootfallEvent e : left_events) {
        e.t -= left_est.offset_estimate;
        merged.push_back(e);
    }
    for (FootfallEvent e : right_events) {
        e.t -= right_est.offset_estimate;
        merged.push_back(e);
    }
    try {
        return canonicalize_events(std::move(merged));
    } catch (const MalformedSequenceError& e) {
        throw AlignmentError(std::string("align_streams: inconsistent offsets (") + e.what() + ")");
    }
}

namespace {

nlohmann::json estimate_to_json(const SyncEstimate& e) {
    nlohmann::json j;
    j["offset_estimate"] = e.offset_estimate;
    if (!e.rtt_samples.empty()) {
        std::vector<double> sorted = e.rtt_samples;
        std::sort(sorted.begin(), sorted.end());
        j["rtt_min"] = sorted.front();
        j["rtt_median"] = sorted[sorted.size() / 2];
        j["rtt_max"] = sorted.back();
        j["n_probes"] = sorted.size();
    }
    return j;
}

}  // namespace

std::string sync_report_json(const SyncReport& report) {
    nlohmann::json j;
    j["left"] = estimate_to_json(report.left);
    j["right"] = estimate_to_json(report.right);
    return j.dump(2);
}

SyncReport parse_sync_report(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin, e.what());
    }
    SyncReport r;
    for (auto [name, est] : {std::pair{"left", &r.left}, {"right", &r.right}}) {
        if (!j.contains(name) || !j[name].contains("offset_estimate"))
            throw ParseError(origin, std::string("missing ") + name + ".offset_estimate");
        est->offset_estimate = j[name]["offset_estimate"].get<double>();
    }
    return r;
}

}  // namespace gait
