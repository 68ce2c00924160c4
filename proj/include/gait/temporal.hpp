#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gait/errors.hpp"

namespace gait {

enum class Foot { Left, Right };
enum class EventKind { HeelStrike, Lift };

Foot opposite(Foot f);
std::string to_string(Foot f);
std::string to_string(EventKind k);
Foot foot_from_string(const std::string& s);
EventKind event_kind_from_string(const std::string& s);

struct FootfallEvent {
    Foot foot = Foot::Left;
    EventKind kind = EventKind::HeelStrike;
    double t = 0.0;  // seconds, device clock
};

struct FsrSample {
    double t = 0.0;
    bool contact = false;
};

struct FsrTrace {
    Foot foot = Foot::Left;
    std::vector<FsrSample> samples;
};

struct EventConfig {
    int lift_count_threshold = 100;      // consecutive no-contact samples
    double sample_period = 1e-3;         // seconds
    // Compensation pulls the reported lift time back toward the first
    // no-contact sample. Negative means "use the default",
    // (count_threshold - 1) * sample_period.
    double lift_compensation = -1.0;
    double debounce_window = 0.080;      // repeated heel strikes within this are double triggers

    double effective_compensation() const {
        return lift_compensation >= 0.0
                   ? lift_compensation
                   : (lift_count_threshold - 1) * sample_period;
    }
};

// One step = one heel strike. Stride-derived fields are absent on each
// foot's first strike of a walk; single_support needs the next opposite
// step and is absent on the last.
struct TemporalStep {
    int step_index = 0;
    Foot foot = Foot::Left;
    double t = 0.0;  // heel-strike time
    std::optional<double> step_time;
    std::optional<double> stride_time;
    std::optional<double> gait_cycle_time;  // == stride_time
    std::optional<double> swing_time;
    std::optional<double> standing_time;
    std::optional<double> single_support;
    std::optional<double> double_support;
    bool negative_double_support = false;  // running gait flag, never clamped
};

struct WalkSummary {
    int n_steps = 0;
    double cadence = 0.0;          // steps/min, 60*(n-1)/ambulation_time
    double ambulation_time = 0.0;  // first to last heel strike
};

struct TemporalResult {
    std::vector<TemporalStep> steps;
    WalkSummary summary;
};

// Time of foot lift after heel_strike_t: first moment at which
// `count_threshold` consecutive no-contact samples have been seen, minus the
// compensation. Throws ArgumentError when heel_strike_t is not covered by the
// trace; returns nullopt when the trace ends before a lift is found (open
// final step).
std::optional<double> detect_lift(const FsrTrace& trace, double heel_strike_t,
                                  int count_threshold, double compensation);

// Heel strikes at debounced no-contact -> contact transitions, lifts via
// detect_lift. A trace with no contact yields no events. Timestamps stay on
// the trace's own device clock; see sync::align_streams for merging.
std::vector<FootfallEvent> trace_events(const FsrTrace& trace, const EventConfig& cfg = {});

// trace_events on both feet, merged and canonicalized (same-clock traces).
std::vector<FootfallEvent> events_from_traces(const FsrTrace& left, const FsrTrace& right,
                                              const EventConfig& cfg = {});

// Sorts a copy of `events` on (t, foot: left first) and checks per-foot
// alternation. Throws MalformedSequenceError naming the offending index.
std::vector<FootfallEvent> canonicalize_events(std::vector<FootfallEvent> events);

// Table of temporal parameters per step plus the walk summary.
// Input must satisfy canonicalize_events; call it first for raw streams.
TemporalResult temporal_params(const std::vector<FootfallEvent>& events);

}  // namespace gait
