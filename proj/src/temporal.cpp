#include "gait/temporal.hpp"

#include <algorithm>
#include <cmath>

namespace gait {

Foot opposite(Foot f) { return f == Foot::Left ? Foot::Right : Foot::Left; }

std::string to_string(Foot f) { return f == Foot::Left ? "left" : "right"; }

std::string to_string(EventKind k) {
    return k == EventKind::HeelStrike ? "heel_strike" : "lift";
}

Foot foot_from_string(const std::string& s) {
    if (s == "left") return Foot::Left;
    if (s == "right") return Foot::Right;
    throw ParseError("foot", "expected 'left' or 'right', got '" + s + "'");
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "heel_strike") return EventKind::HeelStrike;
    if (s == "lift") return EventKind::Lift;
    throw ParseError("kind", "expected 'heel_strike' or 'lift', got '" + s + "'");
}

std::optional<double> detect_lift(const FsrTrace& trace, double heel_strike_t,
                                  int count_threshold, double compensation) {
    if (count_threshold < 1)
        throw ArgumentError("detect_lift: count_threshold must be >= 1");
    if (trace.samples.empty() || heel_strike_t < trace.samples.front().t ||
        heel_strike_t > trace.samples.back().t)
        throw ArgumentError("detect_lift: heel_strike_t not covered by trace");

    int run = 0;
    for (const FsrSample& s : trace.samples) {
        if (s.t < heel_strike_t) continue;
        if (s.contact) {
            run = 0;
        } else if (++run == count_threshold) {
            return s.t - compensation;
        }
    }
    return std::nullopt;  // open final step
}

std::vector<FootfallEvent> trace_events(const FsrTrace& trace, const EventConfig& cfg) {
    if (trace.samples.empty())
        throw ArgumentError("trace_events: trace must be nonempty");

    const double compensation = cfg.effective_compensation();
    std::vector<FootfallEvent> out;
    const auto& s = trace.samples;
    size_t pos = 0;
    double last_strike = -1e300;
    while (pos < s.size()) {
        // next rising edge
        size_t strike = s.size();
        for (size_t i = pos; i < s.size(); ++i) {
            if (s[i].contact && (i == 0 || !s[i - 1].contact)) {
                strike = i;
                break;
            }
        }
        if (strike == s.size()) break;

        if (s[strike].t - last_strike < cfg.debounce_window) {
            pos = strike + 1;  // double trigger
            continue;
        }
        last_strike = s[strike].t;
        out.push_back({trace.foot, EventKind::HeelStrike, s[strike].t});

        // lift: first run of count_threshold consecutive no-contact samples
        int run = 0;
        size_t confirm = s.size();
        for (size_t i = strike; i < s.size(); ++i) {
            if (s[i].contact) {
                run = 0;
            } else if (++run == cfg.lift_count_threshold) {
                confirm = i;
                break;
            }
        }
        if (confirm == s.size()) break;  // open final step: heel strike only
        out.push_back({trace.foot, EventKind::Lift, s[confirm].t - compensation});
        pos = confirm + 1;
    }
    return out;
}

std::vector<FootfallEvent> events_from_traces(const FsrTrace& left, const FsrTrace& right,
                                              const EventConfig& cfg) {
    std::vector<FootfallEvent> events = trace_events(left, cfg);
    const std::vector<FootfallEvent> r = trace_events(right, cfg);
    events.insert(events.end(), r.begin(), r.end());
    return canonicalize_events(std::move(events));
}

std::vector<FootfallEvent> canonicalize_events(std::vector<FootfallEvent> events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const FootfallEvent& a, const FootfallEvent& b) {
                         if (a.t != b.t) return a.t < b.t;
                         return a.foot == Foot::Left && b.foot == Foot::Right;
                     });
    EventKind expect_left = EventKind::HeelStrike;
    EventKind expect_right = EventKind::HeelStrike;
    double last_left = -1.0, last_right = -1.0;
    for (size_t i = 0; i < events.size(); ++i) {
        const FootfallEvent& e = events[i];
        if (e.t < 0.0)
            throw MalformedSequenceError("event " + std::to_string(i) + ": negative timestamp");
        EventKind& expect = e.foot == Foot::Left ? expect_left : expect_right;
        double& last = e.foot == Foot::Left ? last_left : last_right;
        if (e.kind != expect)
            throw MalformedSequenceError("event " + std::to_string(i) + ": expected " +
                                         to_string(expect) + " for " + to_string(e.foot) +
                                         " foot, got " + to_string(e.kind));
        if (e.t <= last)
            throw MalformedSequenceError("event " + std::to_string(i) +
                                         ": non-increasing timestamp for " + to_string(e.foot));
        expect = e.kind == EventKind::HeelStrike ? EventKind::Lift : EventKind::HeelStrike;
        last = e.t;
    }
    return events;
}

TemporalResult temporal_params(const std::vector<FootfallEvent>& events) {
    struct FootState {
        std::optional<double> last_heel;
        std::optional<double> last_lift;  // lift ending the last heel's stance
    };
    FootState state[2];
    auto idx = [](Foot f) { return f == Foot::Left ? 0 : 1; };

    TemporalResult result;
    double first_heel = -1.0, last_heel = -1.0;

    for (const FootfallEvent& e : events) {
        FootState& same = state[idx(e.foot)];
        if (e.kind == EventKind::Lift) {
            same.last_lift = e.t;
            continue;
        }
        const FootState& opp = state[idx(opposite(e.foot))];

        TemporalStep step;
        step.step_index = static_cast<int>(result.steps.size());
        step.foot = e.foot;
        step.t = e.t;
        if (opp.last_heel) step.step_time = e.t - *opp.last_heel;
        if (same.last_heel) {
            step.stride_time = e.t - *same.last_heel;
            step.gait_cycle_time = step.stride_time;
            if (same.last_lift && *same.last_lift > *same.last_heel) {
                step.standing_time = *same.last_lift - *same.last_heel;
                step.swing_time = e.t - *same.last_lift;
            }
        }
        if (step.step_time && step.swing_time) {
            step.double_support = *step.step_time - *step.swing_time;
            step.negative_double_support = *step.double_support < 0.0;
        }
        result.steps.push_back(step);

        same.last_heel = e.t;
        same.last_lift.reset();
        if (first_heel < 0.0) first_heel = e.t;
        last_heel = e.t;
    }

    // single support of a step = swing of the next opposite-foot step
    for (size_t i = 0; i < result.steps.size(); ++i) {
        for (size_t j = i + 1; j < result.steps.size(); ++j) {
            if (result.steps[j].foot == opposite(result.steps[i].foot)) {
                if (result.steps[j].swing_time)
                    result.steps[i].single_support = result.steps[j].swing_time;
                break;
            }
        }
    }

    WalkSummary& s = result.summary;
    s.n_steps = static_cast<int>(result.steps.size());
    if (s.n_steps >= 2) {
        s.ambulation_time = last_heel - first_heel;
        s.cadence = 60.0 * (s.n_steps - 1) / s.ambulation_time;
    }
    return result;
}

}  // namespace gait
