#include <doctest.h>

#include <algorithm>
#include <random>

#include "gait/temporal.hpp"

using namespace gait;

namespace {

// Contact intervals -> 1 kHz step-function trace covering [0, t_end].
FsrTrace make_trace(Foot foot, const std::vector<std::pair<double, double>>& pulses,
                    double t_end, double period = 1e-3) {
    FsrTrace trace;
    trace.foot = foot;
    for (int i = 0;; ++i) {
        const double t = i * period;
        if (t > t_end) break;
        bool contact = false;
        for (const auto& [a, b] : pulses)
            if (t >= a && t < b) contact = true;
        trace.samples.push_back({t, contact});
    }
    return trace;
}

// The spec'd worked example: L 0.0-0.6, R 0.55-1.15, L 1.1-1.7, R heel 1.65.
std::vector<FootfallEvent> worked_example() {
    return canonicalize_events({{Foot::Left, EventKind::HeelStrike, 0.0},
                                {Foot::Left, EventKind::Lift, 0.6},
                                {Foot::Right, EventKind::HeelStrike, 0.55},
                                {Foot::Right, EventKind::Lift, 1.15},
                                {Foot::Left, EventKind::HeelStrike, 1.1},
                                {Foot::Left, EventKind::Lift, 1.7},
                                {Foot::Right, EventKind::HeelStrike, 1.65}});
}

}  // namespace

TEST_CASE("detect_lift: time count of 100 with compensation") {
    const FsrTrace trace = make_trace(Foot::Left, {{0.0, 0.6}}, 1.2);

    SUBCASE("default compensation lands on the first no-contact sample") {
        EventConfig cfg;
        const auto lift = detect_lift(trace, 0.0, cfg.lift_count_threshold,
                                      cfg.effective_compensation());
        REQUIRE(lift.has_value());
        CHECK(std::abs(*lift - 0.600) <= 1e-3 + 1e-12);
    }

    SUBCASE("threshold 1, zero compensation hits the first false sample exactly") {
        const auto lift = detect_lift(trace, 0.0, 1, 0.0);
        REQUIRE(lift.has_value());
        CHECK(*lift == doctest::Approx(0.600).epsilon(1e-12));
    }

    SUBCASE("a 20-sample glitch is ignored") {
        auto glitchy = make_trace(Foot::Left, {{0.0, 0.3}, {0.32, 0.6}}, 1.2);
        EventConfig cfg;
        const auto lift = detect_lift(glitchy, 0.0, cfg.lift_count_threshold,
                                      cfg.effective_compensation());
        REQUIRE(lift.has_value());
        CHECK(std::abs(*lift - 0.600) <= 1e-3 + 1e-12);
    }

    SUBCASE("open final step yields no lift") {
        const FsrTrace open = make_trace(Foot::Left, {{0.0, 10.0}}, 1.0);
        CHECK_FALSE(detect_lift(open, 0.0, 100, 0.099).has_value());
    }

    SUBCASE("heel strike outside the trace is an argument error") {
        CHECK_THROWS_AS(detect_lift(trace, 99.0, 100, 0.0), ArgumentError);
    }
}

TEST_CASE("events_from_traces") {
    SUBCASE("two pulses left, one right: six events, alternating per foot") {
        const auto left = make_trace(Foot::Left, {{0.001, 0.6}, {1.1, 1.7}}, 2.2);
        const auto right = make_trace(Foot::Right, {{0.55, 1.15}}, 2.2);
        const auto events = events_from_traces(left, right);
        REQUIRE(events.size() == 6);
        for (Foot f : {Foot::Left, Foot::Right}) {
            EventKind expect = EventKind::HeelStrike;
            double last_t = -1.0;
            for (const auto& e : events) {
                if (e.foot != f) continue;
                CHECK(e.kind == expect);
                CHECK(e.t > last_t);
                last_t = e.t;
                expect = expect == EventKind::HeelStrike ? EventKind::Lift
                                                         : EventKind::HeelStrike;
            }
        }
        CHECK(std::is_sorted(events.begin(), events.end(),
                             [](const auto& a, const auto& b) { return a.t < b.t; }));
    }

    SUBCASE("single pulse = two events") {
        const auto left = make_trace(Foot::Left, {{0.05, 0.65}}, 1.5);
        const auto events = trace_events(left);
        REQUIRE(events.size() == 2);
        CHECK(events[0].kind == EventKind::HeelStrike);
        CHECK(events[1].kind == EventKind::Lift);
    }

    SUBCASE("no contact = no events") {
        const auto quiet = make_trace(Foot::Left, {}, 1.0);
        CHECK(trace_events(quiet).empty());
    }

    SUBCASE("double trigger 30 ms apart is debounced to one heel strike") {
        // contact, 30 ms re-trigger: rising edges at 0.1 and 0.13
        const auto left = make_trace(Foot::Left, {{0.1, 0.12}, {0.13, 0.8}}, 1.5);
        const auto events = trace_events(left);
        int strikes = 0;
        for (const auto& e : events)
            if (e.kind == EventKind::HeelStrike) ++strikes;
        CHECK(strikes == 1);
    }
}

TEST_CASE("temporal_params: the worked example") {
    const auto result = temporal_params(worked_example());
    REQUIRE(result.steps.size() == 4);

    const TemporalStep& l2 = result.steps[2];  // L heel at 1.1
    CHECK(l2.foot == Foot::Left);
    CHECK(*l2.stride_time == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(*l2.standing_time == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(*l2.swing_time == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*l2.gait_cycle_time == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(*l2.step_time == doctest::Approx(0.55).epsilon(1e-12));
    // double support = step_time - swing of this step
    CHECK(*l2.double_support == doctest::Approx(0.05).epsilon(1e-9));

    const TemporalStep& r1 = result.steps[1];  // R heel at 0.55
    CHECK(*r1.step_time == doctest::Approx(0.55).epsilon(1e-12));
    // single support of R's step = swing of the following L step = 0.5
    CHECK(*r1.single_support == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("first step carries no stride-derived values") {
        CHECK_FALSE(result.steps[0].stride_time.has_value());
        CHECK_FALSE(result.steps[0].step_time.has_value());
        CHECK_FALSE(result.steps[1].stride_time.has_value());
    }
}

TEST_CASE("temporal_params: symmetric periodic gait") {
    // period T = 1.2 s, duty 60%: standing = 0.72, swing = 0.48
    const double T = 1.2;
    std::vector<FootfallEvent> events;
    for (int k = 0; k < 6; ++k) {
        const double t0 = k * T;
        events.push_back({Foot::Left, EventKind::HeelStrike, t0});
        events.push_back({Foot::Left, EventKind::Lift, t0 + 0.6 * T});
        events.push_back({Foot::Right, EventKind::HeelStrike, t0 + 0.5 * T});
        events.push_back({Foot::Right, EventKind::Lift, t0 + 0.5 * T + 0.6 * T});
    }
    const auto result = temporal_params(canonicalize_events(events));
    for (const auto& s : result.steps) {
        if (!s.stride_time) continue;
        CHECK(*s.stride_time == doctest::Approx(T).epsilon(1e-12));
        CHECK(*s.standing_time == doctest::Approx(0.6 * T).epsilon(1e-12));
        CHECK(*s.swing_time == doctest::Approx(0.4 * T).epsilon(1e-12));
        CHECK(*s.stride_time ==
              doctest::Approx(*s.standing_time + *s.swing_time).epsilon(1e-12));
    }
}

TEST_CASE("walk summary: cadence identity") {
    // 8 heel strikes spanning 3.5 s -> cadence 60*7/3.5 = 120
    std::vector<FootfallEvent> events;
    Foot f = Foot::Left;
    for (int k = 0; k < 8; ++k) {
        const double t = k * 0.5;
        events.push_back({f, EventKind::HeelStrike, t});
        events.push_back({f, EventKind::Lift, t + 0.3});
        f = opposite(f);
    }
    const auto result = temporal_params(canonicalize_events(events));
    CHECK(result.summary.n_steps == 8);
    CHECK(result.summary.ambulation_time == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(result.summary.cadence == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("temporal invariants over randomized gaits") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FootfallEvent> events;
        double tl = 0.0, tr = 0.55 + jitter(rng);
        for (int k = 0; k < 8; ++k) {
            events.push_back({Foot::Left, EventKind::HeelStrike, tl});
            events.push_back({Foot::Left, EventKind::Lift, tl + 0.65 + jitter(rng)});
            events.push_back({Foot::Right, EventKind::HeelStrike, tr});
            events.push_back({Foot::Right, EventKind::Lift, tr + 0.65 + jitter(rng)});
            tl += 1.1 + jitter(rng);
            tr += 1.1 + jitter(rng);
        }
        events.pop_back();  // drop final lift so the last step is open
        const auto canonical = canonicalize_events(events);

        // permutation invariance: canonicalization is order-insensitive
        auto shuffled = events;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto canonical2 = canonicalize_events(shuffled);
        REQUIRE(canonical.size() == canonical2.size());
        for (size_t i = 0; i < canonical.size(); ++i) {
            CHECK(canonical[i].t == canonical2[i].t);
            CHECK(canonical[i].foot == canonical2[i].foot);
            CHECK(canonical[i].kind == canonical2[i].kind);
        }

        const auto result = temporal_params(canonical);
        double step_sum = 0.0;
        for (const auto& s : result.steps) {
            if (s.stride_time) {
                CHECK(*s.stride_time ==
                      doctest::Approx(*s.standing_time + *s.swing_time).epsilon(1e-12));
            }
            if (s.step_time) step_sum += *s.step_time;
        }
        // telescoping: step times sum to the ambulation time
        CHECK(step_sum == doctest::Approx(result.summary.ambulation_time).epsilon(1e-9));

        // single support equals the next opposite step's swing
        for (size_t i = 0; i + 1 < result.steps.size(); ++i) {
            const auto& s = result.steps[i];
            if (!s.single_support) continue;
            for (size_t j = i + 1; j < result.steps.size(); ++j) {
                if (result.steps[j].foot == s.foot) break;
                if (result.steps[j].swing_time) {
                    CHECK(*s.single_support ==
                          doctest::Approx(*result.steps[j].swing_time).epsilon(1e-12));
                }
                break;
            }
        }
    }
}

TEST_CASE("alternation violation names the offending index") {
    std::vector<FootfallEvent> bad{{Foot::Left, EventKind::HeelStrike, 0.0},
                                   {Foot::Left, EventKind::HeelStrike, 0.5}};
    try {
        canonicalize_events(bad);
        FAIL("expected MalformedSequenceError");
    } catch (const MalformedSequenceError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("negative double support is flagged, not clamped") {
    // running gait: flight phases, opposite lift before this strike
    const auto result = temporal_params(canonicalize_events({
        {Foot::Left, EventKind::HeelStrike, 0.0},
        {Foot::Left, EventKind::Lift, 0.25},
        {Foot::Right, EventKind::HeelStrike, 0.35},
        {Foot::Right, EventKind::Lift, 0.60},
        {Foot::Left, EventKind::HeelStrike, 0.70},
        {Foot::Left, EventKind::Lift, 0.95},
        {Foot::Right, EventKind::HeelStrike, 1.05},
    }));
    bool saw_negative = false;
    for (const auto& s : result.steps)
        if (s.double_support && *s.double_support < 0.0) {
            saw_negative = true;
            CHECK(s.negative_double_support);
        }
    CHECK(saw_negative);
}
