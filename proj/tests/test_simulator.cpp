#include <doctest.h>

#include <cmath>
#include <set>

#include "gait/simulator.hpp"

using namespace gait;

namespace {

WalkerConfig deterministic_walker() {
    WalkerConfig cfg;
    cfg.gait_length_sd = 0.0;
    cfg.gait_width_sd = 0.0;
    cfg.gait_height_sd = 0.0;
    cfg.stride_time_sd = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("simulate_walk") {
    SUBCASE("zero-variance walker reproduces the configured means exactly") {
        const WalkTrace trace = simulate_walk(deterministic_walker());
        REQUIRE(trace.footfalls.size() >= 3);
        for (size_t k = 1; k < trace.footfalls.size(); ++k) {
            const Footfall& cur = trace.footfalls[k];
            const Footfall& pre = trace.footfalls[k - 1];
            // heel-to-heel displacement = previous tip offset + gait length
            const double heel_gap = (cur.heel_pos - pre.heel_pos).norm();
            const double lateral = 0.10;  // feet sit at +-width/2 of the centerline
            const double along = 0.27 / 2.0 + 0.65;
            CHECK(heel_gap == doctest::Approx(std::hypot(along, lateral)).epsilon(1e-9));
            CHECK(cur.marker_height == doctest::Approx(0.03).epsilon(1e-12));
        }
        // Stride (same-foot heel strike interval) is quantized to the sample grid.
        for (size_t k = 2; k < trace.footfalls.size(); ++k) {
            const double stride = trace.footfalls[k].heel_strike_t - trace.footfalls[k - 2].heel_strike_t;
            CHECK(std::abs(stride - 1.10) <= trace.cfg.sample_period + 1e-12);
        }
    }

    SUBCASE("7 m route yields a realistic footfall count") {
        // Mean progress per step is tip_offset + gait_length = 0.785 m, so the
        // 7 m mat holds 9 steps; the per-step sigma can add or drop one.
        std::set<size_t> counts;
        for (uint64_t seed = 0; seed < 20; ++seed) {
            WalkerConfig cfg;
            cfg.seed = seed;
            counts.insert(simulate_walk(cfg).footfalls.size());
        }
        for (size_t n : counts) {
            CHECK(n >= 9);
            CHECK(n <= 11);
        }
    }

    SUBCASE("deterministic given seed") {
        WalkerConfig cfg;
        cfg.seed = 99;
        const WalkTrace a = simulate_walk(cfg);
        const WalkTrace b = simulate_walk(cfg);
        REQUIRE(a.footfalls.size() == b.footfalls.size());
        for (size_t k = 0; k < a.footfalls.size(); ++k) {
            CHECK(a.footfalls[k].heel_pos == b.footfalls[k].heel_pos);
            CHECK(a.footfalls[k].heel_strike_t == b.footfalls[k].heel_strike_t);
            CHECK(a.footfalls[k].lift_t == b.footfalls[k].lift_t);
        }
    }

    SUBCASE("feet alternate starting with the left") {
        const WalkTrace trace = simulate_walk(WalkerConfig{});
        for (size_t k = 0; k < trace.footfalls.size(); ++k)
            CHECK(trace.footfalls[k].foot == (k % 2 == 0 ? Foot::Left : Foot::Right));
    }

    SUBCASE("headings never reverse on an L-shaped route") {
        WalkerConfig cfg;
        cfg.route = {{0.0, 0.0}, {4.0, 0.0}, {4.0, 4.0}};
        cfg.seed = 3;
        const WalkTrace trace = simulate_walk(cfg);
        REQUIRE(trace.footfalls.size() >= 8);
        for (size_t k = 1; k < trace.footfalls.size(); ++k) {
            CHECK(trace.footfalls[k].direction.norm() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(trace.footfalls[k].direction.dot(trace.footfalls[k - 1].direction) > 0.0);
        }
    }

    SUBCASE("truth strides match the heel-to-heel oracle on a straight route") {
        // stride = two gait lengths + foot length = same-foot heel displacement
        WalkerConfig cfg;
        cfg.seed = 17;
        const WalkTrace trace = simulate_walk(cfg);
        for (size_t k = 2; k < trace.footfalls.size(); ++k) {
            const StepRecord& rec = trace.true_steps[k];
            REQUIRE(rec.stride_length.has_value());
            const double oracle =
                (trace.footfalls[k].heel_pos - trace.footfalls[k - 2].heel_pos)
                    .head<2>()
                    .dot(Eigen::Vector2d(1.0, 0.0));
            CHECK(std::abs(*rec.stride_length - oracle) < 2e-3);
        }
    }

    SUBCASE("truth temporal fields satisfy the stride identities") {
        for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
            WalkerConfig cfg;
            cfg.seed = seed;
            const WalkTrace trace = simulate_walk(cfg);
            REQUIRE(trace.true_steps.size() == trace.footfalls.size());
            for (const StepRecord& rec : trace.true_steps) {
                const TemporalStep& t = rec.temporal;
                if (t.stride_time) {
                    REQUIRE(t.standing_time.has_value());
                    REQUIRE(t.swing_time.has_value());
                    CHECK(*t.stride_time ==
                          doctest::Approx(*t.standing_time + *t.swing_time).epsilon(1e-12));
                    CHECK(*t.gait_cycle_time == *t.stride_time);
                }
                if (t.double_support) CHECK(*t.double_support > 0.0);
            }
            CHECK(trace.true_summary.n_steps == static_cast<int>(trace.footfalls.size()));
            CHECK(trace.true_summary.cadence ==
                  doctest::Approx(60.0 * (trace.true_summary.n_steps - 1) /
                                  trace.true_summary.ambulation_time));
        }
    }

    SUBCASE("validate rejects broken configurations") {
        WalkerConfig cfg;
        cfg.gait_length_mean = -0.1;
        CHECK_THROWS_AS(cfg.validate(), ArgumentError);
        cfg = WalkerConfig{};
        cfg.route = {{0.0, 0.0}};
        CHECK_THROWS_AS(cfg.validate(), ArgumentError);
        cfg = WalkerConfig{};
        cfg.standing_fraction = 1.2;
        CHECK_THROWS_AS(cfg.validate(), ArgumentError);
        cfg = WalkerConfig{};
        cfg.sample_period = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    }
}

TEST_CASE("observe") {
    const Intrinsics k{600.0, 600.0, 320.0, 240.0};
    Extrinsics ext;
    ext.t = Vec3(-0.06, 0.0, 0.0);
    const StereoRig rig = build_rig(k, k, ext);

    SUBCASE("noiseless observation covers every stride step") {
        WalkerConfig wcfg;
        wcfg.seed = 11;
        const WalkTrace trace = simulate_walk(wcfg);
        const RigConfig rcfg = default_rig_config(0.35, wcfg.foot_length);
        const ObservationLog log = observe(trace, rig, rcfg, NoiseModel{});
        REQUIRE(log.stereo.size() == trace.footfalls.size());
        CHECK_FALSE(log.stereo.front().found);  // no opposite marker before step 1
        for (size_t k = 1; k < log.stereo.size(); ++k)
            CHECK(log.stereo[k].found);
    }

    SUBCASE("FSR traces reproduce the true contact intervals on the sample grid") {
        WalkerConfig wcfg;
        wcfg.seed = 5;
        const WalkTrace trace = simulate_walk(wcfg);
        const RigConfig rcfg = default_rig_config(0.35, wcfg.foot_length);
        const ObservationLog log = observe(trace, rig, rcfg, NoiseModel{});
        const std::vector<FootfallEvent> events =
            events_from_traces(log.left_trace, log.right_trace);
        // Noiseless clocks are identity, so detected events equal the truth.
        REQUIRE(events.size() == trace.true_events.size());
        for (size_t i = 0; i < events.size(); ++i) {
            CHECK(events[i].foot == trace.true_events[i].foot);
            CHECK(events[i].kind == trace.true_events[i].kind);
            CHECK(std::abs(events[i].t - trace.true_events[i].t) < 1e-9);
        }
    }

    SUBCASE("double triggers are removed by the debounce window") {
        WalkerConfig wcfg;
        wcfg.seed = 21;
        const WalkTrace trace = simulate_walk(wcfg);
        const RigConfig rcfg = default_rig_config(0.35, wcfg.foot_length);
        NoiseModel noise;
        noise.fsr_double_trigger_prob = 0.05;
        int heel_strikes = 0;
        for (uint64_t seed = 0; seed < 30; ++seed) {
            const ObservationLog log =
                observe(trace, rig, rcfg, noise, ClockModel{}, ClockModel{}, seed);
            for (const FootfallEvent& ev :
                 events_from_traces(log.left_trace, log.right_trace))
                if (ev.kind == EventKind::HeelStrike) ++heel_strikes;
        }
        CHECK(heel_strikes == 30 * static_cast<int>(trace.footfalls.size()));
    }

    SUBCASE("marker misses surface as found = false") {
        WalkerConfig wcfg;
        wcfg.seed = 8;
        const WalkTrace trace = simulate_walk(wcfg);
        const RigConfig rcfg = default_rig_config(0.35, wcfg.foot_length);
        NoiseModel noise;
        noise.marker_miss_prob = 1.0;
        const ObservationLog log = observe(trace, rig, rcfg, noise);
        for (const StereoObservation& obs : log.stereo)
            CHECK_FALSE(obs.found);
    }

    SUBCASE("deterministic given seed") {
        WalkerConfig wcfg;
        wcfg.seed = 13;
        const WalkTrace trace = simulate_walk(wcfg);
        const RigConfig rcfg = default_rig_config(0.35, wcfg.foot_length);
        NoiseModel noise;
        noise.pixel_sigma = 0.5;
        noise.clock_jitter_sigma = 1e-3;
        const ObservationLog a = observe(trace, rig, rcfg, noise, ClockModel{}, ClockModel{}, 4);
        const ObservationLog b = observe(trace, rig, rcfg, noise, ClockModel{}, ClockModel{}, 4);
        REQUIRE(a.stereo.size() == b.stereo.size());
        for (size_t i = 0; i < a.stereo.size(); ++i) {
            CHECK(a.stereo[i].o1.u == b.stereo[i].o1.u);
            CHECK(a.stereo[i].o2.v == b.stereo[i].o2.v);
            CHECK(a.stereo[i].t_device == b.stereo[i].t_device);
        }
        REQUIRE(a.left_trace.samples.size() == b.left_trace.samples.size());
    }

    SUBCASE("NoiseModel validate rejects out-of-range values") {
        NoiseModel noise;
        noise.pixel_sigma = -0.1;
        CHECK_THROWS_AS(noise.validate(), ArgumentError);
        noise = NoiseModel{};
        noise.fsr_double_trigger_prob = 1.5;
        CHECK_THROWS_AS(noise.validate(), ArgumentError);
        noise = NoiseModel{};
        noise.marker_miss_prob = -0.2;
        CHECK_THROWS_AS(noise.validate(), ArgumentError);
    }
}

TEST_CASE("default_personas are mutually distinguishable in the means") {
    const std::array<WalkerConfig, 6> personas = default_personas();
    for (size_t i = 0; i < personas.size(); ++i) {
        CHECK_NOTHROW(personas[i].validate());
        for (size_t j = i + 1; j < personas.size(); ++j) {
            const WalkerConfig &a = personas[i], &b = personas[j];
            const double d_len = std::abs(a.gait_length_mean - b.gait_length_mean) /
                                 (0.5 * (a.gait_length_sd + b.gait_length_sd) + 1e-12);
            const double d_time = std::abs(a.stride_time_mean - b.stride_time_mean) /
                                  (0.5 * (a.stride_time_sd + b.stride_time_sd) + 1e-12);
            const double d_wid = std::abs(a.gait_width_mean - b.gait_width_mean) /
                                 (0.5 * (a.gait_width_sd + b.gait_width_sd) + 1e-12);
            CHECK(std::max({d_len, d_time, d_wid}) >= 1.5);
        }
    }
}
