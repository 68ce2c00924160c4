#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gait/geometry.hpp"
#include "gait/spatial_stats.hpp"
#include "gait/sync.hpp"
#include "gait/temporal.hpp"

namespace gait {

// Per-parameter fractional left/right bias: left means are scaled by
// (1 + a), right means by (1 - a).
struct Asymmetry {
    double length = 0.0;
    double width = 0.0;
    double height = 0.0;
    double stride_time = 0.0;
};

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
};

struct WalkerConfig {
    double gait_length_mean = 0.65, gait_length_sd = 0.02;   // meters
    double gait_width_mean = 0.10, gait_width_sd = 0.01;
    double gait_height_mean = 0.03, gait_height_sd = 0.005;
    double standing_fraction = 0.62;                          // of the stride
    double stride_time_mean = 1.10, stride_time_sd = 0.05;    // seconds
    double foot_length = 0.27;
    Asymmetry asymmetry;
    std::vector<Waypoint> route{{0.0, 0.0}, {7.0, 0.0}};      // the 700 cm mat
    uint64_t seed = 0;
    double sample_period = 1e-3;  // FSR polling period, shared with EventConfig

    void validate() const;  // throws ArgumentError
};

// One ground-truth footfall. Positions are world ground coordinates
// (route plane, z up); direction is the local walking direction of the step.
struct Footfall {
    Foot foot = Foot::Left;
    Vec3 heel_pos = Vec3::Zero();
    Vec3 tip_pos = Vec3::Zero();       // marker sits at the tip
    double heel_strike_t = 0.0;
    double lift_t = 0.0;
    Eigen::Vector2d direction{1.0, 0.0};
    double marker_height = 0.0;        // per-step vertical draw (true gait height)
};

struct WalkTrace {
    WalkerConfig cfg;
    std::vector<Footfall> footfalls;
    std::vector<FootfallEvent> true_events;
    std::vector<StepRecord> true_steps;
    WalkSummary true_summary;
};

struct NoiseModel {
    double pixel_sigma = 0.0;             // px, both cameras
    double clock_jitter_sigma = 0.0;      // s, per contact transition / capture
    double fsr_double_trigger_prob = 0.0;
    double marker_miss_prob = 0.0;
    double yaw_drift_per_step = 0.0;      // rad/step, for drift-injection studies

    void validate() const;
};

struct StereoObservation {
    int step_index = 0;
    Foot foot = Foot::Left;
    double t_device = 0.0;
    PixelPoint o1, o2;
    bool found = false;
};

struct ObservationLog {
    FsrTrace left_trace;   // left device clock
    FsrTrace right_trace;  // right device clock
    std::vector<StereoObservation> stereo;
    ClockModel left_clock;
    ClockModel right_clock;
    double sample_period = 1e-3;
    uint64_t seed = 0;
};

// Places alternating footfalls along the route with per-step draws from the
// configured distributions (independent Gaussians truncated at +-3 sigma).
// Heel-strike and lift times are quantized to the FSR sampling grid, so a
// noiseless observation round trip is exact. Deterministic given cfg.seed.
WalkTrace simulate_walk(const WalkerConfig& cfg);

// Mount geometry shared by the simulator and the analysis configuration.
struct MountModel {
    double camera_height = 0.07;  // above ground, at the heel
    double marker_height = 0.04;  // marker mount height at the tip
};

// Produces the sensor observations the pipeline consumes: per-foot FSR
// step-function traces on skewed device clocks and a stereo pixel pair per
// heel strike. Deterministic given seed.
ObservationLog observe(const WalkTrace& trace, const StereoRig& rig, const RigConfig& cfg,
                       const NoiseModel& noise, const ClockModel& left_clock = {},
                       const ClockModel& right_clock = {}, uint64_t seed = 0,
                       const MountModel& mount = {});

// The six synthetic personas shipped for the identification task. Parameter
// means are spread >= 1.5 pooled sigma apart.
std::array<WalkerConfig, 6> default_personas();

// RigConfig consistent with observe()'s mount model, so flat-ground walks
// report zero-mean gait height.
RigConfig default_rig_config(double theta, double foot_length, const MountModel& mount = {});

}  // namespace gait
