#pragma once

#include <optional>
#include <vector>

#include "gait/geometry.hpp"
#include "gait/temporal.hpp"

namespace gait {

struct StepObservation {
    int step_index = 0;
    Foot foot = Foot::Left;             // striking foot, carries the camera
    WorldPoint marker_ground;           // opposite foot's marker, ground frame
    double t = 0.0;
};

struct RigConfig {
    double foot_length = 0.27;          // meters
    double initial_height_offset = 0.0; // camera-vs-marker mount difference
    double theta = 0.0;                 // radians, camera yaw vs walking direction
};

struct GaitVector {
    double length = 0.0;  // walkway component
    double width = 0.0;   // |lateral component|
    double height = 0.0;  // vertical component + initial offset
};

// Full per-step record: temporal fields plus the spatial parameters.
// Spatial fields are absent on steps whose marker detection was missing.
struct StepRecord {
    TemporalStep temporal;
    std::optional<double> gait_length;
    std::optional<double> gait_width;
    std::optional<double> gait_height;
    std::optional<double> stride_length;
    std::optional<double> stride_velocity;
    bool backward_flagged = false;  // negative walkway component, never folded
};

GaitVector gait_vector(const StepObservation& obs, const RigConfig& cfg);

// Sum of two consecutive gait lengths plus the foot length.
double stride_length(double gait_len_prev, double gait_len_cur, double foot_length);

// Throws ArgumentError for non-positive stride time.
double stride_velocity(double stride_len, double stride_time);

// 100 * s / mean with the (N-1)-denominator standard deviation.
// Throws ArgumentError for fewer than two samples or near-zero mean.
double coefficient_of_variation(const std::vector<double>& xs);

// 2 * |r - l| / (r + l) * 100. Throws ArgumentError on zero denominator.
double symmetry(double x_right, double x_left);

}  // namespace gait
