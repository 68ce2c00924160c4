#include "gait/spatial_stats.hpp"

#include <cmath>
#include <numeric>

namespace gait {

GaitVector gait_vector(const StepObservation& obs, const RigConfig& cfg) {
    if (obs.marker_ground.frame != Frame::Ground)
        throw ArgumentError("gait_vector: observation must be in the ground frame");
    GaitVector g;
    g.length = obs.marker_ground.x;
    g.width = std::abs(obs.marker_ground.y);
    g.height = obs.marker_ground.z + cfg.initial_height_offset;
    return g;
}

double stride_length(double gait_len_prev, double gait_len_cur, double foot_length) {
    if (gait_len_prev < 0.0 || gait_len_cur < 0.0 || foot_length < 0.0)
        throw ArgumentError("stride_length: inputs must be non-negative");
    return gait_len_prev + gait_len_cur + foot_length;
}

double stride_velocity(double stride_len, double stride_time) {
    if (!(stride_time > 0.0))
        throw ArgumentError("stride_velocity: stride_time must be positive");
    return stride_len / stride_time;
}

double coefficient_of_variation(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw ArgumentError("coefficient_of_variation: need at least two samples");
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    if (std::abs(mean) <= 1e-12)
        throw ArgumentError("coefficient_of_variation: undefined for zero mean");
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double s = std::sqrt(ss / (xs.size() - 1));
    return 100.0 * s / mean;
}

double symmetry(double x_right, double x_left) {
    const double denom = x_right + x_left;
    if (std::abs(denom) <= 1e-12)
        throw ArgumentError("symmetry: undefined for zero denominator");
    return 200.0 * std::abs((x_right - x_left) / denom);
}

}  // namespace gait
