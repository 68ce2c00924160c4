#include "gait/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gait {

void WalkerConfig::validate() const {
    if (!(gait_length_mean > 0.0) || !(gait_width_mean > 0.0) || !(gait_height_mean > 0.0) ||
        !(stride_time_mean > 0.0) || !(foot_length > 0.0))
        throw ArgumentError("walker: means must be positive");
    if (gait_length_sd < 0.0 || gait_width_sd < 0.0 || gait_height_sd < 0.0 || stride_time_sd < 0.0)
        throw ArgumentError("walker: standard deviations must be non-negative");
    if (!(standing_fraction > 0.0) || !(standing_fraction < 1.0))
        throw ArgumentError("walker: standing_fraction must be in (0, 1)");
    if (route.size() < 2)
        throw ArgumentError("walker: route needs at least two waypoints");
    if (!(sample_period > 0.0))
        throw ArgumentError("walker: sample_period must be positive");
}

void NoiseModel::validate() const {
    if (pixel_sigma < 0.0 || clock_jitter_sigma < 0.0)
        throw ArgumentError("noise: sigmas must be non-negative");
    if (fsr_double_trigger_prob < 0.0 || fsr_double_trigger_prob > 1.0 ||
        marker_miss_prob < 0.0 || marker_miss_prob > 1.0)
        throw ArgumentError("noise: probabilities must be in [0, 1]");
}

namespace {

// Arc-length parameterized route polyline.
class RoutePath {
public:
    explicit RoutePath(const std::vector<Waypoint>& wps) {
        for (const Waypoint& w : wps) pts_.emplace_back(w.x, w.y);
        cum_.push_back(0.0);
        for (size_t i = 1; i < pts_.size(); ++i)
            cum_.push_back(cum_.back() + (pts_[i] - pts_[i - 1]).norm());
    }

    double total() const { return cum_.back(); }

    Eigen::Vector2d point_at(double s) const {
        const size_t i = segment_of(s);
        const double seg = cum_[i + 1] - cum_[i];
        const double f = seg > 0.0 ? (s - cum_[i]) / seg : 0.0;
        return pts_[i] + f * (pts_[i + 1] - pts_[i]);
    }

    Eigen::Vector2d direction_at(double s) const {
        const size_t i = segment_of(s);
        return (pts_[i + 1] - pts_[i]).normalized();
    }

private:
    size_t segment_of(double s) const {
        for (size_t i = 0; i + 1 < cum_.size(); ++i)
            if (s <= cum_[i + 1] || i + 2 == cum_.size()) return i;
        return cum_.size() - 2;
    }

    std::vector<Eigen::Vector2d> pts_;
    std::vector<double> cum_;
};

double truncated_normal(std::mt19937_64& rng, double mean, double sd) {
    if (sd <= 0.0) return mean;
    std::normal_distribution<double> dist(mean, sd);
    for (int i = 0; i < 64; ++i) {
        const double x = dist(rng);
        if (std::abs(x - mean) <= 3.0 * sd) return x;
    }
    return mean;
}

double quantize(double t, double period) { return std::round(t / period) * period; }

double bias(double a, Foot f) { return f == Foot::Left ? 1.0 + a : 1.0 - a; }

// Left-of-direction normal; left footfalls sit on the positive side.
Eigen::Vector2d left_normal(const Eigen::Vector2d& d) { return {-d.y(), d.x()}; }

}  // namespace

WalkTrace simulate_walk(const WalkerConfig& cfg) {
    cfg.validate();
    RoutePath route(cfg.route);
    // Tip (marker) center sits half a foot length ahead of the heel center:
    // the unique mount point for which "two gait lengths plus the foot length"
    // equals the same-foot heel-to-heel stride displacement.
    const double tip_offset = cfg.foot_length / 2.0;
    if (route.total() < cfg.gait_length_mean + cfg.foot_length)
        throw ArgumentError("simulate_walk: route shorter than one gait length");

    std::mt19937_64 rng(cfg.seed);
    WalkTrace trace;
    trace.cfg = cfg;

    // Footfall placement along the route: arc-length positions and per-step
    // draws first, geometry second. The shoe heading at step k is the chord
    // direction of the route centerline between footfalls k-1 and k, so
    // headings turn smoothly through corners while straight segments keep
    // the exact tangent.
    struct Placed {
        Foot foot;
        double s, width, height, t;
    };
    std::vector<Placed> placed;
    double s_heel = 0.0;
    double t_heel = 0.5;
    Foot foot = Foot::Left;
    while (s_heel + tip_offset <= route.total()) {
        Placed p;
        p.foot = foot;
        p.s = s_heel;
        p.width = truncated_normal(rng, cfg.gait_width_mean * bias(cfg.asymmetry.width, foot),
                                   cfg.gait_width_sd);
        p.height = truncated_normal(rng, cfg.gait_height_mean * bias(cfg.asymmetry.height, foot),
                                    cfg.gait_height_sd);
        p.t = quantize(t_heel, cfg.sample_period);
        placed.push_back(p);

        foot = opposite(foot);
        const double gait_len = truncated_normal(
            rng, cfg.gait_length_mean * bias(cfg.asymmetry.length, foot), cfg.gait_length_sd);
        const double interval = truncated_normal(
            rng, cfg.stride_time_mean * bias(cfg.asymmetry.stride_time, foot) / 2.0,
            cfg.stride_time_sd / 2.0);
        s_heel += tip_offset + gait_len;
        t_heel += std::max(interval, 4.0 * cfg.sample_period);
    }
    for (size_t k = 0; k < placed.size(); ++k) {
        const Placed& p = placed[k];
        Footfall f;
        f.foot = p.foot;
        Eigen::Vector2d dir = route.direction_at(p.s);
        if (k >= 1) {
            const Eigen::Vector2d chord = route.point_at(p.s) - route.point_at(placed[k - 1].s);
            if (chord.norm() > 1e-12) dir = chord.normalized();
        }
        f.direction = dir;
        const double lat = (p.foot == Foot::Left ? 0.5 : -0.5) * p.width;
        const Eigen::Vector2d heel2d = route.point_at(p.s) + lat * left_normal(dir);
        const Eigen::Vector2d tip2d = heel2d + tip_offset * dir;
        f.heel_pos = Vec3(heel2d.x(), heel2d.y(), 0.0);
        f.tip_pos = Vec3(tip2d.x(), tip2d.y(), 0.0);
        f.marker_height = p.height;
        f.heel_strike_t = p.t;
        trace.footfalls.push_back(f);
    }
    if (trace.footfalls.size() < 2)
        throw ArgumentError("simulate_walk: route shorter than one gait length");

    // Lift times: standing_fraction of the stride, quantized to the sampling
    // grid and kept strictly inside (next strike, next same-foot strike).
    const size_t n = trace.footfalls.size();
    for (size_t k = 0; k < n; ++k) {
        Footfall& f = trace.footfalls[k];
        const double t0 = f.heel_strike_t;
        const double stride = k + 2 < n ? trace.footfalls[k + 2].heel_strike_t - t0
                                        : cfg.stride_time_mean;
        double lift = quantize(t0 + cfg.standing_fraction * stride, cfg.sample_period);
        if (k + 1 < n)
            lift = std::max(lift, trace.footfalls[k + 1].heel_strike_t + 2.0 * cfg.sample_period);
        if (k + 2 < n)
            lift = std::min(lift, trace.footfalls[k + 2].heel_strike_t - 2.0 * cfg.sample_period);
        f.lift_t = std::max(lift, t0 + 2.0 * cfg.sample_period);
    }

    for (const Footfall& f : trace.footfalls) {
        trace.true_events.push_back({f.foot, EventKind::HeelStrike, f.heel_strike_t});
        trace.true_events.push_back({f.foot, EventKind::Lift, f.lift_t});
    }
    trace.true_events = canonicalize_events(std::move(trace.true_events));

    // Ground truth by the same Table 1 definitions the pipeline implements.
    const TemporalResult temporal = temporal_params(trace.true_events);
    trace.true_summary = temporal.summary;
    std::optional<double> prev_len;
    for (size_t k = 0; k < n; ++k) {
        StepRecord rec;
        rec.temporal = temporal.steps[k];
        if (k >= 1) {
            const Footfall& cur = trace.footfalls[k];
            const Footfall& prev = trace.footfalls[k - 1];
            const Eigen::Vector2d walkway = -cur.direction;
            const Eigen::Vector2d lateral(cur.direction.y(), -cur.direction.x());
            const Eigen::Vector2d rel(prev.tip_pos.x() - cur.heel_pos.x(),
                                      prev.tip_pos.y() - cur.heel_pos.y());
            rec.gait_length = rel.dot(walkway);
            rec.gait_width = std::abs(rel.dot(lateral));
            rec.gait_height = cur.marker_height;
            rec.backward_flagged = *rec.gait_length < 0.0;
            if (prev_len && rec.temporal.stride_time) {
                rec.stride_length = stride_length(*prev_len, *rec.gait_length, cfg.foot_length);
                rec.stride_velocity = *rec.stride_length / *rec.temporal.stride_time;
            }
            prev_len = rec.gait_length;
        }
        trace.true_steps.push_back(rec);
    }
    return trace;
}

namespace {

double device_time(double t, const ClockModel& clock) {
    return t + clock.offset + clock.drift_rate * t;
}

struct ContactInterval {
    double start = 0.0;
    double end = 0.0;
};

FsrTrace rasterize(Foot foot, const std::vector<ContactInterval>& intervals,
                   double period, double t_end) {
    FsrTrace trace;
    trace.foot = foot;
    const long n = static_cast<long>(std::ceil(t_end / period)) + 1;
    trace.samples.reserve(n);
    for (long i = 0; i <= n; ++i) {
        const double t = i * period;
        bool contact = false;
        for (const ContactInterval& iv : intervals)
            if (t >= iv.start && t < iv.end) {
                contact = true;
                break;
            }
        trace.samples.push_back({t, contact});
    }
    return trace;
}

}  // namespace

ObservationLog observe(const WalkTrace& trace, const StereoRig& rig, const RigConfig& cfg,
                       const NoiseModel& noise, const ClockModel& left_clock,
                       const ClockModel& right_clock, uint64_t seed, const MountModel& mount) {
    noise.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::normal_distribution<double> px_noise(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    auto jit = [&]() { return noise.clock_jitter_sigma > 0.0
                                  ? noise.clock_jitter_sigma * jitter(rng)
                                  : 0.0; };

    ObservationLog log;
    log.left_clock = left_clock;
    log.right_clock = right_clock;
    log.sample_period = trace.cfg.sample_period;
    log.seed = seed;

    // FSR contact intervals on each device's clock.
    std::vector<ContactInterval> intervals[2];
    double t_end[2] = {0.0, 0.0};
    for (const Footfall& f : trace.footfalls) {
        const int d = f.foot == Foot::Left ? 0 : 1;
        const ClockModel& clock = f.foot == Foot::Left ? left_clock : right_clock;
        const double strike = device_time(f.heel_strike_t, clock) + jit();
        const double lift = device_time(f.lift_t, clock) + jit();
        if (noise.fsr_double_trigger_prob > 0.0 && uniform(rng) < noise.fsr_double_trigger_prob &&
            lift - strike > 0.08) {
            // brief release shortly after contact: the FSR double trigger
            intervals[d].push_back({strike, strike + 0.030});
            intervals[d].push_back({strike + 0.050, std::max(lift, strike + 0.051)});
        } else {
            intervals[d].push_back({strike, std::max(lift, strike + 2.0 * trace.cfg.sample_period)});
        }
        t_end[d] = std::max(t_end[d], lift);
    }
    const double tail = 0.3 + trace.cfg.sample_period * 120;
    log.left_trace = rasterize(Foot::Left, intervals[0], trace.cfg.sample_period, t_end[0] + tail);
    log.right_trace = rasterize(Foot::Right, intervals[1], trace.cfg.sample_period, t_end[1] + tail);

    // One stereo capture per heel strike, from the striking foot's camera.
    const double img_w = 2.0 * rig.K1.cx, img_h = 2.0 * rig.K1.cy;
    for (size_t k = 0; k < trace.footfalls.size(); ++k) {
        const Footfall& f = trace.footfalls[k];
        const ClockModel& clock = f.foot == Foot::Left ? left_clock : right_clock;

        StereoObservation obs;
        obs.step_index = static_cast<int>(k);
        obs.foot = f.foot;
        obs.t_device = device_time(f.heel_strike_t, clock) + jit();
        obs.found = false;

        if (k >= 1) {
            const Footfall& prev = trace.footfalls[k - 1];
            // The two wearables are mirror images: the right shoe's camera is
            // yawed by -theta, so the opposite marker appears mirrored about
            // the image center but equally deep in both frames.
            const double side = f.foot == Foot::Left ? 1.0 : -1.0;
            const double theta =
                side * (cfg.theta + noise.yaw_drift_per_step * static_cast<double>(k));
            const Eigen::Vector2d walkway = -f.direction;
            const Eigen::Vector2d lateral(f.direction.y(), -f.direction.x());
            const Eigen::Vector2d rel2d(prev.tip_pos.x() - f.heel_pos.x(),
                                        prev.tip_pos.y() - f.heel_pos.y());
            // vertical: marker mount height plus the step's draw, relative to the camera
            WorldPoint marker_ground{rel2d.dot(walkway), rel2d.dot(lateral),
                                     mount.marker_height + f.marker_height - mount.camera_height,
                                     Frame::Ground};
            const WorldPoint cam_pt = ground_to_camera(marker_ground, theta);
            bool visible = cam_pt.z > 0.05;
            PixelPoint o1{}, o2{};
            if (visible) {
                try {
                    o1 = project(rig.P1, cam_pt);
                    o2 = project(rig.P2, cam_pt);
                } catch (const IllConditionedError&) {
                    visible = false;
                }
            }
            if (visible && (o1.u < 0 || o1.u >= img_w || o1.v < -img_h / 2 || o1.v >= img_h ||
                            o2.u < 0 || o2.u >= img_w))
                visible = false;
            const bool missed = noise.marker_miss_prob > 0.0 && uniform(rng) < noise.marker_miss_prob;
            if (visible && !missed) {
                if (noise.pixel_sigma > 0.0) {
                    o1.u += noise.pixel_sigma * px_noise(rng);
                    o1.v += noise.pixel_sigma * px_noise(rng);
                    o2.u += noise.pixel_sigma * px_noise(rng);
                    o2.v += noise.pixel_sigma * px_noise(rng);
                }
                obs.o1 = o1;
                obs.o2 = o2;
                obs.found = true;
            }
        }
        log.stereo.push_back(obs);
    }
    return log;
}

RigConfig default_rig_config(double theta, double foot_length, const MountModel& mount) {
    RigConfig cfg;
    cfg.foot_length = foot_length;
    cfg.initial_height_offset = mount.camera_height - mount.marker_height;
    cfg.theta = theta;
    return cfg;
}

std::array<WalkerConfig, 6> default_personas() {
    std::array<WalkerConfig, 6> personas;
    const double lengths[6] = {0.60, 0.64, 0.68, 0.72, 0.56, 0.76};
    const double times[6] = {1.00, 1.06, 1.12, 1.18, 1.24, 0.94};
    const double widths[6] = {0.090, 0.100, 0.110, 0.120, 0.130, 0.080};
    const double heights[6] = {0.025, 0.028, 0.031, 0.034, 0.037, 0.022};
    const double asym[6] = {0.020, 0.030, 0.040, 0.050, 0.060, 0.025};
    for (int i = 0; i < 6; ++i) {
        WalkerConfig& p = personas[i];
        p.gait_length_mean = lengths[i];
        p.stride_time_mean = times[i];
        p.gait_width_mean = widths[i];
        p.gait_height_mean = heights[i];
        p.asymmetry.length = asym[i];
        p.asymmetry.stride_time = asym[i] / 2.0;
        p.seed = 1000 + static_cast<uint64_t>(i);
        // long rectangular loop, six corner turns per cycle
        p.route = {{0, 0}, {18, 0}, {18, 6}, {9, 6}, {9, 12}, {0, 12}, {0, 0}};
    }
    return personas;
}

}  // namespace gait
