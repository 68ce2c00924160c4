#include "gait/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gait {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int decimals = 9) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(where, "expected a number, got '" + s + "'");
    }
}

std::optional<double> parse_opt(const std::string& s, const std::string& where) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, where);
}

std::string opt_str(const std::optional<double>& v, int decimals = 9) {
    return v ? fmt(*v, decimals) : "";
}

}  // namespace

const std::vector<std::string>& report_parameters() {
    static const std::vector<std::string> names = {
        "gait_length",     "gait_width",   "gait_height",   "stride_length",
        "n_steps",         "cadence",      "step_time",     "stride_time",
        "swing_time",      "standing_time", "single_support", "double_support",
        "gait_cycle_time", "ambulation_time", "stride_velocity",
        "gait_variation",  "gait_symmetry"};
    return names;
}

GaitReport process(const ObservationLog& log, const Calibration& calib,
                   const RigConfig& rig_cfg, const SyncReport& sync) {
    EventConfig ecfg;
    ecfg.sample_period = log.sample_period;
    ecfg.lift_compensation = -1.0;

    const std::vector<FootfallEvent> left_ev = trace_events(log.left_trace, ecfg);
    const std::vector<FootfallEvent> right_ev = trace_events(log.right_trace, ecfg);
    const std::vector<FootfallEvent> events =
        align_streams(left_ev, right_ev, sync.left, sync.right);
    const TemporalResult temporal = temporal_params(events);

    std::map<int, const StereoObservation*> by_index;
    for (const StereoObservation& o : log.stereo) by_index[o.step_index] = &o;

    GaitReport report;
    report.summary = temporal.summary;

    std::optional<double> prev_len;
    for (size_t i = 0; i < temporal.steps.size(); ++i) {
        StepRecord rec;
        rec.temporal = temporal.steps[i];

        const auto it = by_index.find(static_cast<int>(i));
        const StereoObservation* obs = it != by_index.end() ? it->second : nullptr;
        bool have_spatial = false;
        if (obs && obs->found) {
            try {
                const WorldPoint cam = triangulate(calib.rig, obs->o1, obs->o2);
                // mirror-mounted rigs: the right wearable's yaw is -theta
                const double theta = rec.temporal.foot == Foot::Left ? calib.theta_rad
                                                                     : -calib.theta_rad;
                const WorldPoint ground = to_ground(cam, theta);
                const GaitVector gv =
                    gait_vector({rec.temporal.step_index, rec.temporal.foot, ground,
                                 rec.temporal.t},
                                rig_cfg);
                rec.gait_length = gv.length;
                rec.gait_width = gv.width;
                rec.gait_height = gv.height;
                rec.backward_flagged = gv.length < 0.0;
                have_spatial = true;
            } catch (const Error&) {
                have_spatial = false;  // bad detection, spatial fields stay absent
            }
        }
        if (!have_spatial && i >= 1) ++report.missing_spatial;

        if (have_spatial && prev_len && rec.temporal.stride_time &&
            *rec.gait_length >= 0.0 && *prev_len >= 0.0) {
            rec.stride_length =
                stride_length(*prev_len, *rec.gait_length, rig_cfg.foot_length);
            rec.stride_velocity = *rec.stride_length / *rec.temporal.stride_time;
        }
        prev_len = have_spatial ? rec.gait_length : std::nullopt;
        report.steps.push_back(std::move(rec));
    }

    // Variation and symmetry for gait length and stride velocity. Steps with
    // spatial dropout stay in the temporal statistics but are excluded here.
    std::vector<double> lengths, velocities;
    std::vector<double> len_by_foot[2], vel_by_foot[2];
    for (const StepRecord& r : report.steps) {
        const int f = r.temporal.foot == Foot::Left ? 0 : 1;
        if (r.gait_length && !r.backward_flagged) {
            lengths.push_back(*r.gait_length);
            len_by_foot[f].push_back(*r.gait_length);
        }
        if (r.stride_velocity) {
            velocities.push_back(*r.stride_velocity);
            vel_by_foot[f].push_back(*r.stride_velocity);
        }
    }
    auto mean_of = [](const std::vector<double>& xs) {
        return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    };
    try {
        if (lengths.size() >= 2) report.cv_length = coefficient_of_variation(lengths);
        if (velocities.size() >= 2) report.cv_velocity = coefficient_of_variation(velocities);
        if (!len_by_foot[0].empty() && !len_by_foot[1].empty())
            report.sym_length = symmetry(mean_of(len_by_foot[1]), mean_of(len_by_foot[0]));
        if (!vel_by_foot[0].empty() && !vel_by_foot[1].empty())
            report.sym_velocity = symmetry(mean_of(vel_by_foot[1]), mean_of(vel_by_foot[0]));
    } catch (const ArgumentError&) {
        // degenerate series (zero mean); the corresponding field stays absent
    }
    return report;
}

namespace {

struct PairAccum {
    double abs_err = 0.0;
    double truth_sum = 0.0;
    int n = 0;

    void add(double measured, double truth) {
        abs_err += std::abs(measured - truth);
        truth_sum += truth;
        ++n;
    }

    std::optional<double> accuracy() const {
        if (n == 0) return std::nullopt;
        const double denom = std::abs(truth_sum / n);
        if (denom <= 1e-12) return abs_err / n <= 1e-12 ? 100.0 : 0.0;
        return 100.0 * (1.0 - (abs_err / n) / denom);
    }
};

struct SeriesStats {
    std::optional<double> cv_length, cv_velocity, sym_length, sym_velocity;
    int n_steps = 0;
    double cadence = 0.0, ambulation = 0.0;
};

SeriesStats series_stats(const std::vector<StepRecord>& steps, int b, int e) {
    SeriesStats s;
    std::vector<double> lengths, velocities;
    std::vector<double> len_by_foot[2], vel_by_foot[2];
    double t_first = 0.0, t_last = 0.0;
    for (int i = b; i < e; ++i) {
        const StepRecord& r = steps[i];
        if (s.n_steps == 0) t_first = r.temporal.t;
        t_last = r.temporal.t;
        ++s.n_steps;
        const int f = r.temporal.foot == Foot::Left ? 0 : 1;
        if (r.gait_length) {
            lengths.push_back(*r.gait_length);
            len_by_foot[f].push_back(*r.gait_length);
        }
        if (r.stride_velocity) {
            velocities.push_back(*r.stride_velocity);
            vel_by_foot[f].push_back(*r.stride_velocity);
        }
    }
    if (s.n_steps >= 2) {
        s.ambulation = t_last - t_first;
        if (s.ambulation > 0.0) s.cadence = 60.0 * (s.n_steps - 1) / s.ambulation;
    }
    auto mean_of = [](const std::vector<double>& xs) {
        return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    };
    try {
        if (lengths.size() >= 2) s.cv_length = coefficient_of_variation(lengths);
        if (velocities.size() >= 2) s.cv_velocity = coefficient_of_variation(velocities);
        if (!len_by_foot[0].empty() && !len_by_foot[1].empty())
            s.sym_length = symmetry(mean_of(len_by_foot[1]), mean_of(len_by_foot[0]));
        if (!vel_by_foot[0].empty() && !vel_by_foot[1].empty())
            s.sym_velocity = symmetry(mean_of(vel_by_foot[1]), mean_of(vel_by_foot[0]));
    } catch (const ArgumentError&) {
    }
    return s;
}

}  // namespace

namespace {

// Core of both accuracy entry points: per-step parameters pool (measured,
// truth) pairs across all steps of all walks; per-walk scalars contribute
// one pair per walk. Composite entries (variation, symmetry) pool their
// length and velocity components into one accumulator — both feed the same
// Table-1 row, and the pooled formula stays stable when one component's
// truth is structurally near zero (stride velocity symmetry cancels for any
// steady walker).
std::vector<AccuracyEntry> accuracy_impl(
    const std::vector<const std::vector<StepRecord>*>& measured_walks,
    const std::vector<const std::vector<StepRecord>*>& truth_walks, int begin, int end) {
    if (measured_walks.size() != truth_walks.size())
        throw ArgumentError("accuracy: corpus lists differ in length");

    std::map<std::string, PairAccum> acc;
    auto add_opt = [&](const std::string& name, const std::optional<double>& m,
                       const std::optional<double>& t) {
        if (m && t) acc[name].add(*m, *t);
    };

    for (size_t w = 0; w < measured_walks.size(); ++w) {
        const std::vector<StepRecord>& measured = *measured_walks[w];
        const std::vector<StepRecord>& truth = *truth_walks[w];
        const int n = static_cast<int>(std::min(measured.size(), truth.size()));
        const int b = std::clamp(begin, 0, n);
        const int e = end < 0 ? n : std::clamp(end, b, n);

        for (int i = b; i < e; ++i) {
            const StepRecord& m = measured[i];
            const StepRecord& t = truth[i];
            add_opt("gait_length", m.gait_length, t.gait_length);
            add_opt("gait_width", m.gait_width, t.gait_width);
            add_opt("gait_height", m.gait_height, t.gait_height);
            add_opt("stride_length", m.stride_length, t.stride_length);
            add_opt("stride_velocity", m.stride_velocity, t.stride_velocity);
            add_opt("step_time", m.temporal.step_time, t.temporal.step_time);
            add_opt("stride_time", m.temporal.stride_time, t.temporal.stride_time);
            add_opt("swing_time", m.temporal.swing_time, t.temporal.swing_time);
            add_opt("standing_time", m.temporal.standing_time, t.temporal.standing_time);
            add_opt("single_support", m.temporal.single_support, t.temporal.single_support);
            add_opt("double_support", m.temporal.double_support, t.temporal.double_support);
            add_opt("gait_cycle_time", m.temporal.gait_cycle_time, t.temporal.gait_cycle_time);
        }

        const SeriesStats sm =
            series_stats(measured, std::min(b, static_cast<int>(measured.size())),
                         end < 0 ? static_cast<int>(measured.size())
                                 : std::min(end, static_cast<int>(measured.size())));
        const SeriesStats st =
            series_stats(truth, std::min(b, static_cast<int>(truth.size())),
                         end < 0 ? static_cast<int>(truth.size())
                                 : std::min(end, static_cast<int>(truth.size())));
        acc["n_steps"].add(sm.n_steps, st.n_steps);
        acc["cadence"].add(sm.cadence, st.cadence);
        acc["ambulation_time"].add(sm.ambulation, st.ambulation);
        if (sm.cv_length && st.cv_length) acc["gait_variation"].add(*sm.cv_length, *st.cv_length);
        if (sm.cv_velocity && st.cv_velocity)
            acc["gait_variation"].add(*sm.cv_velocity, *st.cv_velocity);
        if (sm.sym_length && st.sym_length) acc["gait_symmetry"].add(*sm.sym_length, *st.sym_length);
        if (sm.sym_velocity && st.sym_velocity)
            acc["gait_symmetry"].add(*sm.sym_velocity, *st.sym_velocity);
    }

    std::vector<AccuracyEntry> table;
    for (const std::string& name : report_parameters()) {
        const auto it = acc.find(name);
        const auto a = it != acc.end() ? it->second.accuracy() : std::nullopt;
        table.push_back({name, a.value_or(0.0)});
    }
    return table;
}

}  // namespace

std::vector<AccuracyEntry> accuracy_table(const std::vector<StepRecord>& measured,
                                          const std::vector<StepRecord>& truth,
                                          int begin, int end) {
    return accuracy_impl({&measured}, {&truth}, begin, end);
}

std::vector<AccuracyEntry> corpus_accuracy(
    const std::vector<const std::vector<StepRecord>*>& measured_walks,
    const std::vector<const std::vector<StepRecord>*>& truth_walks) {
    return accuracy_impl(measured_walks, truth_walks, 0, -1);
}

void attach_truth(GaitReport& report, const std::vector<StepRecord>& truth) {
    report.accuracy = accuracy_table(report.steps, truth);
}

DriftReport drift_study(const std::vector<StepRecord>& measured,
                        const std::vector<StepRecord>& truth, int k) {
    const int n = static_cast<int>(std::min(measured.size(), truth.size()));
    if (k < 1 || n < 2 * k + 20)
        throw ArgumentError("drift_study: walk too short (need >= 2k + 20 steps)");

    const std::vector<AccuracyEntry> start = accuracy_table(measured, truth, 0, k);
    const std::vector<AccuracyEntry> end = accuracy_table(measured, truth, n - k, n);

    DriftReport report;
    report.window_steps = k;
    double sum = 0.0;
    for (size_t i = 0; i < start.size(); ++i) {
        DriftEntry e;
        e.parameter = start[i].parameter;
        e.accuracy_start = start[i].accuracy;
        e.accuracy_end = end[i].accuracy;
        e.delta = std::abs(e.accuracy_start - e.accuracy_end);
        sum += e.delta;
        report.entries.push_back(e);
    }
    report.mean_drift_percent = sum / report.entries.size();
    return report;
}

// ---- CSV / JSON serialization ----

std::string step_records_csv(const std::vector<StepRecord>& steps) {
    std::string out =
        "step_index,foot,t,gait_length,gait_width,gait_height,stride_length,"
        "step_time,stride_time,swing_time,standing_time,single_support,"
        "double_support,stride_velocity\n";
    for (const StepRecord& r : steps) {
        out += std::to_string(r.temporal.step_index) + "," + to_string(r.temporal.foot) + "," +
               fmt(r.temporal.t, 6) + "," + opt_str(r.gait_length) + "," +
               opt_str(r.gait_width) + "," + opt_str(r.gait_height) + "," +
               opt_str(r.stride_length) + "," + opt_str(r.temporal.step_time) + "," +
               opt_str(r.temporal.stride_time) + "," + opt_str(r.temporal.swing_time) + "," +
               opt_str(r.temporal.standing_time) + "," + opt_str(r.temporal.single_support) +
               "," + opt_str(r.temporal.double_support) + "," + opt_str(r.stride_velocity) +
               "\n";
    }
    return out;
}

std::vector<StepRecord> parse_step_records_csv(const std::string& text,
                                               const std::string& origin) {
    std::vector<StepRecord> steps;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split_csv_line(line);
        if (f.size() != 14) throw ParseError(where, "expected 14 fields");
        StepRecord r;
        r.temporal.step_index = static_cast<int>(parse_double(f[0], where));
        r.temporal.foot = foot_from_string(f[1]);
        r.temporal.t = parse_double(f[2], where);
        r.gait_length = parse_opt(f[3], where);
        r.gait_width = parse_opt(f[4], where);
        r.gait_height = parse_opt(f[5], where);
        r.stride_length = parse_opt(f[6], where);
        r.temporal.step_time = parse_opt(f[7], where);
        r.temporal.stride_time = parse_opt(f[8], where);
        r.temporal.swing_time = parse_opt(f[9], where);
        r.temporal.standing_time = parse_opt(f[10], where);
        r.temporal.single_support = parse_opt(f[11], where);
        r.temporal.double_support = parse_opt(f[12], where);
        r.stride_velocity = parse_opt(f[13], where);
        r.temporal.gait_cycle_time = r.temporal.stride_time;
        steps.push_back(std::move(r));
    }
    return steps;
}

std::string fsr_trace_csv(const FsrTrace& trace) {
    std::string out = "foot,t_seconds,contact\n";
    const std::string foot = to_string(trace.foot);
    for (const FsrSample& s : trace.samples)
        out += foot + "," + fmt(s.t, 6) + "," + (s.contact ? "1" : "0") + "\n";
    return out;
}

FsrTrace parse_fsr_trace_csv(const std::string& text, const std::string& origin) {
    FsrTrace trace;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw ParseError(where, "expected 3 fields");
        trace.foot = foot_from_string(f[0]);
        trace.samples.push_back({parse_double(f[1], where), f[2] == "1"});
    }
    return trace;
}

std::string events_csv(const std::vector<FootfallEvent>& events) {
    std::string out = "foot,kind,t_seconds\n";
    for (const FootfallEvent& e : events)
        out += to_string(e.foot) + "," + to_string(e.kind) + "," + fmt(e.t, 6) + "\n";
    return out;
}

std::vector<FootfallEvent> parse_events_csv(const std::string& text, const std::string& origin) {
    std::vector<FootfallEvent> events;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw ParseError(where, "expected 3 fields");
        events.push_back({foot_from_string(f[0]), event_kind_from_string(f[1]),
                          parse_double(f[2], where)});
    }
    return events;
}

std::string stereo_csv(const std::vector<StereoObservation>& rows) {
    std::string out = "step_index,foot,t_device,u1,v1,u2,v2,found\n";
    for (const StereoObservation& r : rows) {
        out += std::to_string(r.step_index) + "," + to_string(r.foot) + "," +
               fmt(r.t_device, 6) + ",";
        if (r.found)
            out += fmt(r.o1.u, 6) + "," + fmt(r.o1.v, 6) + "," + fmt(r.o2.u, 6) + "," +
                   fmt(r.o2.v, 6);
        else
            out += ",,,";
        out += r.found ? ",1\n" : ",0\n";
    }
    return out;
}

std::vector<StereoObservation> parse_stereo_csv(const std::string& text,
                                                const std::string& origin) {
    std::vector<StereoObservation> rows;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw ParseError(where, "expected 8 fields");
        StereoObservation r;
        r.step_index = static_cast<int>(parse_double(f[0], where));
        r.foot = foot_from_string(f[1]);
        r.t_device = parse_double(f[2], where);
        r.found = f[7] == "1";
        if (r.found) {
            r.o1 = {parse_double(f[3], where), parse_double(f[4], where)};
            r.o2 = {parse_double(f[5], where), parse_double(f[6], where)};
        }
        rows.push_back(r);
    }
    return rows;
}

namespace {

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json step_to_json(const StepRecord& r) {
    json j;
    j["step_index"] = r.temporal.step_index;
    j["foot"] = to_string(r.temporal.foot);
    j["t"] = r.temporal.t;
    j["gait_length"] = opt_json(r.gait_length);
    j["gait_width"] = opt_json(r.gait_width);
    j["gait_height"] = opt_json(r.gait_height);
    j["stride_length"] = opt_json(r.stride_length);
    j["stride_velocity"] = opt_json(r.stride_velocity);
    j["step_time"] = opt_json(r.temporal.step_time);
    j["stride_time"] = opt_json(r.temporal.stride_time);
    j["gait_cycle_time"] = opt_json(r.temporal.gait_cycle_time);
    j["swing_time"] = opt_json(r.temporal.swing_time);
    j["standing_time"] = opt_json(r.temporal.standing_time);
    j["single_support"] = opt_json(r.temporal.single_support);
    j["double_support"] = opt_json(r.temporal.double_support);
    j["backward_flagged"] = r.backward_flagged;
    j["negative_double_support"] = r.temporal.negative_double_support;
    return j;
}

}  // namespace

std::string report_json(const GaitReport& report) {
    // accuracy metric: 100 * (1 - mean|measured - truth| / |mean truth|)
    json j;
    j["accuracy_metric"] = "100*(1-mean_abs_err/mean_truth)";
    j["summary"] = {{"n_steps", report.summary.n_steps},
                    {"cadence", report.summary.cadence},
                    {"ambulation_time", report.summary.ambulation_time}};
    j["cv_length"] = opt_json(report.cv_length);
    j["cv_velocity"] = opt_json(report.cv_velocity);
    j["sym_length"] = opt_json(report.sym_length);
    j["sym_velocity"] = opt_json(report.sym_velocity);
    j["missing_spatial"] = report.missing_spatial;
    j["steps"] = json::array();
    for (const StepRecord& r : report.steps) j["steps"].push_back(step_to_json(r));
    if (!report.accuracy.empty()) {
        json acc = json::object();
        for (const AccuracyEntry& e : report.accuracy) acc[e.parameter] = e.accuracy;
        j["accuracy"] = acc;
    }
    return j.dump(2) + "\n";
}

std::string report_text(const GaitReport& report) {
    std::string out;
    out += "gait report\n";
    out += "  steps:           " + std::to_string(report.summary.n_steps) + "\n";
    out += "  cadence:         " + fmt(report.summary.cadence, 3) + " steps/min\n";
    out += "  ambulation time: " + fmt(report.summary.ambulation_time, 3) + " s\n";
    out += "  missing spatial: " + std::to_string(report.missing_spatial) + "\n";
    if (report.cv_length) out += "  %CV length:      " + fmt(*report.cv_length, 3) + "\n";
    if (report.cv_velocity) out += "  %CV velocity:    " + fmt(*report.cv_velocity, 3) + "\n";
    if (report.sym_length) out += "  %Sym length:     " + fmt(*report.sym_length, 3) + "\n";
    if (report.sym_velocity) out += "  %Sym velocity:   " + fmt(*report.sym_velocity, 3) + "\n";
    if (!report.accuracy.empty()) {
        out += "  accuracy vs truth (100*(1-mean_abs_err/mean_truth)):\n";
        for (const AccuracyEntry& e : report.accuracy)
            out += "    " + e.parameter + std::string(std::max<size_t>(1, 18 - e.parameter.size()), ' ') +
                   fmt(e.accuracy, 3) + "%\n";
    }
    out += "  per-step records: " + std::to_string(report.steps.size()) + " (see steps.csv)\n";
    return out;
}

std::string drift_report_json(const DriftReport& report) {
    json j;
    j["window_steps"] = report.window_steps;
    j["mean_drift_percent"] = report.mean_drift_percent;
    j["entries"] = json::array();
    for (const DriftEntry& e : report.entries)
        j["entries"].push_back({{"parameter", e.parameter},
                                {"accuracy_start", e.accuracy_start},
                                {"accuracy_end", e.accuracy_end},
                                {"delta", e.delta}});
    return j.dump(2) + "\n";
}

// ---- observation directory ----

namespace {

void write_file(const fs::path& path, const std::string& content) {
    // atomic: write-temp-then-rename
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParseError(path.string(), "cannot write file");
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json clock_json(const ClockModel& c) {
    return {{"offset", c.offset}, {"drift_rate", c.drift_rate}, {"jitter_sigma", c.jitter_sigma}};
}

ClockModel clock_from_json(const json& j) {
    ClockModel c;
    c.offset = j.value("offset", 0.0);
    c.drift_rate = j.value("drift_rate", 0.0);
    c.jitter_sigma = j.value("jitter_sigma", 0.0);
    return c;
}

}  // namespace

void write_observation_dir(const std::string& dir, const ObservationLog& log,
                           const Calibration& calib, const RigConfig& rig_cfg,
                           const SyncReport& sync, const std::vector<StepRecord>& truth) {
    fs::create_directories(dir);
    const fs::path root(dir);
    save_calibration(calib, (root / "calibration.json").string());
    write_file(root / "left_fsr.csv", fsr_trace_csv(log.left_trace));
    write_file(root / "right_fsr.csv", fsr_trace_csv(log.right_trace));
    write_file(root / "stereo.csv", stereo_csv(log.stereo));
    write_file(root / "sync_report.json", sync_report_json(sync));
    if (!truth.empty()) write_file(root / "truth.csv", step_records_csv(truth));

    json manifest;
    manifest["calibration"] = "calibration.json";
    manifest["left_fsr"] = "left_fsr.csv";
    manifest["right_fsr"] = "right_fsr.csv";
    manifest["stereo"] = "stereo.csv";
    manifest["sync_report"] = "sync_report.json";
    if (!truth.empty()) manifest["truth"] = "truth.csv";
    manifest["seed"] = log.seed;
    manifest["sample_period"] = log.sample_period;
    manifest["rig_config"] = {{"foot_length", rig_cfg.foot_length},
                              {"initial_height_offset", rig_cfg.initial_height_offset},
                              {"theta", rig_cfg.theta}};
    manifest["clocks"] = {{"left", clock_json(log.left_clock)},
                          {"right", clock_json(log.right_clock)}};
    write_file(root / "manifest.json", manifest.dump(2) + "\n");
}

ObservationDir read_observation_dir(const std::string& dir) {
    const fs::path root(dir);
    const std::string manifest_path = (root / "manifest.json").string();
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path, e.what());
    }

    ObservationDir out;
    out.calib = load_calibration((root / manifest.value("calibration", "calibration.json")).string());
    const std::string left = manifest.value("left_fsr", "left_fsr.csv");
    const std::string right = manifest.value("right_fsr", "right_fsr.csv");
    const std::string stereo = manifest.value("stereo", "stereo.csv");
    out.log.left_trace = parse_fsr_trace_csv(read_file(root / left), left);
    out.log.right_trace = parse_fsr_trace_csv(read_file(root / right), right);
    out.log.stereo = parse_stereo_csv(read_file(root / stereo), stereo);
    out.log.sample_period = manifest.value("sample_period", 1e-3);
    out.log.seed = manifest.value("seed", 0ull);
    if (manifest.contains("clocks")) {
        out.log.left_clock = clock_from_json(manifest["clocks"]["left"]);
        out.log.right_clock = clock_from_json(manifest["clocks"]["right"]);
    }
    const std::string sync_name = manifest.value("sync_report", "sync_report.json");
    out.sync = parse_sync_report(read_file(root / sync_name), sync_name);
    if (manifest.contains("rig_config")) {
        out.rig_cfg.foot_length = manifest["rig_config"].value("foot_length", 0.27);
        out.rig_cfg.initial_height_offset =
            manifest["rig_config"].value("initial_height_offset", 0.0);
        out.rig_cfg.theta = manifest["rig_config"].value("theta", out.calib.theta_rad);
    }
    if (manifest.contains("truth")) {
        const std::string truth_name = manifest["truth"].get<std::string>();
        out.truth = parse_step_records_csv(read_file(root / truth_name), truth_name);
    }
    return out;
}

// ---- identification dataset ----

GaitSequence sequence_from_steps(const std::vector<StepRecord>& steps, int label) {
    // cycle-level symmetry/variation, replicated into every step's features
    std::vector<double> lengths, velocities;
    std::vector<double> len_by_foot[2], vel_by_foot[2];
    for (const StepRecord& r : steps) {
        const int f = r.temporal.foot == Foot::Left ? 0 : 1;
        if (r.gait_length) {
            lengths.push_back(*r.gait_length);
            len_by_foot[f].push_back(*r.gait_length);
        }
        if (r.stride_velocity) velocities.push_back(*r.stride_velocity);
    }
    double cv_len = 0.0, sym_len = 0.0;
    if (lengths.size() >= 2) {
        try {
            cv_len = coefficient_of_variation(lengths);
        } catch (const ArgumentError&) {
        }
    }
    if (!len_by_foot[0].empty() && !len_by_foot[1].empty()) {
        const double lm = std::accumulate(len_by_foot[0].begin(), len_by_foot[0].end(), 0.0) /
                          len_by_foot[0].size();
        const double rm = std::accumulate(len_by_foot[1].begin(), len_by_foot[1].end(), 0.0) /
                          len_by_foot[1].size();
        try {
            sym_len = symmetry(rm, lm);
        } catch (const ArgumentError&) {
        }
    }

    std::vector<Eigen::RowVectorXd> rows;
    for (const StepRecord& r : steps) {
        if (!r.gait_height || !r.gait_width || !r.gait_length || !r.temporal.step_time ||
            !r.temporal.stride_time || !r.temporal.swing_time || !r.temporal.double_support ||
            !r.stride_velocity)
            continue;
        Eigen::RowVectorXd row(kIdentFeatureDim);
        row << *r.gait_height, *r.gait_width, *r.gait_length, sym_len, cv_len,
            *r.temporal.step_time, *r.temporal.stride_time, *r.temporal.swing_time,
            *r.temporal.double_support, *r.stride_velocity;
        rows.push_back(row);
    }

    GaitSequence seq;
    seq.label = label;
    seq.features.resize(static_cast<Eigen::Index>(rows.size()), kIdentFeatureDim);
    for (size_t i = 0; i < rows.size(); ++i) seq.features.row(static_cast<Eigen::Index>(i)) = rows[i];
    return seq;
}

std::vector<GaitSequence> make_persona_dataset(int cycles_per_persona, uint64_t base_seed,
                                               const NoiseModel& noise,
                                               const Calibration& calib) {
    const auto personas = default_personas();
    std::vector<GaitSequence> dataset;
    for (int p = 0; p < static_cast<int>(personas.size()); ++p) {
        for (int c = 0; c < cycles_per_persona; ++c) {
            WalkerConfig cfg = personas[p];
            cfg.seed = base_seed + static_cast<uint64_t>(p) * 10007 + static_cast<uint64_t>(c);
            const WalkTrace trace = simulate_walk(cfg);

            const RigConfig rig_cfg = default_rig_config(calib.theta_rad, cfg.foot_length);
            ClockModel left{0.0, 0.0, noise.clock_jitter_sigma};
            ClockModel right{0.0, 0.0, noise.clock_jitter_sigma};
            const ObservationLog log =
                observe(trace, calib.rig, rig_cfg, noise, left, right, cfg.seed + 1);
            SyncReport sync;
            sync.left = estimate_offset(left, 64, cfg.seed + 2);
            sync.right = estimate_offset(right, 64, cfg.seed + 3);
            const GaitReport report = process(log, calib, rig_cfg, sync);
            GaitSequence seq = sequence_from_steps(report.steps, p);
            if (seq.features.rows() > 0) dataset.push_back(std::move(seq));
        }
    }
    return dataset;
}

Calibration default_calibration() {
    Calibration calib;
    Intrinsics K{1400.0, 1400.0, 820.0, 616.0};
    Extrinsics ext;
    ext.t = Vec3(-0.06, 0.0, 0.0);
    calib.rig = build_rig(K, K, ext);
    calib.theta_rad = 0.35;
    calib.image_width = 1640;
    calib.image_height = 1232;
    return calib;
}

}  // namespace gait
