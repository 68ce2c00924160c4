#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gait/ident.hpp"
#include "gait/simulator.hpp"
#include "gait/spatial_stats.hpp"
#include "gait/sync.hpp"

namespace gait {

// Named per-parameter accuracy entry: 100 * (1 - mean|measured - truth| / |mean truth|).
struct AccuracyEntry {
    std::string parameter;
    double accuracy = 0.0;
};

struct GaitReport {
    std::vector<StepRecord> steps;
    WalkSummary summary;
    std::optional<double> cv_length;    // %CV of gait length
    std::optional<double> cv_velocity;  // %CV of stride velocity
    std::optional<double> sym_length;   // %Sym of gait length
    std::optional<double> sym_velocity;
    int missing_spatial = 0;            // steps (index >= 1) without a marker fix
    // present only when a truth source is attached
    std::vector<AccuracyEntry> accuracy;
};

// Canonical list of the 17 reported parameters, in report order.
const std::vector<std::string>& report_parameters();

// Full analysis: FSR traces -> events -> sync-aligned merge -> temporal
// parameters; stereo detections -> triangulate -> ground frame -> spatial
// parameters; variation and symmetry appended.
GaitReport process(const ObservationLog& log, const Calibration& calib,
                   const RigConfig& rig_cfg, const SyncReport& sync);

// Computes the 17-parameter accuracy table against ground truth, over the
// half-open step range [begin, end) (end < 0 means all steps).
std::vector<AccuracyEntry> accuracy_table(const std::vector<StepRecord>& measured,
                                          const std::vector<StepRecord>& truth,
                                          int begin = 0, int end = -1);

// Same table pooled over a corpus of walks: per-step parameters pool their
// step pairs, per-walk scalars (n_steps, cadence, ambulation, variation,
// symmetry) pool one pair per walk. Lists must be equal length.
std::vector<AccuracyEntry> corpus_accuracy(
    const std::vector<const std::vector<StepRecord>*>& measured_walks,
    const std::vector<const std::vector<StepRecord>*>& truth_walks);

void attach_truth(GaitReport& report, const std::vector<StepRecord>& truth);

struct DriftEntry {
    std::string parameter;
    double accuracy_start = 0.0;
    double accuracy_end = 0.0;
    double delta = 0.0;  // |start - end|
};

struct DriftReport {
    std::vector<DriftEntry> entries;
    double mean_drift_percent = 0.0;
    int window_steps = 0;
};

// Accuracy over the first k vs last k steps of a long walk.
// Throws ArgumentError when the walk is shorter than 2k + 20 steps.
DriftReport drift_study(const std::vector<StepRecord>& measured,
                        const std::vector<StepRecord>& truth, int k);

// ---- file formats ----

std::string step_records_csv(const std::vector<StepRecord>& steps);
std::vector<StepRecord> parse_step_records_csv(const std::string& text, const std::string& origin);

std::string fsr_trace_csv(const FsrTrace& trace);
FsrTrace parse_fsr_trace_csv(const std::string& text, const std::string& origin);

std::string events_csv(const std::vector<FootfallEvent>& events);
std::vector<FootfallEvent> parse_events_csv(const std::string& text, const std::string& origin);

std::string stereo_csv(const std::vector<StereoObservation>& rows);
std::vector<StereoObservation> parse_stereo_csv(const std::string& text, const std::string& origin);

std::string report_json(const GaitReport& report);
std::string report_text(const GaitReport& report);
std::string drift_report_json(const DriftReport& report);

// ---- observation directory layout ----
// manifest.json names the calibration file, rig config, seed, and data files;
// everything is reproducible bit-exactly from (cfg, seed).

struct ObservationDir {
    ObservationLog log;
    Calibration calib;
    RigConfig rig_cfg;
    SyncReport sync;
    std::vector<StepRecord> truth;  // empty when no truth was recorded
};

void write_observation_dir(const std::string& dir, const ObservationLog& log,
                           const Calibration& calib, const RigConfig& rig_cfg,
                           const SyncReport& sync, const std::vector<StepRecord>& truth);
ObservationDir read_observation_dir(const std::string& dir);

// ---- identification dataset ----

// Ten-feature rows for one walking cycle; steps missing any feature are
// dropped, cycle-level symmetry/variation are replicated per step.
GaitSequence sequence_from_steps(const std::vector<StepRecord>& steps, int label);

// Synthesizes the six-persona dataset by running each persona's walks
// through the full simulate/observe/process path under the given noise
// model. Deterministic given base_seed.
std::vector<GaitSequence> make_persona_dataset(int cycles_per_persona, uint64_t base_seed,
                                               const NoiseModel& noise, const Calibration& calib);

// The calibration used by fixtures and defaults (1640x1232, f = 1400 px,
// 6 cm baseline, theta = 0.35 rad).
Calibration default_calibration();

}  // namespace gait
