#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gait/marker.hpp"
#include "gait/pipeline.hpp"

namespace py = pybind11;
using namespace gait;

namespace {

std::vector<AccuracyEntry> corpus_accuracy_py(
    const std::vector<std::vector<StepRecord>>& measured,
    const std::vector<std::vector<StepRecord>>& truth) {
    std::vector<const std::vector<StepRecord>*> m, t;
    for (const auto& w : measured) m.push_back(&w);
    for (const auto& w : truth) t.push_back(&w);
    return corpus_accuracy(m, t);
}

}  // namespace

PYBIND11_MODULE(pygaitkit, m) {
    m.doc() = "Stereo gait analysis toolkit: simulator, pipeline, and models";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_ValueError);
    py::register_exception<IllConditionedError>(m, "IllConditionedError", PyExc_ArithmeticError);
    py::register_exception<CheiralityError>(m, "CheiralityError", PyExc_ArithmeticError);
    py::register_exception<MalformedSequenceError>(m, "MalformedSequenceError", PyExc_ValueError);
    py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    // ---- geometry ----
    py::class_<Intrinsics>(m, "Intrinsics")
        .def(py::init<>())
        .def(py::init([](double fx, double fy, double cx, double cy) {
                 return Intrinsics{fx, fy, cx, cy};
             }),
             py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"))
        .def_readwrite("fx", &Intrinsics::fx)
        .def_readwrite("fy", &Intrinsics::fy)
        .def_readwrite("cx", &Intrinsics::cx)
        .def_readwrite("cy", &Intrinsics::cy)
        .def("matrix", &Intrinsics::matrix);

    py::class_<Extrinsics>(m, "Extrinsics")
        .def(py::init<>())
        .def_readwrite("R", &Extrinsics::R)
        .def_readwrite("t", &Extrinsics::t);

    py::class_<PixelPoint>(m, "PixelPoint")
        .def(py::init<>())
        .def(py::init([](double u, double v) { return PixelPoint{u, v}; }), py::arg("u"),
             py::arg("v"))
        .def_readwrite("u", &PixelPoint::u)
        .def_readwrite("v", &PixelPoint::v);

    py::enum_<Frame>(m, "Frame").value("Camera", Frame::Camera).value("Ground", Frame::Ground);

    py::class_<WorldPoint>(m, "WorldPoint")
        .def(py::init<>())
        .def(py::init([](double x, double y, double z, Frame f) {
                 return WorldPoint{x, y, z, f};
             }),
             py::arg("x"), py::arg("y"), py::arg("z"), py::arg("frame") = Frame::Camera)
        .def_readwrite("x", &WorldPoint::x)
        .def_readwrite("y", &WorldPoint::y)
        .def_readwrite("z", &WorldPoint::z)
        .def_readwrite("frame", &WorldPoint::frame)
        .def("vec", &WorldPoint::vec);

    py::class_<StereoRig>(m, "StereoRig")
        .def_readonly("K1", &StereoRig::K1)
        .def_readonly("K2", &StereoRig::K2)
        .def_readonly("P1", &StereoRig::P1)
        .def_readonly("P2", &StereoRig::P2)
        .def_readonly("baseline", &StereoRig::baseline);

    m.def("build_rig", &build_rig, py::arg("K1"), py::arg("K2"), py::arg("ext2"));
    m.def("project", &project, py::arg("P"), py::arg("X"));
    m.def("triangulate", &triangulate, py::arg("rig"), py::arg("o1"), py::arg("o2"));
    m.def("to_ground", &to_ground, py::arg("cam_pt"), py::arg("theta"));
    m.def("ground_to_camera", &ground_to_camera, py::arg("ground_pt"), py::arg("theta"));

    py::class_<ReprojectionStats>(m, "ReprojectionStats")
        .def_readonly("rms", &ReprojectionStats::rms)
        .def_readonly("max", &ReprojectionStats::max);
    m.def("reprojection_error", &reprojection_error, py::arg("rig"), py::arg("world_pts"),
          py::arg("observed"));

    py::class_<Calibration>(m, "Calibration")
        .def(py::init<>())
        .def_readwrite("rig", &Calibration::rig)
        .def_readwrite("theta_rad", &Calibration::theta_rad)
        .def_readwrite("image_width", &Calibration::image_width)
        .def_readwrite("image_height", &Calibration::image_height);
    m.def("load_calibration", &load_calibration, py::arg("path"));
    m.def("save_calibration", &save_calibration, py::arg("calib"), py::arg("path"));
    m.def("default_calibration", &default_calibration);

    // ---- temporal ----
    py::enum_<Foot>(m, "Foot").value("Left", Foot::Left).value("Right", Foot::Right);
    py::enum_<EventKind>(m, "EventKind")
        .value("HeelStrike", EventKind::HeelStrike)
        .value("Lift", EventKind::Lift);

    py::class_<FootfallEvent>(m, "FootfallEvent")
        .def(py::init<>())
        .def(py::init([](Foot f, EventKind k, double t) { return FootfallEvent{f, k, t}; }),
             py::arg("foot"), py::arg("kind"), py::arg("t"))
        .def_readwrite("foot", &FootfallEvent::foot)
        .def_readwrite("kind", &FootfallEvent::kind)
        .def_readwrite("t", &FootfallEvent::t);

    py::class_<FsrSample>(m, "FsrSample")
        .def(py::init<>())
        .def_readwrite("t", &FsrSample::t)
        .def_readwrite("contact", &FsrSample::contact);

    py::class_<FsrTrace>(m, "FsrTrace")
        .def(py::init<>())
        .def_readwrite("foot", &FsrTrace::foot)
        .def_readwrite("samples", &FsrTrace::samples);

    py::class_<EventConfig>(m, "EventConfig")
        .def(py::init<>())
        .def_readwrite("lift_count_threshold", &EventConfig::lift_count_threshold)
        .def_readwrite("sample_period", &EventConfig::sample_period)
        .def_readwrite("lift_compensation", &EventConfig::lift_compensation)
        .def_readwrite("debounce_window", &EventConfig::debounce_window);

    py::class_<TemporalStep>(m, "TemporalStep")
        .def_readonly("step_index", &TemporalStep::step_index)
        .def_readonly("foot", &TemporalStep::foot)
        .def_readonly("t", &TemporalStep::t)
        .def_readonly("step_time", &TemporalStep::step_time)
        .def_readonly("stride_time", &TemporalStep::stride_time)
        .def_readonly("gait_cycle_time", &TemporalStep::gait_cycle_time)
        .def_readonly("swing_time", &TemporalStep::swing_time)
        .def_readonly("standing_time", &TemporalStep::standing_time)
        .def_readonly("single_support", &TemporalStep::single_support)
        .def_readonly("double_support", &TemporalStep::double_support)
        .def_readonly("negative_double_support", &TemporalStep::negative_double_support);

    py::class_<WalkSummary>(m, "WalkSummary")
        .def_readonly("n_steps", &WalkSummary::n_steps)
        .def_readonly("cadence", &WalkSummary::cadence)
        .def_readonly("ambulation_time", &WalkSummary::ambulation_time);

    py::class_<TemporalResult>(m, "TemporalResult")
        .def_readonly("steps", &TemporalResult::steps)
        .def_readonly("summary", &TemporalResult::summary);

    m.def("detect_lift", &detect_lift, py::arg("trace"), py::arg("heel_strike_t"),
          py::arg("count_threshold"), py::arg("compensation"));
    m.def("trace_events", &trace_events, py::arg("trace"), py::arg("cfg") = EventConfig{});
    m.def("events_from_traces", &events_from_traces, py::arg("left"), py::arg("right"),
          py::arg("cfg") = EventConfig{});
    m.def("canonicalize_events", &canonicalize_events, py::arg("events"));
    m.def("temporal_params", &temporal_params, py::arg("events"));

    // ---- spatial statistics ----
    py::class_<StepObservation>(m, "StepObservation")
        .def(py::init<>())
        .def_readwrite("step_index", &StepObservation::step_index)
        .def_readwrite("foot", &StepObservation::foot)
        .def_readwrite("marker_ground", &StepObservation::marker_ground)
        .def_readwrite("t", &StepObservation::t);

    py::class_<RigConfig>(m, "RigConfig")
        .def(py::init<>())
        .def_readwrite("foot_length", &RigConfig::foot_length)
        .def_readwrite("initial_height_offset", &RigConfig::initial_height_offset)
        .def_readwrite("theta", &RigConfig::theta);

    py::class_<GaitVector>(m, "GaitVector")
        .def_readonly("length", &GaitVector::length)
        .def_readonly("width", &GaitVector::width)
        .def_readonly("height", &GaitVector::height);

    m.def("gait_vector", &gait_vector, py::arg("obs"), py::arg("cfg"));
    m.def("stride_length", &stride_length, py::arg("gait_len_prev"), py::arg("gait_len_cur"),
          py::arg("foot_length"));
    m.def("stride_velocity", &stride_velocity, py::arg("stride_len"), py::arg("stride_time"));
    m.def("coefficient_of_variation", &coefficient_of_variation, py::arg("xs"));
    m.def("symmetry", &symmetry, py::arg("x_right"), py::arg("x_left"));

    // ---- sync ----
    py::class_<ClockModel>(m, "ClockModel")
        .def(py::init<>())
        .def_readwrite("offset", &ClockModel::offset)
        .def_readwrite("drift_rate", &ClockModel::drift_rate)
        .def_readwrite("jitter_sigma", &ClockModel::jitter_sigma);

    py::class_<RttConfig>(m, "RttConfig")
        .def(py::init<>())
        .def_readwrite("mean", &RttConfig::mean);

    py::class_<SyncEstimate>(m, "SyncEstimate")
        .def(py::init<>())
        .def_readwrite("offset_estimate", &SyncEstimate::offset_estimate)
        .def_readwrite("rtt_samples", &SyncEstimate::rtt_samples);

    py::class_<SyncReport>(m, "SyncReport")
        .def(py::init<>())
        .def_readwrite("left", &SyncReport::left)
        .def_readwrite("right", &SyncReport::right);

    m.def("estimate_offset", &estimate_offset, py::arg("client"), py::arg("n_probes"),
          py::arg("seed"), py::arg("rtt") = RttConfig{});
    m.def("align_streams", &align_streams, py::arg("left_events"), py::arg("right_events"),
          py::arg("left_est"), py::arg("right_est"));

    // ---- simulator ----
    py::class_<Asymmetry>(m, "Asymmetry")
        .def(py::init<>())
        .def_readwrite("length", &Asymmetry::length)
        .def_readwrite("width", &Asymmetry::width)
        .def_readwrite("height", &Asymmetry::height)
        .def_readwrite("stride_time", &Asymmetry::stride_time);

    py::class_<Waypoint>(m, "Waypoint")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return Waypoint{x, y}; }), py::arg("x"),
             py::arg("y"))
        .def_readwrite("x", &Waypoint::x)
        .def_readwrite("y", &Waypoint::y);

    py::class_<WalkerConfig>(m, "WalkerConfig")
        .def(py::init<>())
        .def_readwrite("gait_length_mean", &WalkerConfig::gait_length_mean)
        .def_readwrite("gait_length_sd", &WalkerConfig::gait_length_sd)
        .def_readwrite("gait_width_mean", &WalkerConfig::gait_width_mean)
        .def_readwrite("gait_width_sd", &WalkerConfig::gait_width_sd)
        .def_readwrite("gait_height_mean", &WalkerConfig::gait_height_mean)
        .def_readwrite("gait_height_sd", &WalkerConfig::gait_height_sd)
        .def_readwrite("standing_fraction", &WalkerConfig::standing_fraction)
        .def_readwrite("stride_time_mean", &WalkerConfig::stride_time_mean)
        .def_readwrite("stride_time_sd", &WalkerConfig::stride_time_sd)
        .def_readwrite("foot_length", &WalkerConfig::foot_length)
        .def_readwrite("asymmetry", &WalkerConfig::asymmetry)
        .def_readwrite("route", &WalkerConfig::route)
        .def_readwrite("seed", &WalkerConfig::seed)
        .def_readwrite("sample_period", &WalkerConfig::sample_period)
        .def("validate", &WalkerConfig::validate);

    py::class_<Footfall>(m, "Footfall")
        .def_readonly("foot", &Footfall::foot)
        .def_readonly("heel_pos", &Footfall::heel_pos)
        .def_readonly("tip_pos", &Footfall::tip_pos)
        .def_readonly("heel_strike_t", &Footfall::heel_strike_t)
        .def_readonly("lift_t", &Footfall::lift_t)
        .def_readonly("direction", &Footfall::direction)
        .def_readonly("marker_height", &Footfall::marker_height);

    py::class_<WalkTrace>(m, "WalkTrace")
        .def_readonly("footfalls", &WalkTrace::footfalls)
        .def_readonly("true_events", &WalkTrace::true_events)
        .def_readonly("true_steps", &WalkTrace::true_steps)
        .def_readonly("true_summary", &WalkTrace::true_summary);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<>())
        .def_readwrite("pixel_sigma", &NoiseModel::pixel_sigma)
        .def_readwrite("clock_jitter_sigma", &NoiseModel::clock_jitter_sigma)
        .def_readwrite("fsr_double_trigger_prob", &NoiseModel::fsr_double_trigger_prob)
        .def_readwrite("marker_miss_prob", &NoiseModel::marker_miss_prob)
        .def_readwrite("yaw_drift_per_step", &NoiseModel::yaw_drift_per_step)
        .def("validate", &NoiseModel::validate);

    py::class_<StereoObservation>(m, "StereoObservation")
        .def(py::init<>())
        .def_readwrite("step_index", &StereoObservation::step_index)
        .def_readwrite("foot", &StereoObservation::foot)
        .def_readwrite("t_device", &StereoObservation::t_device)
        .def_readwrite("o1", &StereoObservation::o1)
        .def_readwrite("o2", &StereoObservation::o2)
        .def_readwrite("found", &StereoObservation::found);

    py::class_<ObservationLog>(m, "ObservationLog")
        .def(py::init<>())
        .def_readwrite("left_trace", &ObservationLog::left_trace)
        .def_readwrite("right_trace", &ObservationLog::right_trace)
        .def_readwrite("stereo", &ObservationLog::stereo)
        .def_readwrite("left_clock", &ObservationLog::left_clock)
        .def_readwrite("right_clock", &ObservationLog::right_clock)
        .def_readwrite("sample_period", &ObservationLog::sample_period)
        .def_readwrite("seed", &ObservationLog::seed);

    py::class_<MountModel>(m, "MountModel")
        .def(py::init<>())
        .def_readwrite("camera_height", &MountModel::camera_height)
        .def_readwrite("marker_height", &MountModel::marker_height);

    m.def("simulate_walk", &simulate_walk, py::arg("cfg"));
    m.def("observe", &observe, py::arg("trace"), py::arg("rig"), py::arg("cfg"), py::arg("noise"),
          py::arg("left_clock") = ClockModel{}, py::arg("right_clock") = ClockModel{},
          py::arg("seed") = 0, py::arg("mount") = MountModel{});
    m.def("default_personas", &default_personas);
    m.def("default_rig_config", &default_rig_config, py::arg("theta"), py::arg("foot_length"),
          py::arg("mount") = MountModel{});

    // ---- marker ----
    py::class_<Image>(m, "Image")
        .def(py::init<>())
        .def_readwrite("width", &Image::width)
        .def_readwrite("height", &Image::height)
        .def_readwrite("pixels", &Image::pixels);

    py::class_<Detection>(m, "Detection")
        .def_readonly("center", &Detection::center)
        .def_readonly("confidence", &Detection::confidence)
        .def_readonly("found", &Detection::found);

    py::class_<MarkerRenderParams>(m, "MarkerRenderParams")
        .def(py::init<>())
        .def_readwrite("image_size", &MarkerRenderParams::image_size)
        .def_readwrite("center", &MarkerRenderParams::center)
        .def_readwrite("scale", &MarkerRenderParams::scale)
        .def_readwrite("rotation", &MarkerRenderParams::rotation)
        .def_readwrite("noise_sigma", &MarkerRenderParams::noise_sigma)
        .def_readwrite("seed", &MarkerRenderParams::seed);

    m.def("make_image", &make_image, py::arg("width"), py::arg("height"), py::arg("fill") = 1.0);
    m.def("render_marker", &render_marker, py::arg("params"));
    m.def("detect_center", &detect_center, py::arg("img"));
    m.def("write_pgm", &write_pgm, py::arg("img"), py::arg("path"));
    m.def("read_pgm", &read_pgm, py::arg("path"));

    // ---- identification ----
    py::class_<GaitSequence>(m, "GaitSequence")
        .def(py::init<>())
        .def_readwrite("features", &GaitSequence::features)
        .def_readwrite("label", &GaitSequence::label);

    py::class_<SequenceWindow>(m, "SequenceWindow")
        .def_readonly("x", &SequenceWindow::x)
        .def_readonly("mask", &SequenceWindow::mask)
        .def_readonly("label", &SequenceWindow::label)
        .def_readonly("sequence_id", &SequenceWindow::sequence_id);

    py::class_<IdentConfig>(m, "IdentConfig")
        .def(py::init<>())
        .def_readwrite("d_model", &IdentConfig::d_model)
        .def_readwrite("n_heads", &IdentConfig::n_heads)
        .def_readwrite("n_layers", &IdentConfig::n_layers)
        .def_readwrite("d_ff", &IdentConfig::d_ff)
        .def_readwrite("window", &IdentConfig::window)
        .def_readwrite("n_classes", &IdentConfig::n_classes)
        .def_readwrite("dropout", &IdentConfig::dropout);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("window", &TrainConfig::window)
        .def_readwrite("folds", &TrainConfig::folds)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("dropout", &TrainConfig::dropout)
        .def_readwrite("model", &TrainConfig::model);

    py::class_<KFoldResult>(m, "KFoldResult")
        .def_readonly("fold_accuracy", &KFoldResult::fold_accuracy)
        .def_readonly("mean_accuracy", &KFoldResult::mean_accuracy)
        .def_readonly("confusion", &KFoldResult::confusion);

    py::class_<IdentModel>(m, "IdentModel")
        .def(py::init<const IdentConfig&, uint64_t>(), py::arg("cfg"), py::arg("seed"))
        .def("forward", &IdentModel::forward, py::arg("window"))
        .def("save", &IdentModel::save, py::arg("path"))
        .def_static("load", &IdentModel::load, py::arg("path"));

    m.def("segment", &segment, py::arg("seq"), py::arg("window"));
    m.def("train_kfold", &train_kfold, py::arg("dataset"), py::arg("cfg"));

    // ---- pipeline ----
    py::class_<StepRecord>(m, "StepRecord")
        .def(py::init<>())
        .def_readwrite("temporal", &StepRecord::temporal)
        .def_readwrite("gait_length", &StepRecord::gait_length)
        .def_readwrite("gait_width", &StepRecord::gait_width)
        .def_readwrite("gait_height", &StepRecord::gait_height)
        .def_readwrite("stride_length", &StepRecord::stride_length)
        .def_readwrite("stride_velocity", &StepRecord::stride_velocity)
        .def_readwrite("backward_flagged", &StepRecord::backward_flagged);

    py::class_<AccuracyEntry>(m, "AccuracyEntry")
        .def_readonly("parameter", &AccuracyEntry::parameter)
        .def_readonly("accuracy", &AccuracyEntry::accuracy);

    py::class_<GaitReport>(m, "GaitReport")
        .def_readonly("steps", &GaitReport::steps)
        .def_readonly("summary", &GaitReport::summary)
        .def_readonly("cv_length", &GaitReport::cv_length)
        .def_readonly("cv_velocity", &GaitReport::cv_velocity)
        .def_readonly("sym_length", &GaitReport::sym_length)
        .def_readonly("sym_velocity", &GaitReport::sym_velocity)
        .def_readonly("missing_spatial", &GaitReport::missing_spatial)
        .def_readonly("accuracy", &GaitReport::accuracy);

    py::class_<DriftEntry>(m, "DriftEntry")
        .def_readonly("parameter", &DriftEntry::parameter)
        .def_readonly("accuracy_start", &DriftEntry::accuracy_start)
        .def_readonly("accuracy_end", &DriftEntry::accuracy_end)
        .def_readonly("delta", &DriftEntry::delta);

    py::class_<DriftReport>(m, "DriftReport")
        .def_readonly("entries", &DriftReport::entries)
        .def_readonly("mean_drift_percent", &DriftReport::mean_drift_percent)
        .def_readonly("window_steps", &DriftReport::window_steps);

    py::class_<ObservationDir>(m, "ObservationDir")
        .def_readonly("log", &ObservationDir::log)
        .def_readonly("calib", &ObservationDir::calib)
        .def_readonly("rig_cfg", &ObservationDir::rig_cfg)
        .def_readonly("sync", &ObservationDir::sync)
        .def_readonly("truth", &ObservationDir::truth);

    m.def("report_parameters", &report_parameters,
          py::return_value_policy::reference);
    m.def("process", &process, py::arg("log"), py::arg("calib"), py::arg("rig_cfg"),
          py::arg("sync"));
    m.def("accuracy_table", &accuracy_table, py::arg("measured"), py::arg("truth"),
          py::arg("begin") = 0, py::arg("end") = -1);
    m.def("corpus_accuracy", &corpus_accuracy_py, py::arg("measured_walks"),
          py::arg("truth_walks"));
    m.def("attach_truth", &attach_truth, py::arg("report"), py::arg("truth"));
    m.def("drift_study", &drift_study, py::arg("measured"), py::arg("truth"), py::arg("k"));
    m.def("report_json", &report_json, py::arg("report"));
    m.def("report_text", &report_text, py::arg("report"));
    m.def("drift_report_json", &drift_report_json, py::arg("report"));
    m.def("step_records_csv", &step_records_csv, py::arg("steps"));
    m.def("parse_step_records_csv", &parse_step_records_csv, py::arg("text"), py::arg("origin"));
    m.def("write_observation_dir", &write_observation_dir, py::arg("dir"), py::arg("log"),
          py::arg("calib"), py::arg("rig_cfg"), py::arg("sync"), py::arg("truth"));
    m.def("read_observation_dir", &read_observation_dir, py::arg("dir"));
    m.def("sequence_from_steps", &sequence_from_steps, py::arg("steps"), py::arg("label"));
    m.def("make_persona_dataset", &make_persona_dataset, py::arg("cycles_per_persona"),
          py::arg("base_seed"), py::arg("noise"), py::arg("calib"));
}
