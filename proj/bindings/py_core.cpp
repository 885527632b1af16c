#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occulstm/cli.hpp"
#include "occulstm/encoding.hpp"
#include "occulstm/eval.hpp"
#include "occulstm/model.hpp"
#include "occulstm/plot.hpp"
#include "occulstm/rng.hpp"
#include "occulstm/synth.hpp"
#include "occulstm/train.hpp"

namespace py = pybind11;
using namespace occulstm;

namespace {

std::vector<std::vector<double>> window_rows(const WindowedDataset& ds,
                                             std::size_t i) {
  if (i >= ds.size()) throw py::index_error();
  const Matrix& w = ds.windows[i];
  std::vector<std::vector<double>> rows(w.rows, std::vector<double>(w.cols));
  for (std::size_t t = 0; t < w.rows; ++t)
    for (std::size_t k = 0; k < w.cols; ++k) rows[t][k] = w(t, k);
  return rows;
}

py::list predict_probs(const Model& model, const WindowedDataset& ds) {
  py::list out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ForwardPass pass =
        forward_sequence(model.lstm, model.head, ds.windows[i], model.config.mode);
    if (model.config.mode == Mode::classifier) {
      out.append(pass.probs);
    } else {
      out.append(Vec{pass.logits[0]});
    }
  }
  return out;
}

std::vector<int> predict_classes(const Model& model, const WindowedDataset& ds) {
  std::vector<int> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ForwardPass pass =
        forward_sequence(model.lstm, model.head, ds.windows[i], model.config.mode);
    out.push_back(model.config.mode == Mode::classifier
                      ? decode_argmax(pass.probs)
                      : round_to_class(pass.logits[0]));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Room occupancy estimation from environmental sensor time series";

  py::register_exception<Error>(m, "Error");

  // dataio ------------------------------------------------------------------
  py::class_<SensorReading>(m, "SensorReading")
      .def(py::init<>())
      .def_readwrite("timestamp", &SensorReading::timestamp)
      .def_readwrite("temperature", &SensorReading::temperature)
      .def_readwrite("humidity", &SensorReading::humidity)
      .def_readwrite("co2", &SensorReading::co2)
      .def_readwrite("noise", &SensorReading::noise)
      .def_readwrite("pressure", &SensorReading::pressure)
      .def_readwrite("people", &SensorReading::people)
      .def("features", &SensorReading::features)
      .def("__repr__", [](const SensorReading& r) {
        return "SensorReading(" + format_timestamp(r.timestamp) + ", co2=" +
               std::to_string(r.co2) + ", people=" +
               (r.people ? std::to_string(*r.people) : "None") + ")";
      });

  py::class_<NormStats>(m, "NormStats")
      .def(py::init<>())
      .def_readwrite("mean", &NormStats::mean)
      .def_readwrite("std", &NormStats::std);

  py::class_<DatasetSplit>(m, "DatasetSplit")
      .def(py::init<>())
      .def_readwrite("train", &DatasetSplit::train)
      .def_readwrite("val", &DatasetSplit::val)
      .def_readwrite("test", &DatasetSplit::test);

  py::class_<WindowedDataset>(m, "WindowedDataset")
      .def_readonly("labels", &WindowedDataset::labels)
      .def_readonly("end_timestamps", &WindowedDataset::end_timestamps)
      .def_readonly("window_len", &WindowedDataset::window_len)
      .def_readonly("stride", &WindowedDataset::stride)
      .def_readonly("short_days", &WindowedDataset::short_days)
      .def("__len__", &WindowedDataset::size)
      .def("window", &window_rows, py::arg("i"));

  m.def("parse_sensor_csv",
        [](const std::string& text) { return parse_sensor_csv(text); },
        py::arg("text"));
  m.def("serialize_sensor_csv", &serialize_sensor_csv, py::arg("readings"));
  m.def("parse_timestamp",
        [](const std::string& text) { return parse_timestamp(text); },
        py::arg("text"));
  m.def("format_timestamp", &format_timestamp, py::arg("ts"));
  m.def("group_by_day", &group_by_day, py::arg("readings"));
  m.def("split_by_days", &split_by_days, py::arg("readings"), py::arg("n_train"),
        py::arg("n_val"), py::arg("n_test"));
  m.def("compute_norm_stats", &compute_norm_stats, py::arg("day_groups"));
  m.def("make_windows", &make_windows, py::arg("day_groups"), py::arg("stats"),
        py::arg("window_len"), py::arg("stride"));

  // encoding ----------------------------------------------------------------
  m.attr("NUM_CLASSES") = kNumClasses;
  m.def("clamp_count", &clamp_count, py::arg("people"));
  m.def("one_hot_encode", &one_hot_encode, py::arg("label"));
  m.def("decode_argmax", &decode_argmax, py::arg("probs"));

  // model -------------------------------------------------------------------
  py::enum_<Mode>(m, "Mode")
      .value("classifier", Mode::classifier)
      .value("regressor", Mode::regressor);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("input_dim", &ModelConfig::input_dim)
      .def_readwrite("hidden_dim", &ModelConfig::hidden_dim)
      .def_readwrite("num_classes", &ModelConfig::num_classes)
      .def_readwrite("window_len", &ModelConfig::window_len)
      .def_readwrite("mode", &ModelConfig::mode)
      .def("output_dim", &ModelConfig::output_dim);

  py::class_<Model>(m, "Model")
      .def_readonly("config", &Model::config)
      .def_readonly("norm", &Model::norm)
      .def("to_string", &checkpoint_to_string)
      .def("save", &save_checkpoint, py::arg("path"))
      .def_static("from_string", [](const std::string& text) {
        return checkpoint_from_string(text);
      })
      .def_static("load", &load_checkpoint, py::arg("path"));

  m.def("softmax", &softmax, py::arg("logits"));
  m.def("sigmoid", &sigmoid, py::arg("x"));

  // train -------------------------------------------------------------------
  py::class_<Hyper>(m, "Hyper")
      .def(py::init<>())
      .def_readwrite("epochs", &Hyper::epochs)
      .def_readwrite("batch", &Hyper::batch)
      .def_readwrite("learning_rate", &Hyper::learning_rate)
      .def_readwrite("seed", &Hyper::seed)
      .def_readwrite("stride", &Hyper::stride)
      .def_readwrite("clip_norm", &Hyper::clip_norm)
      .def_readwrite("threads", &Hyper::threads);

  py::class_<EpochStats>(m, "EpochStats")
      .def_readonly("train_loss", &EpochStats::train_loss)
      .def_readonly("val_loss", &EpochStats::val_loss)
      .def_readonly("val_f1", &EpochStats::val_f1);

  m.def("fit", &fit, py::arg("config"), py::arg("split"), py::arg("hyper"),
        "Train a model; returns (model, history)");
  m.def("bce_loss", &bce_loss, py::arg("probs"), py::arg("target_one_hot"));
  m.def("mse_loss", &mse_loss, py::arg("pred"), py::arg("target"));
  m.def("gradient_check",
        [](const ModelConfig& config, std::uint64_t seed) {
          return gradient_check(config, seed);
        },
        py::arg("config"), py::arg("seed"));
  m.def("history_to_csv", &history_to_csv, py::arg("history"));

  // eval --------------------------------------------------------------------
  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def_readonly("tp", &ConfusionCounts::tp)
      .def_readonly("fp", &ConfusionCounts::fp)
      .def_readonly("fn", &ConfusionCounts::fn)
      .def_readonly("samples", &ConfusionCounts::samples);

  py::class_<ClassMetrics>(m, "ClassMetrics")
      .def_readonly("precision", &ClassMetrics::precision)
      .def_readonly("recall", &ClassMetrics::recall)
      .def_readonly("f1", &ClassMetrics::f1);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("per_class", &MetricsReport::per_class)
      .def_readonly("micro", &MetricsReport::micro)
      .def_readonly("counts", &MetricsReport::counts)
      .def_readonly("samples", &MetricsReport::samples);

  py::class_<SeriesPoint>(m, "SeriesPoint")
      .def(py::init<>())
      .def_readwrite("timestamp", &SeriesPoint::timestamp)
      .def_readwrite("truth", &SeriesPoint::truth)
      .def_readwrite("prediction", &SeriesPoint::prediction);

  py::class_<Evaluation>(m, "Evaluation")
      .def_readonly("report", &Evaluation::report)
      .def_readonly("series", &Evaluation::series);

  m.def("confusion", &confusion, py::arg("preds"), py::arg("truths"));
  m.def("precision_recall", &precision_recall, py::arg("counts"), py::arg("k"));
  m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));
  m.def("round_to_class", &round_to_class, py::arg("pred"));
  m.def("metrics_from_counts", &metrics_from_counts, py::arg("counts"));
  m.def("evaluate_model", &evaluate_model, py::arg("model"), py::arg("data"));
  m.def("metrics_to_csv", &metrics_to_csv, py::arg("report"));
  m.def("metrics_to_text", &metrics_to_text, py::arg("report"));
  m.def("series_to_csv", &series_to_csv, py::arg("series"));
  m.def("parse_series_csv",
        [](const std::string& text) { return parse_series_csv(text); },
        py::arg("text"));
  m.def("predict_probs", &predict_probs, py::arg("model"), py::arg("data"),
        "Per-window probability vectors (classifier) or raw outputs (regressor)");
  m.def("predict_classes", &predict_classes, py::arg("model"), py::arg("data"));

  // synth -------------------------------------------------------------------
  py::class_<RoomParams>(m, "RoomParams")
      .def(py::init<>())
      .def_readwrite("ambient_co2", &RoomParams::ambient_co2)
      .def_readwrite("co2_per_person", &RoomParams::co2_per_person)
      .def_readwrite("air_exchange", &RoomParams::air_exchange)
      .def_readwrite("base_temp", &RoomParams::base_temp)
      .def_readwrite("temp_per_person", &RoomParams::temp_per_person)
      .def_readwrite("base_humidity", &RoomParams::base_humidity)
      .def_readwrite("humidity_per_person", &RoomParams::humidity_per_person)
      .def_readwrite("base_noise_db", &RoomParams::base_noise_db)
      .def_readwrite("noise_per_person", &RoomParams::noise_per_person)
      .def_readwrite("base_pressure", &RoomParams::base_pressure)
      .def_readwrite("pressure_per_person", &RoomParams::pressure_per_person)
      .def_readwrite("sensor_noise_sd", &RoomParams::sensor_noise_sd)
      .def_readwrite("step_minutes", &RoomParams::step_minutes);

  py::class_<Session>(m, "Session")
      .def(py::init<>())
      .def_readwrite("start_step", &Session::start_step)
      .def_readwrite("end_step", &Session::end_step)
      .def_readwrite("people", &Session::people);

  py::class_<OccupancySchedule>(m, "OccupancySchedule")
      .def(py::init<>())
      .def_readwrite("days", &OccupancySchedule::days)
      .def_readwrite("steps_per_day", &OccupancySchedule::steps_per_day);

  m.def("gen_schedule", &gen_schedule, py::arg("days"), py::arg("seed"),
        py::arg("steps_per_day") = 288);
  m.def("occupancy_at", &occupancy_at, py::arg("schedule"), py::arg("day"),
        py::arg("step"));
  m.def("gen_readings", &gen_readings, py::arg("schedule"), py::arg("params"),
        py::arg("seed"));
  m.def("schedule_to_csv", &schedule_to_csv, py::arg("schedule"));
  m.def("derive_seed",
        [](std::uint64_t seed, const std::string& label) {
          return derive_seed(seed, label);
        },
        py::arg("seed"), py::arg("label"));

  // plot --------------------------------------------------------------------
  m.def("render_series_svg", &render_series_svg, py::arg("series"));
}
