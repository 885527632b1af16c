#pragma once

#include <cstdint>
#include <string>

#include "occulstm/synth.hpp"
#include "occulstm/train.hpp"

namespace occulstm {

// Exit code contract: 0 success, 2 usage/flag error, 3 data/precondition
// error, 4 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct ConfigMismatch : Error {
  using Error::Error;
};

struct SynthOptions {
  int days = 11;
  std::uint64_t seed = 1;
  std::string out = "data.csv";
  std::string schedule_out;  // default: <out>.schedule.csv
  RoomParams room;
  double noise_scale = 1.0;  // multiplies every per-feature noise sd
};

struct TrainOptions {
  std::string data;
  std::string checkpoint = "model.ckpt";
  std::string history;  // default: <checkpoint>.history.csv
  std::string mode = "classifier";
  int hidden_dim = 64;
  int window_len = 12;
  int n_train = 7, n_val = 2, n_test = 2;
  Hyper hyper;
};

struct EvaluateOptions {
  std::string data;
  std::string checkpoint;
  std::string metrics_out = "metrics.csv";
  std::string series_out = "series.csv";
  int n_train = 7, n_val = 2, n_test = 2;
  bool use_all = false;  // treat the whole file as the test set
  int stride = 1;
  int window_len = 0;  // 0: take from checkpoint; else must match it
};

struct PredictOptions {
  std::string data;
  std::string checkpoint;
  bool probs = false;
  int stride = 1;
};

struct PlotOptions {
  std::string series;
  std::string out = "plot.svg";
};

int cmd_synth(const SynthOptions& opt);
int cmd_train(const TrainOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_predict(const PredictOptions& opt, std::string* out_text = nullptr);
int cmd_plot(const PlotOptions& opt);

}  // namespace occulstm
