#include "occulstm/cli.hpp"

#include <cstdio>
#include <string>

#include "occulstm/eval.hpp"
#include "occulstm/format.hpp"
#include "occulstm/plot.hpp"
#include "occulstm/rng.hpp"

namespace occulstm {

namespace {

std::string default_suffix(const std::string& base, const std::string& suffix) {
  return base + suffix;
}

int data_error(const char* cmd, const std::exception& e) {
  std::fprintf(stderr, "occulstm %s: %s\n", cmd, e.what());
  return kExitData;
}

}  // namespace

int cmd_synth(const SynthOptions& opt) {
  try {
    RoomParams room = opt.room;
    for (double& sd : room.sensor_noise_sd) sd *= opt.noise_scale;

    const int steps_per_day = 1440 / room.step_minutes;
    OccupancySchedule schedule =
        gen_schedule(opt.days, derive_seed(opt.seed, "synth.schedule"), steps_per_day);
    std::vector<SensorReading> readings =
        gen_readings(schedule, room, derive_seed(opt.seed, "synth.readings"));

    write_file(opt.out, serialize_sensor_csv(readings));
    const std::string schedule_path =
        opt.schedule_out.empty() ? default_suffix(opt.out, ".schedule.csv")
                                 : opt.schedule_out;
    write_file(schedule_path, schedule_to_csv(schedule));
    std::printf("wrote %zu readings over %d days to %s (schedule: %s)\n",
                readings.size(), opt.days, opt.out.c_str(), schedule_path.c_str());
    return kExitOk;
  } catch (const Error& e) {
    return data_error("synth", e);
  }
}

int cmd_train(const TrainOptions& opt) {
  Mode mode;
  try {
    mode = mode_from_string(opt.mode);
  } catch (const Error& e) {
    std::fprintf(stderr, "occulstm train: %s\n", e.what());
    return kExitUsage;
  }
  try {
    std::vector<SensorReading> readings = parse_sensor_csv(read_file(opt.data));
    require_labels(readings);
    DatasetSplit split = split_by_days(readings, opt.n_train, opt.n_val, opt.n_test);

    ModelConfig config;
    config.hidden_dim = opt.hidden_dim;
    config.window_len = opt.window_len;
    config.mode = mode;

    auto [model, history] = fit(config, split, opt.hyper);

    save_checkpoint(model, opt.checkpoint);
    const std::string history_path =
        opt.history.empty() ? default_suffix(opt.checkpoint, ".history.csv")
                            : opt.history;
    write_file(history_path, history_to_csv(history));

    std::size_t best_epoch = 0;
    if (!history.empty()) {
      best_epoch = 1;
      for (std::size_t e = 1; e < history.size(); ++e) {
        const bool better = mode == Mode::classifier
                                ? history[e].val_f1 > history[best_epoch - 1].val_f1
                                : history[e].val_loss < history[best_epoch - 1].val_loss;
        if (better) best_epoch = e + 1;
      }
    }
    const double best_f1 = best_epoch ? history[best_epoch - 1].val_f1 : 0.0;
    std::printf("trained %s model (%d epochs): best epoch %zu, val micro-F1 %s\n",
                to_string(mode).c_str(), opt.hyper.epochs, best_epoch,
                format_double(best_f1).c_str());
    return kExitOk;
  } catch (const DivergedLoss& e) {
    std::fprintf(stderr, "occulstm train: %s\n", e.what());
    return kExitNumeric;
  } catch (const Error& e) {
    return data_error("train", e);
  }
}

int cmd_evaluate(const EvaluateOptions& opt) {
  try {
    Model model = load_checkpoint(opt.checkpoint);
    if (opt.window_len > 0 && opt.window_len != model.config.window_len)
      throw ConfigMismatch("requested window_len " + std::to_string(opt.window_len) +
                           " but checkpoint was trained with " +
                           std::to_string(model.config.window_len));

    std::vector<SensorReading> readings = parse_sensor_csv(read_file(opt.data));
    require_labels(readings);

    std::vector<DayGroup> test_days;
    if (opt.use_all) {
      test_days = group_by_day(readings);
    } else {
      test_days = split_by_days(readings, opt.n_train, opt.n_val, opt.n_test).test;
    }

    WindowedDataset windows =
        make_windows(test_days, model.norm, model.config.window_len, opt.stride);
    Evaluation ev = evaluate_model(model, windows);

    write_file(opt.metrics_out, metrics_to_csv(ev.report));
    write_file(opt.series_out, series_to_csv(ev.series));
    std::fputs(metrics_to_text(ev.report).c_str(), stdout);
    return kExitOk;
  } catch (const Error& e) {
    return data_error("evaluate", e);
  }
}

int cmd_predict(const PredictOptions& opt, std::string* out_text) {
  try {
    Model model = load_checkpoint(opt.checkpoint);
    std::vector<SensorReading> readings = parse_sensor_csv(read_file(opt.data));
    if (readings.size() < static_cast<std::size_t>(model.config.window_len))
      throw EmptyDataset("need at least " + std::to_string(model.config.window_len) +
                         " rows for one window, got " + std::to_string(readings.size()));

    WindowedDataset windows = make_windows(group_by_day(readings), model.norm,
                                           model.config.window_len, opt.stride);
    if (windows.size() == 0)
      throw EmptyDataset("no full window fits inside a single day");

    std::string out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      ForwardPass pass = forward_sequence(model.lstm, model.head,
                                          windows.windows[i], model.config.mode);
      int pred = model.config.mode == Mode::classifier
                     ? decode_argmax(pass.probs)
                     : round_to_class(pass.logits[0]);
      out += format_timestamp(windows.end_timestamps[i]) + ',' + std::to_string(pred);
      if (opt.probs && model.config.mode == Mode::classifier) {
        for (double p : pass.probs) out += ',' + format_double(p);
      }
      out += '\n';
    }
    if (out_text) {
      *out_text = out;
    } else {
      std::fputs(out.c_str(), stdout);
    }
    return kExitOk;
  } catch (const Error& e) {
    return data_error("predict", e);
  }
}

int cmd_plot(const PlotOptions& opt) {
  try {
    std::vector<SeriesPoint> series = parse_series_csv(read_file(opt.series));
    if (series.empty()) throw EmptyInput("series has no data rows");
    write_file(opt.out, render_series_svg(series));
    std::printf("wrote %s (%zu points)\n", opt.out.c_str(), series.size());
    return kExitOk;
  } catch (const Error& e) {
    // malformed series input is treated as a usage error for this command
    std::fprintf(stderr, "occulstm plot: %s\n", e.what());
    return kExitUsage;
  }
}

}  // namespace occulstm
