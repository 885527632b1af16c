#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "occulstm/cli.hpp"

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// `key = value` lines with `#` comments. Values fill only options that were
// not given on the command line, so flags > config file > built-in defaults.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError(
          "--config", "line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config")
      throw CLI::ValidationError("--config", "unknown key '" + key + "'");
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room occupancy estimation from environmental sensor time series"};
  app.require_subcommand(1);
  std::string synth_config, train_config, eval_config, predict_config, plot_config;

  occulstm::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sensor corpus");
  synth_cmd->add_option("--days", synth.days, "number of days to simulate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "root random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output CSV path")->capture_default_str();
  synth_cmd->add_option("--schedule-out", synth.schedule_out,
                        "ground-truth schedule CSV (default <out>.schedule.csv)");
  synth_cmd->add_option("--step-minutes", synth.room.step_minutes, "sampling cadence")
      ->check(CLI::Range(1, 1440))
      ->capture_default_str();
  synth_cmd->add_option("--ambient", synth.room.ambient_co2, "ambient CO2 ppm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd
      ->add_option("--co2-per-person", synth.room.co2_per_person,
                   "ppm emitted per person per step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd
      ->add_option("--air-exchange", synth.room.air_exchange,
                   "fraction of the CO2 gap removed per step")
      ->check(CLI::Range(1e-6, 1.0))
      ->capture_default_str();
  synth_cmd->add_option("--base-temp", synth.room.base_temp, "empty-room temperature")
      ->capture_default_str();
  synth_cmd
      ->add_option("--temp-per-person", synth.room.temp_per_person,
                   "equilibrium temperature rise per person")
      ->capture_default_str();
  synth_cmd
      ->add_option("--noise-scale", synth.noise_scale,
                   "multiplier on every per-feature noise sd (0 = noiseless)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--config", synth_config,
                      "key = value config file; flags take precedence");

  occulstm::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a labeled CSV");
  train_cmd->add_option("--data", train.data, "labeled sensor CSV")->required();
  train_cmd->add_option("--checkpoint,-o", train.checkpoint, "checkpoint output path")
      ->capture_default_str();
  train_cmd->add_option("--history", train.history,
                        "history CSV (default <checkpoint>.history.csv)");
  train_cmd->add_option("--mode", train.mode, "classifier | regressor")
      ->check(CLI::IsMember({"classifier", "regressor"}))
      ->capture_default_str();
  train_cmd->add_option("--hidden", train.hidden_dim, "hidden units")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--window", train.window_len, "window length in steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--stride", train.hyper.stride, "window stride in steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.hyper.epochs, "training epochs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--batch", train.hyper.batch, "mini-batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--lr", train.hyper.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--seed", train.hyper.seed, "root random seed")
      ->capture_default_str();
  train_cmd->add_option("--clip", train.hyper.clip_norm,
                        "max gradient norm (0 disables clipping)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--threads", train.hyper.threads,
                        "worker threads for batch gradients")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--train-days", train.n_train, "days assigned to training")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--val-days", train.n_val, "days assigned to validation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--test-days", train.n_test, "days held out for evaluate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--config", train_config,
                      "key = value config file; flags take precedence");

  occulstm::EvaluateOptions evaluate;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Evaluate a checkpoint on the test days");
  eval_cmd->add_option("--data", evaluate.data, "labeled sensor CSV")->required();
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "model checkpoint")
      ->required();
  eval_cmd->add_option("--metrics-out", evaluate.metrics_out, "metrics CSV path")
      ->capture_default_str();
  eval_cmd->add_option("--series-out", evaluate.series_out,
                       "truth/prediction series CSV path")
      ->capture_default_str();
  eval_cmd->add_option("--train-days", evaluate.n_train, "days to skip as training")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--val-days", evaluate.n_val, "days to skip as validation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--test-days", evaluate.n_test, "days to evaluate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_flag("--use-all", evaluate.use_all,
                     "evaluate every day in the file instead of splitting");
  eval_cmd->add_option("--stride", evaluate.stride, "window stride")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--window", evaluate.window_len,
                       "expected window length; must match the checkpoint");
  eval_cmd->add_option("--config", eval_config,
                      "key = value config file; flags take precedence");

  occulstm::PredictOptions predict;
  auto* predict_cmd =
      app.add_subcommand("predict", "Print per-window predictions for a CSV");
  predict_cmd->add_option("--data", predict.data, "sensor CSV (labels optional)")
      ->required();
  predict_cmd->add_option("--checkpoint", predict.checkpoint, "model checkpoint")
      ->required();
  predict_cmd->add_flag("--probs", predict.probs,
                        "append the 16 class probabilities to each line");
  predict_cmd->add_option("--stride", predict.stride, "window stride")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_option("--config", predict_config,
                      "key = value config file; flags take precedence");

  occulstm::PlotOptions plot;
  auto* plot_cmd =
      app.add_subcommand("plot", "Render a truth-vs-prediction series as SVG");
  plot_cmd->add_option("--series", plot.series, "series CSV from evaluate")
      ->required();
  plot_cmd->add_option("--out", plot.out, "SVG output path")->capture_default_str();
  plot_cmd->add_option("--config", plot_config,
                      "key = value config file; flags take precedence");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed() && !synth_config.empty())
      apply_config_file(synth_cmd, synth_config);
    if (train_cmd->parsed() && !train_config.empty())
      apply_config_file(train_cmd, train_config);
    if (eval_cmd->parsed() && !eval_config.empty())
      apply_config_file(eval_cmd, eval_config);
    if (predict_cmd->parsed() && !predict_config.empty())
      apply_config_file(predict_cmd, predict_config);
    if (plot_cmd->parsed() && !plot_config.empty())
      apply_config_file(plot_cmd, plot_config);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return occulstm::kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return occulstm::kExitUsage;
  }

  if (synth_cmd->parsed()) return occulstm::cmd_synth(synth);
  if (train_cmd->parsed()) return occulstm::cmd_train(train);
  if (eval_cmd->parsed()) return occulstm::cmd_evaluate(evaluate);
  if (predict_cmd->parsed()) return occulstm::cmd_predict(predict);
  if (plot_cmd->parsed()) return occulstm::cmd_plot(plot);
  return occulstm::kExitUsage;
}
