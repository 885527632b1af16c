// Acceptance suite: each criterion prints one [PASS]/[FAIL] line; the binary
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "occulstm/cli.hpp"
#include "occulstm/encoding.hpp"
#include "occulstm/eval.hpp"
#include "occulstm/model.hpp"
#include "occulstm/plot.hpp"
#include "occulstm/rng.hpp"
#include "occulstm/synth.hpp"
#include "occulstm/train.hpp"

namespace fs = std::filesystem;
using namespace occulstm;

namespace {

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// --- criterion 1: gradient fidelity --------------------------------------

Check gradient_fidelity() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Mode mode : {Mode::classifier, Mode::regressor}) {
      ModelConfig config;
      config.hidden_dim = 4 + static_cast<int>(seed % 5);  // 4..8
      config.window_len = 3 + static_cast<int>(seed % 2);  // 3..4
      config.mode = mode;
      double err = gradient_check(config, seed);
      c.expect(err < 1e-5, "seed " + std::to_string(seed) + " " + to_string(mode) +
                               " max rel err " + std::to_string(err));
    }
  }
  ModelConfig config;
  config.hidden_dim = 6;
  config.window_len = 4;
  for (Mode mode : {Mode::classifier, Mode::regressor}) {
    config.mode = mode;
    for (int gate = 0; gate < 4; ++gate) {
      double err = gradient_check(config, 3, [gate](Gradients& g) {
        Matrix* w[] = {&g.lstm.W_f, &g.lstm.W_i, &g.lstm.W_o, &g.lstm.W_c};
        Matrix* u[] = {&g.lstm.U_f, &g.lstm.U_i, &g.lstm.U_o, &g.lstm.U_c};
        Vec* b[] = {&g.lstm.b_f, &g.lstm.b_i, &g.lstm.b_o, &g.lstm.b_c};
        for (double& v : w[gate]->a) v = -v;
        for (double& v : u[gate]->a) v = -v;
        for (double& v : *b[gate]) v = -v;
      });
      c.expect(err > 1e-2, "negated gate " + std::to_string(gate) +
                               " slipped through with err " + std::to_string(err));
    }
  }
  double t = elapsed_s(start);
  c.expect(t < 30.0, "took " + std::to_string(t) + " s");
  return c;
}

// --- criterion 2: cell hand oracles ---------------------------------------

Check cell_hand_oracles() {
  Check c;
  auto zero_params = [](std::size_t hidden, std::size_t input) {
    ModelConfig config;
    config.hidden_dim = static_cast<int>(hidden);
    config.input_dim = static_cast<int>(input);
    auto [p, h] = init_params(config, 0);
    for (auto& arr : collect_arrays(p, h))
      for (std::size_t k = 0; k < arr.size(); ++k) arr.data[k] = 0.0;
    return p;
  };

  {
    auto p = zero_params(1, 1);
    p.b_f[0] = p.b_i[0] = p.b_o[0] = 100.0;
    auto [state, gates] = lstm_step(p, Vec{0.3}, LstmState{Vec{0.0}, Vec{0.7}});
    c.expect(std::abs(state.c[0] - 0.7) < 1e-12,
             "saturated carry c = " + std::to_string(state.c[0]));
    c.expect(std::abs(state.h[0] - std::tanh(0.7)) < 1e-12,
             "saturated carry h = " + std::to_string(state.h[0]));
  }
  {
    auto p = zero_params(1, 1);
    p.W_c(0, 0) = 1.0;
    auto [state, gates] = lstm_step(p, Vec{0.5}, LstmState{Vec{0.0}, Vec{0.0}});
    const double expected_c = 0.5 * std::tanh(0.5);
    const double expected_h = 0.5 * std::tanh(expected_c);
    c.expect(std::abs(state.c[0] - expected_c) < 1e-12,
             "candidate path c = " + std::to_string(state.c[0]));
    c.expect(std::abs(state.h[0] - expected_h) < 1e-12,
             "candidate path h = " + std::to_string(state.h[0]));
  }
  return c;
}

// --- criterion 3: softmax/encoding invariants ------------------------------

Check softmax_encoding_invariants() {
  Check c;
  Rng rng(101);
  for (int iter = 0; iter < 500; ++iter) {
    Vec logits(16);
    for (double& v : logits) v = uniform_range(rng, -40.0, 40.0);
    auto probs = softmax(logits);
    double sum = 0.0;
    for (double v : probs) sum += v;
    c.expect(std::abs(sum - 1.0) <= 1e-12, "softmax sum " + std::to_string(sum));

    Vec shifted = logits;
    const double delta = uniform_range(rng, -25.0, 25.0);
    for (double& v : shifted) v += delta;
    auto probs2 = softmax(shifted);
    for (std::size_t k = 0; k < 16; ++k)
      c.expect(std::abs(probs[k] - probs2[k]) <= 1e-12, "softmax shift variance");
  }

  for (int k = 0; k < kNumClasses; ++k)
    c.expect(decode_argmax(one_hot_encode(k)) == k,
             "decode(encode(" + std::to_string(k) + "))");

  const Vec reference{3.1594791e-02, 1.1173296e-03, 1.9875835e-01, 1.2148099e-01,
                      1.7412059e-01, 9.9778280e-04, 7.6386752e-04, 3.7641544e-02,
                      1.0577185e-03, 4.6020711e-04, 8.2410325e-04, 7.5649790e-04,
                      4.2702064e-01, 2.0497683e-03, 9.2915818e-04, 4.2664449e-04};
  c.expect(decode_argmax(reference) == 12, "reference distribution decode");
  return c;
}

// --- criterion 4: metric oracle -------------------------------------------

Check metric_oracle() {
  Check c;
  Rng rng(103);
  for (int iter = 0; iter < 1000; ++iter) {
    std::size_t n = 1 + uniform_index(rng, 64);
    std::vector<int> preds(n), truths(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = static_cast<int>(uniform_index(rng, 16));
      truths[i] = static_cast<int>(uniform_index(rng, 16));
    }
    auto report = metrics_from_counts(confusion(preds, truths));

    long tp_sum = 0, fp_sum = 0, fn_sum = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      long tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (preds[i] == k && truths[i] == k) ++tp;
        if (preds[i] == k && truths[i] != k) ++fp;
        if (preds[i] != k && truths[i] == k) ++fn;
      }
      tp_sum += tp;
      fp_sum += fp;
      fn_sum += fn;
      double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
      double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
      double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      const auto& pc = report.per_class[static_cast<std::size_t>(k)];
      c.expect(pc.precision == p && pc.recall == r && pc.f1 == f,
               "per-class metrics differ from brute force");
    }
    double mp = tp_sum + fp_sum > 0 ? double(tp_sum) / double(tp_sum + fp_sum) : 0.0;
    double mr = tp_sum + fn_sum > 0 ? double(tp_sum) / double(tp_sum + fn_sum) : 0.0;
    double mf = mp + mr > 0 ? 2 * mp * mr / (mp + mr) : 0.0;
    c.expect(report.micro.precision == mp && report.micro.recall == mr &&
                 report.micro.f1 == mf,
             "micro metrics differ from brute force");
  }
  c.expect(std::abs(f1_score(0.8, 0.8) - 0.8) <= 1e-15, "f1(0.8, 0.8)");
  c.expect(std::abs(f1_score(0.5, 1.0) - 2.0 / 3.0) <= 1e-15, "f1(0.5, 1.0)");
  return c;
}

// --- criterion 5: overfit smoke test ---------------------------------------

Check overfit_smoke() {
  Check c;
  auto start = std::chrono::steady_clock::now();

  OccupancySchedule schedule;
  schedule.steps_per_day = 72;
  schedule.days = {{{12, 36, 3}, {48, 72, 9}}, {{12, 36, 6}, {48, 72, 12}}};
  RoomParams room;
  room.sensor_noise_sd = {0.0, 0.0, 0.0, 0.0, 0.0};
  auto readings = gen_readings(schedule, room, 7);
  auto days = group_by_day(readings);
  DatasetSplit split;
  split.train = days;
  split.val = days;

  ModelConfig config;
  config.hidden_dim = 16;
  config.window_len = 12;
  Hyper hyper;
  hyper.epochs = 500;
  hyper.stride = 4;
  hyper.seed = 7;
  hyper.learning_rate = 1e-2;
  auto [model, history] = fit(config, split, hyper);

  auto windows = make_windows(split.train, model.norm, config.window_len, hyper.stride);
  c.expect(windows.size() == 32,
           "expected 32 windows, got " + std::to_string(windows.size()));
  auto ev = evaluate_model(model, windows);
  c.expect(ev.report.micro.f1 >= 0.95,
           "training accuracy " + std::to_string(ev.report.micro.f1));

  double t = elapsed_s(start);
  c.expect(t < 60.0, "took " + std::to_string(t) + " s");
  return c;
}

// --- criterion 6: one-hot vs regression ordering ---------------------------

Check ordering_analog() {
  Check c;
  for (std::uint64_t seed : {2ull, 3ull, 4ull}) {
    auto start = std::chrono::steady_clock::now();

    OccupancySchedule schedule = gen_schedule(11, derive_seed(seed, "synth.schedule"));
    auto readings = gen_readings(schedule, RoomParams{},
                                 derive_seed(seed, "synth.readings"));
    auto split = split_by_days(readings, 7, 2, 2);

    double f1[2] = {0.0, 0.0};
    for (Mode mode : {Mode::classifier, Mode::regressor}) {
      ModelConfig config;
      config.mode = mode;
      Hyper hyper;
      hyper.seed = seed;
      auto [model, history] = fit(config, split, hyper);
      auto windows =
          make_windows(split.test, model.norm, config.window_len, hyper.stride);
      auto ev = evaluate_model(model, windows);
      f1[mode == Mode::classifier ? 0 : 1] = ev.report.micro.f1;
    }

    char line[160];
    std::snprintf(line, sizeof(line),
                  "  seed %llu: one-hot %.4f vs regression %.4f",
                  static_cast<unsigned long long>(seed), f1[0], f1[1]);
    std::puts(line);
    c.expect(f1[0] >= 0.80, "seed " + std::to_string(seed) + " classifier f1 " +
                                std::to_string(f1[0]) + " < 0.80");
    c.expect(f1[0] >= f1[1], "seed " + std::to_string(seed) + " classifier " +
                                 std::to_string(f1[0]) + " < regressor " +
                                 std::to_string(f1[1]));
    double t = elapsed_s(start);
    c.expect(t < 300.0, "pipeline took " + std::to_string(t) + " s");
  }
  return c;
}

// --- criterion 7: byte-identical reruns ------------------------------------

Check rerun_determinism() {
  Check c;
  const std::string cli = OCCULSTM_CLI;
  fs::path base = fs::temp_directory_path() / "occulstm_acceptance_det";
  fs::remove_all(base);

  auto run_pipeline = [&](const std::string& tag) -> std::vector<std::string> {
    fs::path dir = base / tag;
    fs::create_directories(dir);
    auto file = [&dir](const char* name) { return (dir / name).string(); };
    std::vector<std::string> cmds = {
        " synth --days 5 --seed 12 --out " + file("data.csv"),
        " train --data " + file("data.csv") + " --checkpoint " + file("model.ckpt") +
            " --epochs 6 --hidden 24 --window 12 --stride 2 --seed 12"
            " --train-days 3 --val-days 1 --test-days 1",
        " evaluate --data " + file("data.csv") + " --checkpoint " +
            file("model.ckpt") +
            " --train-days 3 --val-days 1 --test-days 1 --stride 2"
            " --metrics-out " + file("metrics.csv") + " --series-out " +
            file("series.csv"),
        " plot --series " + file("series.csv") + " --out " + file("plot.svg"),
    };
    for (const auto& cmd : cmds) {
      int status = std::system((cli + cmd + " > /dev/null 2>&1").c_str());
      if (WEXITSTATUS(status) != 0) {
        c.expect(false, "pipeline command failed:" + cmd);
        return {};
      }
    }
    return {slurp(file("data.csv")),    slurp(file("model.ckpt")),
            slurp(file("model.ckpt") + ".history.csv"), slurp(file("metrics.csv")),
            slurp(file("series.csv")),  slurp(file("plot.svg"))};
  };

  auto a = run_pipeline("a");
  auto b = run_pipeline("b");
  const char* names[] = {"data",    "checkpoint", "history",
                         "metrics", "series",     "svg"};
  c.expect(!a.empty() && a.size() == b.size(), "pipeline outputs missing");
  if (!a.empty() && a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.expect(!a[i].empty(), std::string(names[i]) + " output is empty");
      c.expect(a[i] == b[i], std::string(names[i]) + " differs between reruns");
    }
  }
  fs::remove_all(base);
  return c;
}

// --- criterion 8: synthetic equilibrium -------------------------------------

Check synth_equilibrium() {
  Check c;
  OccupancySchedule schedule;
  schedule.steps_per_day = 280;
  schedule.days = {{{0, 280, 10}}};
  RoomParams room;
  room.sensor_noise_sd = {0.0, 0.0, 0.0, 0.0, 0.0};
  room.co2_per_person = 2.0;
  room.air_exchange = 0.05;
  auto readings = gen_readings(schedule, room, 1);

  const double equilibrium = room.ambient_co2 + 2.0 * 10 / 0.05;
  const int settle = static_cast<int>(10.0 / 0.05);  // 10/k steps
  for (std::size_t i = static_cast<std::size_t>(settle); i < readings.size(); ++i)
    c.expect(std::abs(readings[i].co2 - equilibrium) < 0.1,
             "step " + std::to_string(i) + " co2 " + std::to_string(readings[i].co2));
  return c;
}

// --- criterion 9: format round trips ----------------------------------------

Check format_round_trips() {
  Check c;
  Rng rng(107);

  for (int iter = 0; iter < 30; ++iter) {
    std::vector<SensorReading> readings;
    std::int64_t ts = static_cast<std::int64_t>(uniform_index(rng, 2000000000));
    const std::size_t rows = 1 + uniform_index(rng, 200);
    for (std::size_t i = 0; i < rows; ++i) {
      ts += 1 + static_cast<std::int64_t>(uniform_index(rng, 3600));
      SensorReading r;
      r.timestamp = ts;
      r.temperature = uniform_range(rng, -40.0, 50.0);
      r.humidity = uniform_range(rng, 0.0, 100.0);
      r.co2 = uniform_range(rng, 1e-9, 10000.0);
      r.noise = uniform_range(rng, -10.0, 130.0);
      r.pressure = uniform_range(rng, 1e-9, 1200.0);
      if (uniform_index(rng, 4))
        r.people = static_cast<int>(uniform_index(rng, 60));
      readings.push_back(r);
    }
    auto back = parse_sensor_csv(serialize_sensor_csv(readings));
    c.expect(back.size() == readings.size(), "row count changed in round trip");
    for (std::size_t i = 0; i < readings.size(); ++i)
      c.expect(back[i] == readings[i], "row " + std::to_string(i) + " changed");
  }

  for (int iter = 0; iter < 10; ++iter) {
    ModelConfig config;
    config.hidden_dim = 1 + static_cast<int>(uniform_index(rng, 20));
    config.window_len = 1 + static_cast<int>(uniform_index(rng, 24));
    config.mode = uniform_index(rng, 2) ? Mode::classifier : Mode::regressor;
    Model m;
    m.config = config;
    auto [p, h] = init_params(config, rng());
    m.lstm = std::move(p);
    m.head = std::move(h);
    for (auto& arr : collect_arrays(m.lstm, m.head))
      for (std::size_t k = 0; k < arr.size(); ++k)
        arr.data[k] =
            uniform_range(rng, -1.0, 1.0) * std::exp(uniform_range(rng, -30.0, 30.0));
    for (int k = 0; k < kNumFeatures; ++k) {
      m.norm.mean[static_cast<std::size_t>(k)] = uniform_range(rng, -1e6, 1e6);
      m.norm.std[static_cast<std::size_t>(k)] = uniform_range(rng, 1e-12, 1e6);
    }
    auto text = checkpoint_to_string(m);
    Model back = checkpoint_from_string(text);
    bool same = back.norm == m.norm && back.config.mode == m.config.mode &&
                back.config.hidden_dim == m.config.hidden_dim &&
                back.config.window_len == m.config.window_len;
    auto av = collect_arrays(m.lstm, m.head);
    auto bv = collect_arrays(back.lstm, back.head);
    for (std::size_t a = 0; a < av.size() && same; ++a)
      for (std::size_t k = 0; k < av[a].size(); ++k)
        if (av[a].data[k] != bv[a].data[k]) same = false;
    c.expect(same, "checkpoint round trip not bit-exact");
    c.expect(checkpoint_to_string(back) == text, "checkpoint text not stable");
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"gradient fidelity (both losses, 5 seeds, mutation caught)", gradient_fidelity},
      {"cell-update hand oracles to 1e-12", cell_hand_oracles},
      {"softmax and one-hot encoding invariants", softmax_encoding_invariants},
      {"metrics match a brute-force oracle", metric_oracle},
      {"overfit smoke test (32 windows, hidden 16)", overfit_smoke},
      {"one-hot classifier beats the regression baseline (3 seeds)", ordering_analog},
      {"rerun determinism: byte-identical artifacts", rerun_determinism},
      {"synthetic co2 equilibrium at ambient + g*n/k", synth_equilibrium},
      {"CSV and checkpoint round trips are bit-exact", format_round_trips},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check result;
    try {
      result = criteria[i].fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %zu: %s%s%s\n", result.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, result.ok ? "" : " -- ",
                result.ok ? "" : result.detail.c_str());
    std::fflush(stdout);
    failures += result.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
