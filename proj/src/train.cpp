#include "occulstm/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "occulstm/eval.hpp"
#include "occulstm/format.hpp"
#include "occulstm/rng.hpp"

namespace occulstm {

namespace {
constexpr double kProbClip = 1e-12;
}

Gradients zero_gradients(const ModelConfig& config) {
  const std::size_t hidden = static_cast<std::size_t>(config.hidden_dim);
  const std::size_t input = static_cast<std::size_t>(config.input_dim);
  const std::size_t out = static_cast<std::size_t>(config.output_dim());

  Gradients g;
  g.lstm.W_f = Matrix(hidden, input);
  g.lstm.U_f = Matrix(hidden, hidden);
  g.lstm.W_i = Matrix(hidden, input);
  g.lstm.U_i = Matrix(hidden, hidden);
  g.lstm.W_o = Matrix(hidden, input);
  g.lstm.U_o = Matrix(hidden, hidden);
  g.lstm.W_c = Matrix(hidden, input);
  g.lstm.U_c = Matrix(hidden, hidden);
  g.lstm.b_f = Vec(hidden, 0.0);
  g.lstm.b_i = Vec(hidden, 0.0);
  g.lstm.b_o = Vec(hidden, 0.0);
  g.lstm.b_c = Vec(hidden, 0.0);
  g.head.W_out = Matrix(out, hidden);
  g.head.b_out = Vec(out, 0.0);
  return g;
}

AdamState make_adam_state(const ModelConfig& config, double alpha) {
  AdamState s;
  s.m = zero_gradients(config);
  s.v = zero_gradients(config);
  s.alpha = alpha;
  return s;
}

double bce_loss(const Vec& probs, const Vec& target_one_hot) {
  if (probs.size() != target_one_hot.size())
    throw DimensionMismatch("bce_loss: size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    double p = std::clamp(probs[k], kProbClip, 1.0 - kProbClip);
    double y = target_one_hot[k];
    sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(probs.size());
}

double mse_loss(double pred, double target) {
  double d = pred - target;
  return d * d;
}

double compute_loss(const ForwardPass& pass, const Vec& target, Mode mode) {
  if (mode == Mode::classifier) return bce_loss(pass.probs, target);
  if (target.size() != 1)
    throw DimensionMismatch("regressor target must be a single value");
  return mse_loss(pass.logits[0], target[0]);
}

Gradients backward(const LstmParams& params, const HeadParams& head,
                   const Matrix& window, const Vec& target,
                   const ForwardPass& pass, Mode mode) {
  if (pass.steps.size() != window.rows)
    throw CacheMismatch("forward cache does not cover the window");
  const std::size_t hidden = params.b_f.size();
  const std::size_t steps = pass.steps.size();

  ModelConfig cfg;
  cfg.input_dim = static_cast<int>(params.W_f.cols);
  cfg.hidden_dim = static_cast<int>(hidden);
  cfg.num_classes = static_cast<int>(head.W_out.rows);
  cfg.mode = mode;
  Gradients g = zero_gradients(cfg);

  // Loss gradient w.r.t. the head output.
  const std::size_t out_dim = head.W_out.rows;
  Vec dlogits(out_dim, 0.0);
  if (mode == Mode::classifier) {
    const double n = static_cast<double>(out_dim);
    Vec dprobs(out_dim, 0.0);
    for (std::size_t k = 0; k < out_dim; ++k) {
      double p = pass.probs[k];
      if (p < kProbClip || p > 1.0 - kProbClip) continue;  // clip is flat
      dprobs[k] = (-target[k] / p + (1.0 - target[k]) / (1.0 - p)) / n;
    }
    // Through the softmax Jacobian: dz_j = p_j (dp_j - sum_k dp_k p_k)
    double dot = 0.0;
    for (std::size_t k = 0; k < out_dim; ++k) dot += dprobs[k] * pass.probs[k];
    for (std::size_t j = 0; j < out_dim; ++j)
      dlogits[j] = pass.probs[j] * (dprobs[j] - dot);
  } else {
    dlogits[0] = 2.0 * (pass.logits[0] - target[0]);
  }

  const Vec zeros(hidden, 0.0);
  const Vec& h_final = steps > 0 ? pass.steps.back().h : zeros;
  outer_add(g.head.W_out, dlogits, h_final.data());
  for (std::size_t k = 0; k < out_dim; ++k) g.head.b_out[k] += dlogits[k];

  Vec dh(hidden, 0.0);
  tmatvec_add(head.W_out, dlogits, dh);
  Vec dc(hidden, 0.0);

  Vec da_f(hidden), da_i(hidden), da_o(hidden), da_c(hidden);
  Vec x(window.cols);
  for (std::size_t t = steps; t-- > 0;) {
    const StepCache& s = pass.steps[t];
    for (std::size_t k = 0; k < window.cols; ++k) x[k] = window(t, k);

    for (std::size_t j = 0; j < hidden; ++j) {
      const double f = s.gates.f[j];
      const double i = s.gates.i[j];
      const double o = s.gates.o[j];
      const double ct = s.gates.c_tilde[j];
      const double th = s.tanh_c[j];

      // h_t = o * tanh(c_t): dh splits into the output gate and the cell.
      da_o[j] = dh[j] * th * o * (1.0 - o);
      const double dcj = dc[j] + dh[j] * o * (1.0 - th * th);

      // c_t = f * c_{t-1} + i * c_tilde
      da_f[j] = dcj * s.c_prev[j] * f * (1.0 - f);
      da_i[j] = dcj * ct * i * (1.0 - i);
      da_c[j] = dcj * i * (1.0 - ct * ct);
      dc[j] = dcj * f;  // carried to step t-1
    }

    outer_add(g.lstm.W_f, da_f, x.data());
    outer_add(g.lstm.W_i, da_i, x.data());
    outer_add(g.lstm.W_o, da_o, x.data());
    outer_add(g.lstm.W_c, da_c, x.data());
    outer_add(g.lstm.U_f, da_f, s.h_prev.data());
    outer_add(g.lstm.U_i, da_i, s.h_prev.data());
    outer_add(g.lstm.U_o, da_o, s.h_prev.data());
    outer_add(g.lstm.U_c, da_c, s.h_prev.data());
    for (std::size_t j = 0; j < hidden; ++j) {
      g.lstm.b_f[j] += da_f[j];
      g.lstm.b_i[j] += da_i[j];
      g.lstm.b_o[j] += da_o[j];
      g.lstm.b_c[j] += da_c[j];
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    tmatvec_add(params.U_f, da_f, dh);
    tmatvec_add(params.U_i, da_i, dh);
    tmatvec_add(params.U_o, da_o, dh);
    tmatvec_add(params.U_c, da_c, dh);
  }
  return g;
}

void adam_update(LstmParams& params, HeadParams& head, const Gradients& grads,
                 AdamState& state) {
  auto p = collect_arrays(params, head);
  auto g = collect_arrays(grads.lstm, grads.head);
  auto m = collect_arrays(state.m.lstm, state.m.head);
  auto v = collect_arrays(state.v.lstm, state.v.head);

  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a].rows != g[a].rows || p[a].cols != g[a].cols)
      throw DimensionMismatch(std::string("adam_update: shape mismatch for ") +
                              p[a].name);
    double* pp = p[a].data;
    const double* gg = g[a].data;
    double* mm = m[a].data;
    double* vv = v[a].data;
    for (std::size_t k = 0; k < p[a].size(); ++k) {
      mm[k] = state.beta1 * mm[k] + (1.0 - state.beta1) * gg[k];
      vv[k] = state.beta2 * vv[k] + (1.0 - state.beta2) * gg[k] * gg[k];
      const double mhat = mm[k] / bc1;
      const double vhat = vv[k] / bc2;
      pp[k] -= state.alpha * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

namespace {

Vec target_for(int label, Mode mode) {
  if (mode == Mode::classifier) return one_hot_encode(clamp_count(label));
  return Vec{static_cast<double>(label)};
}

void accumulate(Gradients& into, const Gradients& g) {
  auto dst = collect_arrays(into.lstm, into.head);
  auto src = collect_arrays(g.lstm, g.head);
  for (std::size_t a = 0; a < dst.size(); ++a)
    for (std::size_t k = 0; k < dst[a].size(); ++k)
      dst[a].data[k] += src[a].data[k];
}

void scale(Gradients& g, double factor) {
  for (auto& arr : collect_arrays(g.lstm, g.head))
    for (std::size_t k = 0; k < arr.size(); ++k) arr.data[k] *= factor;
}

double global_norm(const Gradients& g) {
  double sq = 0.0;
  for (const auto& arr : collect_arrays(g.lstm, g.head))
    for (std::size_t k = 0; k < arr.size(); ++k)
      sq += arr.data[k] * arr.data[k];
  return std::sqrt(sq);
}

}  // namespace

double gradient_check(const ModelConfig& config, std::uint64_t seed) {
  return gradient_check(config, seed, [](Gradients&) {});
}

namespace {

// Extended-precision forward + loss used only by the finite-difference
// sweep. At eps = 1e-6 a double-precision loss difference is dominated by
// rounding noise (~1e-11 in the derivative), which is too coarse to resolve
// a 1e-5 relative error on small gradient entries. The gradient check itself
// guards this mirror against drifting from the production forward pass.
long double sigmoid_ext(long double x) {
  if (x >= 0.0L) return 1.0L / (1.0L + std::exp(-x));
  const long double e = std::exp(x);
  return e / (1.0L + e);
}

long double loss_ext(const LstmParams& params, const HeadParams& head,
                     const Matrix& window, const Vec& target, Mode mode) {
  const std::size_t hidden = params.b_f.size();
  std::vector<long double> h(hidden, 0.0L), c(hidden, 0.0L);
  std::vector<long double> hn(hidden), cn(hidden);

  for (std::size_t t = 0; t < window.rows; ++t) {
    const double* x = window.row(t);
    for (std::size_t j = 0; j < hidden; ++j) {
      long double af = params.b_f[j], ai = params.b_i[j], ao = params.b_o[j],
                  ac = params.b_c[j];
      for (std::size_t k = 0; k < window.cols; ++k) {
        af += static_cast<long double>(params.W_f(j, k)) * x[k];
        ai += static_cast<long double>(params.W_i(j, k)) * x[k];
        ao += static_cast<long double>(params.W_o(j, k)) * x[k];
        ac += static_cast<long double>(params.W_c(j, k)) * x[k];
      }
      for (std::size_t k = 0; k < hidden; ++k) {
        af += static_cast<long double>(params.U_f(j, k)) * h[k];
        ai += static_cast<long double>(params.U_i(j, k)) * h[k];
        ao += static_cast<long double>(params.U_o(j, k)) * h[k];
        ac += static_cast<long double>(params.U_c(j, k)) * h[k];
      }
      const long double f = sigmoid_ext(af);
      const long double i = sigmoid_ext(ai);
      const long double o = sigmoid_ext(ao);
      const long double ct = std::tanh(ac);
      cn[j] = f * c[j] + i * ct;
      hn[j] = o * std::tanh(cn[j]);
    }
    h = hn;
    c = cn;
  }

  const std::size_t out_dim = head.W_out.rows;
  std::vector<long double> logits(out_dim);
  for (std::size_t k = 0; k < out_dim; ++k) {
    long double z = head.b_out[k];
    for (std::size_t j = 0; j < hidden; ++j)
      z += static_cast<long double>(head.W_out(k, j)) * h[j];
    logits[k] = z;
  }

  if (mode == Mode::regressor) {
    const long double d = logits[0] - static_cast<long double>(target[0]);
    return d * d;
  }

  long double mx = logits[0];
  for (long double z : logits) mx = std::max(mx, z);
  long double sum = 0.0L;
  std::vector<long double> probs(out_dim);
  for (std::size_t k = 0; k < out_dim; ++k) {
    probs[k] = std::exp(logits[k] - mx);
    sum += probs[k];
  }
  long double loss = 0.0L;
  for (std::size_t k = 0; k < out_dim; ++k) {
    long double p = probs[k] / sum;
    p = std::min(std::max(p, static_cast<long double>(kProbClip)),
                 1.0L - static_cast<long double>(kProbClip));
    const long double y = target[k];
    loss += -(y * std::log(p) + (1.0L - y) * std::log(1.0L - p));
  }
  return loss / static_cast<long double>(out_dim);
}

}  // namespace

double gradient_check(const ModelConfig& config, std::uint64_t seed,
                      const std::function<void(Gradients&)>& mutate) {
  Rng rng(derive_seed(seed, "gradcheck"));

  auto [params, head] = init_params(config, derive_seed(seed, "gradcheck.init"));
  for (auto& arr : collect_arrays(params, head))
    for (std::size_t k = 0; k < arr.size(); ++k)
      arr.data[k] = uniform_range(rng, -0.5, 0.5);

  Matrix window(static_cast<std::size_t>(config.window_len),
                static_cast<std::size_t>(config.input_dim));
  for (double& v : window.a) v = uniform_range(rng, -1.0, 1.0);

  Vec target;
  if (config.mode == Mode::classifier) {
    target = one_hot_encode(static_cast<int>(uniform_index(rng, kNumClasses)));
  } else {
    target = Vec{uniform_range(rng, 0.0, 15.0)};
  }

  ForwardPass pass = forward_sequence(params, head, window, config.mode);
  Gradients analytic = backward(params, head, window, target, pass, config.mode);
  mutate(analytic);

  constexpr double kEps = 1e-6;
  double max_rel = 0.0;
  auto parrs = collect_arrays(params, head);
  auto garrs = collect_arrays(analytic.lstm, analytic.head);
  for (std::size_t a = 0; a < parrs.size(); ++a) {
    for (std::size_t k = 0; k < parrs[a].size(); ++k) {
      double saved = parrs[a].data[k];
      parrs[a].data[k] = saved + kEps;
      long double lp = loss_ext(params, head, window, target, config.mode);
      parrs[a].data[k] = saved - kEps;
      long double lm = loss_ext(params, head, window, target, config.mode);
      parrs[a].data[k] = saved;
      double numeric = static_cast<double>((lp - lm) / (2.0L * kEps));
      double an = garrs[a].data[k];
      double rel = std::abs(an - numeric) /
                   std::max({std::abs(an), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

namespace {

struct EvalAccum {
  double loss_sum = 0.0;
  std::vector<int> preds, truths;
};

EvalAccum evaluate_windows(const LstmParams& params, const HeadParams& head,
                           const WindowedDataset& data, Mode mode) {
  EvalAccum acc;
  acc.preds.reserve(data.size());
  acc.truths.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    ForwardPass pass = forward_sequence(params, head, data.windows[i], mode);
    Vec target = target_for(data.labels[i], mode);
    acc.loss_sum += compute_loss(pass, target, mode);
    if (mode == Mode::classifier) {
      acc.preds.push_back(decode_argmax(pass.probs));
    } else {
      acc.preds.push_back(round_to_class(pass.logits[0]));
    }
    acc.truths.push_back(clamp_count(data.labels[i]));
  }
  return acc;
}

}  // namespace

std::string history_to_csv(const TrainHistory& history) {
  std::string out = "epoch,train_loss,val_loss,val_f1\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out += std::to_string(e + 1) + ',' + format_double(history[e].train_loss) +
           ',' + format_double(history[e].val_loss) + ',' +
           format_double(history[e].val_f1) + '\n';
  }
  return out;
}

std::pair<Model, TrainHistory> fit(const ModelConfig& config,
                                   const DatasetSplit& split,
                                   const Hyper& hyper) {
  NormStats stats = compute_norm_stats(split.train);
  WindowedDataset train =
      make_windows(split.train, stats, config.window_len, hyper.stride);
  WindowedDataset val =
      make_windows(split.val, stats, config.window_len, hyper.stride);
  if (train.size() == 0) throw EmptyDataset("no training windows");
  if (val.size() == 0) throw EmptyDataset("no validation windows");
  for (int label : train.labels)
    if (label < 0) throw MissingLabel("training data has unlabeled rows");
  for (int label : val.labels)
    if (label < 0) throw MissingLabel("validation data has unlabeled rows");

  auto [params, head] = init_params(config, derive_seed(hyper.seed, "init"));
  AdamState adam = make_adam_state(config, hyper.learning_rate);

  Model best;
  best.config = config;
  best.norm = stats;
  best.lstm = params;
  best.head = head;
  double best_score = config.mode == Mode::classifier
                          ? -1.0
                          : std::numeric_limits<double>::infinity();

  std::vector<Vec> targets(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    targets[i] = target_for(train.labels[i], config.mode);

  TrainHistory history;
  history.reserve(static_cast<std::size_t>(std::max(hyper.epochs, 0)));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  const int threads = std::max(1, hyper.threads);
  std::vector<Gradients> batch_grads;
  std::vector<double> batch_losses;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hyper.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    std::iota(order.begin(), order.end(), 0);
    shuffle_in_place(order, shuffle_rng);

    double epoch_loss_sum = 0.0;
    const std::size_t batch_size = static_cast<std::size_t>(std::max(1, hyper.batch));

    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(begin + batch_size, order.size());
      const std::size_t count = end - begin;
      batch_grads.assign(count, Gradients{});
      batch_losses.assign(count, 0.0);

      auto run_window = [&](std::size_t slot) {
        const std::size_t idx = order[begin + slot];
        ForwardPass pass =
            forward_sequence(params, head, train.windows[idx], config.mode);
        batch_losses[slot] = compute_loss(pass, targets[idx], config.mode);
        batch_grads[slot] = backward(params, head, train.windows[idx],
                                     targets[idx], pass, config.mode);
      };

      if (threads <= 1 || count <= 1) {
        for (std::size_t slot = 0; slot < count; ++slot) run_window(slot);
      } else {
        // Per-window gradients land in per-slot buffers; the reduction below
        // runs in window order, so the result is identical to the serial path.
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
          for (;;) {
            std::size_t slot = next.fetch_add(1);
            if (slot >= count) break;
            run_window(slot);
          }
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, static_cast<int>(count));
        pool.reserve(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }

      Gradients total = zero_gradients(config);
      double batch_loss_sum = 0.0;
      for (std::size_t slot = 0; slot < count; ++slot) {
        accumulate(total, batch_grads[slot]);
        batch_loss_sum += batch_losses[slot];
      }
      scale(total, 1.0 / static_cast<double>(count));

      if (!std::isfinite(batch_loss_sum)) throw DivergedLoss(epoch + 1);
      epoch_loss_sum += batch_loss_sum;

      if (hyper.clip_norm > 0.0) {
        double norm = global_norm(total);
        if (norm > hyper.clip_norm) scale(total, hyper.clip_norm / norm);
      }
      adam_update(params, head, total, adam);
    }

    EvalAccum va = evaluate_windows(params, head, val, config.mode);
    double val_loss = va.loss_sum / static_cast<double>(val.size());
    if (!std::isfinite(val_loss)) throw DivergedLoss(epoch + 1);
    ConfusionCounts counts = confusion(va.preds, va.truths);
    MetricsReport report = metrics_from_counts(counts);

    EpochStats es;
    es.train_loss = epoch_loss_sum / static_cast<double>(train.size());
    es.val_loss = val_loss;
    es.val_f1 = report.micro.f1;
    history.push_back(es);

    const bool improved = config.mode == Mode::classifier
                              ? es.val_f1 > best_score
                              : es.val_loss < best_score;
    if (improved) {
      best_score = config.mode == Mode::classifier ? es.val_f1 : es.val_loss;
      best.lstm = params;
      best.head = head;
    }
  }

  return {std::move(best), std::move(history)};
}

}  // namespace occulstm
