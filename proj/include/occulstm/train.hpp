#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "occulstm/dataio.hpp"
#include "occulstm/model.hpp"

namespace occulstm {

// Same shapes as the parameter set.
struct Gradients {
  LstmParams lstm;
  HeadParams head;
};

Gradients zero_gradients(const ModelConfig& config);

struct AdamState {
  Gradients m, v;
  long t = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const ModelConfig& config, double alpha);

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_f1 = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

std::string history_to_csv(const TrainHistory& history);

struct Hyper {
  int epochs = 30;
  int batch = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int stride = 1;
  double clip_norm = 0.0;  // max global gradient norm; 0 disables clipping
  int threads = 1;
};

struct EmptyDataset : Error {
  using Error::Error;
};

struct DivergedLoss : Error {
  DivergedLoss(int epoch_index)
      : Error("non-finite loss at epoch " + std::to_string(epoch_index)),
        epoch(epoch_index) {}
  int epoch;
};

struct CacheMismatch : Error {
  using Error::Error;
};

// Binary cross-entropy averaged over the 16 one-hot positions; probabilities
// are clipped to [1e-12, 1 - 1e-12] before the logs.
double bce_loss(const Vec& probs, const Vec& target_one_hot);

double mse_loss(double pred, double target);

// target is the 16-element one-hot vector in classifier mode, or a
// single-element {count} vector in regressor mode.
double compute_loss(const ForwardPass& pass, const Vec& target, Mode mode);

// Exact analytic gradients of the loss w.r.t. every parameter entry,
// backpropagated through the unrolled cell.
Gradients backward(const LstmParams& params, const HeadParams& head,
                   const Matrix& window, const Vec& target,
                   const ForwardPass& pass, Mode mode);

void adam_update(LstmParams& params, HeadParams& head, const Gradients& grads,
                 AdamState& state);

// Central finite differences (eps = 1e-6) over every parameter entry against
// the analytic gradients; returns the max relative error
// |a - n| / max(|a|, |n|, 1e-8). The mutate hook lets tests corrupt the
// analytic gradients to prove the check catches a broken backward pass.
double gradient_check(const ModelConfig& config, std::uint64_t seed);
double gradient_check(const ModelConfig& config, std::uint64_t seed,
                      const std::function<void(Gradients&)>& mutate);

// Mini-batch training with deterministic shuffling and batch-mean gradients.
// Returns the parameters from the epoch with the best validation micro-F1
// (classifier) or the lowest validation loss (regressor).
std::pair<Model, TrainHistory> fit(const ModelConfig& config,
                                   const DatasetSplit& split, const Hyper& hyper);

}  // namespace occulstm
