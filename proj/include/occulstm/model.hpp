#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "occulstm/dataio.hpp"
#include "occulstm/encoding.hpp"
#include "occulstm/errors.hpp"
#include "occulstm/matrix.hpp"

namespace occulstm {

enum class Mode { classifier, regressor };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct ModelConfig {
  int input_dim = kNumFeatures;
  int hidden_dim = 64;
  int num_classes = kNumClasses;
  int window_len = 12;
  Mode mode = Mode::classifier;

  int output_dim() const { return mode == Mode::classifier ? num_classes : 1; }
};

// One weight matrix pair and bias per gate: forget, input, output, candidate.
struct LstmParams {
  Matrix W_f, U_f, W_i, U_i, W_o, U_o, W_c, U_c;  // W: hidden x input, U: hidden x hidden
  Vec b_f, b_i, b_o, b_c;                          // hidden
};

struct HeadParams {
  Matrix W_out;  // output_dim x hidden
  Vec b_out;     // output_dim
};

struct LstmState {
  Vec h, c;
};

struct GateActivations {
  Vec f, i, o;   // each entry in (0, 1)
  Vec c_tilde;   // each entry in (-1, 1)
};

struct StepCache {
  Vec h_prev, c_prev;
  GateActivations gates;
  Vec c, tanh_c, h;
};

struct ForwardPass {
  std::vector<StepCache> steps;
  Vec logits;  // affine head output; the raw prediction in regressor mode
  Vec probs;   // softmax(logits); empty in regressor mode
};

double sigmoid(double x);
double tanh_act(double x);

// exp(z - max z) / sum; order-preserving and overflow-safe
Vec softmax(const Vec& logits);

StepCache lstm_step_cached(const LstmParams& params, const Vec& x,
                           const LstmState& prev);

std::pair<LstmState, GateActivations> lstm_step(const LstmParams& params,
                                                const Vec& x,
                                                const LstmState& prev);

// Unrolls the cell over the window rows from a zero initial state, applies the
// affine head to the final hidden state, then softmax in classifier mode.
ForwardPass forward_sequence(const LstmParams& params, const HeadParams& head,
                             const Matrix& window, Mode mode);

// W and U entries uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out));
// biases zero except the forget-gate bias, which starts at 1.
std::pair<LstmParams, HeadParams> init_params(const ModelConfig& config,
                                              std::uint64_t seed);

struct Model {
  ModelConfig config;
  NormStats norm;
  LstmParams lstm;
  HeadParams head;
};

struct CheckpointError : Error {
  using Error::Error;
};

// Self-describing text container, magic line "OCCULSTM v1". Values are written
// with 17 significant digits and round-trip bit-exactly.
std::string checkpoint_to_string(const Model& model);
Model checkpoint_from_string(std::string_view text);
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

// Fixed-order access to every parameter array, used by the optimizer, the
// checkpoint writer and the gradient sweep.
struct ArrayView {
  const char* name;
  double* data;
  std::size_t rows, cols;
  std::size_t size() const { return rows * cols; }
};

struct ConstArrayView {
  const char* name;
  const double* data;
  std::size_t rows, cols;
  std::size_t size() const { return rows * cols; }
};

std::vector<ArrayView> collect_arrays(LstmParams& lstm, HeadParams& head);
std::vector<ConstArrayView> collect_arrays(const LstmParams& lstm,
                                           const HeadParams& head);

}  // namespace occulstm
