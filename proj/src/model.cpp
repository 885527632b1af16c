#include "occulstm/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "occulstm/format.hpp"
#include "occulstm/rng.hpp"

namespace occulstm {

std::string to_string(Mode mode) {
  return mode == Mode::classifier ? "classifier" : "regressor";
}

Mode mode_from_string(const std::string& s) {
  if (s == "classifier") return Mode::classifier;
  if (s == "regressor") return Mode::regressor;
  throw Error("unknown mode '" + s + "'");
}

double sigmoid(double x) {
  // Branch on sign so the exponential never overflows.
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double tanh_act(double x) { return std::tanh(x); }

Vec softmax(const Vec& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - mx);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

void check_step_dims(const LstmParams& params, const Vec& x, const LstmState& prev) {
  const std::size_t hidden = params.b_f.size();
  if (params.W_f.cols != x.size() || params.U_f.cols != prev.h.size() ||
      prev.h.size() != hidden || prev.c.size() != hidden)
    throw DimensionMismatch("lstm_step: input/state sizes do not match parameters");
}

// a = W x + U h_prev + b, then the gate nonlinearity
Vec gate_preact(const Matrix& W, const Matrix& U, const Vec& b, const Vec& x,
                const Vec& h_prev) {
  Vec a = b;
  for (std::size_t i = 0; i < W.rows; ++i) {
    const double* wr = W.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < W.cols; ++j) s += wr[j] * x[j];
    const double* ur = U.row(i);
    for (std::size_t j = 0; j < U.cols; ++j) s += ur[j] * h_prev[j];
    a[i] += s;
  }
  return a;
}

}  // namespace

StepCache lstm_step_cached(const LstmParams& params, const Vec& x,
                           const LstmState& prev) {
  check_step_dims(params, x, prev);
  const std::size_t hidden = params.b_f.size();

  StepCache s;
  s.h_prev = prev.h;
  s.c_prev = prev.c;

  Vec af = gate_preact(params.W_f, params.U_f, params.b_f, x, prev.h);
  Vec ai = gate_preact(params.W_i, params.U_i, params.b_i, x, prev.h);
  Vec ao = gate_preact(params.W_o, params.U_o, params.b_o, x, prev.h);
  Vec ac = gate_preact(params.W_c, params.U_c, params.b_c, x, prev.h);

  s.gates.f.resize(hidden);
  s.gates.i.resize(hidden);
  s.gates.o.resize(hidden);
  s.gates.c_tilde.resize(hidden);
  s.c.resize(hidden);
  s.tanh_c.resize(hidden);
  s.h.resize(hidden);

  for (std::size_t j = 0; j < hidden; ++j) {
    s.gates.f[j] = sigmoid(af[j]);
    s.gates.i[j] = sigmoid(ai[j]);
    s.gates.o[j] = sigmoid(ao[j]);
    s.gates.c_tilde[j] = tanh_act(ac[j]);
    s.c[j] = s.gates.f[j] * prev.c[j] + s.gates.i[j] * s.gates.c_tilde[j];
    s.tanh_c[j] = tanh_act(s.c[j]);
    s.h[j] = s.gates.o[j] * s.tanh_c[j];
  }
  return s;
}

std::pair<LstmState, GateActivations> lstm_step(const LstmParams& params,
                                                const Vec& x,
                                                const LstmState& prev) {
  StepCache s = lstm_step_cached(params, x, prev);
  return {LstmState{std::move(s.h), std::move(s.c)}, std::move(s.gates)};
}

ForwardPass forward_sequence(const LstmParams& params, const HeadParams& head,
                             const Matrix& window, Mode mode) {
  if (window.cols != params.W_f.cols)
    throw DimensionMismatch("window feature count does not match parameters");
  if (head.W_out.cols != params.b_f.size())
    throw DimensionMismatch("head width does not match hidden size");

  const std::size_t hidden = params.b_f.size();
  ForwardPass pass;
  pass.steps.reserve(window.rows);

  LstmState state{Vec(hidden, 0.0), Vec(hidden, 0.0)};
  Vec x(window.cols);
  for (std::size_t t = 0; t < window.rows; ++t) {
    for (std::size_t k = 0; k < window.cols; ++k) x[k] = window(t, k);
    StepCache s = lstm_step_cached(params, x, state);
    state.h = s.h;
    state.c = s.c;
    pass.steps.push_back(std::move(s));
  }

  pass.logits = matvec(head.W_out, state.h);
  for (std::size_t k = 0; k < pass.logits.size(); ++k)
    pass.logits[k] += head.b_out[k];
  if (mode == Mode::classifier) pass.probs = softmax(pass.logits);
  return pass;
}

std::pair<LstmParams, HeadParams> init_params(const ModelConfig& config,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t hidden = static_cast<std::size_t>(config.hidden_dim);
  const std::size_t input = static_cast<std::size_t>(config.input_dim);
  const std::size_t out = static_cast<std::size_t>(config.output_dim());

  auto fill = [&rng](Matrix& m, std::size_t fan_in, std::size_t fan_out) {
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : m.a) v = uniform_range(rng, -s, s);
  };

  LstmParams p;
  p.W_f = Matrix(hidden, input);
  p.U_f = Matrix(hidden, hidden);
  p.W_i = Matrix(hidden, input);
  p.U_i = Matrix(hidden, hidden);
  p.W_o = Matrix(hidden, input);
  p.U_o = Matrix(hidden, hidden);
  p.W_c = Matrix(hidden, input);
  p.U_c = Matrix(hidden, hidden);
  fill(p.W_f, input, hidden);
  fill(p.U_f, hidden, hidden);
  fill(p.W_i, input, hidden);
  fill(p.U_i, hidden, hidden);
  fill(p.W_o, input, hidden);
  fill(p.U_o, hidden, hidden);
  fill(p.W_c, input, hidden);
  fill(p.U_c, hidden, hidden);
  p.b_f = Vec(hidden, 1.0);  // forget-gate bias starts open
  p.b_i = Vec(hidden, 0.0);
  p.b_o = Vec(hidden, 0.0);
  p.b_c = Vec(hidden, 0.0);

  HeadParams h;
  h.W_out = Matrix(out, hidden);
  fill(h.W_out, hidden, out);
  h.b_out = Vec(out, 0.0);
  return {std::move(p), std::move(h)};
}

std::vector<ArrayView> collect_arrays(LstmParams& p, HeadParams& h) {
  auto m = [](const char* name, Matrix& x) {
    return ArrayView{name, x.a.data(), x.rows, x.cols};
  };
  auto v = [](const char* name, Vec& x) {
    return ArrayView{name, x.data(), x.size(), 1};
  };
  return {m("W_f", p.W_f), m("U_f", p.U_f), v("b_f", p.b_f),
          m("W_i", p.W_i), m("U_i", p.U_i), v("b_i", p.b_i),
          m("W_o", p.W_o), m("U_o", p.U_o), v("b_o", p.b_o),
          m("W_c", p.W_c), m("U_c", p.U_c), v("b_c", p.b_c),
          m("W_out", h.W_out), v("b_out", h.b_out)};
}

std::vector<ConstArrayView> collect_arrays(const LstmParams& p,
                                           const HeadParams& h) {
  auto m = [](const char* name, const Matrix& x) {
    return ConstArrayView{name, x.a.data(), x.rows, x.cols};
  };
  auto v = [](const char* name, const Vec& x) {
    return ConstArrayView{name, x.data(), x.size(), 1};
  };
  return {m("W_f", p.W_f), m("U_f", p.U_f), v("b_f", p.b_f),
          m("W_i", p.W_i), m("U_i", p.U_i), v("b_i", p.b_i),
          m("W_o", p.W_o), m("U_o", p.U_o), v("b_o", p.b_o),
          m("W_c", p.W_c), m("U_c", p.U_c), v("b_c", p.b_c),
          m("W_out", h.W_out), v("b_out", h.b_out)};
}

namespace {

constexpr const char* kMagic = "OCCULSTM v1";

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  std::string line() {
    std::size_t eol = text_.find('\n', pos_);
    std::string_view out = (eol == std::string_view::npos)
                               ? text_.substr(pos_)
                               : text_.substr(pos_, eol - pos_);
    pos_ = (eol == std::string_view::npos) ? text_.size() : eol + 1;
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    return std::string(out);
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) throw CheckpointError("unexpected end of checkpoint");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    std::string t = token();
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw CheckpointError("bad number '" + t + "'");
    return v;
  }

  long integer() {
    std::string t = token();
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
      throw CheckpointError("bad integer '" + t + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_to_string(const Model& model) {
  std::string out;
  out += kMagic;
  out += '\n';
  out += "mode " + to_string(model.config.mode) + '\n';
  out += "input_dim " + std::to_string(model.config.input_dim) + '\n';
  out += "hidden_dim " + std::to_string(model.config.hidden_dim) + '\n';
  out += "num_classes " + std::to_string(model.config.num_classes) + '\n';
  out += "window_len " + std::to_string(model.config.window_len) + '\n';
  out += "norm_mean";
  for (double v : model.norm.mean) out += ' ' + format_double17(v);
  out += "\nnorm_std";
  for (double v : model.norm.std) out += ' ' + format_double17(v);
  out += '\n';

  for (const auto& arr : collect_arrays(model.lstm, model.head)) {
    out += "array ";
    out += arr.name;
    out += ' ' + std::to_string(arr.rows) + ' ' + std::to_string(arr.cols) + '\n';
    for (std::size_t i = 0; i < arr.rows; ++i) {
      for (std::size_t j = 0; j < arr.cols; ++j) {
        if (j) out += ' ';
        out += format_double17(arr.data[i * arr.cols + j]);
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

Model checkpoint_from_string(std::string_view text) {
  TokenReader r(text);
  if (r.line() != kMagic) throw CheckpointError("missing magic line");

  Model model;
  auto expect_key = [&r](const char* key) {
    std::string t = r.token();
    if (t != key)
      throw CheckpointError("expected '" + std::string(key) + "', got '" + t + "'");
  };

  expect_key("mode");
  model.config.mode = mode_from_string(r.token());
  expect_key("input_dim");
  model.config.input_dim = static_cast<int>(r.integer());
  expect_key("hidden_dim");
  model.config.hidden_dim = static_cast<int>(r.integer());
  expect_key("num_classes");
  model.config.num_classes = static_cast<int>(r.integer());
  expect_key("window_len");
  model.config.window_len = static_cast<int>(r.integer());
  if (model.config.input_dim < 1 || model.config.hidden_dim < 1 ||
      model.config.num_classes < 1 || model.config.window_len < 1)
    throw CheckpointError("non-positive dimension in config");

  expect_key("norm_mean");
  for (double& v : model.norm.mean) v = r.number();
  expect_key("norm_std");
  for (double& v : model.norm.std) v = r.number();

  // Allocate the right shapes, then fill each named array in file order.
  auto shaped = init_params(model.config, 0);
  model.lstm = std::move(shaped.first);
  model.head = std::move(shaped.second);
  for (auto& arr : collect_arrays(model.lstm, model.head)) {
    expect_key("array");
    std::string name = r.token();
    if (name != arr.name)
      throw CheckpointError("expected array '" + std::string(arr.name) +
                            "', got '" + name + "'");
    std::size_t rows = static_cast<std::size_t>(r.integer());
    std::size_t cols = static_cast<std::size_t>(r.integer());
    if (rows != arr.rows || cols != arr.cols)
      throw CheckpointError("array '" + name + "' has shape " +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            ", expected " + std::to_string(arr.rows) + "x" +
                            std::to_string(arr.cols));
    for (std::size_t i = 0; i < arr.size(); ++i) arr.data[i] = r.number();
  }
  expect_key("end");
  return model;
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  std::string text = checkpoint_to_string(model);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("checkpoint write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace occulstm
