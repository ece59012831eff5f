#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uavnet {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// One fully-connected layer y = act(W x + b). When `unit_activations` is
/// non-empty it overrides `activation` per output unit (used by heads that
/// mix bounded ranges).
struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::Identity;
  std::vector<Activation> unit_activations;

  int inputs() const { return static_cast<int>(weight.cols()); }
  int outputs() const { return static_cast<int>(weight.rows()); }
  Activation unit(int i) const { return unit_activations.empty() ? activation : unit_activations[i]; }
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  void set_zero();
  Gradients& operator+=(const Gradients& other);
  bool all_finite() const;
};

/// Intermediate values kept by a forward pass for backpropagation. Columns
/// are batch samples.
struct Tape {
  std::vector<Eigen::MatrixXd> inputs;  // input of each layer
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  Eigen::MatrixXd output;
};

class Mlp {
 public:
  Mlp() = default;
  /// sizes = {in, h1, ..., out}; activations has one entry per layer.
  Mlp(std::vector<int> sizes, std::vector<Activation> activations);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) everywhere, then the last
  /// layer uniform(-final_scale, final_scale) when final_scale > 0.
  void initialize(std::mt19937_64& rng, double final_scale = 0.0);

  int inputs() const { return layers_.front().inputs(); }
  int outputs() const { return layers_.back().outputs(); }
  std::vector<int> sizes() const;
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Reverse pass for upstream dL/dy (outputs x batch). Parameter gradients
  /// are summed over the batch. Returns dL/dx.
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& upstream, Gradients& grads) const;

  Gradients zero_gradients() const;

  int parameter_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);

  bool same_shape(const Mlp& other) const;
  bool operator==(const Mlp& other) const;

  /// File = one JSON header line, then parameter_count() little-endian
  /// float64 values (per layer: weights row-major, then biases).
  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

 private:
  std::vector<Layer> layers_;
};

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(const Mlp& net, double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  /// Descends along grads; throws std::runtime_error on non-finite input.
  void step(Mlp& net, const Gradients& grads);
  double learning_rate() const { return lr_; }
  long long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  Gradients m_, v_;
};

/// target <- tau * online + (1 - tau) * target, element-wise.
void soft_update(Mlp& target, const Mlp& online, double tau);

struct GradCheckResult {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped = 0;  // perturbations that crossed a ReLU kink
};

/// Compares backward() against central differences of L = sum(w .* f(x))
/// with random w, for every parameter and input entry.
GradCheckResult gradient_check(const Mlp& net, const Eigen::MatrixXd& x, std::mt19937_64& rng, double step = 1e-5);

}  // namespace uavnet
