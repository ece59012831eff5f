#include "uavnet/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace uavnet {

namespace {

constexpr const char* kMagic = "uavnet-mlp";
constexpr int kFormatVersion = 1;

double apply(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    default: return z;
  }
}

// Derivative expressed through the pre-activation z.
double derivative(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    default: return 1.0;
  }
}

Eigen::MatrixXd activate(const Layer& l, const Eigen::MatrixXd& z) {
  if (l.unit_activations.empty()) {
    switch (l.activation) {
      case Activation::Identity: return z;
      case Activation::Relu: return z.cwiseMax(0.0);
      case Activation::Tanh: return z.array().tanh().matrix();
      case Activation::Sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    }
  }
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) out(i, j) = apply(l.unit(static_cast<int>(i)), z(i, j));
  return out;
}

Eigen::MatrixXd activation_grad(const Layer& l, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd d(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Activation a = l.unit(static_cast<int>(i));
    for (Eigen::Index j = 0; j < z.cols(); ++j) d(i, j) = derivative(a, z(i, j));
  }
  return d;
}

void write_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

double read_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("checkpoint truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    default: return "identity";
  }
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

void Gradients::set_zero() {
  for (auto& w : weight) w.setZero();
  for (auto& b : bias) b.setZero();
}

Gradients& Gradients::operator+=(const Gradients& o) {
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] += o.weight[i];
    bias[i] += o.bias[i];
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (const auto& w : weight)
    if (!w.allFinite()) return false;
  for (const auto& b : bias)
    if (!b.allFinite()) return false;
  return true;
}

Mlp::Mlp(std::vector<int> sizes, std::vector<Activation> activations) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp needs an input and an output size");
  if (activations.size() != sizes.size() - 1) throw std::invalid_argument("one activation per layer expected");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    Layer l;
    l.weight = Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]);
    l.bias = Eigen::VectorXd::Zero(sizes[i + 1]);
    l.activation = activations[i];
    layers_.push_back(std::move(l));
  }
}

void Mlp::initialize(std::mt19937_64& rng, double final_scale) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    auto& l = layers_[k];
    double r = 1.0 / std::sqrt(static_cast<double>(l.inputs()));
    if (k + 1 == layers_.size() && final_scale > 0.0) r = final_scale;
    std::uniform_real_distribution<double> u(-r, r);
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = u(rng);
  }
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> s{inputs()};
  for (const auto& l : layers_) s.push_back(l.outputs());
  return s;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != inputs()) throw std::invalid_argument("mlp input dimension mismatch");
  Eigen::MatrixXd a = x;
  for (const auto& l : layers_) {
    Eigen::MatrixXd z = l.weight * a;
    z.colwise() += l.bias;
    a = activate(l, z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (x.rows() != inputs()) throw std::invalid_argument("mlp input dimension mismatch");
  tape.inputs.clear();
  tape.pre.clear();
  Eigen::MatrixXd a = x;
  for (const auto& l : layers_) {
    tape.inputs.push_back(a);
    Eigen::MatrixXd z = l.weight * a;
    z.colwise() += l.bias;
    a = activate(l, z);
    tape.pre.push_back(std::move(z));
  }
  tape.output = a;
  return a;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return g;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& upstream, Gradients& grads) const {
  if (tape.pre.size() != layers_.size()) throw std::invalid_argument("tape does not match network");
  if (upstream.rows() != outputs() || upstream.cols() != tape.output.cols())
    throw std::invalid_argument("upstream gradient shape mismatch");
  if (grads.weight.size() != layers_.size()) grads = zero_gradients();
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    delta = delta.cwiseProduct(activation_grad(l, tape.pre[k]));
    grads.weight[k].noalias() += delta * tape.inputs[k].transpose();
    grads.bias[k] += delta.rowwise().sum();
    delta = l.weight.transpose() * delta;
  }
  return delta;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (const auto& l : layers_) n += static_cast<int>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) p.push_back(l.weight(i, j));
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) p.push_back(l.bias[i]);
  }
  return p;
}

void Mlp::unflatten(const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = p[k++];
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = p[k++];
  }
}

bool Mlp::same_shape(const Mlp& o) const {
  if (layers_.size() != o.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto &a = layers_[i], &b = o.layers_[i];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) return false;
    if (a.activation != b.activation || a.unit_activations != b.unit_activations) return false;
  }
  return true;
}

bool Mlp::operator==(const Mlp& o) const { return same_shape(o) && flatten() == o.flatten(); }

void Mlp::save(const std::string& path) const {
  nlohmann::json h;
  h["format"] = kMagic;
  h["version"] = kFormatVersion;
  h["byte_order"] = "little";
  h["dtype"] = "float64";
  h["sizes"] = sizes();
  nlohmann::json acts = nlohmann::json::array();
  for (const auto& l : layers_) {
    nlohmann::json a;
    a["activation"] = to_string(l.activation);
    if (!l.unit_activations.empty()) {
      std::vector<std::string> u;
      for (auto x : l.unit_activations) u.push_back(to_string(x));
      a["units"] = u;
    }
    acts.push_back(a);
  }
  h["layers"] = acts;
  h["parameter_count"] = parameter_count();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << h.dump() << '\n';
  for (double v : flatten()) write_le(f, v);
  if (!f) throw std::runtime_error("write failed: " + path);
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(f, line);
  const auto h = nlohmann::json::parse(line);
  if (h.at("format") != kMagic) throw std::runtime_error(path + " is not a network checkpoint");
  if (h.at("version").get<int>() != kFormatVersion) throw std::runtime_error("unsupported checkpoint version");
  if (h.at("byte_order") != "little" || h.at("dtype") != "float64")
    throw std::runtime_error("unsupported checkpoint encoding");
  std::vector<Activation> acts;
  for (const auto& a : h.at("layers")) acts.push_back(activation_from_string(a.at("activation")));
  Mlp net(h.at("sizes").get<std::vector<int>>(), acts);
  std::size_t k = 0;
  for (const auto& a : h.at("layers")) {
    if (a.contains("units"))
      for (const auto& u : a["units"]) net.layers_[k].unit_activations.push_back(activation_from_string(u));
    ++k;
  }
  if (h.at("parameter_count").get<int>() != net.parameter_count())
    throw std::runtime_error("checkpoint parameter count does not match its architecture");
  std::vector<double> p(net.parameter_count());
  for (auto& v : p) v = read_le(f);
  net.unflatten(p);
  return net;
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.zero_gradients()), v_(net.zero_gradients()) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Adam::step(Mlp& net, const Gradients& g) {
  if (!g.all_finite()) throw std::runtime_error("optimizer received non-finite gradients");
  if (g.weight.size() != net.layers().size()) throw std::invalid_argument("gradient shape mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto upd = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    auto& l = net.layers()[k];
    upd(l.weight, g.weight[k], m_.weight[k], v_.weight[k]);
    upd(l.bias, g.bias[k], m_.bias[k], v_.bias[k]);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft update between different architectures");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  for (std::size_t k = 0; k < target.layers().size(); ++k) {
    auto& t = target.layers()[k];
    const auto& o = online.layers()[k];
    t.weight = tau * o.weight + (1.0 - tau) * t.weight;
    t.bias = tau * o.bias + (1.0 - tau) * t.bias;
  }
}

GradCheckResult gradient_check(const Mlp& net, const Eigen::MatrixXd& x, std::mt19937_64& rng, double step) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd w(net.outputs(), x.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = n01(rng);

  Tape tape;
  net.forward(x, tape);
  Gradients g = net.zero_gradients();
  const Eigen::MatrixXd dx = net.backward(tape, w, g);

  auto relu_mask = [](const Mlp& m, const Eigen::MatrixXd& in) {
    Tape t;
    m.forward(in, t);
    std::vector<bool> mask;
    for (std::size_t k = 0; k < t.pre.size(); ++k)
      for (Eigen::Index i = 0; i < t.pre[k].rows(); ++i)
        if (m.layers()[k].unit(static_cast<int>(i)) == Activation::Relu)
          for (Eigen::Index j = 0; j < t.pre[k].cols(); ++j) mask.push_back(t.pre[k](i, j) > 0.0);
    return mask;
  };
  const auto base_mask = relu_mask(net, x);
  auto loss = [&](const Mlp& m, const Eigen::MatrixXd& in) { return m.forward(in).cwiseProduct(w).sum(); };

  GradCheckResult res;
  auto compare = [&](double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    res.max_relative_error = std::max(res.max_relative_error, std::abs(analytic - numeric) / scale);
    ++res.checked;
  };

  // Analytic gradients flattened in the same order as Mlp::flatten().
  std::vector<double> analytic;
  for (std::size_t k = 0; k < g.weight.size(); ++k) {
    for (Eigen::Index i = 0; i < g.weight[k].rows(); ++i)
      for (Eigen::Index j = 0; j < g.weight[k].cols(); ++j) analytic.push_back(g.weight[k](i, j));
    for (Eigen::Index i = 0; i < g.bias[k].size(); ++i) analytic.push_back(g.bias[k][i]);
  }
  const auto params = net.flatten();
  Mlp probe = net;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params;
    p[i] = params[i] + step;
    probe.unflatten(p);
    const double up = loss(probe, x);
    const bool kink_up = relu_mask(probe, x) != base_mask;
    p[i] = params[i] - step;
    probe.unflatten(p);
    const double down = loss(probe, x);
    const bool kink_down = relu_mask(probe, x) != base_mask;
    if (kink_up || kink_down) {
      ++res.skipped;
      continue;
    }
    compare(analytic[i], (up - down) / (2.0 * step));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::MatrixXd xp = x, xm = x;
    xp.data()[i] += step;
    xm.data()[i] -= step;
    if (relu_mask(net, xp) != base_mask || relu_mask(net, xm) != base_mask) {
      ++res.skipped;
      continue;
    }
    compare(dx.data()[i], (loss(net, xp) - loss(net, xm)) / (2.0 * step));
  }
  return res;
}

}  // namespace uavnet
