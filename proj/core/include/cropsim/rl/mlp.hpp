#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cropsim::rl {

/// Fully connected network with ReLU hidden layers.
///
/// Inputs are column-major batches: one sample per column. The output layer is
/// either linear (critics) or squashed with tanh (actors).
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  enum class Output { kLinear, kTanh };

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };

  /// Intermediate values kept by forward() for backward().
  struct Cache {
    std::vector<Matrix> activations;  // [0] is the input, [i+1] the output of layer i
    Matrix pre_output;                // last layer before the output squash
  };

  struct Gradients {
    std::vector<Layer> layers;
    Matrix input;
  };

  Mlp() = default;

  /// `sizes` = {inputs, hidden..., outputs}; parameters start at zero.
  Mlp(const std::vector<int>& sizes, Output output) : output_(output) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output size");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      if (sizes[i] < 1 || sizes[i + 1] < 1) throw std::invalid_argument("Mlp layer sizes must be >= 1");
      layers_.push_back({Matrix::Zero(sizes[i + 1], sizes[i]), Vector::Zero(sizes[i + 1])});
    }
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  template <typename Engine>
  void init_uniform(Engine& rng) {
    for (auto& l : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j)
        for (Eigen::Index i = 0; i < l.weight.rows(); ++i) l.weight(i, j) = static_cast<Scalar>(u(rng));
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = static_cast<Scalar>(u(rng));
    }
  }

  int input_size() const { return static_cast<int>(layers_.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().weight.rows()); }
  Output output() const { return output_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  Matrix forward(const Matrix& input, Cache* cache = nullptr) const {
    if (input.rows() != input_size()) {
      throw std::invalid_argument("Mlp::forward: expected " + std::to_string(input_size()) + " input rows, got " +
                                  std::to_string(input.rows()));
    }
    if (cache) {
      cache->activations.resize(layers_.size() + 1);
      cache->activations[0] = input;
    }
    Matrix x = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix z = layers_[i].weight * x;
      z.colwise() += layers_[i].bias;
      if (i + 1 < layers_.size()) {
        x = z.cwiseMax(Scalar(0));
      } else {
        if (cache) cache->pre_output = z;
        x = output_ == Output::kTanh ? Matrix(z.array().tanh().matrix()) : z;
      }
      if (cache) cache->activations[i + 1] = x;
    }
    return x;
  }

  /// Gradients of sum_{k,j} upstream(k,j) * output(k,j) with respect to every parameter
  /// and to the input. Batch columns are summed, not averaged. `pre_upstream`, when given,
  /// is an additional gradient with respect to the pre-squash output.
  Gradients backward(const Cache& cache, const Matrix& upstream, const Matrix* pre_upstream = nullptr) const {
    if (cache.activations.size() != layers_.size() + 1) {
      throw std::invalid_argument("Mlp::backward: cache does not come from this network");
    }
    const Matrix& out = cache.activations.back();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
      throw std::invalid_argument("Mlp::backward: upstream shape does not match the output");
    }
    Gradients g;
    g.layers.resize(layers_.size());
    Matrix delta = output_ == Output::kTanh
                       ? Matrix(upstream.array() * (Scalar(1) - out.array().square()))
                       : upstream;
    if (pre_upstream) {
      if (pre_upstream->rows() != delta.rows() || pre_upstream->cols() != delta.cols()) {
        throw std::invalid_argument("Mlp::backward: pre-squash upstream shape does not match the output");
      }
      delta += *pre_upstream;
    }
    for (std::size_t i = layers_.size(); i-- > 0;) {
      const Matrix& in = cache.activations[i];
      g.layers[i].weight.noalias() = delta * in.transpose();
      g.layers[i].bias = delta.rowwise().sum();
      Matrix back = layers_[i].weight.transpose() * delta;
      if (i > 0) {
        // ReLU derivative from the stored activation (positive iff pre-activation positive).
        delta = (in.array() > Scalar(0)).select(back, Scalar(0));
      } else {
        g.input = std::move(back);
      }
    }
    return g;
  }

  /// this <- tau * source + (1 - tau) * this
  void soft_update_from(const Mlp& source, Scalar tau) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i].weight = tau * source.layers_[i].weight + (Scalar(1) - tau) * layers_[i].weight;
      layers_[i].bias = tau * source.layers_[i].bias + (Scalar(1) - tau) * layers_[i].bias;
    }
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (a.output_ != b.output_ || a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
      const auto& x = a.layers_[i];
      const auto& y = b.layers_[i];
      if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
      if (x.weight != y.weight || x.bias != y.bias) return false;
    }
    return true;
  }

 private:
  std::vector<Layer> layers_;
  Output output_ = Output::kLinear;
};

/// Adaptive moment estimation over every parameter of one network.
template <typename Scalar>
class Adam {
 public:
  using Net = Mlp<Scalar>;

  Adam() = default;
  Adam(const Net& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& l : net.layers()) {
      m_.push_back({Net::Matrix::Zero(l.weight.rows(), l.weight.cols()), Net::Vector::Zero(l.bias.size())});
      v_.push_back(m_.back());
    }
  }

  void step(Net& net, const typename Net::Gradients& g) {
    ++t_;
    const Scalar b1 = static_cast<Scalar>(beta1_), b2 = static_cast<Scalar>(beta2_);
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    const Scalar lr = static_cast<Scalar>(lr_), eps = static_cast<Scalar>(eps_);
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      apply(layers[i].weight, m_[i].weight, v_[i].weight, g.layers[i].weight, b1, b2, c1, c2, lr, eps);
      apply(layers[i].bias, m_[i].bias, v_[i].bias, g.layers[i].bias, b1, b2, c1, c2, lr, eps);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  static void apply(P& param, P& m, P& v, const G& grad, Scalar b1, Scalar b2, Scalar c1, Scalar c2, Scalar lr,
                    Scalar eps) {
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }

  double lr_ = 3e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<typename Net::Layer> m_, v_;
};

/// Text format:
///
///     cropsim-mlp 1
///     output tanh|linear
///     layers <count>
///     layer <out> <in>
///     <out rows of <in> weights>
///     <one row of <out> biases>
///     ...
///
/// Values are written with max_digits10 so that reading restores them exactly.
template <typename Scalar>
void save_mlp(const Mlp<Scalar>& net, std::ostream& out) {
  out << "cropsim-mlp 1\n";
  out << "output " << (net.output() == Mlp<Scalar>::Output::kTanh ? "tanh" : "linear") << '\n';
  out << "layers " << net.layers().size() << '\n';
  out << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  for (const auto& l : net.layers()) {
    out << "layer " << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) out << (j ? " " : "") << l.weight(i, j);
      out << '\n';
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) out << (i ? " " : "") << l.bias(i);
    out << '\n';
  }
}

template <typename Scalar>
Mlp<Scalar> load_mlp(std::istream& in) {
  auto fail = [](const std::string& what) { throw std::runtime_error("malformed network file: " + what); };
  std::string tag, kind;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> tag >> version) || tag != "cropsim-mlp" || version != 1) fail("bad magic");
  if (!(in >> tag >> kind) || tag != "output" || (kind != "tanh" && kind != "linear")) fail("bad output line");
  if (!(in >> tag >> count) || tag != "layers" || count < 1) fail("bad layer count");

  std::vector<typename Mlp<Scalar>::Layer> layers;
  std::vector<int> sizes;
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> tag >> rows >> cols) || tag != "layer" || rows < 1 || cols < 1) fail("bad layer header");
    if (k == 0) sizes.push_back(static_cast<int>(cols));
    if (static_cast<int>(cols) != sizes.back()) fail("inconsistent layer shapes");
    sizes.push_back(static_cast<int>(rows));
    typename Mlp<Scalar>::Layer l{typename Mlp<Scalar>::Matrix(rows, cols), typename Mlp<Scalar>::Vector(rows)};
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(in >> l.weight(i, j))) fail("truncated weights");
    for (Eigen::Index i = 0; i < rows; ++i)
      if (!(in >> l.bias(i))) fail("truncated biases");
    layers.push_back(std::move(l));
  }
  Mlp<Scalar> net(sizes, kind == "tanh" ? Mlp<Scalar>::Output::kTanh : Mlp<Scalar>::Output::kLinear);
  net.layers() = std::move(layers);
  return net;
}

template <typename Scalar>
void save_mlp(const Mlp<Scalar>& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file '" + path.string() + "'");
  save_mlp(net, out);
}

template <typename Scalar>
Mlp<Scalar> load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file '" + path.string() + "'");
  return load_mlp<Scalar>(in);
}

}  // namespace cropsim::rl
