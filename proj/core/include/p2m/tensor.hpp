#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace p2m::nn {

using Shape = std::vector<int>;

int64_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  std::uint64_t order = 0;  // creation order; parents always precede children

  void ensure_grad();
};
}  // namespace detail

/// Dense row-major tensor handle with reverse-mode gradients. Copies
/// share the underlying buffer; ops create new nodes and record the
/// backward pass. Single-writer: leaves are mutated only between graphs
/// (optimizer steps), never inside one.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  /// Uniform in +-sqrt(1/fan_in).
  static Tensor init_uniform(Shape shape, int fan_in, std::mt19937_64& rng);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t size() const { return static_cast<int64_t>(node_->value.size()); }
  int dim(int i) const { return node_->shape[i]; }

  std::vector<double>& data() { return node_->value; }
  const std::vector<double>& data() const { return node_->value; }
  double item() const;
  double operator()(int i) const { return node_->value[i]; }
  double operator()(int i, int j) const { return node_->value[i * dim(1) + j]; }

  Tensor& set_requires_grad(bool on = true);
  bool requires_grad() const { return node_->requires_grad; }
  const std::vector<double>& grad() const { return node_->grad; }
  void zero_grad();

  /// Reverse-mode differentiation from a scalar; grads land in every
  /// requires_grad tensor reachable from it. The recorded graph is
  /// released afterwards.
  void backward();

  std::shared_ptr<detail::Node> node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// ---- elementwise and reduction ops ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor neg(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// ---- shape ops ----
Tensor reshape(const Tensor& a, Shape shape);
Tensor transpose(const Tensor& a);                       // 2-d
Tensor concat(const std::vector<Tensor>& parts);         // flat, 1-d result
Tensor slice(const Tensor& a, int64_t offset, Shape shape);

// ---- linear algebra ----
Tensor matmul(const Tensor& a, const Tensor& b);         // [m,k] x [k,n]
Tensor add_rowvec(const Tensor& a, const Tensor& row);   // [n,m] + [m]
Tensor softmax_rows(const Tensor& a);                    // 2-d, rowwise
Tensor rows_norm(const Tensor& a);                       // [n,3] -> [n]

// ---- geometry ops ----
Tensor rodrigues(const Tensor& axis_angle);              // [3] -> [3,3]
Tensor rotation_6d(const Tensor& r6);                    // [6] -> [3,3]

/// Row-wise pinhole projection of camera-frame points [J,3] -> [J,2].
/// Points with depth below `min_depth` produce zeros; `valid_out`, when
/// given, records which rows projected.
Tensor project_rows(const Tensor& points_cam, double focal, double cx, double cy,
                    std::vector<std::uint8_t>* valid_out = nullptr, double min_depth = 1e-6);

}  // namespace p2m::nn
