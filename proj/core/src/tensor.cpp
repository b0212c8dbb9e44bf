#include "p2m/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "p2m/rotation.hpp"

namespace p2m::nn {

int64_t numel(const Shape& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

namespace detail {

void Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

namespace {
std::atomic<std::uint64_t> g_order{0};
}

std::shared_ptr<Node> make_node(Shape shape) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value.assign(numel(n->shape), 0.0);
  n->order = ++g_order;
  return n;
}

}  // namespace detail

using detail::Node;

Tensor::Tensor(Shape shape, double fill) {
  node_ = detail::make_node(std::move(shape));
  std::fill(node_->value.begin(), node_->value.end(), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values) {
  node_ = detail::make_node(std::move(shape));
  if (static_cast<int64_t>(values.size()) != numel(node_->shape))
    throw std::invalid_argument("Tensor: data length " + std::to_string(values.size()) +
                                " != numel of " + shape_str(node_->shape));
  node_->value = std::move(values);
}

Tensor Tensor::init_uniform(Shape shape, int fan_in, std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(1.0 / std::max(1, fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : t.data()) v = u(rng);
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item(): tensor has " + std::to_string(size()) +
                                               " elements, expected 1");
  return node_->value[0];
}

Tensor& Tensor::set_requires_grad(bool on) {
  node_->requires_grad = on;
  if (on) node_->ensure_grad();
  return *this;
}

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::backward() {
  if (size() != 1) throw std::invalid_argument("backward(): loss must be a scalar");
  // Collect the reachable graph; creation order gives a topological order.
  std::vector<std::shared_ptr<Node>> nodes;
  std::unordered_set<Node*> seen;
  std::vector<std::shared_ptr<Node>> stack{node_};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    nodes.push_back(n);
    for (auto& p : n->parents)
      if (seen.insert(p.get()).second) stack.push_back(p);
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a->order > b->order; });

  node_->ensure_grad();
  node_->grad[0] = 1.0;
  for (auto& n : nodes) {
    if (n->backward_fn && n->requires_grad) n->backward_fn(*n);
  }
  // Release the recorded graph; leaves keep their grads.
  for (auto& n : nodes) {
    n->parents.clear();
    n->backward_fn = nullptr;
  }
}

namespace {

bool any_grad(std::initializer_list<const Tensor*> ts) {
  for (const Tensor* t : ts)
    if (t->requires_grad()) return true;
  return false;
}

Tensor make_result(Shape shape, std::initializer_list<const Tensor*> parents) {
  auto node = detail::make_node(std::move(shape));
  node->requires_grad = any_grad(parents);
  if (node->requires_grad) {
    node->ensure_grad();
    for (const Tensor* p : parents) {
      node->parents.push_back(p->node());
      if (p->requires_grad()) p->node()->ensure_grad();
    }
  }
  return Tensor(node);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = make_result(a.shape(), {&a, &b});
  for (int64_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  if (out.requires_grad()) {
    auto pa = a.node(), pb = b.node();
    out.node()->backward_fn = [pa, pb](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i) {
        if (pa->requires_grad) pa->grad[i] += n.grad[i];
        if (pb->requires_grad) pb->grad[i] += n.grad[i];
      }
    };
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Tensor out = make_result(a.shape(), {&a, &b});
  for (int64_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  if (out.requires_grad()) {
    auto pa = a.node(), pb = b.node();
    out.node()->backward_fn = [pa, pb](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i) {
        if (pa->requires_grad) pa->grad[i] += n.grad[i];
        if (pb->requires_grad) pb->grad[i] -= n.grad[i];
      }
    };
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Tensor out = make_result(a.shape(), {&a, &b});
  for (int64_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  if (out.requires_grad()) {
    auto pa = a.node(), pb = b.node();
    out.node()->backward_fn = [pa, pb](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i) {
        if (pa->requires_grad) pa->grad[i] += n.grad[i] * pb->value[i];
        if (pb->requires_grad) pb->grad[i] += n.grad[i] * pa->value[i];
      }
    };
  }
  return out;
}

namespace {

template <class Fwd, class Bwd>
Tensor unary_op(const Tensor& a, Fwd fwd, Bwd dydx) {
  Tensor out = make_result(a.shape(), {&a});
  for (int64_t i = 0; i < a.size(); ++i) out.data()[i] = fwd(a.data()[i]);
  if (out.requires_grad()) {
    auto pa = a.node();
    auto po = out.node();
    out.node()->backward_fn = [pa, po, dydx](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i)
        pa->grad[i] += n.grad[i] * dydx(pa->value[i], po->value[i]);
    };
  }
  return out;
}

}  // namespace

Tensor scale(const Tensor& a, double c) {
  return unary_op(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_op(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor abs(const Tensor& a) {
  return unary_op(a, [](double x) { return std::abs(x); },
                  [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Tensor square(const Tensor& a) {
  return unary_op(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor& a) {
  return unary_op(a, [](double x) { return std::sqrt(x); },
                  [](double, double y) { return y > 0 ? 0.5 / y : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary_op(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary_op(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
  return unary_op(a, [](double x) { return x > 0 ? x : 0.0; },
                  [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary_op(a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
                  [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  Tensor out = make_result({1}, {&a});
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  out.data()[0] = acc;
  if (out.requires_grad()) {
    auto pa = a.node();
    out.node()->backward_fn = [pa](Node& n) {
      for (double& g : pa->grad) g += n.grad[0];
    };
  }
  return out;
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.size())
    throw std::invalid_argument("reshape: numel mismatch " + shape_str(a.shape()) + " -> " +
                                shape_str(shape));
  Tensor out = make_result(std::move(shape), {&a});
  out.data() = a.data();
  if (out.requires_grad()) {
    auto pa = a.node();
    out.node()->backward_fn = [pa](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i) pa->grad[i] += n.grad[i];
    };
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.shape().size() != 2) throw std::invalid_argument("transpose: tensor must be 2-d");
  const int r = a.dim(0), c = a.dim(1);
  Tensor out = make_result({c, r}, {&a});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.data()[j * r + i] = a.data()[i * c + j];
  if (out.requires_grad()) {
    auto pa = a.node();
    out.node()->backward_fn = [pa, r, c](Node& n) {
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) pa->grad[i * c + j] += n.grad[j * r + i];
    };
  }
  return out;
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  int64_t total = 0;
  for (const Tensor& p : parts) total += p.size();
  auto node = detail::make_node({static_cast<int>(total)});
  int64_t off = 0;
  bool grad = false;
  for (const Tensor& p : parts) {
    std::copy(p.data().begin(), p.data().end(), node->value.begin() + off);
    off += p.size();
    grad = grad || p.requires_grad();
  }
  Tensor out(node);
  if (grad) {
    node->requires_grad = true;
    node->ensure_grad();
    std::vector<std::shared_ptr<Node>> srcs;
    for (const Tensor& p : parts) {
      node->parents.push_back(p.node());
      if (p.requires_grad()) p.node()->ensure_grad();
      srcs.push_back(p.node());
    }
    node->backward_fn = [srcs](Node& n) {
      int64_t pos = 0;
      for (auto& s : srcs) {
        if (s->requires_grad)
          for (size_t i = 0; i < s->value.size(); ++i) s->grad[i] += n.grad[pos + i];
        pos += static_cast<int64_t>(s->value.size());
      }
    };
  }
  return out;
}

Tensor slice(const Tensor& a, int64_t offset, Shape shape) {
  const int64_t len = numel(shape);
  if (offset < 0 || offset + len > a.size())
    throw std::invalid_argument("slice: range out of bounds");
  Tensor out = make_result(std::move(shape), {&a});
  std::copy(a.data().begin() + offset, a.data().begin() + offset + len, out.data().begin());
  if (out.requires_grad()) {
    auto pa = a.node();
    out.node()->backward_fn = [pa, offset](Node& n) {
      for (size_t i = 0; i < n.grad.size(); ++i) pa->grad[offset + i] += n.grad[i];
    };
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(0))
    throw std::invalid_argument("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out = make_result({m, n}, {&a, &b});
  const double* A = a.data().data();
  const double* B = b.data().data();
  double* C = out.data().data();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j) C[i * n + j] += av * B[p * n + j];
    }
  if (out.requires_grad()) {
    auto pa = a.node(), pb = b.node();
    out.node()->backward_fn = [pa, pb, m, k, n](Node& node) {
      const double* G = node.grad.data();
      if (pa->requires_grad) {  // dA = G B^T
        const double* B2 = pb->value.data();
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < k; ++p) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += G[i * n + j] * B2[p * n + j];
            pa->grad[i * k + p] += acc;
          }
      }
      if (pb->requires_grad) {  // dB = A^T G
        const double* A2 = pa->value.data();
        for (int p = 0; p < k; ++p)
          for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += A2[i * k + p] * G[i * n + j];
            pb->grad[p * n + j] += acc;
          }
      }
    };
  }
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& row) {
  if (a.shape().size() != 2 || row.size() != a.dim(1))
    throw std::invalid_argument("add_rowvec: need [n,m] + [m]");
  const int n = a.dim(0), m = a.dim(1);
  Tensor out = make_result(a.shape(), {&a, &row});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.data()[i * m + j] = a.data()[i * m + j] + row.data()[j];
  if (out.requires_grad()) {
    auto pa = a.node(), pr = row.node();
    out.node()->backward_fn = [pa, pr, n, m](Node& node) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          if (pa->requires_grad) pa->grad[i * m + j] += node.grad[i * m + j];
          if (pr->requires_grad) pr->grad[j] += node.grad[i * m + j];
        }
    };
  }
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  if (a.shape().size() != 2) throw std::invalid_argument("softmax_rows: tensor must be 2-d");
  const int n = a.dim(0), m = a.dim(1);
  Tensor out = make_result(a.shape(), {&a});
  for (int i = 0; i < n; ++i) {
    double mx = a.data()[i * m];
    for (int j = 1; j < m; ++j) mx = std::max(mx, a.data()[i * m + j]);
    double z = 0.0;
    for (int j = 0; j < m; ++j) {
      const double e = std::exp(a.data()[i * m + j] - mx);
      out.data()[i * m + j] = e;
      z += e;
    }
    for (int j = 0; j < m; ++j) out.data()[i * m + j] /= z;
  }
  if (out.requires_grad()) {
    auto pa = a.node(), po = out.node();
    out.node()->backward_fn = [pa, po, n, m](Node& node) {
      for (int i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int j = 0; j < m; ++j) dot += node.grad[i * m + j] * po->value[i * m + j];
        for (int j = 0; j < m; ++j)
          pa->grad[i * m + j] += po->value[i * m + j] * (node.grad[i * m + j] - dot);
      }
    };
  }
  return out;
}

Tensor rows_norm(const Tensor& a) {
  if (a.shape().size() != 2) throw std::invalid_argument("rows_norm: tensor must be 2-d");
  const int n = a.dim(0), m = a.dim(1);
  Tensor out = make_result({n}, {&a});
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += a.data()[i * m + j] * a.data()[i * m + j];
    out.data()[i] = std::sqrt(s);
  }
  if (out.requires_grad()) {
    auto pa = a.node(), po = out.node();
    out.node()->backward_fn = [pa, po, n, m](Node& node) {
      for (int i = 0; i < n; ++i) {
        const double norm = po->value[i];
        if (norm <= 0) continue;
        for (int j = 0; j < m; ++j)
          pa->grad[i * m + j] += node.grad[i] * pa->value[i * m + j] / norm;
      }
    };
  }
  return out;
}

Tensor rodrigues(const Tensor& aa) {
  if (aa.size() != 3) throw std::invalid_argument("rodrigues: expected a 3-vector");
  const Vec3 v(aa(0), aa(1), aa(2));
  const Mat3 R = p2m::rodrigues(v);
  Tensor out = make_result({3, 3}, {&aa});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.data()[i * 3 + j] = R(i, j);
  if (out.requires_grad()) {
    auto pa = aa.node();
    out.node()->backward_fn = [pa, v, R](Node& node) {
      const double theta2 = v.squaredNorm();
      Eigen::Map<const Mat3> G_rowmajor(node.grad.data());
      const Mat3 G = G_rowmajor.transpose();  // grad laid out row-major
      for (int i = 0; i < 3; ++i) {
        Mat3 dR;
        if (theta2 < 1e-16) {
          Vec3 e = Vec3::Zero();
          e[i] = 1.0;
          dR << 0, -e.z(), e.y(), e.z(), 0, -e.x(), -e.y(), e.x(), 0;
        } else {
          // Gallego & Yezzi: dR/dv_i = (v_i [v]x + [v x (I-R)e_i]x) / |v|^2 * R
          Vec3 e = Vec3::Zero();
          e[i] = 1.0;
          const Vec3 w = v.cross((Mat3::Identity() - R) * e);
          Mat3 vx, wx;
          vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
          wx << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
          dR = (v[i] * vx + wx) / theta2 * R;
        }
        pa->grad[i] += (G.cwiseProduct(dR)).sum();
      }
    };
  }
  return out;
}

Tensor rotation_6d(const Tensor& r6) {
  if (r6.size() != 6) throw std::invalid_argument("rotation_6d: expected a 6-vector");
  const Vec3 a1(r6(0), r6(1), r6(2));
  const Vec3 a2(r6(3), r6(4), r6(5));
  const double n1 = a1.norm();
  if (n1 < 1e-12) throw std::invalid_argument("rotation_6d: first column is near zero");
  const Vec3 b1 = a1 / n1;
  const Vec3 u = a2 - b1.dot(a2) * b1;
  const double nu = u.norm();
  if (nu < 1e-12) throw std::invalid_argument("rotation_6d: columns are near collinear");
  const Vec3 b2 = u / nu;
  const Vec3 b3 = b1.cross(b2);

  Tensor out = make_result({3, 3}, {&r6});
  for (int i = 0; i < 3; ++i) {
    out.data()[i * 3 + 0] = b1[i];
    out.data()[i * 3 + 1] = b2[i];
    out.data()[i * 3 + 2] = b3[i];
  }
  if (out.requires_grad()) {
    auto pa = r6.node();
    out.node()->backward_fn = [pa, a1, a2, b1, b2, b3, n1, u, nu](Node& node) {
      Vec3 g1, g2, g3;
      for (int i = 0; i < 3; ++i) {
        g1[i] = node.grad[i * 3 + 0];
        g2[i] = node.grad[i * 3 + 1];
        g3[i] = node.grad[i * 3 + 2];
      }
      // b3 = b1 x b2
      Vec3 db1 = g1 + b2.cross(g3);
      Vec3 db2 = g2 + g3.cross(b1);
      // b2 = u/|u|, u = a2 - (b1.a2) b1
      const Vec3 du = (db2 - b2 * b2.dot(db2)) / nu;
      const Vec3 da2_partial = du - b1 * b1.dot(du);
      db1 += -(a2 * b1.dot(du) + b1.dot(a2) * du);
      // b1 = a1/|a1|
      const Vec3 da1 = (db1 - b1 * b1.dot(db1)) / n1;
      for (int i = 0; i < 3; ++i) {
        pa->grad[i] += da1[i];
        pa->grad[3 + i] += da2_partial[i];
      }
      (void)u;
    };
  }
  return out;
}

Tensor project_rows(const Tensor& points_cam, double focal, double cx, double cy,
                    std::vector<std::uint8_t>* valid_out, double min_depth) {
  if (points_cam.shape().size() != 2 || points_cam.dim(1) != 3)
    throw std::invalid_argument("project_rows: expected [J,3] camera-frame points");
  const int J = points_cam.dim(0);
  Tensor out = make_result({J, 2}, {&points_cam});
  std::vector<std::uint8_t> valid(J, 0);
  for (int j = 0; j < J; ++j) {
    const double x = points_cam(j, 0), y = points_cam(j, 1), z = points_cam(j, 2);
    if (z > min_depth) {
      out.data()[j * 2 + 0] = focal * x / z + cx;
      out.data()[j * 2 + 1] = focal * y / z + cy;
      valid[j] = 1;
    }
  }
  if (out.requires_grad()) {
    auto pa = points_cam.node();
    out.node()->backward_fn = [pa, J, focal, valid](Node& node) {
      for (int j = 0; j < J; ++j) {
        if (!valid[j]) continue;
        const double x = pa->value[j * 3 + 0], y = pa->value[j * 3 + 1], z = pa->value[j * 3 + 2];
        const double gu = node.grad[j * 2 + 0], gv = node.grad[j * 2 + 1];
        pa->grad[j * 3 + 0] += gu * focal / z;
        pa->grad[j * 3 + 1] += gv * focal / z;
        pa->grad[j * 3 + 2] += -focal * (gu * x + gv * y) / (z * z);
      }
    };
  }
  if (valid_out) *valid_out = std::move(valid);
  return out;
}

}  // namespace p2m::nn
