#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "stable_forms/form.hpp"

namespace stable_forms {

/// Exterior product.  Graded commutative: a∧b = (-1)^{pq} b∧a.
template <class T>
Form<T> wedge(const Form<T>& a, const Form<T>& b) {
  if (a.dim() != b.dim()) throw DimError("wedge: dimension mismatch");
  const int n = a.dim();
  const int k = a.degree() + b.degree();
  if (k > n) throw DegreeError("wedge: degree " + std::to_string(k) + " exceeds dimension " + std::to_string(n));
  const auto& out_table = basis_table(n, k);
  std::vector<T> out(out_table.masks.size(), T{});
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == T{}) continue;
    const IndexMask ma = a.mask_at(i);
    for (int j = 0; j < b.size(); ++j) {
      const IndexMask mb = b.mask_at(j);
      const int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      out[static_cast<std::size_t>(out_table.position[ma | mb])] += static_cast<double>(s) * a[i] * b[j];
    }
  }
  return Form<T>(n, k, std::move(out));
}

/// Interior product ι(v)a with v given in the basis w_1..w_n dual to θ_1..θ_n.
template <class T, class V>
Form<T> interior(const V& v, const Form<T>& a) {
  const int n = a.dim();
  if (static_cast<int>(v.size()) != n) throw DimError("interior: vector length != dimension");
  if (a.degree() < 1) throw DegreeError("interior: degree-0 input");
  const auto& out_table = basis_table(n, a.degree() - 1);
  std::vector<T> out(out_table.masks.size(), T{});
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == T{}) continue;
    const IndexMask m = a.mask_at(i);
    int pos = 0;
    for (IndexMask r = m; r; r &= r - 1, ++pos) {
      const int j = std::countr_zero(r);
      const T vj = static_cast<T>(v[j]);
      if (vj == T{}) continue;
      const double s = (pos & 1) ? -1.0 : 1.0;
      out[static_cast<std::size_t>(out_table.position[m & ~(IndexMask{1} << j)])] += s * vj * a[i];
    }
  }
  return Form<T>(n, a.degree() - 1, std::move(out));
}

/// Basis vector w_i (0-based) as a real vector.
inline Eigen::VectorXd basis_vector(int n, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return v;
}

namespace detail {

template <class M>
auto sub_determinant(const M& A, IndexMask rows, IndexMask cols) {
  using S = typename M::Scalar;
  const int k = std::popcount(rows);
  if (k == 0) return S{1};
  Mat<S> sub(k, k);
  int r = 0;
  for (IndexMask rm = rows; rm; rm &= rm - 1, ++r) {
    int c = 0;
    for (IndexMask cm = cols; cm; cm &= cm - 1, ++c) sub(r, c) = A(std::countr_zero(rm), std::countr_zero(cm));
  }
  if (k == 1) return sub(0, 0);
  if (k == 2) return S(sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0));
  return S(sub.determinant());
}

}  // namespace detail

/// Pullback (A*a)(v_1,…,v_k) = a(Av_1,…,Av_k).  Functorial: (AB)* = B*A*.
template <class T, class Derived>
Form<T> pullback(const Eigen::MatrixBase<Derived>& A, const Form<T>& a) {
  const int n = a.dim();
  if (A.rows() != n || A.cols() != n) throw DimError("pullback: matrix size != dimension");
  const Mat<typename Derived::Scalar> M = A;
  std::vector<T> out(static_cast<std::size_t>(a.size()), T{});
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == T{}) continue;
    for (int j = 0; j < a.size(); ++j)
      out[static_cast<std::size_t>(j)] += a[i] * static_cast<T>(detail::sub_determinant(M, a.mask_at(i), a.mask_at(j)));
  }
  return Form<T>(n, a.degree(), std::move(out));
}

/// Nondegenerate symmetric bilinear form on W, with its declared signature.
class MetricG {
 public:
  MetricG() = default;

  /// Validates symmetry and the declared signature (p positive, q negative directions).
  MetricG(Eigen::MatrixXd matrix, int p, int q) : matrix_(std::move(matrix)), p_(p), q_(q) {
    validate_shape();
    const auto [pp, qq] = count_signs();
    if (pp != p || qq != q)
      throw MetricError("metric signature (" + std::to_string(pp) + "," + std::to_string(qq) + ") != declared (" +
                        std::to_string(p) + "," + std::to_string(q) + ")");
  }

  /// Computes the signature instead of checking it.
  static MetricG from_matrix(Eigen::MatrixXd matrix) {
    MetricG g;
    g.matrix_ = std::move(matrix);
    g.validate_shape();
    std::tie(g.p_, g.q_) = g.count_signs();
    return g;
  }

  static MetricG euclidean(int n) { return MetricG(Eigen::MatrixXd::Identity(n, n), n, 0); }

  /// diag(-1, 1, …, 1): the first axis is timelike.
  static MetricG lorentzian(int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    m(0, 0) = -1;
    return MetricG(m, n - 1, 1);
  }

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  int positive() const { return p_; }
  int negative() const { return q_; }

 private:
  void validate_shape() const {
    if (matrix_.rows() != matrix_.cols()) throw MetricError("metric must be square");
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw MetricError("metric not symmetric");
  }

  std::pair<int, int> count_signs() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_);
    const auto& ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    int p = 0, q = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) > tol) ++p;
      else if (ev(i) < -tol) ++q;
      else throw MetricError("metric is singular");
    }
    return {p, q};
  }

  Eigen::MatrixXd matrix_;
  int p_ = 0;
  int q_ = 0;
};

/// Coefficient of θ_1∧…∧θ_n used as a trivialization of Λ^n.
struct VolumeElement {
  double coeff = 1.0;
};

/// Volume element √|det g|·θ_1∧…∧θ_n with the given orientation sign.
inline VolumeElement riemannian_volume(const MetricG& g, int orientation = 1) {
  return {orientation * std::sqrt(std::abs(g.matrix().determinant()))};
}

/// Induced inner product on k-forms: Gram determinants of g^{-1}.
template <class T>
T inner_product(const MetricG& g, const Form<T>& a, const Form<T>& b) {
  if (a.dim() != g.dim() || b.dim() != g.dim()) throw DimError("inner_product: dimension mismatch");
  if (a.degree() != b.degree()) throw DegreeError("inner_product: degree mismatch");
  const Eigen::MatrixXd ginv = g.matrix().inverse();
  T s{};
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == T{}) continue;
    for (int j = 0; j < b.size(); ++j) {
      if (b[j] == T{}) continue;
      s += a[i] * b[j] * detail::sub_determinant(ginv, a.mask_at(i), b.mask_at(j));
    }
  }
  return s;
}

/// Hodge star defined by b∧∗a = ⟨b,a⟩_g · vol for every b of the same degree.
template <class T>
Form<T> hodge_star(const MetricG& g, VolumeElement vol, const Form<T>& a) {
  const int n = a.dim();
  if (g.dim() != n) throw DimError("hodge_star: metric dimension mismatch");
  if (std::abs(g.matrix().determinant()) == 0.0) throw MetricError("hodge_star: singular metric");
  const Eigen::MatrixXd ginv = g.matrix().inverse();
  const int k = a.degree();
  const IndexMask full = (IndexMask{1} << n) - 1;
  const auto& in_table = basis_table(n, k);
  const auto& out_table = basis_table(n, n - k);
  std::vector<T> out(out_table.masks.size(), T{});
  for (std::size_t i = 0; i < in_table.masks.size(); ++i) {
    const IndexMask I = in_table.masks[i];
    T pairing{};
    for (int j = 0; j < a.size(); ++j)
      if (a[j] != T{}) pairing += a[j] * detail::sub_determinant(ginv, I, a.mask_at(j));
    const IndexMask C = full & ~I;
    out[static_cast<std::size_t>(out_table.position[C])] = static_cast<double>(wedge_sign(I, C)) * vol.coeff * pairing;
  }
  return Form<T>(n, n - k, std::move(out));
}

/// Coefficient of a top-degree form.
template <class T>
T top_coefficient(const Form<T>& a) {
  if (a.degree() != a.dim()) throw DegreeError("top_coefficient: not a top-degree form");
  return a[0];
}

/// Matrix of the pairing (x, y) ↦ (x∧y)/ε on the bases of Λ^k and Λ^{n-k}.
inline Eigen::MatrixXd wedge_pairing_matrix(int n, int k, double eps = 1.0) {
  const auto& left = basis_table(n, k);
  const auto& right = basis_table(n, n - k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(left.masks.size()),
                                            static_cast<Eigen::Index>(right.masks.size()));
  for (std::size_t i = 0; i < left.masks.size(); ++i)
    for (std::size_t j = 0; j < right.masks.size(); ++j) {
      const int s = wedge_sign(left.masks[i], right.masks[j]);
      if (s != 0) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s / eps;
    }
  return m;
}

}  // namespace stable_forms
