#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "stable_forms/errors.hpp"
#include "stable_forms/multi_index.hpp"

namespace stable_forms {

using Complex = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Alternating k-form on R^n with dense coefficients over the lexicographic
/// basis θ_I, I strictly increasing.  T is double for real forms and
/// std::complex<double> for forms on the complexification.
template <class T>
class Form {
 public:
  using Scalar = T;

  Form() = default;

  Form(int dim, int degree) : dim_(dim), degree_(degree) {
    coeffs_.assign(static_cast<std::size_t>(basis_table(dim, degree).masks.size()), T{});
  }

  Form(int dim, int degree, std::vector<T> coeffs) : dim_(dim), degree_(degree), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != basis_table(dim, degree).masks.size())
      throw DegreeError("coefficient count " + std::to_string(coeffs_.size()) + " != C(" + std::to_string(dim) + "," +
                        std::to_string(degree) + ")");
  }

  /// c·θ_{i1}∧…∧θ_{ik} with 1-based indices in any order (sign follows the permutation).
  static Form monomial(int dim, std::vector<int> one_based, T c = T{1}) {
    Form f(dim, static_cast<int>(one_based.size()));
    IndexMask m = 0;
    int sign = 1;
    for (int i : one_based) {
      if (i < 1 || i > dim) throw DimError("index out of range");
      const IndexMask bit = IndexMask{1} << (i - 1);
      if (m & bit) return f;
      sign *= wedge_sign(m, bit);
      m |= bit;
    }
    f.coeffs_[static_cast<std::size_t>(basis_table(dim, f.degree_).position[m])] = c * static_cast<double>(sign);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  std::span<const T> coeffs() const { return coeffs_; }
  const std::vector<T>& vector() const { return coeffs_; }
  T operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  T coeff(const MultiIndex& I) const {
    const int p = basis_table(dim_, degree_).position[I.mask()];
    if (p < 0) throw DegreeError("multi-index degree does not match form degree");
    return coeffs_[static_cast<std::size_t>(p)];
  }

  IndexMask mask_at(int i) const { return basis_table(dim_, degree_).masks[static_cast<std::size_t>(i)]; }

  double norm() const {
    double s = 0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }

  Vec<T> as_vector() const { return Eigen::Map<const Vec<T>>(coeffs_.data(), size()); }

  static Form from_vector(int dim, int degree, const Vec<T>& v) {
    return Form(dim, degree, std::vector<T>(v.data(), v.data() + v.size()));
  }

  Form& operator+=(const Form& o) {
    check_same_space(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Form& operator-=(const Form& o) {
    check_same_space(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Form& operator*=(T s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(T s, Form a) { return a *= s; }
  friend Form operator*(Form a, T s) { return a *= s; }
  friend Form operator-(Form a) { return a *= T{-1}; }

 private:
  void check_same_space(const Form& o) const {
    if (dim_ != o.dim_) throw DimError("dimension mismatch");
    if (degree_ != o.degree_) throw DegreeError("degree mismatch");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::vector<T> coeffs_;
};

using RealForm = Form<double>;
using ComplexForm = Form<Complex>;

template <class T>
double distance(const Form<T>& a, const Form<T>& b) {
  return (a - b).norm();
}

inline ComplexForm complexify(const RealForm& a) {
  std::vector<Complex> c(a.coeffs().begin(), a.coeffs().end());
  return ComplexForm(a.dim(), a.degree(), std::move(c));
}

inline RealForm real_part(const ComplexForm& a) {
  std::vector<double> c;
  for (auto z : a.coeffs()) c.push_back(z.real());
  return RealForm(a.dim(), a.degree(), std::move(c));
}

inline RealForm imag_part(const ComplexForm& a) {
  std::vector<double> c;
  for (auto z : a.coeffs()) c.push_back(z.imag());
  return RealForm(a.dim(), a.degree(), std::move(c));
}

inline ComplexForm conj(const ComplexForm& a) {
  std::vector<Complex> c;
  for (auto z : a.coeffs()) c.push_back(std::conj(z));
  return ComplexForm(a.dim(), a.degree(), std::move(c));
}

inline ComplexForm make_complex(const RealForm& re, const RealForm& im) {
  return complexify(re) + Complex(0, 1) * complexify(im);
}

}  // namespace stable_forms
