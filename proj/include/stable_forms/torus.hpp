#pragma once

// Truncated Fourier model of 3-form fields on the flat tori T⁶ and T⁷ (volume 1).
// Spectral d, the functionals Φ by grid averaging, the Euler–Lagrange residual
// ‖dΩ̂‖ resp. ‖d∗Ω‖, a residual-minimizing descent inside a cohomology class, and
// the second variation at a flat critical point.
//
// A field is sampled at x_p = 2πp/G, p ∈ {0..G−1}^n.  Pointwise maps are applied on
// the grid and their output is filtered to |m|∞ ≤ K = ⌊(G−1)/3⌋ (the 2/3 rule).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "stable_forms/errors.hpp"
#include "stable_forms/exterior.hpp"
#include "stable_forms/forms6.hpp"
#include "stable_forms/forms7.hpp"
#include "stable_forms/kernels.hpp"
#include "stable_forms/parallel.hpp"
#include "stable_forms/rng.hpp"

namespace stable_forms::torus {

enum class Mode { Six, Seven };

inline int dimension(Mode m) { return m == Mode::Six ? 6 : 7; }

inline Mode mode_for(int n) {
  if (n == 6) return Mode::Six;
  if (n == 7) return Mode::Seven;
  throw DimError("torus model: dimension must be 6 or 7, got " + std::to_string(n));
}

/// Second variation normalization: 6D uses Hess φ, 7D uses Q = 3·Hess φ.
inline double hessian_scale(Mode m) { return m == Mode::Six ? 1.0 : 3.0; }

using Wave = std::array<int, kMaxDim>;

/// Wavevectors m with |m|∞ ≤ N, lexicographic with m₁ slowest.  index(−m) = size−1−index(m),
/// and m is lexicographically positive iff index(m) > center().
class Lattice {
 public:
  Lattice() = default;
  Lattice(int n, int N) : n_(n), N_(N), side_(2 * N + 1) {
    if (n < 1 || n > kMaxDim) throw DimError("lattice: bad dimension " + std::to_string(n));
    if (N < 0) throw PreconditionError("lattice: negative cutoff");
    size_ = 1;
    for (int j = 0; j < n; ++j) size_ *= side_;
  }

  int dim() const { return n_; }
  int cutoff() const { return N_; }
  int size() const { return size_; }
  int center() const { return (size_ - 1) / 2; }
  int negate(int i) const { return size_ - 1 - i; }
  bool positive(int i) const { return i > center(); }

  Wave wave(int i) const {
    Wave m{};
    for (int j = n_ - 1; j >= 0; --j) {
      m[static_cast<std::size_t>(j)] = i % side_ - N_;
      i /= side_;
    }
    return m;
  }

  /// −1 when m lies outside the box.
  int index(const Wave& m) const {
    int i = 0;
    for (int j = 0; j < n_; ++j) {
      const int c = m[static_cast<std::size_t>(j)];
      if (c < -N_ || c > N_) return -1;
      i = i * side_ + c + N_;
    }
    return i;
  }

 private:
  int n_ = 0, N_ = 0, side_ = 1, size_ = 0;
};

namespace detail {

/// θ_j∧θ_I = s·θ_out for I ∈ Λ^k (table entry per (I, j ∉ I)).
struct Raise {
  int in, j, out;
  double s;
};

inline const std::vector<Raise>& raise_table(int n, int k) {
  static const auto tables = [] {
    std::array<std::array<std::vector<Raise>, kMaxDim + 1>, kMaxDim + 1> t;
    for (int n = 1; n <= kMaxDim; ++n)
      for (int k = 0; k < n; ++k) {
        const auto& in = basis_table(n, k);
        const auto& out = basis_table(n, k + 1);
        for (std::size_t a = 0; a < in.masks.size(); ++a)
          for (int j = 0; j < n; ++j) {
            const IndexMask bit = IndexMask{1} << j;
            if (in.masks[a] & bit) continue;
            t[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)].push_back(
                {static_cast<int>(a), j, out.position[in.masks[a] | bit], static_cast<double>(wedge_sign(bit, in.masks[a]))});
          }
      }
    return t;
  }();
  if (n < 1 || n > kMaxDim || k < 0 || k >= n) throw DegreeError("raise_table: degree out of range");
  return tables[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

}  // namespace detail

/// Matrix of m∧ : Λ^k → Λ^{k+1}.
inline Eigen::MatrixXd wedge_matrix(int n, int k, const Wave& m) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(binomial(n, k + 1), binomial(n, k));
  for (const auto& r : detail::raise_table(n, k)) M(r.out, r.in) += r.s * m[static_cast<std::size_t>(r.j)];
  return M;
}

/// k-form field Σ_m c_m(I)·e^{i m·x} θ_I with |m|∞ ≤ N.  Real fields satisfy c_{−m} = conj c_m.
class FourierForm {
 public:
  FourierForm() = default;
  FourierForm(int n, int k, int N) : lattice_(n, N), k_(k) {
    if (k < 0 || k > n) throw DegreeError("FourierForm: degree " + std::to_string(k) + " out of range");
    comps_ = binomial(n, k);
    c_.assign(static_cast<std::size_t>(lattice_.size()) * static_cast<std::size_t>(comps_), Complex{});
  }

  static FourierForm constant(const RealForm& f, int N) {
    FourierForm out(f.dim(), f.degree(), N);
    const int z = out.lattice_.center();
    for (int a = 0; a < out.comps_; ++a) out(z, a) = f[a];
    return out;
  }

  int dim() const { return lattice_.dim(); }
  int degree() const { return k_; }
  int cutoff() const { return lattice_.cutoff(); }
  int components() const { return comps_; }
  int modes() const { return lattice_.size(); }
  const Lattice& lattice() const { return lattice_; }

  Complex& operator()(int mode, int comp) { return c_[static_cast<std::size_t>(mode * comps_ + comp)]; }
  Complex operator()(int mode, int comp) const { return c_[static_cast<std::size_t>(mode * comps_ + comp)]; }

  /// Zero outside the box.
  Complex coeff(const Wave& m, int comp) const {
    const int i = lattice_.index(m);
    return i < 0 ? Complex{} : (*this)(i, comp);
  }

  /// Sets the m coefficient and its conjugate partner at −m.
  void set(const Wave& m, int comp, Complex v) {
    const int i = lattice_.index(m);
    if (i < 0) throw PreconditionError("FourierForm::set: wavevector outside cutoff");
    (*this)(i, comp) = v;
    (*this)(lattice_.negate(i), comp) = i == lattice_.center() ? Complex(v.real(), 0.0) : std::conj(v);
  }

  RealForm constant_part() const {
    std::vector<double> v(static_cast<std::size_t>(comps_));
    for (int a = 0; a < comps_; ++a) v[static_cast<std::size_t>(a)] = (*this)(lattice_.center(), a).real();
    return RealForm(dim(), k_, std::move(v));
  }

  /// max |c_{−m} − conj c_m|.
  double reality_defect() const {
    double d = 0;
    for (int i = 0; i < modes(); ++i)
      for (int a = 0; a < comps_; ++a) d = std::max(d, std::abs((*this)(lattice_.negate(i), a) - std::conj((*this)(i, a))));
    return d;
  }

  /// L² norm on the unit-volume torus (Parseval).
  double l2_norm() const {
    double s = 0;
    for (const auto& c : c_) s += std::norm(c);
    return std::sqrt(s);
  }

  /// Same field with cutoff N2 (modes beyond N2 dropped).
  FourierForm resized(int N2) const {
    FourierForm out(dim(), k_, N2);
    for (int i = 0; i < out.modes(); ++i) {
      const int j = lattice_.index(out.lattice_.wave(i));
      if (j < 0) continue;
      for (int a = 0; a < comps_; ++a) out(i, a) = (*this)(j, a);
    }
    return out;
  }

  FourierForm& operator+=(const FourierForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  FourierForm& operator-=(const FourierForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  FourierForm& operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
  }
  friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
  friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
  friend FourierForm operator*(double s, FourierForm a) { return a *= s; }

 private:
  void check_same(const FourierForm& o) const {
    if (dim() != o.dim()) throw DimError("FourierForm: dimension mismatch");
    if (k_ != o.k_) throw DegreeError("FourierForm: degree mismatch");
    if (cutoff() != o.cutoff()) throw PreconditionError("FourierForm: cutoff mismatch");
  }

  Lattice lattice_;
  int k_ = 0;
  int comps_ = 0;
  std::vector<Complex> c_;
};

/// Spectral d: mode m of dF is i·m∧F_m.
inline FourierForm exterior_derivative(const FourierForm& f) {
  if (f.degree() >= f.dim()) throw DegreeError("exterior_derivative: degree must be < n");
  FourierForm out(f.dim(), f.degree() + 1, f.cutoff());
  const auto& table = detail::raise_table(f.dim(), f.degree());
  for (int i = 0; i < f.modes(); ++i) {
    const Wave m = f.lattice().wave(i);
    for (const auto& r : table) {
      const int mj = m[static_cast<std::size_t>(r.j)];
      if (mj != 0) out(i, r.out) += Complex(0, r.s * mj) * f(i, r.in);
    }
  }
  return out;
}

/// Adjoint of d for the coefficient L² product: mode m gets −i·ι_m F_m.
inline FourierForm exterior_derivative_adjoint(const FourierForm& f) {
  if (f.degree() < 1) throw DegreeError("exterior_derivative_adjoint: degree must be ≥ 1");
  FourierForm out(f.dim(), f.degree() - 1, f.cutoff());
  const auto& table = detail::raise_table(f.dim(), f.degree() - 1);
  for (int i = 0; i < f.modes(); ++i) {
    const Wave m = f.lattice().wave(i);
    for (const auto& r : table) {
      const int mj = m[static_cast<std::size_t>(r.j)];
      if (mj != 0) out(i, r.in) += Complex(0, -r.s * mj) * f(i, r.out);
    }
  }
  return out;
}

/// Uniform G^n sample grid holding `comps` complex fields, with in-place FFTW plans.
class Grid {
 public:
  Grid(int n, int G, int comps) : n_(n), G_(G), comps_(comps) {
    if (G < 1) throw PreconditionError("grid: G must be ≥ 1");
    points_ = 1;
    for (int j = 0; j < n; ++j) points_ *= G;
    const std::size_t total = static_cast<std::size_t>(points_) * static_cast<std::size_t>(comps);
    buf_ = fftw_alloc_complex(total);
    if (!buf_) throw std::bad_alloc();
    std::vector<int> dims(static_cast<std::size_t>(n), G);
    std::lock_guard<std::mutex> lock(planner_mutex());  // the FFTW planner is not thread-safe
    fwd_ = fftw_plan_many_dft(n, dims.data(), comps, buf_, nullptr, 1, points_, buf_, nullptr, 1, points_, FFTW_FORWARD,
                              FFTW_ESTIMATE);
    bwd_ = fftw_plan_many_dft(n, dims.data(), comps, buf_, nullptr, 1, points_, buf_, nullptr, 1, points_, FFTW_BACKWARD,
                              FFTW_ESTIMATE);
  }
  ~Grid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return n_; }
  int side() const { return G_; }
  int points() const { return points_; }
  int components() const { return comps_; }

  Complex* field(int c) { return reinterpret_cast<Complex*>(buf_) + static_cast<std::ptrdiff_t>(c) * points_; }
  const Complex* field(int c) const { return reinterpret_cast<const Complex*>(buf_) + static_cast<std::ptrdiff_t>(c) * points_; }

  int offset(const Wave& m) const {
    int o = 0;
    for (int j = 0; j < n_; ++j) o = o * G_ + ((m[static_cast<std::size_t>(j)] % G_) + G_) % G_;
    return o;
  }

  Wave point(int p) const {
    Wave x{};
    for (int j = n_ - 1; j >= 0; --j) {
      x[static_cast<std::size_t>(j)] = p % G_;
      p /= G_;
    }
    return x;
  }

  /// Samples f: value(x) = Σ_m c_m e^{i m·x}.
  void load(const FourierForm& f) {
    if (f.dim() != n_ || f.components() != comps_) throw DimError("grid: field shape mismatch");
    if (2 * f.cutoff() + 1 > G_) throw PreconditionError("grid: cutoff not resolved by the grid");
    std::fill(field(0), field(0) + static_cast<std::ptrdiff_t>(comps_) * points_, Complex{});
    for (int i = 0; i < f.modes(); ++i) {
      const int o = offset(f.lattice().wave(i));
      for (int c = 0; c < comps_; ++c) field(c)[o] = f(i, c);
    }
    fftw_execute(bwd_);
  }

  /// Fourier coefficients (1/G^n)Σ_x value(x)e^{−i m·x} for |m|∞ ≤ K.  Destroys the samples.
  FourierForm analyze(int degree, int K) {
    if (binomial(n_, degree) != comps_) throw DegreeError("grid: degree does not match component count");
    if (2 * K + 1 > G_) throw PreconditionError("grid: filter cutoff exceeds the grid");
    fftw_execute(fwd_);
    FourierForm out(n_, degree, K);
    const double scale = 1.0 / points_;
    for (int i = 0; i < out.modes(); ++i) {
      const int o = offset(out.lattice().wave(i));
      for (int c = 0; c < comps_; ++c) out(i, c) = scale * field(c)[o];
    }
    return out;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_, G_, comps_;
  int points_ = 1;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// 2/3-rule filter cutoff for a G-point grid.
inline int filter_cutoff(int G) { return (G - 1) / 3; }

inline void check_grid(int N, int G) {
  if (G < 4 * N + 1 || G < 2 * N + 2)
    throw PreconditionError("torus grid: need G ≥ max(4N+1, 2N+2); got G = " + std::to_string(G) + ", N = " + std::to_string(N));
}

/// Pointwise map H (Ω̂ in 6D, ∗Ω in 7D), φ and ∇φ at one point; throws OrbitError off the orbit.
template <class T>
T pointwise(Mode mode, const T* omega, T* grad, T* map) {
  T phi{};
  if (mode == Mode::Six) {
    const T lambda = kernels::eval_six(omega, phi, grad, map);
    double norm2 = 0;
    for (int a = 0; a < six::kThreeForms; ++a) norm2 += std::norm(omega[a]);
    const double l = kernels::detail::real_of(lambda);
    if (!(l < 0) || six::in_dead_band(l, std::sqrt(norm2))) throw OrbitError("λ ≥ 0");
  } else {
    int orientation = 1;
    Eigen::Matrix<T, 7, 7> b;
    kernels::eval_seven(omega, phi, grad, map, orientation, &b);
    const Eigen::Matrix<double, 7, 7> br = b.unaryExpr([](const T& x) { return kernels::detail::real_of(x); });
    const Eigen::LLT<Eigen::Matrix<double, 7, 7>> llt(orientation * br);
    if (llt.info() != Eigen::Success || !std::isfinite(kernels::detail::real_of(phi)) || kernels::detail::real_of(phi) <= 0)
      throw OrbitError("not positive");
  }
  return phi;
}

/// DH at a constant form by complex-step differentiation (exact to rounding).
inline Eigen::MatrixXd pointwise_jacobian(Mode mode, const RealForm& omega) {
  const int c = omega.size();
  constexpr double h = 1e-20;
  Eigen::MatrixXd J(c, c);
  std::vector<Complex> w(static_cast<std::size_t>(c)), g(static_cast<std::size_t>(c)), m(static_cast<std::size_t>(c));
  for (int a = 0; a < c; ++a) {
    for (int b = 0; b < c; ++b) w[static_cast<std::size_t>(b)] = omega[b];
    w[static_cast<std::size_t>(a)] += Complex(0, h);
    pointwise(mode, w.data(), g.data(), m.data());
    for (int b = 0; b < c; ++b) J(b, a) = m[static_cast<std::size_t>(b)].imag() / h;
  }
  return J;
}

/// Hess φ at a constant form (complex step on the exact gradient), unsymmetrized.
inline Eigen::MatrixXd pointwise_hessian(Mode mode, const RealForm& omega) {
  const int c = omega.size();
  constexpr double h = 1e-20;
  Eigen::MatrixXd H(c, c);
  std::vector<Complex> w(static_cast<std::size_t>(c)), g(static_cast<std::size_t>(c)), m(static_cast<std::size_t>(c));
  for (int a = 0; a < c; ++a) {
    for (int b = 0; b < c; ++b) w[static_cast<std::size_t>(b)] = omega[b];
    w[static_cast<std::size_t>(a)] += Complex(0, h);
    pointwise(mode, w.data(), g.data(), m.data());
    for (int b = 0; b < c; ++b) H(b, a) = g[static_cast<std::size_t>(b)].imag() / h;
  }
  return H;
}

/// Coordinates of the potential β (2-form, modes |m|∞ ≤ N, zero mean): (Re, Im) of β_m(I)
/// for every lexicographically positive m; β_{−m} is the conjugate.
class BetaSpace {
 public:
  BetaSpace(int n, int N) : lattice_(n, N), c2_(binomial(n, 2)) {
    for (int i = lattice_.center() + 1; i < lattice_.size(); ++i) half_.push_back(i);
  }

  int size() const { return 2 * static_cast<int>(half_.size()) * c2_; }
  int components() const { return c2_; }
  const std::vector<int>& half_modes() const { return half_; }
  const Lattice& lattice() const { return lattice_; }

  FourierForm form(const Eigen::VectorXd& p) const {
    if (p.size() != size()) throw DimError("BetaSpace: coordinate vector has wrong length");
    FourierForm b(lattice_.dim(), 2, lattice_.cutoff());
    for (std::size_t h = 0; h < half_.size(); ++h)
      for (int c = 0; c < c2_; ++c) {
        const Eigen::Index at = 2 * (static_cast<Eigen::Index>(h) * c2_ + c);
        b(half_[h], c) = Complex(p(at), p(at + 1));
        b(lattice_.negate(half_[h]), c) = Complex(p(at), -p(at + 1));
      }
    return b;
  }

  /// Coordinates of a 2-form (its constant part is dropped: d of it vanishes).
  Eigen::VectorXd coordinates(const FourierForm& beta) const { return pack(beta, 1.0); }

  /// s·(Re, Im) of the positive-half coefficients of a 2-form.
  Eigen::VectorXd pack(const FourierForm& f, double s) const {
    if (f.degree() != 2 || f.dim() != lattice_.dim()) throw DegreeError("BetaSpace: expected a 2-form");
    Eigen::VectorXd p(size());
    for (std::size_t h = 0; h < half_.size(); ++h) {
      const Wave m = lattice_.wave(half_[h]);
      for (int c = 0; c < c2_; ++c) {
        const Complex v = f.coeff(m, c);
        const Eigen::Index at = 2 * (static_cast<Eigen::Index>(h) * c2_ + c);
        p(at) = s * v.real();
        p(at + 1) = s * v.imag();
      }
    }
    return p;
  }

 private:
  Lattice lattice_;
  int c2_;
  std::vector<int> half_;
};

/// Ω₀ + dβ(p).
inline FourierForm closed_field(const RealForm& omega0, const BetaSpace& space, const Eigen::VectorXd& p) {
  return FourierForm::constant(omega0, space.lattice().cutoff()) + exterior_derivative(space.form(p));
}

/// Grid workspace for one (mode, N, G): evaluates Φ, the filtered residual and the adjoints.
class Model {
 public:
  Model(Mode mode, int N, int G)
      : mode_(mode), n_(dimension(mode)), N_(N), G_(G), K_(filter_cutoff(G)), c3_(binomial(n_, 3)),
        omega_(n_, G, c3_), out_(n_, G, c3_), phi_(static_cast<std::size_t>(omega_.points())) {
    check_grid(N, G);
  }

  Mode mode() const { return mode_; }
  int cutoff() const { return N_; }
  int grid() const { return G_; }
  int filter() const { return K_; }

  /// Loads F, applies the pointwise map (kept in the output grid) and returns Φ.
  /// With `gradient`, the output grid holds ∇φ instead of H.
  double evaluate(const FourierForm& f, bool gradient = false) {
    check_field(f);
    omega_.load(f);
    const int P = omega_.points();
    run_chunks([&](int p) {
      std::array<double, 35> w{}, g{}, m{};
      for (int a = 0; a < c3_; ++a) w[static_cast<std::size_t>(a)] = omega_.field(a)[p].real();
      double phi = 0;
      try {
        phi = pointwise(mode_, w.data(), g.data(), m.data());
      } catch (const OrbitError& e) {
        throw OrbitError(std::string("field leaves the stable orbit (") + e.what() + ") at grid point " + describe(p));
      }
      phi_[static_cast<std::size_t>(p)] = phi;
      const auto& src = gradient ? g : m;
      for (int a = 0; a < c3_; ++a) out_.field(a)[p] = src[static_cast<std::size_t>(a)];
    }, P);
    double s = 0;
    for (double v : phi_) s += v;  // fixed summation order
    return s / P;
  }

  /// Filtered d(H) after evaluate(): a (4 or 5)-form with cutoff K.
  FourierForm residual_modes() {
    return exterior_derivative(out_.analyze(mode_ == Mode::Six ? 3 : 4, K_));
  }

  /// Low modes (|m| ≤ N) of whatever the output grid holds, as a form of `degree`.
  FourierForm output_modes(int degree) { return out_.analyze(degree, N_); }

  /// Applies the pointwise DHᵀ to the field y (same degree as H) at the loaded Ω;
  /// result (a 3-form field) is left in the output grid.
  void apply_adjoint(const FourierForm& y) {
    out_.load(y);
    const auto& pairing = mode_ == Mode::Six ? kernels::Six::get().w : kernels::Seven::get().w;
    run_chunks([&](int p) {
      std::array<Complex, 35> w{}, g{}, m{};
      std::array<double, 35> v{};
      // v = W·y(x); DH·v by complex step; result W·(DH·v).
      for (int r = 0; r < c3_; ++r)
        v[static_cast<std::size_t>(r)] = pairing.sign[static_cast<std::size_t>(r)] * out_.field(pairing.col[static_cast<std::size_t>(r)])[p].real();
      constexpr double h = 1e-20;
      for (int a = 0; a < c3_; ++a) w[static_cast<std::size_t>(a)] = Complex(omega_.field(a)[p].real(), h * v[static_cast<std::size_t>(a)]);
      pointwise(mode_, w.data(), g.data(), m.data());
      for (int r = 0; r < c3_; ++r)
        out_.field(r)[p] = pairing.sign[static_cast<std::size_t>(r)] * m[static_cast<std::size_t>(pairing.col[static_cast<std::size_t>(r)])].imag() / h;
    }, omega_.points());
  }

 private:
  template <class F>
  void run_chunks(F&& body, int P) {
    const int chunk = 4096;
    const int count = (P + chunk - 1) / chunk;
    parallel_for(count, [&](int c) {
      const int end = std::min(P, (c + 1) * chunk);
      for (int p = c * chunk; p < end; ++p) body(p);
    });
  }

  void check_field(const FourierForm& f) const {
    if (f.dim() != n_) throw DimError("torus model: field dimension mismatch");
    if (f.degree() != 3) throw DegreeError("torus model: field must be a 3-form");
    if (f.cutoff() != N_) throw PreconditionError("torus model: field cutoff mismatch");
  }

  std::string describe(int p) const {
    const Wave x = omega_.point(p);
    std::string s = "(";
    for (int j = 0; j < n_; ++j) s += (j ? "," : "") + std::to_string(x[static_cast<std::size_t>(j)]);
    return s + ")";
  }

  Mode mode_;
  int n_, N_, G_, K_, c3_;
  Grid omega_, out_;
  std::vector<double> phi_;
};

namespace detail {

inline void check_real(const FourierForm& f) {
  if (f.reality_defect() > 1e-12 * std::max(1.0, f.l2_norm())) throw PreconditionError("torus: field is not real (c₋ₘ ≠ conj cₘ)");
}

}  // namespace detail

/// Φ(F) = average of φ over the grid (torus volume 1).
inline double functional_value(const FourierForm& f, Mode mode, int G) {
  detail::check_real(f);
  Model model(mode, f.cutoff(), G);
  return model.evaluate(f);
}

/// ∂Φ/∂(Re β, Im β) in BetaSpace(n, N) coordinates at F (F = Ω₀ + dβ).
inline Eigen::VectorXd functional_gradient(const FourierForm& f, Mode mode, int G) {
  detail::check_real(f);
  Model model(mode, f.cutoff(), G);
  model.evaluate(f, true);
  const FourierForm gamma = exterior_derivative_adjoint(model.output_modes(3));
  return BetaSpace(f.dim(), f.cutoff()).pack(gamma, 2.0);
}

/// ‖P d H(F)‖ with P the 2/3-rule filter: ‖dΩ̂‖ (6D) or ‖d∗Ω‖ (7D).
inline double residual(const FourierForm& f, Mode mode, int G) {
  detail::check_real(f);
  Model model(mode, f.cutoff(), G);
  model.evaluate(f);
  return model.residual_modes().l2_norm();
}

namespace detail {

/// Gradient of ‖r‖² after model.evaluate(F); r = residual modes.
inline Eigen::VectorXd residual_sq_gradient(Model& model, const FourierForm& r, const BetaSpace& space) {
  model.apply_adjoint(exterior_derivative_adjoint(r));
  const FourierForm gamma = exterior_derivative_adjoint(model.output_modes(3));
  return space.pack(gamma, 4.0);
}

}  // namespace detail

/// Gradient of residual² in BetaSpace coordinates (exact adjoint).
inline Eigen::VectorXd residual_gradient(const FourierForm& f, Mode mode, int G) {
  detail::check_real(f);
  Model model(mode, f.cutoff(), G);
  model.evaluate(f);
  const FourierForm r = model.residual_modes();
  return detail::residual_sq_gradient(model, r, BetaSpace(f.dim(), f.cutoff()));
}

/// BetaSpace coordinates of ι(X)F for a constant vector field X: d(ι(X)F) = L_X F is the
/// gauge direction of a translation.
inline Eigen::VectorXd translation_potential(const FourierForm& f, const Eigen::VectorXd& X) {
  if (X.size() != f.dim()) throw DimError("translation_potential: vector length != dimension");
  FourierForm b(f.dim(), 2, f.cutoff());
  for (int i = 0; i < f.modes(); ++i) {
    std::vector<Complex> c(static_cast<std::size_t>(f.components()));
    for (int a = 0; a < f.components(); ++a) c[static_cast<std::size_t>(a)] = f(i, a);
    const ComplexForm contracted = interior(X, ComplexForm(f.dim(), 3, std::move(c)));
    for (int a = 0; a < b.components(); ++a) b(i, a) = contracted[a];
  }
  return BetaSpace(f.dim(), f.cutoff()).coordinates(b);
}

// ---------------------------------------------------------------------------
// Second variation at a flat critical point.

struct HessianReport {
  std::vector<double> spectrum;  // ascending
  int kernel_dim = 0;
  int gauge_rank = 0;
  int positive = 0;
  int negative = 0;
  double asymmetry = 0;  // max |H − Hᵀ| of the pointwise block before symmetrization
  double gap = 0;        // smallest |eigenvalue| off the kernel
};

inline void check_critical(const FourierForm& f, Mode mode, int G, double tol) {
  const double r = residual(f, mode, G);
  if (!(r < tol)) throw PreconditionError("not a critical point: residual " + std::to_string(r) + " ≥ " + std::to_string(tol));
}

/// Restriction of the second variation to constant directions: Hess φ (6D) or Q (7D).
inline Eigen::MatrixXd moduli_metric(const FourierForm& f, Mode mode, int G, double tol = 1e-6) {
  check_critical(f, mode, G, tol);
  const Eigen::MatrixXd h = hessian_scale(mode) * pointwise_hessian(mode, f.constant_part());
  return 0.5 * (h + h.transpose());
}

/// Second variation over constant + exact variations with |m|∞ ≤ N, taken at the constant
/// representative Ω₀ of F's class.  Each pair ±m contributes 2·Eᵀ H E twice (Re and Im
/// parts), E an orthonormal basis of m∧Λ².  Gauge rank counts independent d(ι(X)Ω₀) over
/// truncated X; the kernel is counted from the spectrum with relative tolerance `kernel_tol`.
inline HessianReport transverse_hessian(const FourierForm& f, Mode mode, int G, double tol = 1e-6, double kernel_tol = 1e-8) {
  check_critical(f, mode, G, tol);
  const int n = f.dim();
  const RealForm omega0 = f.constant_part();
  const Eigen::MatrixXd raw = hessian_scale(mode) * pointwise_hessian(mode, omega0);
  HessianReport rep;
  rep.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd h = 0.5 * (raw + raw.transpose());
  std::vector<double> ev;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i));
  }
  Eigen::MatrixXd contractions(binomial(n, 2), n);
  for (int j = 0; j < n; ++j) contractions.col(j) = interior(basis_vector(n, j), omega0).as_vector();
  const BetaSpace space(n, f.cutoff());
  for (int idx : space.half_modes()) {
    const Wave m = space.lattice().wave(idx);
    const Eigen::MatrixXd M = wedge_matrix(n, 2, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;
    const Eigen::MatrixXd E = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd block = 2.0 * (E.transpose() * h * E);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      ev.push_back(es.eigenvalues()(i));
      ev.push_back(es.eigenvalues()(i));
    }
    const Eigen::MatrixXd gauge = M * contractions;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gauge);
    qr.setThreshold(1e-10);
    rep.gauge_rank += 2 * static_cast<int>(qr.rank());
  }
  std::sort(ev.begin(), ev.end());
  double mx = 0;
  for (double v : ev) mx = std::max(mx, std::abs(v));
  rep.gap = mx;
  for (double v : ev) {
    if (std::abs(v) <= kernel_tol * mx) {
      ++rep.kernel_dim;
      continue;
    }
    rep.gap = std::min(rep.gap, std::abs(v));
    if (v > 0) ++rep.positive;
    else ++rep.negative;
  }
  rep.spectrum = std::move(ev);
  return rep;
}

// ---------------------------------------------------------------------------
// Critical-point search.

struct CohomologyClass {
  RealForm constant;
};

enum class Method {
  GaussNewton,  // chord step −L⁺r with L the exact linearization at Ω₀, per mode
  Gradient,     // steepest descent on ‖r‖² (exact adjoint gradient)
};

struct FlowConfig {
  int grid = 8;
  int cutoff = 1;
  double perturb = 0.05;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int max_iter = 5000;
  Method method = Method::GaussNewton;
  double initial_step = 1.0;
  double armijo = 1e-4;  // sufficient-decrease constant
  double shrink = 0.5;   // backtracking factor
  int max_backtracks = 40;
  bool hessian = true;   // compute the transverse Hessian on convergence
};

struct FlowReport {
  int dim = 0;
  int cutoff = 0;
  int grid = 0;
  std::uint64_t seed = 0;
  double perturb = 0;
  int iterations = 0;
  int rejected_steps = 0;
  std::vector<double> residual_history;
  double initial_phi = 0;
  double final_phi = 0;
  double final_residual = 0;
  std::string status;  // "converged" or "stalled"
  std::string reason;
  bool has_hessian = false;
  HessianReport hessian;
  Eigen::VectorXd beta;
};

/// The search could not make progress (line search exhausted).  Carries the partial report.
class FlowStalled : public Error {
 public:
  FlowStalled(const std::string& what, FlowReport report) : Error(what), report_(std::move(report)) {}
  const FlowReport& report() const { return report_; }

 private:
  FlowReport report_;
};

/// Per-mode linearization of β ↦ P d H(Ω₀ + dβ) at β = 0: L_m = −(m∧)·DH₀·(m∧), real.
class Linearization {
 public:
  Linearization(Mode mode, const RealForm& omega0, const BetaSpace& space) {
    const int n = dimension(mode);
    const int hdeg = mode == Mode::Six ? 3 : 4;
    const Eigen::MatrixXd DH = pointwise_jacobian(mode, omega0);
    for (int idx : space.half_modes()) {
      const Wave m = space.lattice().wave(idx);
      const Eigen::MatrixXd L = -(wedge_matrix(n, hdeg, m) * DH * wedge_matrix(n, 2, m));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * sv(0)) inv(i) = 1.0 / sv(i);
      pinv_.push_back(svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose());
      L_.push_back(L);
    }
  }

  const Eigen::MatrixXd& matrix(std::size_t h) const { return L_[h]; }
  const Eigen::MatrixXd& pseudo_inverse(std::size_t h) const { return pinv_[h]; }

  /// Orthogonal projector onto the slice (row space of L_m).
  Eigen::MatrixXd slice_projector(std::size_t h) const { return pinv_[h] * L_[h]; }

 private:
  std::vector<Eigen::MatrixXd> L_, pinv_;
};

namespace detail {

inline Eigen::VectorXcd mode_vector(const FourierForm& f, const Wave& m) {
  Eigen::VectorXcd v(f.components());
  for (int c = 0; c < f.components(); ++c) v(c) = f.coeff(m, c);
  return v;
}

}  // namespace detail

/// Random potential in the gauge slice with ‖dβ‖_{L²} = perturb (fixed seed → fixed β).
inline Eigen::VectorXd random_potential(Mode mode, const RealForm& omega0, int N, double perturb, std::uint64_t seed) {
  const BetaSpace space(dimension(mode), N);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(space.size());
  if (perturb == 0 || space.size() == 0) return p;
  auto gen = stream(seed, 0);
  p = normal_vector(gen, space.size());
  const Linearization lin(mode, omega0, space);
  const int c2 = space.components();
  for (std::size_t h = 0; h < space.half_modes().size(); ++h) {
    const Eigen::MatrixXd P = lin.slice_projector(h);
    for (int part = 0; part < 2; ++part) {
      Eigen::VectorXd v(c2);
      for (int c = 0; c < c2; ++c) v(c) = p(2 * (static_cast<Eigen::Index>(h) * c2 + c) + part);
      const Eigen::VectorXd w = P * v;
      for (int c = 0; c < c2; ++c) p(2 * (static_cast<Eigen::Index>(h) * c2 + c) + part) = w(c);
    }
  }
  const double norm = exterior_derivative(space.form(p)).l2_norm();
  if (norm == 0) return p;
  return (perturb / norm) * p;
}

/// Minimizes ‖P d H(Ω₀ + dβ)‖² over β from init_beta with Armijo backtracking; orbit exits
/// reject the trial step.  Returns with status "stalled" when max_iter runs out; throws
/// FlowStalled when no step length gives sufficient decrease.
inline FlowReport descend(const CohomologyClass& cls, const Eigen::VectorXd& init_beta, const FlowConfig& cfg) {
  const Mode mode = mode_for(cls.constant.dim());
  if (cls.constant.degree() != 3) throw DegreeError("descend: class must be a 3-form");
  const int n = dimension(mode);
  const BetaSpace space(n, cfg.cutoff);
  if (init_beta.size() != space.size()) throw DimError("descend: init_beta has wrong length");
  Model model(mode, cfg.cutoff, cfg.grid);

  struct State {
    Eigen::VectorXd p;
    FourierForm r;
    double f = 0, phi = 0;
  };
  auto eval = [&](const Eigen::VectorXd& p) {
    State s;
    s.p = p;
    s.phi = model.evaluate(closed_field(cls.constant, space, p));
    s.r = model.residual_modes();
    const double res = s.r.l2_norm();
    s.f = res * res;
    return s;
  };

  FlowReport rep;
  rep.dim = n;
  rep.cutoff = cfg.cutoff;
  rep.grid = cfg.grid;
  rep.seed = cfg.seed;
  rep.perturb = cfg.perturb;
  State cur = eval(init_beta);  // OrbitError here violates the precondition
  rep.initial_phi = cur.phi;
  rep.residual_history.push_back(std::sqrt(cur.f));

  std::unique_ptr<Linearization> lin;
  if (cfg.method == Method::GaussNewton && std::sqrt(cur.f) >= cfg.tol) lin = std::make_unique<Linearization>(mode, cls.constant, space);
  double step = cfg.initial_step;
  const int c2 = space.components();

  auto finish = [&](const std::string& status, const std::string& reason) {
    rep.status = status;
    rep.reason = reason;
    rep.final_phi = cur.phi;
    rep.final_residual = std::sqrt(cur.f);
    rep.beta = cur.p;
  };

  while (std::sqrt(cur.f) >= cfg.tol && rep.iterations < cfg.max_iter) {
    Eigen::VectorXd dir(space.size());
    double slope = 0;
    if (lin) {
      for (std::size_t h = 0; h < space.half_modes().size(); ++h) {
        const Eigen::VectorXcd rm = detail::mode_vector(cur.r, space.lattice().wave(space.half_modes()[h]));
        const Eigen::VectorXcd d = -(lin->pseudo_inverse(h).cast<Complex>() * rm);
        const Eigen::VectorXcd Ld = lin->matrix(h).cast<Complex>() * d;
        slope += 4.0 * (rm.adjoint() * Ld)(0).real();
        for (int c = 0; c < c2; ++c) {
          dir(2 * (static_cast<Eigen::Index>(h) * c2 + c)) = d(c).real();
          dir(2 * (static_cast<Eigen::Index>(h) * c2 + c) + 1) = d(c).imag();
        }
      }
      step = cfg.initial_step;
    } else {
      const Eigen::VectorXd g = detail::residual_sq_gradient(model, cur.r, space);
      // The adjoint pass overwrote the model's output grid; nothing else reads it.
      dir = -g;
      slope = -g.squaredNorm();
      step = std::min(cfg.initial_step * 1e6, 2.0 * step);
    }
    if (!(slope < 0)) {
      finish("stalled", "no descent direction");
      throw FlowStalled("descend: no descent direction at iteration " + std::to_string(rep.iterations), rep);
    }
    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt, step *= cfg.shrink) {
      State trial;
      try {
        trial = eval(cur.p + step * dir);
      } catch (const OrbitError&) {
        ++rep.rejected_steps;
        continue;
      }
      if (trial.f <= cur.f + cfg.armijo * step * slope) {
        cur = std::move(trial);
        accepted = true;
        break;
      }
      ++rep.rejected_steps;
    }
    if (!accepted) {
      finish("stalled", "line search failed");
      throw FlowStalled("descend: line search failed at iteration " + std::to_string(rep.iterations), rep);
    }
    ++rep.iterations;
    rep.residual_history.push_back(std::sqrt(cur.f));
  }
  const bool converged = std::sqrt(cur.f) < cfg.tol;
  finish(converged ? "converged" : "stalled", converged ? "" : "max_iter reached");
  if (converged && cfg.hessian) {
    rep.hessian = transverse_hessian(closed_field(cls.constant, space, cur.p), mode, cfg.grid, cfg.tol);
    rep.has_hessian = true;
  }
  return rep;
}

}  // namespace stable_forms::torus
