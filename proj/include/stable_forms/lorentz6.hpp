#pragma once

// Self-dual 3-forms for a metric of signature (5,1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stable_forms/forms6.hpp"
#include "stable_forms/parallel.hpp"
#include "stable_forms/rng.hpp"

namespace stable_forms::lorentz {

using six::kDim;
using six::kThreeForms;

/// diag(−1,1,1,1,1,1): e0 (θ1 internally) is the timelike axis.
inline MetricG metric() { return MetricG::lorentzian(kDim); }

/// e0∧e1∧…∧e5 with coefficient 1.
inline VolumeElement volume() { return {1.0}; }

struct SDSplit {
  RealForm plus;
  RealForm minus;
};

inline SDSplit sd_split(const RealForm& omega, const MetricG& g = metric(), VolumeElement vol = volume()) {
  six::require_three_form(omega, "sd_split");
  if (g.dim() != kDim || g.positive() != 5 || g.negative() != 1)
    throw MetricError("sd_split: metric must have signature (5,1)");
  const RealForm s = hodge_star(g, vol, omega);
  return {0.5 * (omega + s), 0.5 * (omega - s)};
}

inline RealForm star(const RealForm& omega) { return hodge_star(metric(), volume(), omega); }

/// Ω = α + ∗α for self-dual Ω with λ > 0, with α the factor whose 3-plane contains a
/// timelike direction (signature (2,1)).  In the Gram-determinant convention such α
/// has (α,α) < 0, so this is the reverse of the orientation ordering of decompose6.
struct SDDecomposition {
  RealForm alpha;
  RealForm beta;
};

inline SDDecomposition sd_decompose(const RealForm& omega) {
  const six::Decomposition6 d = six::decompose6(omega);
  if (d.kind != six::Decomposition6::Kind::RealPair) throw OrbitError("sd_decompose: requires λ(Ω) > 0");
  RealForm a = real_part(d.alpha), b = real_part(d.beta);
  if (inner_product(metric(), a, a) > inner_product(metric(), b, b)) std::swap(a, b);
  return {a, b};
}

/// Ω̂ = α − ∗α with the (2,1)-first ordering; on Λ₊ this is −six::hat(Ω), and
/// Ω̂ = −dφ under the identification Λ₋ ≅ Λ₊* given by ω.
inline RealForm hat(const RealForm& omega) { return -1.0 * six::hat(omega); }

inline RealForm random_self_dual(std::mt19937_64& gen) {
  return sd_split(RealForm::from_vector(kDim, 3, normal_vector(gen, kThreeForms))).plus;
}

inline RealForm random_anti_self_dual(std::mt19937_64& gen) {
  return sd_split(RealForm::from_vector(kDim, 3, normal_vector(gen, kThreeForms))).minus;
}

struct Report {
  std::string check;
  int samples = 0;
  double max_residual = 0;
  int violations = 0;
};

namespace detail {

struct Sample {
  double residual = 0;
  bool violation = false;
};

/// Runs `one(gen)` on independent streams and reduces with max / count, in index order.
template <class F>
Report run(std::string name, int samples, std::uint64_t seed, F one) {
  std::vector<Sample> out(static_cast<std::size_t>(std::max(samples, 0)));
  parallel_for(samples, [&](int i) {
    auto gen = stream(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = one(gen);
  });
  Report r{std::move(name), samples, 0.0, 0};
  for (const auto& s : out) {
    r.max_residual = std::max(r.max_residual, s.residual);
    if (s.violation) ++r.violations;
  }
  return r;
}

/// Self-dual sample with λ outside the dead band (resampled otherwise).
inline RealForm stable_self_dual(std::mt19937_64& gen) {
  for (;;) {
    RealForm omega = random_self_dual(gen);
    if (six::classify6(omega) == six::Orbit6::Positive) return omega;
  }
}

}  // namespace detail

/// λ ≥ 0 on Λ₊, and Ω = α + ∗α whenever λ > 0.  Residual: ‖∗α − β‖/‖Ω‖ (and −λ/‖Ω‖⁴
/// if λ is negative).
inline Report check_sd_lambda(int samples, std::uint64_t seed) {
  return detail::run("lambda", samples, seed, [](std::mt19937_64& gen) {
    const RealForm omega = random_self_dual(gen);
    const double n = omega.norm();
    const double lambda = six::lambda_inv(omega);
    detail::Sample s;
    if (lambda < -six::kDeadBand * std::pow(n, 4)) {
      s.residual = -lambda / std::pow(n, 4);
      s.violation = true;
      return s;
    }
    if (six::in_dead_band(lambda, n)) return s;
    const six::Decomposition6 d = six::decompose6(omega);
    const RealForm a = real_part(d.alpha), b = real_part(d.beta);
    s.residual = (star(a) - b).norm() / n;
    s.violation = d.kind != six::Decomposition6::Kind::RealPair || s.residual > 1e-8;
    return s;
  });
}

/// Ω̂ is anti-self-dual for self-dual Ω.  Residual: ‖∗Ω̂ + Ω̂‖/‖Ω‖.
inline Report check_hat_antiselfdual(int samples, std::uint64_t seed) {
  return detail::run("hat", samples, seed, [](std::mt19937_64& gen) {
    const RealForm omega = detail::stable_self_dual(gen);
    const RealForm h = hat(omega);
    detail::Sample s;
    s.residual = (star(h) + h).norm() / omega.norm();
    s.violation = s.residual > 1e-8;
    return s;
  });
}

enum class Subspace { Plus, Minus };

/// Λ± are isotropic for ω.  Residual: |ω(x,y)|/(‖x‖‖y‖) for random pairs.
inline Report check_lagrangian(Subspace which, int samples, std::uint64_t seed) {
  return detail::run(which == Subspace::Plus ? "lagrangian_plus" : "lagrangian_minus", samples, seed,
                     [which](std::mt19937_64& gen) {
                       auto draw = [&] { return which == Subspace::Plus ? random_self_dual(gen) : random_anti_self_dual(gen); };
                       const RealForm x = draw(), y = draw();
                       detail::Sample s;
                       s.residual = std::abs(six::symplectic_pairing(x, y)) / (x.norm() * y.norm());
                       s.violation = s.residual > 1e-10;
                       return s;
                     });
}

/// Tangents to {Ω + f(φ(Ω))Ω̂ : Ω ∈ Λ₊, λ > 0} are ω-isotropic.  Tangent images are
/// central differences with step fd_step·‖Ω‖.  Residual: |ω(U,V)|/(‖U‖‖V‖).
inline Report check_lagrangian_graph(const std::function<double(double)>& f, int samples, std::uint64_t seed,
                                     double fd_step = 1e-5, double tol = 1e-6) {
  return detail::run("graph", samples, seed, [&f, fd_step, tol](std::mt19937_64& gen) {
    const RealForm omega = detail::stable_self_dual(gen);
    const RealForm u = random_self_dual(gen), v = random_self_dual(gen);
    auto graph = [&f](const RealForm& x) { return f(six::phi(x)) * hat(x); };
    const double h = fd_step * omega.norm();
    auto push = [&](const RealForm& t) {
      const RealForm tn = (1.0 / t.norm()) * t;
      return tn + (1.0 / (2 * h)) * (graph(omega + h * tn) - graph(omega - h * tn));
    };
    const RealForm U = push(u), V = push(v);
    detail::Sample s;
    s.residual = std::abs(six::symplectic_pairing(U, V)) / (U.norm() * V.norm());
    s.violation = s.residual > tol;
    return s;
  });
}

/// Ω̂ = −dφ on Λ₊ via ω: dφ(u) = −ω(Ω̂, u) for u ∈ Λ₊.  Residual: relative FD error.
inline Report check_hat_gradient(int samples, std::uint64_t seed, double fd_step = 1e-5) {
  return detail::run("hat_gradient", samples, seed, [fd_step](std::mt19937_64& gen) {
    const RealForm omega = detail::stable_self_dual(gen);
    RealForm u = random_self_dual(gen);
    u = (omega.norm() / u.norm()) * u;
    const double h = fd_step;
    const double fd = (six::phi(omega + h * u) - six::phi(omega - h * u)) / (2 * h);
    const double exact = -six::symplectic_pairing(hat(omega), u);
    detail::Sample s;
    s.residual = std::abs(fd - exact) / std::max(std::abs(exact), six::phi(omega));
    s.violation = s.residual > 1e-5;
    return s;
  });
}

}  // namespace stable_forms::lorentz
