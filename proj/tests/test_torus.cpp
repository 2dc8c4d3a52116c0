#include <cstdlib>

#include <gtest/gtest.h>

#include "stable_forms/forms6.hpp"
#include "stable_forms/forms7.hpp"
#include "stable_forms/torus.hpp"
#include "support.hpp"

using namespace stable_forms;
using namespace stable_forms::torus;

namespace {

FourierForm random_field(std::mt19937_64& gen, int n, int k, int N) {
  FourierForm f(n, k, N);
  for (int i = 0; i < f.modes(); ++i)
    for (int c = 0; c < f.components(); ++c) {
      const Eigen::VectorXd z = normal_vector(gen, 2);
      f.set(f.lattice().wave(i), c, Complex(z(0), z(1)));
    }
  return f;
}

}  // namespace

TEST(Torus, LatticeIndexing) {
  const Lattice L(6, 2);
  EXPECT_EQ(L.size(), 15625);
  for (int i = 0; i < L.size(); i += 97) {
    EXPECT_EQ(L.index(L.wave(i)), i);
    Wave neg = L.wave(i);
    for (int a = 0; a < 6; ++a) neg[static_cast<std::size_t>(a)] = -neg[static_cast<std::size_t>(a)];
    EXPECT_EQ(L.index(neg), L.negate(i));
  }
  Wave far{};
  far[0] = 3;
  EXPECT_EQ(L.index(far), -1);
  EXPECT_EQ(L.wave(L.center()), Wave{});
}

TEST(Torus, FieldsStayReal) {
  auto gen = stream(51);
  const FourierForm f = random_field(gen, 6, 2, 1);
  EXPECT_LT(f.reality_defect(), 1e-15);
  EXPECT_LT(exterior_derivative(f).reality_defect(), 1e-15);
  EXPECT_LT(exterior_derivative_adjoint(f).reality_defect(), 1e-15);
}

TEST(Torus, DerivativeSquaresToZeroAndIsAdjoint) {
  auto gen = stream(52);
  for (int n : {6, 7}) {
    const FourierForm b = random_field(gen, n, 2, 1);
    EXPECT_LT(exterior_derivative(exterior_derivative(b)).l2_norm(), 1e-13 * b.l2_norm());
    const FourierForm c = random_field(gen, n, 3, 1);
    // ⟨dβ, γ⟩ = ⟨β, d*γ⟩ (real inner products on mode coefficients).
    const FourierForm db = exterior_derivative(b), dsc = exterior_derivative_adjoint(c);
    Complex lhs = 0, rhs = 0;
    for (int i = 0; i < db.modes(); ++i) {
      for (int k = 0; k < db.components(); ++k) lhs += db(i, k) * std::conj(c(i, k));
      for (int k = 0; k < b.components(); ++k) rhs += b(i, k) * std::conj(dsc(i, k));
    }
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * (std::abs(lhs) + 1));
  }
}

TEST(Torus, GridRequirement) {
  EXPECT_THROW(check_grid(1, 4), PreconditionError);
  EXPECT_NO_THROW(check_grid(1, 5));
  EXPECT_THROW(check_grid(2, 8), PreconditionError);
  EXPECT_EQ(filter_cutoff(8), 2);
}

TEST(Torus, ConstantFieldsReproducePointwiseValues) {
  EXPECT_NEAR(functional_value(FourierForm::constant(six::phi_complex(), 0), Mode::Six, 2), 8.0, 1e-12);
  EXPECT_NEAR(functional_value(FourierForm::constant(seven::phi_std(), 0), Mode::Seven, 2), 1.0, 1e-12);
  EXPECT_LT(residual(FourierForm::constant(six::phi_complex(), 1), Mode::Six, 5), 1e-14);
  EXPECT_THROW(functional_value(FourierForm::constant(six::phi_real(), 0), Mode::Six, 2), OrbitError);
}

TEST(Torus, GradientsMatchFiniteDifferences) {
  for (Mode mode : {Mode::Six, Mode::Seven}) {
    const int n = dimension(mode);
    const RealForm w0 = n == 6 ? six::phi_complex() : seven::phi_std();
    const BetaSpace sp(n, 1);
    const Eigen::VectorXd p = random_potential(mode, w0, 1, 0.1, 5);
    const int G = 5;
    const FourierForm F = closed_field(w0, sp, p);
    const Eigen::VectorXd g = functional_gradient(F, mode, G), rg = residual_gradient(F, mode, G);
    const double h = 1e-5;
    for (int k : {0, 17, sp.size() / 2, sp.size() - 1}) {
      Eigen::VectorXd pu = p, pd = p;
      pu(k) += h;
      pd(k) -= h;
      const FourierForm Fu = closed_field(w0, sp, pu), Fd = closed_field(w0, sp, pd);
      const double fd = (functional_value(Fu, mode, G) - functional_value(Fd, mode, G)) / (2 * h);
      EXPECT_LT(std::abs(fd - g(k)) / g.cwiseAbs().maxCoeff(), 1e-5) << "mode " << n << " coordinate " << k;
      const double ru = residual(Fu, mode, G), rd = residual(Fd, mode, G);
      EXPECT_LT(std::abs((ru * ru - rd * rd) / (2 * h) - rg(k)) / rg.cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

TEST(Torus, ModuliMetricAtZeroCutoffIsPointwiseHessian) {
  const RealForm c6 = six::phi_complex(), c7 = seven::phi_std();
  const Eigen::MatrixXd h6 = moduli_metric(FourierForm::constant(c6, 0), Mode::Six, 2);
  const Eigen::MatrixXd h7 = moduli_metric(FourierForm::constant(c7, 0), Mode::Seven, 2);
  EXPECT_LT((h6 - six::special_kahler(c6).gHess).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((h7 - seven::hessian7(c7)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Torus, TransverseHessianKernelIsGauge) {
  const HessianReport r = transverse_hessian(FourierForm::constant(six::phi_complex(), 1), Mode::Six, 5);
  EXPECT_EQ(r.kernel_dim, r.gauge_rank);
  EXPECT_GT(r.gauge_rank, 0);
  EXPECT_LT(r.asymmetry, 1e-8);
  EXPECT_GT(r.gap, 1e-6);
  EXPECT_THROW(transverse_hessian(closed_field(six::phi_complex(), BetaSpace(6, 1),
                                               random_potential(Mode::Six, six::phi_complex(), 1, 0.05, 1)),
                                  Mode::Six, 5),
               PreconditionError);
}

TEST(Torus, FlowConvergesSixDimensions) {
  FlowConfig cfg;
  cfg.grid = 8;
  cfg.cutoff = 1;
  cfg.perturb = 0.05;
  cfg.seed = 42;
  const RealForm w0 = six::phi_complex();
  const Eigen::VectorXd b0 = random_potential(Mode::Six, w0, 1, cfg.perturb, cfg.seed);
  EXPECT_NEAR(exterior_derivative(BetaSpace(6, 1).form(b0)).l2_norm(), cfg.perturb, 1e-12);
  const FlowReport r = descend({w0}, b0, cfg);
  EXPECT_EQ(r.status, "converged");
  EXPECT_LT(r.final_residual, 1e-6);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) EXPECT_LE(r.residual_history[i], r.residual_history[i - 1]);
  ASSERT_TRUE(r.has_hessian);
  EXPECT_EQ(r.hessian.kernel_dim, r.hessian.gauge_rank);
  // Exact perturbations do not change the class, and the functional sits at its constant value.
  EXPECT_NEAR(r.final_phi, 8.0, 1e-6);
}

TEST(Torus, ZeroPerturbationTakesNoSteps) {
  FlowConfig cfg;
  cfg.perturb = 0;
  cfg.hessian = false;
  const Eigen::VectorXd b0 = random_potential(Mode::Six, six::phi_complex(), 1, 0.0, 42);
  const FlowReport r = descend({six::phi_complex()}, b0, cfg);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.status, "converged");
}

TEST(Torus, BudgetExhaustionIsReported) {
  FlowConfig cfg;
  cfg.max_iter = 1;
  cfg.hessian = false;
  const Eigen::VectorXd b0 = random_potential(Mode::Six, six::phi_complex(), 1, 0.05, 42);
  const FlowReport r = descend({six::phi_complex()}, b0, cfg);
  EXPECT_EQ(r.status, "stalled");
  EXPECT_EQ(r.iterations, 1);
}

TEST(Torus, ResultsIndependentOfThreadCount) {
  FlowConfig cfg;
  cfg.grid = 5;
  cfg.hessian = false;
  const Eigen::VectorXd b0 = random_potential(Mode::Seven, seven::phi_std(), 1, 0.05, 7);
  setenv("STABLE_FORMS_THREADS", "1", 1);
  const FlowReport a = descend({seven::phi_std()}, b0, cfg);
  setenv("STABLE_FORMS_THREADS", "3", 1);
  const FlowReport b = descend({seven::phi_std()}, b0, cfg);
  unsetenv("STABLE_FORMS_THREADS");
  EXPECT_EQ(a.residual_history, b.residual_history);
  EXPECT_EQ(a.final_phi, b.final_phi);
}
