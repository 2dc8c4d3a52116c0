#include <gtest/gtest.h>

#include "stable_forms/forms7.hpp"
#include "stable_forms/lie.hpp"
#include "support.hpp"

using namespace stable_forms;
using testing_support::goldens;
using testing_support::random_form;
using testing_support::well_conditioned;

namespace {

RealForm random_positive(std::mt19937_64& gen) { return pullback(well_conditioned(gen, 7), seven::phi_std()); }

RealForm from_golden_terms(const nlohmann::json& terms, int degree) {
  RealForm f(7, degree);
  for (const auto& [key, value] : terms.items()) {
    std::vector<int> idx;
    for (char c : key) idx.push_back(c - '0');
    f += RealForm::monomial(7, idx, value.get<double>());
  }
  return f;
}

}  // namespace

TEST(Forms7, StandardFormInducesIdentity) {
  const seven::G2Structure s = seven::g2_metric(seven::phi_std());
  EXPECT_LT((s.g - Eigen::Matrix<double, 7, 7>::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.vol, 1.0, 1e-12);
  EXPECT_NEAR(s.phi, 1.0, 1e-12);
  EXPECT_EQ(s.orientation, 1);
  EXPECT_TRUE(goldens()["corrected_b_is_identity"].get<bool>());
}

TEST(Forms7, PrintedStandardFormIsNotPositive) {
  const seven::StandardFormResolution r = seven::resolve_standard_form();
  EXPECT_EQ(r.adopted, "corrected");
  EXPECT_FALSE(r.printed_identity);
  EXPECT_NEAR(r.printed_det_b, goldens()["printed_b_det"].get<double>(), 1e-12);
  EXPECT_FALSE(seven::is_positive(seven::phi_std_printed()));
  EXPECT_THROW(seven::g2_metric(seven::phi_std_printed()), OrbitError);
}

TEST(Forms7, StarOfStandardFormMatchesOracle) {
  const RealForm expect = from_golden_terms(goldens()["star_phi_std"], 4);
  EXPECT_LT((seven::star_omega(seven::phi_std()) - expect).norm(), 1e-12);
}

TEST(Forms7, MetricEquivariance) {
  auto gen = stream(41);
  for (int t = 0; t < 30; ++t) {
    const RealForm w = random_positive(gen);
    const Eigen::MatrixXd A = well_conditioned(gen, 7);
    const seven::G2Structure s = seven::g2_metric(w), sa = seven::g2_metric(pullback(A, w));
    const Eigen::MatrixXd expect = A.transpose() * Eigen::MatrixXd(s.g) * A;
    EXPECT_LT((Eigen::MatrixXd(sa.g) - expect).cwiseAbs().maxCoeff() / expect.cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(sa.phi, std::abs(A.determinant()) * s.phi, 1e-9 * sa.phi);
  }
}

TEST(Forms7, NegativeOrientation) {
  const seven::G2Structure s = seven::g2_metric(-1.0 * seven::phi_std());
  EXPECT_EQ(s.orientation, -1);
  EXPECT_NEAR(s.phi, 1.0, 1e-12);
}

TEST(Forms7, NormIdentityRecordsSeven) {
  auto gen = stream(42);
  for (int t = 0; t < 20; ++t) {
    const RealForm w = random_positive(gen);
    const seven::G2Structure s = seven::g2_metric(w);
    const double lhs = s.orientation * top_coefficient(wedge(w, seven::star_omega(w)));
    EXPECT_NEAR(lhs / s.phi, goldens()["omega_wedge_star"].get<double>(), 1e-9);
  }
}

TEST(Forms7, DphiFactor) {
  auto gen = stream(43);
  EXPECT_NEAR(seven::kDphiFactor, goldens()["dphi_factor"].get<double>(), 1e-9);
  for (int t = 0; t < 20; ++t) {
    const RealForm w = random_positive(gen);
    RealForm u = random_form(gen, 7, 3);
    u = (w.norm() / u.norm()) * u;
    const double h = 1e-6;
    const double fd = (seven::phi(w + h * u) - seven::phi(w - h * u)) / (2 * h);
    const seven::G2Structure s = seven::g2_metric(w);
    const double exact = seven::kDphiFactor * s.orientation * top_coefficient(wedge(u, seven::star_omega(w)));
    EXPECT_LT(std::abs(fd - exact) / s.phi, 1e-6);
    EXPECT_LT((seven::phi_gradient(w) - seven::kDphiFactor * s.orientation * (wedge_pairing_matrix(7, 3) * seven::star_omega(w).as_vector())).norm(), 1e-15 * s.phi);
  }
}

TEST(Forms7, DThetaMatchesFiniteDifference) {
  auto gen = stream(44);
  for (int t = 0; t < 10; ++t) {
    const RealForm w = random_positive(gen);
    RealForm u = random_form(gen, 7, 3);
    u = (w.norm() / u.norm()) * u;
    const double h = 1e-6;
    const RealForm fd = (1.0 / (2 * h)) * (seven::star_omega(w + h * u) - seven::star_omega(w - h * u));
    const RealForm exact = seven::d_theta(w, u);
    EXPECT_LT((fd - exact).norm() / exact.norm(), 1e-7);
  }
}

TEST(Forms7, SkewDirectionsCommuteWithStar) {
  auto gen = stream(45);
  const RealForm w = random_positive(gen);
  const seven::G2Structure s = seven::g2_metric(w);
  // a skew for g: a = g⁻¹·S with S antisymmetric.
  const Eigen::MatrixXd S = normal_matrix(gen, 7, 7);
  const Eigen::MatrixXd a = Eigen::MatrixXd(s.g).inverse() * (S - S.transpose());
  const RealForm lhs = seven::d_theta(w, lie_action(a, w));
  const RealForm rhs = lie_action(a, seven::star_omega(w));
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-10);
}

TEST(Forms7, QuadraticFormSpectrum) {
  const seven::Spectrum sp = seven::hessian7_signature(seven::phi_std());
  const auto& golden = goldens()["q_eigs_from_phi_hessian"];
  ASSERT_EQ(sp.eigenvalues.size(), 35);
  for (int i = 0; i < 34; ++i) EXPECT_NEAR(sp.eigenvalues(i), golden[static_cast<std::size_t>(i)].get<double>(), 1e-8);
  EXPECT_NEAR(sp.eigenvalues(34), 4.0 / 3.0, 1e-8);
  EXPECT_EQ(sp.positive, 8);
  EXPECT_EQ(sp.negative, 27);
  auto gen = stream(46);
  const seven::Spectrum sp2 = seven::hessian7_signature(random_positive(gen));
  EXPECT_EQ(sp2.positive, 8);
  EXPECT_EQ(sp2.negative, 27);
}

TEST(Forms7, ProjectionsSumAndAreOrthogonal) {
  auto gen = stream(47);
  const RealForm w = random_positive(gen);
  const RealForm alpha = random_form(gen, 7, 3);
  const seven::Proj3Split p = seven::project_137(w, alpha);
  EXPECT_LT((p.p1 + p.p7 + p.p27 - alpha).norm(), 1e-10 * alpha.norm());
  const MetricG g = seven::g2_metric(w).metric();
  EXPECT_NEAR(inner_product(g, p.p1, p.p7), 0.0, 1e-9 * alpha.norm() * alpha.norm());
  EXPECT_NEAR(inner_product(g, p.p7, p.p27), 0.0, 1e-9 * alpha.norm() * alpha.norm());
  const seven::G2Operators op = seven::g2_operators(w);
  EXPECT_NEAR(op.p7.trace(), 7.0, 1e-9);
  EXPECT_NEAR(op.p27.trace(), 27.0, 1e-9);
}

TEST(Forms7, LegendreDuality) {
  EXPECT_NEAR(seven::kPsiC0, goldens()["psi_c0"].get<double>(), 1e-12);
  EXPECT_NEAR(std::abs(seven::c_theta(seven::star_omega(seven::phi_std())).determinant()),
              std::abs(goldens()["det_c_star_phi_std"].get<double>()), 1e-9);
  auto gen = stream(48);
  for (int t = 0; t < 20; ++t) {
    const RealForm w = random_positive(gen);
    const double phi = seven::phi(w);
    EXPECT_LT(std::abs(6 * phi - 1.75 * seven::dual_functional(seven::star_omega(w))), 1e-8 * phi);
    EXPECT_GT(seven::c_theta(seven::star_omega(w)).determinant(), 0.0);
  }
}

TEST(Forms7, SubbundleRelation) {
  // With the orientation induced by b: ∗χ = χ∧Ω on {χ : χ∧∗Ω = 0}.
  auto gen = stream(49);
  const RealForm w = random_positive(gen);
  const seven::G2Structure s = seven::g2_metric(w);
  const Eigen::MatrixXd basis = seven::g2_subbundle(w);
  ASSERT_EQ(basis.cols(), 14);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    const RealForm chi = RealForm::from_vector(7, 2, basis.col(c));
    EXPECT_LT((hodge_star(s.metric(), s.volume_element(), chi) - wedge(chi, w)).norm(), 1e-9);
  }
}
