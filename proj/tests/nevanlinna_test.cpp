#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <random>

#include "hypcert/nevanlinna/nevanlinna.hpp"

using namespace hypcert;

namespace {

double oracle_average(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 2 * M_PI, 15, 1e-13) / (2 * M_PI);
}

RationalFunction random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 4), c(-5, 5);
  for (;;) {
    GaussDense n(deg(rng) + 1), d(deg(rng) + 1);
    for (auto& x : n) x = GaussianRational(Rational(c(rng)), Rational(c(rng)));
    for (auto& x : d) x = GaussianRational(Rational(c(rng)), Rational(c(rng)));
    if (is_zero(n.back()) || is_zero(d.back())) continue;
    auto F = RationalFunction::make(n, d);
    if (F.degree() >= 1) return F;
  }
}

}  // namespace

TEST(CircleAverage, Examples) {
  for (double r : {0.5, 2.0, 10.0}) {
    EXPECT_NEAR(circle_average([](cplx) { return log_plus(3.0); }, r).value, std::log(3.0), 1e-14);
    EXPECT_NEAR(circle_average([](cplx z) { return log_plus(std::abs(z)); }, r).value, log_plus(r), 1e-14);
  }
  auto f = [](cplx z) { return log_plus(std::abs(z * z + 1.0)); };
  auto avg = circle_average(f, 2.0);
  double oracle = oracle_average([&](double t) { return f(std::polar(2.0, t)); });
  EXPECT_NEAR(avg.value, oracle, 1e-8);
  EXPECT_NEAR(avg.value, 2 * std::log(2.0), 1e-8);  // Jensen
  EXPECT_LT(avg.error, 1e-8);
}

TEST(CircleAverage, NudgeAndRejection) {
  auto F = MeromorphicSample::from_text("1/(z - 1)");
  auto avg = circle_average([&](cplx z) { return log_plus(std::abs(F.evaluator(z))); }, 1.0, 64);
  EXPECT_FALSE(avg.nudged_angles.empty());
  EXPECT_DOUBLE_EQ(avg.nudged_angles[0], 0.0);
  EXPECT_THROW(circle_average([](cplx) { return std::nan(""); }, 1.0, 16), Error);
  EXPECT_THROW(circle_average([](cplx) { return 0.0; }, -1.0), Error);
}

TEST(CountingFunction, Examples) {
  const double e = std::exp(1.0);
  auto F = MeromorphicSample::from_text("1/(z - 1)");
  EXPECT_NEAR(counting_function(F, e), 1.0, 1e-15);
  auto G = MeromorphicSample::from_text("1/(z - 1)^3");
  EXPECT_NEAR(counting_function(G, e, 2), 2.0, 1e-12);
  EXPECT_NEAR(counting_function(G, e), 3.0, 1e-12);
  auto H = MeromorphicSample::from_text("z/((z - 1)^2*(z - 2))");
  EXPECT_TRUE(H.poles_certified);
  EXPECT_NEAR(counting_function(H, 4.0), 2 * std::log(4.0) + std::log(2.0), 1e-12);
  EXPECT_NEAR(counting_function(H, 1.5), 2 * std::log(1.5), 1e-12);

  auto P = MeromorphicSample::plugin("plugin", [](cplx z) { return 1.0 / (z - 2.0); }, {{cplx(2), 0, 1}}, 5.0);
  EXPECT_NEAR(counting_function(P, 4.0), std::log(2.0), 1e-15);
  EXPECT_THROW(counting_function(P, 6.0), Error);
}

TEST(CountingFunction, MatchesClosedFormSums) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> loc(-6, 6), mult(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    // den = prod (z - p_i)^{m_i} with distinct integer poles
    std::vector<std::pair<int, int>> poles;
    GaussianPoly den = GaussianPoly::constant(GaussianRational(1));
    auto z = GaussianPoly::variable("z");
    for (int k = 0; k < 3; ++k) {
      int p = loc(rng);
      bool dup = false;
      for (auto& q : poles) dup = dup || q.first == p;
      if (dup) continue;
      int m = mult(rng);
      poles.push_back({p, m});
      den = den * (z - GaussianPoly::constant(GaussianRational(p))).pow(m);
    }
    auto F = MeromorphicSample::from_text("(z^7 + 100)/(" + den.to_string() + ")");
    for (double r : {0.5, 1.0, 3.3, 7.0}) {
      double closed = 0;
      for (auto [p, m] : poles) {
        if (p == 0) closed += m * std::log(r);
        else if (std::abs(p) <= r) closed += m * std::log(r / std::abs(p));
      }
      EXPECT_NEAR(counting_function(F, r), closed, 1e-12);
    }
  }
}

TEST(Characteristic, Examples) {
  auto grid = log_grid(1.0, 1000.0, 16);
  auto id = characteristic(MeromorphicSample::from_text("z"), grid);
  for (const auto& e : id.entries) EXPECT_NEAR(e.T, log_plus(e.r), 1e-12);
  auto inv = characteristic(MeromorphicSample::from_text("1/(z)"), grid);
  for (const auto& e : inv.entries) EXPECT_NEAR(e.T, std::log(e.r), 1e-12);

  auto q = characteristic(MeromorphicSample::from_text("rational:(z^2+1)/(z-3)"), log_grid(1.0, 1000.0, 32));
  ASSERT_TRUE(q.degree_slope);
  EXPECT_EQ(*q.degree, 2);
  EXPECT_NEAR(*q.degree_slope, 2.0, 0.05);
  EXPECT_TRUE(q.n_nondecreasing);
  EXPECT_TRUE(q.poles_certified);
  auto js = to_json(q);
  EXPECT_EQ(js["entries"].size(), 32U);
  EXPECT_TRUE(js["entries"][0].contains("quad_error"));
  EXPECT_THROW(characteristic(MeromorphicSample::from_text("z"), {2.0, 1.0}), Error);
}

TEST(Characteristic, DegreeSlopeOnRandomRationals) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto F = random_rational(rng);
    auto p = characteristic(MeromorphicSample::from_rational(F), log_grid(1.0, 1e6, 24));
    EXPECT_NEAR(*p.degree_slope, F.degree(), 0.05) << F.to_string();
  }
}

TEST(RationalFunction, ParseAndReduce) {
  auto F = RationalFunction::parse("(z^2 - 1)/(z - 1)");
  EXPECT_EQ(dense::degree(F.den), 0);
  EXPECT_EQ(F.degree(), 1);
  auto G = RationalFunction::parse("rational:((1,2)*w + 1)/(w^2)");
  EXPECT_EQ(G.var, "w");
  EXPECT_NEAR(std::abs(G(cplx(1, 0)) - cplx(2, 2)), 0, 1e-15);
  EXPECT_THROW(RationalFunction::parse("z/(z*y)"), Error);
  EXPECT_THROW(RationalFunction::parse("z/(0)"), Error);
  auto H = F.reciprocal_shift(GaussianRational(2));  // 1/(z + 1 - 2)
  EXPECT_NEAR(std::abs(H(cplx(3, 0)) - 0.5), 0, 1e-15);
}

TEST(FirstMainTheorem, DifferenceSettlesPastAllZerosAndPoles) {
  // T(r,1/(F-a)) - T(r,F) is bounded; once r exceeds the moduli of every
  // zero and pole of F and F-a it is constant up to O(1/r)
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    auto F = random_rational(rng);
    for (const auto& a : {GaussianRational(0), GaussianRational(1), GaussianRational(Rational(0), Rational(1))}) {
      auto G = F.reciprocal_shift(a);
      double R0 = 1;
      for (const auto* S : {&F, &G}) {
        bool ok;
        for (const auto& p : rational_poles(*S, ok)) R0 = std::max(R0, std::abs(p.center) + p.radius);
      }
      auto tail = log_grid(10 * R0, 1e4 * R0, 16);
      auto rep = first_main_theorem_check(F, a, tail);
      EXPECT_LT(std::abs(rep.slope), 0.02) << F.to_string() << " a=" << to_text(a);
      auto full = first_main_theorem_check(F, a, log_grid(1.0, 1000.0, 32));
      EXPECT_LT(full.sup_abs_difference, 10.0);
    }
  }
}

TEST(LogarithmicDerivative, ProximityIsSmallAgainstT) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    auto F = random_rational(rng);
    auto sample = MeromorphicSample::from_rational(F);
    auto D = MeromorphicSample::from_rational(F.log_derivative());
    double prev = 1e300;
    for (double r : {1e2, 1e4, 1e6}) {
      double T = proximity(sample, r, 512) + counting_function(sample, r);
      double ratio = proximity(D, r, 512) / T;
      EXPECT_LE(ratio, prev + 1e-12);
      prev = ratio;
    }
    EXPECT_LT(prev, 1e-3) << F.to_string();
  }
}

TEST(Theta, TransformationResidual) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (cplx tau : {cplx(0, 1), cplx(0.3, 0.8)}) {
    EllipticModel M(tau);
    for (int i = 0; i < 100; ++i) {
      auto r = transformation_residual(M, cplx(u(rng), u(rng)));
      EXPECT_LT(r.shift_one, 1e-12);
      EXPECT_LT(r.shift_tau, 1e-12);
    }
    EXPECT_LT(std::abs(M.theta((1.0 + tau) / 2.0)), 1e-14);
    // reduced evaluation agrees with the direct series
    for (int i = 0; i < 20; ++i) {
      cplx z(3 * u(rng), 2 * u(rng));
      EXPECT_NEAR(M.log_abs_theta(z), std::log(std::abs(M.theta(z))), 1e-9);
    }
  }
  EXPECT_THROW(EllipticModel(cplx(1, 0)), Error);
}

TEST(Theta, NormIsLatticeInvariant) {
  EllipticModel M(cplx(0.2, 1.1), cplx(0.1, 0.3));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    cplx z(u(rng), u(rng));
    EXPECT_NEAR(M.log_norm(z + 1.0), M.log_norm(z), 1e-9);
    EXPECT_NEAR(M.log_norm(z + M.tau), M.log_norm(z), 1e-9);
    EXPECT_NEAR(M.log_norm(z + 3.0 * M.tau - 2.0), M.log_norm(z), 1e-9);
  }
  EXPECT_LT(M.log_norm(cplx(0.1, 0.3) + cplx(1e-8, 0)), -15);
}

TEST(Defect, EllipticTrend) {
  EllipticModel M;
  auto rep = defect_estimate(M, cplx(1, 0), {5, 10, 20, 40});
  ASSERT_EQ(rep.entries.size(), 4U);
  for (const auto& e : rep.entries) {
    EXPECT_NEAR(e.T, M_PI * e.r * e.r / 2 + M.phi(M.shift()) / 2, 1e-6 * e.T);
    EXPECT_GE(e.ratio, -e.quad_error);
    EXPECT_LE(e.ratio, 1 + e.quad_error);
  }
  EXPECT_TRUE(rep.monotone_nonincreasing);
  EXPECT_LT(rep.entries.back().ratio, 0.05);
  ASSERT_TRUE(rep.growth_exponent);
  EXPECT_GE(*rep.growth_exponent, 1.9);
  EXPECT_LE(*rep.growth_exponent, 2.1);
  EXPECT_LT(rep.max_4x_deviation, 0.01);
  EXPECT_THROW(defect_estimate(M, cplx(0, 0), {5}), Error);
}

TEST(Curvature, IdentityResiduals) {
  auto zero = curvature_identity_check([](cplx) { return cplx(2, 1); }, [](cplx) { return cplx(0); });
  EXPECT_LT(zero.max_residual, 1e-8);
  auto lin = curvature_identity_check([](cplx z) { return z; }, [](cplx) { return cplx(1); });
  EXPECT_LT(lin.max_residual, 1e-5);
  auto sq = curvature_identity_check([](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; });
  EXPECT_LT(sq.max_residual, 1e-4);
  auto ex = curvature_identity_check([](cplx z) {
    cplx s = 0, t = 1;
    for (int k = 1; k <= 25; ++k) { s += t; t *= z / static_cast<double>(k); }
    return s;
  }, [](cplx z) { return std::exp(z); });
  EXPECT_LT(ex.max_residual, 1e-4);
  // a wrong derivative is caught
  auto bad = curvature_identity_check([](cplx z) { return z * z; }, [](cplx z) { return z; });
  EXPECT_GT(bad.max_residual, 0.1);
}

TEST(CalculusLemma, ClosedForms) {
  auto poly = [](cplx z) { return std::norm(z) + 1; };
  for (double r : {1.0, 3.0, 7.0})
    EXPECT_NEAR(disc_integral(poly, r), M_PI * (r * r / 2 + std::pow(r, 4) / 8), 1e-8 * std::pow(r, 4));
  auto gauss = [](cplx z) { return std::exp(std::norm(z)); };
  for (double r : {1.0, 2.0, 4.0}) {
    double x = r * r;
    double closed = M_PI / 2 * (boost::math::expint(x) - boost::math::constants::euler<double>() - std::log(x));
    EXPECT_NEAR(disc_integral(gauss, r), closed, 1e-8 * closed);
  }
}

TEST(CalculusLemma, Probe) {
  auto one = calculus_lemma_probe([](cplx) { return 1.0; }, {1, 2, 5});
  for (const auto& e : one.entries) EXPECT_NEAR(e.lhs, 0, 1e-15);
  EXPECT_TRUE(one.violating_radii.empty());

  auto grid = log_grid(1.0, 20.0, 8);
  auto g = calculus_lemma_probe([](cplx z) { return std::exp(std::norm(z)); }, grid);
  EXPECT_TRUE(std::isfinite(g.empirical_constant));
  EXPECT_LT(g.empirical_constant, 2);
  EXPECT_GT(g.empirical_constant, 0.5);
  EXPECT_TRUE(g.violating_radii.empty());
  for (const auto& e : g.entries) EXPECT_NEAR(e.lhs, e.r * e.r, 1e-9 * e.r * e.r);

  auto p = calculus_lemma_probe([](cplx z) { return std::norm(z) + 1; }, {10, 100});
  EXPECT_NEAR(p.entries[1].lhs, std::log(1e4 + 1), 1e-9);
  EXPECT_TRUE(p.violating_radii.empty());
  EXPECT_EQ(to_json(p)["entries"].size(), 2U);
}
