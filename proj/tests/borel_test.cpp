#include <gtest/gtest.h>

#include <random>

#include "hypcert/borel/borel.hpp"

using namespace hypcert;

namespace {

using RSeries = RationalSeries;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned seed) : rng(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Rational nonzero(int h) {
    int v = uniform(1, h);
    return Rational(uniform(0, 1) ? v : -v);
  }
  RationalPoly dense_poly(int deg, bool nonzero_constant) {
    std::vector<Rational> c;
    for (int d = 0; d <= deg; ++d) c.push_back(Rational(uniform(-5, 5)));
    if (nonzero_constant) c[0] = nonzero(5);
    return RationalPoly::from_dense("t", c);
  }
  RationalPoly homogeneous(int n, int degree) {
    std::vector<std::string> names;
    for (int j = 0; j <= n; ++j) names.push_back("x" + std::to_string(j));
    RationalPoly g(names);
    if (degree == 0) return RationalPoly::constant(nonzero(5));
    for (int t = 0, terms = uniform(1, 3); t < terms; ++t) {
      Exponents e(n + 1, 0);
      for (int i = 0; i < degree; ++i) e[uniform(0, n)] += 1;
      g.add_term(e, nonzero(5));
    }
    return g.is_zero() ? homogeneous(n, degree) : g;
  }
};

CurveGerm<Rational> x_germ(const std::vector<RationalPoly>& comps, int order = 24) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < comps.size(); ++j) names.push_back("x" + std::to_string(j));
  return CurveGerm<Rational>::from_polynomials(names, comps, "t", order);
}

RationalPoly P(const std::string& s) { return parse_polynomial<Rational>(s); }

}  // namespace

TEST(BorelThreshold, Examples) {
  EXPECT_EQ(borel_threshold(2, {0, 0, 0}), 3);
  EXPECT_EQ(borel_threshold(3, {0, 0, 0, 0}), 8);
  EXPECT_EQ(borel_threshold(3, {2, 2, 2, 2}), 16);
  EXPECT_THROW(borel_threshold(1, {0, 0}), Error);
  EXPECT_THROW(borel_threshold(2, {0, 0}), Error);
}

TEST(ChartTransfer, ConstantCoefficientsGenericGerm) {
  PowerSumInstance inst{2, 16, {0, 0, 0}, {P("1"), P("1"), P("-2")}};
  auto rep = wronskian_chart_transfer(inst, x_germ({P("1"), P("2 + t + 3*t^2"), P("1 - t + t^3")}));
  EXPECT_TRUE(rep.identity_holds);
  EXPECT_EQ(rep.prefactor_exponent, 13);
  EXPECT_EQ(rep.scaling_exponent, 32);
  EXPECT_EQ(rep.verified_through_order, 23);
  EXPECT_FALSE(rep.wz_vanishes);
  ASSERT_TRUE(rep.w0_valuation_observed.has_value());
  EXPECT_GE(*rep.w0_valuation_observed, rep.w0_valuation_bound);
  EXPECT_EQ(rep.w0_valuation_bound, 15);
  EXPECT_TRUE(rep.divisibility_holds);
  auto j = to_json(rep);
  EXPECT_EQ(j["prefactor_exponent"], 13);
}

TEST(ChartTransfer, ConstantGermBothVanish) {
  PowerSumInstance inst{2, 5, {0, 0, 0}, {P("1"), P("1"), P("1")}};
  auto rep = wronskian_chart_transfer(inst, x_germ({P("1"), P("2"), P("3")}));
  EXPECT_TRUE(rep.wz_vanishes);
  EXPECT_TRUE(rep.ww_vanishes);
  EXPECT_TRUE(rep.identity_holds);
}

TEST(ChartTransfer, Rejections) {
  PowerSumInstance inst{2, 5, {0, 0, 0}, {P("1"), P("1"), P("1")}};
  try {
    wronskian_chart_transfer(inst, x_germ({P("1"), P("0"), P("1 + t")}));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
  EXPECT_THROW(wronskian_chart_transfer(inst, x_germ({P("t"), P("1"), P("1")})), Error);
  PowerSumInstance low{2, 3, {0, 0, 0}, {P("1"), P("1"), P("1")}};
  EXPECT_THROW(wronskian_chart_transfer(low, x_germ({P("1"), P("1"), P("1")})), Error);
  PowerSumInstance inhom{2, 9, {1, 0, 0}, {P("x0 + 1"), P("1"), P("1")}};
  EXPECT_THROW(wronskian_chart_transfer(inhom, x_germ({P("1"), P("1"), P("1")})), Error);
}

TEST(ChartTransfer, RandomGermsAgree) {
  Gen g(77);
  for (int trial = 0; trial < 20; ++trial) {
    int n = g.uniform(2, 3);
    PowerSumInstance inst;
    inst.n = n;
    for (int j = 0; j <= n; ++j) {
      inst.deltas.push_back(g.uniform(0, 2));
      inst.g.push_back(g.homogeneous(n, inst.deltas.back()));
    }
    inst.p = static_cast<int>(borel_threshold(n, inst.deltas)) + g.uniform(1, 3);
    std::vector<RationalPoly> comps;
    for (int j = 0; j <= n; ++j) comps.push_back(g.dense_poly(g.uniform(1, 3), true));
    auto rep = wronskian_chart_transfer(inst, x_germ(comps));
    ASSERT_TRUE(rep.identity_holds) << "trial " << trial;
    EXPECT_EQ(rep.prefactor_exponent,
              inst.p - std::accumulate(inst.deltas.begin(), inst.deltas.end(), 0) - (n + 1) * (n - 1));
    EXPECT_TRUE(rep.divisibility_holds);
  }
}

TEST(BorelPartition, Examples) {
  const int p = 3, K = 12;
  RSeries e = exp_series<Rational>(Rational(p), "t", K);
  Rational two_p = rational_pow(Rational(2), p);
  auto bp = find_borel_partition<Rational>({e, two_p * e, Rational(-(1 + 8)) * e});
  ASSERT_TRUE(bp);
  EXPECT_EQ(bp->blocks, (std::vector<std::vector<int>>{{0, 1, 2}}));
  EXPECT_EQ(bp->constants[0], (std::vector<Rational>{Rational(8), Rational(-9)}));

  RSeries s = exp_series<Rational>(Rational(1), "t", K), t = sin_series<Rational>("t", K);
  auto bp2 = find_borel_partition<Rational>({s, -s, t, -t});
  ASSERT_TRUE(bp2);
  EXPECT_EQ(bp2->blocks, (std::vector<std::vector<int>>{{0, 1}, {2, 3}}));

  Rational half = make_rational(-1, 2);
  auto bp3 = find_borel_partition<Rational>({s, half * s, half * s});
  ASSERT_TRUE(bp3);
  EXPECT_EQ(bp3->blocks.size(), 1U);
  EXPECT_EQ(bp3->constants[0], (std::vector<Rational>{half, half}));

  auto js = to_json(*bp3);
  EXPECT_EQ(js["constants"][0][0], "-1/2");
  EXPECT_EQ(js["verified_through_order"], K);
}

TEST(BorelPartition, NoneAndRejections) {
  const int K = 10;
  RSeries s = exp_series<Rational>(Rational(1), "t", K), t = exp_series<Rational>(Rational(2), "t", K);
  EXPECT_FALSE(find_borel_partition<Rational>({s, t, -(s + t)}).has_value());
  EXPECT_THROW(find_borel_partition<Rational>({s, t}), Error);
  EXPECT_THROW(find_borel_partition<Rational>({s, -s}, 20), Error);
}

TEST(BorelPartition, ZeroSeriesAreFlaggedSingletons) {
  RSeries s = exp_series<Rational>(Rational(1), "t", 8), z("t", 8);
  auto bp = find_borel_partition<Rational>({z, s, -s});
  ASSERT_TRUE(bp);
  EXPECT_EQ(bp->blocks, (std::vector<std::vector<int>>{{0}, {1, 2}}));
  EXPECT_TRUE(bp->identically_zero[0]);
  EXPECT_TRUE(verify_borel_partition(*bp, {z, s, -s}));
}

TEST(BorelPartition, RecoversPlantedPartitions) {
  Gen g(31);
  const int K = 16;
  for (int trial = 0; trial < 200; ++trial) {
    int q = g.uniform(1, 3);
    std::vector<std::vector<int>> planted_sizes;
    std::vector<RSeries> f;
    std::vector<int> block_of;
    for (int b = 0; b < q; ++b) {
      // base series distinct per block: exp((b+1) t) times a random unit polynomial
      RSeries base = exp_series<Rational>(Rational(b + 1), "t", K) * RSeries::from_polynomial(g.dense_poly(2, true), "t", K);
      int size = g.uniform(2, 4);
      Rational total(0);
      for (int i = 0; i + 1 < size; ++i) {
        Rational c = g.nonzero(6);
        total += c;
        f.push_back(c * base);
        block_of.push_back(b);
      }
      if (total == 0) {
        f.back() = Rational(2) * f.back();
        total = 0;
        for (int i = static_cast<int>(f.size()) - (size - 1); i < static_cast<int>(f.size()); ++i) total += f[i][0] / base[0];
      }
      f.push_back(Rational(-total) * base);
      block_of.push_back(b);
    }
    // shuffle indices
    std::vector<int> perm(f.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g.rng);
    std::vector<RSeries> shuffled;
    std::vector<int> shuffled_block;
    for (int i : perm) {
      shuffled.push_back(f[i]);
      shuffled_block.push_back(block_of[i]);
    }
    auto bp = find_borel_partition(shuffled);
    ASSERT_TRUE(bp) << "trial " << trial;
    ASSERT_TRUE(verify_borel_partition(*bp, shuffled));
    // found blocks refine the planted ones and there are at least q of them
    EXPECT_GE(bp->blocks.size(), static_cast<std::size_t>(q));
    for (const auto& blk : bp->blocks)
      for (int j : blk) EXPECT_EQ(shuffled_block[j], shuffled_block[blk[0]]);
  }
}

TEST(WronskianDependence, MatchesExactRank) {
  Gen g(555);
  int dependent = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int s = g.uniform(1, 4);
    std::vector<RationalPoly> u;
    for (int i = 0; i < s; ++i) u.push_back(g.dense_poly(g.uniform(0, 6), false));
    if (s >= 2 && g.uniform(0, 2) == 0) {
      RationalPoly combo = RationalPoly::constant(Rational(0));
      for (int i = 0; i + 1 < s; ++i) combo = combo + RationalPoly::constant(Rational(g.uniform(-3, 3))) * u[i];
      u.back() = combo;
    }
    Matrix<Rational> m;
    for (const auto& p : u) {
      std::vector<Rational> row(7, Rational(0));
      if (!p.is_zero()) {
        auto d = p.support_vars().empty() ? std::vector<Rational>{p.constant_term()} : p.dense("t");
        for (std::size_t i = 0; i < d.size(); ++i) row[i] = d[i];
      }
      m.push_back(row);
    }
    bool rank_deficient = rank(m) < static_cast<std::size_t>(s);
    std::vector<RSeries> series;
    for (const auto& p : u) series.push_back(RSeries::from_polynomial(p, "t", 30));
    bool w_zero = wronskian(series).is_zero_through_order();
    ASSERT_EQ(w_zero, rank_deficient) << "trial " << trial;
    dependent += rank_deficient;
  }
  EXPECT_GT(dependent, 20);
}
