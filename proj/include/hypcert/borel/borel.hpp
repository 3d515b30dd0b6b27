#pragma once

#include <json.hpp>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/jetalg/jet.hpp"

namespace hypcert {

/// (n+1)(n-1) + sum(deltas); the power p must exceed it strictly.
inline long borel_threshold(int n, const std::vector<int>& deltas) {
  if (n < 2) throw Error("borel_threshold needs n >= 2, got " + std::to_string(n));
  if (deltas.size() != static_cast<std::size_t>(n + 1))
    throw Error("borel_threshold needs n+1 = " + std::to_string(n + 1) + " degrees, got " + std::to_string(deltas.size()));
  long sum = 0;
  for (int d : deltas) {
    if (d < 0) throw Error("degrees must be nonnegative");
    sum += d;
  }
  return static_cast<long>(n + 1) * (n - 1) + sum;
}

/// sum_j x_j^(p - delta_j) g_j(x_0..x_n) with g_j homogeneous of degree delta_j.
struct PowerSumInstance {
  int n = 2;
  int p = 4;
  std::vector<int> deltas;
  std::vector<RationalPoly> g;

  static std::string x(int j) { return "x" + std::to_string(j); }

  void validate() const {
    if (n < 2) throw Error("power-sum instance needs n >= 2");
    if (deltas.size() != static_cast<std::size_t>(n + 1) || g.size() != deltas.size())
      throw Error("power-sum instance needs n+1 degrees and n+1 polynomials");
    for (int j = 0; j <= n; ++j) {
      if (deltas[j] < 0 || deltas[j] > p) throw Error("degree delta_" + std::to_string(j) + " out of range");
      for (const auto& v : g[j].support_vars()) {
        bool ok = false;
        for (int i = 0; i <= n; ++i) ok = ok || v == x(i);
        if (!ok) throw Error("g_" + std::to_string(j) + " uses variable " + v + " outside x0..x" + std::to_string(n));
      }
      for (const auto& [e, c] : g[j].terms())
        if (exponent_sum(e) != deltas[j])
          throw Error("g_" + std::to_string(j) + " is not homogeneous of degree " + std::to_string(deltas[j]));
    }
  }

  RationalPoly defining_polynomial() const {
    RationalPoly sum = RationalPoly::constant(Rational(0));
    for (int j = 0; j <= n; ++j) sum = sum + RationalPoly::variable(x(j)).pow(p - deltas[j]) * g[j];
    return sum;
  }
};

struct ChartTransferReport {
  int n = 0;
  int p = 0;
  long threshold = 0;
  long prefactor_exponent = 0;  // p - sum(delta) - (n+1)(n-1)
  long scaling_exponent = 0;    // n*p in W_z = w0^(-n p) W_w
  int verified_through_order = 0;
  bool identity_holds = false;
  std::optional<int> first_mismatch;
  bool wz_vanishes = false;
  bool ww_vanishes = false;
  long w0_valuation_bound = 0;              // p - delta_0 - n + 1
  std::optional<long> w0_valuation_observed;  // empty when the jet Wronskian is zero
  bool divisibility_holds = false;
};

namespace detail {

inline long min_degree_in(const RationalPoly& p, const std::string& var) {
  long best = -1;
  int idx = p.var_index(var);
  for (const auto& [e, c] : p.terms()) {
    long d = idx < 0 ? 0 : e[idx];
    if (best < 0 || d < best) best = d;
  }
  return best;
}

}  // namespace detail

/// Compare the Wronskian of the z-chart entries (z_j = x_j/x_0) with the
/// w-chart entries (w_j = x_j/x_n) along a germ given in x-coordinates.
inline ChartTransferReport wronskian_chart_transfer(const PowerSumInstance& inst, const CurveGerm<Rational>& lift) {
  inst.validate();
  const int n = inst.n, p = inst.p;
  ChartTransferReport rep;
  rep.n = n;
  rep.p = p;
  rep.threshold = borel_threshold(n, inst.deltas);
  if (p <= rep.threshold)
    throw Error("p = " + std::to_string(p) + " does not exceed the threshold " + std::to_string(rep.threshold));
  long sum_delta = std::accumulate(inst.deltas.begin(), inst.deltas.end(), 0L);
  rep.prefactor_exponent = p - sum_delta - static_cast<long>(n + 1) * (n - 1);
  rep.scaling_exponent = static_cast<long>(n) * p;
  rep.w0_valuation_bound = p - inst.deltas[0] - n + 1;

  if (lift.components.size() != static_cast<std::size_t>(n + 1)) throw Error("germ must have n+1 homogeneous components");
  std::vector<RationalSeries> xs;
  for (int j = 0; j <= n; ++j) {
    const auto& c = lift.components[lift.index_of(PowerSumInstance::x(j))];
    if (c.is_zero_through_order()) throw Error("germ lands in the coordinate hyperplane x" + std::to_string(j) + " = 0");
    xs.push_back(c);
  }
  for (int j : {0, n})
    if (is_zero(xs[j][0]))
      throw Error("germ meets the coordinate hyperplane x" + std::to_string(j) + " = 0 at the base point");

  const std::string& t = lift.var();
  const int K = lift.order();
  auto one = RationalSeries::constant(Rational(1), t, K);
  std::vector<std::string> names;
  for (int j = 0; j <= n; ++j) names.push_back(PowerSumInstance::x(j));

  // z-chart: x0 = 1, x_j = z_j
  RationalSeries inv0 = xs[0].reciprocal();
  std::vector<RationalSeries> zc{one};
  for (int j = 1; j <= n; ++j) zc.push_back(xs[j] * inv0);
  CurveGerm<Rational> zg(names, zc);
  std::vector<RationalSeries> ez{evaluate_along(inst.g[0], zg, K)};
  for (int j = 1; j < n; ++j)
    ez.push_back(zc[j].pow(static_cast<unsigned>(p - inst.deltas[j])) * evaluate_along(inst.g[j], zg, K));

  // w-chart: x_n = 1, x_j = w_j
  RationalSeries invn = xs[n].reciprocal();
  std::vector<RationalSeries> wc;
  for (int j = 0; j < n; ++j) wc.push_back(xs[j] * invn);
  wc.push_back(one);
  CurveGerm<Rational> wg(names, wc);
  std::vector<RationalSeries> ew;
  for (int j = 0; j < n; ++j)
    ew.push_back(wc[j].pow(static_cast<unsigned>(p - inst.deltas[j])) * evaluate_along(inst.g[j], wg, K));

  RationalSeries wz = wronskian(ez), ww = wronskian(ew);
  RationalSeries lhs = wc[0].pow(static_cast<unsigned>(rep.scaling_exponent)) * wz;
  rep.verified_through_order = std::min(lhs.order(), ww.order());
  rep.identity_holds = true;
  for (int i = 0; i <= rep.verified_through_order; ++i) {
    if (lhs[i] != ww[i]) {
      rep.identity_holds = false;
      rep.first_mismatch = i;
      break;
    }
  }
  rep.wz_vanishes = wz.is_zero_through_order();
  rep.ww_vanishes = ww.is_zero_through_order();

  // symbolic w-chart Wronskian: its w0-valuation bounds the divisibility
  std::map<std::string, RationalPoly> at_infinity{{PowerSumInstance::x(n), RationalPoly::constant(Rational(1))}};
  std::vector<JetDifferential<Rational>> entries;
  std::vector<std::string> wnames(names.begin(), names.end() - 1);
  for (int j = 0; j < n; ++j) {
    RationalPoly e = RationalPoly::variable(names[j]).pow(p - inst.deltas[j]) * inst.g[j].substitute(at_infinity);
    entries.push_back(JetDifferential<Rational>::from_polynomial(e.compact(), wnames));
  }
  auto jw = jet_wronskian(entries);
  for (const auto& [m, c] : jw.terms()) {
    long v = detail::min_degree_in(c, names[0]);
    if (!rep.w0_valuation_observed || v < *rep.w0_valuation_observed) rep.w0_valuation_observed = v;
  }
  rep.divisibility_holds = !rep.w0_valuation_observed || *rep.w0_valuation_observed >= rep.w0_valuation_bound;
  return rep;
}

inline nlohmann::json to_json(const ChartTransferReport& r) {
  nlohmann::json j{{"n", r.n},
                   {"p", r.p},
                   {"threshold", r.threshold},
                   {"prefactor_exponent", r.prefactor_exponent},
                   {"scaling_exponent", r.scaling_exponent},
                   {"verified_through_order", r.verified_through_order},
                   {"identity_holds", r.identity_holds},
                   {"wz_vanishes", r.wz_vanishes},
                   {"ww_vanishes", r.ww_vanishes},
                   {"w0_valuation_bound", r.w0_valuation_bound},
                   {"divisibility_holds", r.divisibility_holds}};
  j["first_mismatch"] = r.first_mismatch ? nlohmann::json(*r.first_mismatch) : nlohmann::json(nullptr);
  j["w0_valuation_observed"] = r.w0_valuation_observed ? nlohmann::json(*r.w0_valuation_observed) : nlohmann::json(nullptr);
  return j;
}

/// Blocks of indices; inside a block f_j = constants[j] * f_rep and the block
/// sums to zero. Identically zero series form flagged singleton blocks.
template <CoefficientField F>
struct BorelPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> representatives;
  std::vector<std::vector<F>> constants;  // per block, for the non-representative indices in order
  std::vector<bool> identically_zero;
  int verified_through_order = 0;
};

namespace detail {

/// Maximum number of disjoint zero-sum groups covering all of `c`, or 0 if
/// the total is nonzero. Returns the groups as index masks.
template <class F>
std::vector<std::uint32_t> max_zero_sum_split(const std::vector<F>& c) {
  const std::size_t k = c.size();
  if (k > 20) throw Error("proportionality class too large for exhaustive block search");
  const std::uint32_t full = (1U << k) - 1U;
  std::vector<F> sum(full + 1, F(0L));
  for (std::uint32_t m = 1; m <= full; ++m) {
    int low = __builtin_ctz(m);
    sum[m] = sum[m & (m - 1)] + c[low];
  }
  if (!is_zero(sum[full])) return {};
  std::vector<int> best(full + 1, -1);
  std::vector<std::uint32_t> choice(full + 1, 0);
  best[0] = 0;
  for (std::uint32_t m = 1; m <= full; ++m) {
    if (!is_zero(sum[m])) continue;
    std::uint32_t low = m & (~m + 1U);
    std::uint32_t rest = m ^ low;
    for (std::uint32_t s = rest;; s = (s - 1) & rest) {
      std::uint32_t group = s | low;
      std::uint32_t other = m ^ group;
      if (is_zero(sum[group]) && best[other] >= 0 && best[other] + 1 > best[m]) {
        best[m] = best[other] + 1;
        choice[m] = group;
      }
      if (s == 0) break;
    }
  }
  std::vector<std::uint32_t> groups;
  for (std::uint32_t m = full; m != 0; m ^= choice[m]) groups.push_back(choice[m]);
  return groups;
}

}  // namespace detail

/// Split f_0..f_n (summing to zero through truncation) into the maximal
/// number of blocks of mutually proportional series with zero block sums.
/// nullopt means no such structure exists at this truncation.
template <CoefficientField F>
  requires FieldInfo<F>::exact
std::optional<BorelPartition<F>> find_borel_partition(const std::vector<TruncatedSeries<F>>& f, int detection_depth = 0) {
  if (f.size() < 2) throw Error("find_borel_partition needs at least two series");
  int K = f[0].order();
  for (const auto& s : f) K = std::min(K, s.order());
  if (K < detection_depth)
    throw Error("truncation " + std::to_string(K) + " below detection depth " + std::to_string(detection_depth));
  for (int i = 0; i <= K; ++i) {
    F total(0L);
    for (const auto& s : f) total = total + s[i];
    if (!is_zero(total)) throw Error("series do not sum to zero (coefficient " + std::to_string(i) + ")");
  }

  // proportionality classes: (class representative, ratio to it)
  struct Member {
    int index;
    F ratio;
  };
  std::vector<std::vector<Member>> classes;
  BorelPartition<F> out;
  out.verified_through_order = K;
  std::vector<std::pair<int, std::vector<int>>> ordered;  // (min index, block) for canonical order
  std::vector<std::pair<int, std::vector<F>>> block_constants;
  for (int j = 0; j < static_cast<int>(f.size()); ++j) {
    int v = f[j].truncated(K).valuation();
    if (v < 0) continue;
    bool placed = false;
    for (auto& cls : classes) {
      const auto& r = f[cls[0].index];
      if (r.truncated(K).valuation() != v) continue;
      F ratio = f[j][v] * field_inverse(r[v]);
      bool ok = true;
      for (int i = v; i <= K && ok; ++i) ok = f[j][i] == ratio * r[i];
      if (ok) {
        cls.push_back({j, ratio});
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({{j, F(1L)}});
  }

  struct Block {
    std::vector<int> idx;
    std::vector<F> ratios;
    bool zero;
  };
  std::vector<Block> blocks;
  for (int j = 0; j < static_cast<int>(f.size()); ++j)
    if (f[j].truncated(K).valuation() < 0) blocks.push_back({{j}, {F(1L)}, true});
  for (const auto& cls : classes) {
    std::vector<F> r;
    for (const auto& m : cls) r.push_back(m.ratio);
    auto groups = detail::max_zero_sum_split(r);
    if (groups.empty()) return std::nullopt;
    for (auto g : groups) {
      Block b{{}, {}, false};
      for (std::size_t i = 0; i < cls.size(); ++i)
        if (g & (1U << i)) {
          b.idx.push_back(cls[i].index);
          b.ratios.push_back(cls[i].ratio);
        }
      blocks.push_back(std::move(b));
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.idx[0] < b.idx[0]; });
  for (const auto& b : blocks) {
    out.blocks.push_back(b.idx);
    out.representatives.push_back(b.idx[0]);
    out.identically_zero.push_back(b.zero);
    std::vector<F> cs;
    F inv = b.zero ? F(1L) : field_inverse(b.ratios[0]);
    for (std::size_t i = 1; i < b.idx.size(); ++i) cs.push_back(b.ratios[i] * inv);
    out.constants.push_back(std::move(cs));
  }
  return out;
}

/// Re-check proportionality and zero block sums coefficient-wise.
template <CoefficientField F>
  requires FieldInfo<F>::exact
bool verify_borel_partition(const BorelPartition<F>& bp, const std::vector<TruncatedSeries<F>>& f) {
  std::vector<int> seen(f.size(), 0);
  for (std::size_t b = 0; b < bp.blocks.size(); ++b) {
    const auto& blk = bp.blocks[b];
    if (blk.empty() || blk[0] != bp.representatives[b] || bp.constants[b].size() + 1 != blk.size()) return false;
    for (int j : blk) {
      if (j < 0 || j >= static_cast<int>(f.size())) return false;
      seen[j] += 1;
    }
    const auto& rep = f[blk[0]];
    for (int i = 0; i <= bp.verified_through_order; ++i) {
      F total = rep[i];
      for (std::size_t k = 1; k < blk.size(); ++k) {
        if (f[blk[k]][i] != bp.constants[b][k - 1] * rep[i]) return false;
        total = total + f[blk[k]][i];
      }
      if (!is_zero(total)) return false;
    }
    if (blk.size() == 1 && !bp.identically_zero[b]) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

template <CoefficientField F>
nlohmann::json to_json(const BorelPartition<F>& bp) {
  nlohmann::json consts = nlohmann::json::array();
  for (const auto& cs : bp.constants) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : cs) row.push_back(to_text(c));
    consts.push_back(row);
  }
  return {{"blocks", bp.blocks},
          {"representatives", bp.representatives},
          {"constants", consts},
          {"identically_zero", bp.identically_zero},
          {"verified_through_order", bp.verified_through_order}};
}

}  // namespace hypcert
