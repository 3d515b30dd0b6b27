#pragma once

#include <json.hpp>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypcert/polycore/linalg.hpp"
#include "hypcert/polycore/rational.hpp"

namespace hypcert {

/// N nonzero linear forms on C^m, as rational rows.
struct HyperplaneSet {
  int m = 0;
  Matrix<Rational> forms;

  HyperplaneSet() = default;
  HyperplaneSet(int dim, Matrix<Rational> rows) : m(dim), forms(std::move(rows)) {
    if (forms.size() < 2) throw Error("hyperplane set needs at least two forms");
    for (std::size_t i = 0; i < forms.size(); ++i) {
      if (forms[i].size() != static_cast<std::size_t>(m))
        throw Error("form " + std::to_string(i) + " has length " + std::to_string(forms[i].size()) + ", expected " + std::to_string(m));
      if (std::all_of(forms[i].begin(), forms[i].end(), [](const Rational& q) { return q == 0; }))
        throw Error("form " + std::to_string(i) + " is zero");
    }
  }
  std::size_t size() const { return forms.size(); }
};

/// Partition of the form indices 0..N-1 into blocks of size >= 2.
struct GroupedPartition {
  std::vector<std::vector<int>> blocks;

  static GroupedPartition consecutive(const std::vector<int>& sizes) {
    GroupedPartition g;
    int next = 0;
    for (int s : sizes) {
      std::vector<int> b(s);
      std::iota(b.begin(), b.end(), next);
      next += s;
      g.blocks.push_back(std::move(b));
    }
    g.validate();
    return g;
  }
  void validate(int total = -1) const {
    if (blocks.empty()) throw Error("partition needs at least one block");
    std::vector<int> all;
    for (const auto& b : blocks) {
      if (b.size() < 2) throw Error("partition blocks must have size >= 2");
      all.insert(all.end(), b.begin(), b.end());
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i] != static_cast<int>(i)) throw Error("partition blocks must cover 0..N-1 exactly once");
    if (total >= 0 && static_cast<int>(all.size()) != total)
      throw Error("partition covers " + std::to_string(all.size()) + " indices, expected " + std::to_string(total));
  }
  int total() const {
    int t = 0;
    for (const auto& b : blocks) t += static_cast<int>(b.size());
    return t;
  }
  /// sum (l_nu - 1) = N - q
  int excess() const { return total() - static_cast<int>(blocks.size()); }
  std::vector<int> sizes() const {
    std::vector<int> s;
    for (const auto& b : blocks) s.push_back(static_cast<int>(b.size()));
    return s;
  }
};

enum class CodimVerdict { EmptyByCount, PossiblyNonempty };

inline const char* to_text(CodimVerdict v) { return v == CodimVerdict::EmptyByCount ? "EmptyByCount" : "PossiblyNonempty"; }

struct CodimReport {
  int k = 0;
  int m = 0;
  std::vector<int> sizes;
  long codimension = 0;
  long ambient_dim = 0;
  CodimVerdict verdict = CodimVerdict::PossiblyNonempty;
};

/// (k-1) * sum (l_nu - 1); m bounds k when given.
inline long stratum_codimension(int k, const GroupedPartition& part, int m = -1) {
  if (k < 2 || (m >= 0 && k > m - 1))
    throw Error("k = " + std::to_string(k) + " out of range 2..m-1" + (m >= 0 ? " (m = " + std::to_string(m) + ")" : std::string()));
  for (const auto& b : part.blocks)
    if (b.size() < 2) throw Error("partition blocks must have size >= 2");
  return static_cast<long>(k - 1) * part.excess();
}

inline CodimReport codim_report(int k, int m, const GroupedPartition& part) {
  CodimReport r;
  r.k = k;
  r.m = m;
  r.sizes = part.sizes();
  r.codimension = stratum_codimension(k, part, m);
  r.ambient_dim = static_cast<long>(k) * (m - k);
  r.verdict = r.codimension > r.ambient_dim ? CodimVerdict::EmptyByCount : CodimVerdict::PossiblyNonempty;
  return r;
}

/// All multisets of block sizes >= 2 summing to N, in nonincreasing order.
inline std::vector<std::vector<int>> block_size_multisets(int N) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int max_part) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int s = std::min(left, max_part); s >= 2; --s) {
      if (left - s == 1) continue;
      cur.push_back(s);
      rec(left - s, s);
      cur.pop_back();
    }
  };
  if (N >= 2) rec(N, N);
  return out;
}

struct ThresholdScan {
  int m = 0;
  int N = 0;
  int threshold = 0;  // 4m - 7
  std::vector<CodimReport> entries;
  bool uniformly_empty = true;
};

inline ThresholdScan prop4_threshold_scan(int m, int N) {
  if (m < 3) throw Error("threshold scan needs m >= 3");
  if (N < 2) throw Error("threshold scan needs N >= 2");
  ThresholdScan scan;
  scan.m = m;
  scan.N = N;
  scan.threshold = 4 * m - 7;
  for (const auto& sizes : block_size_multisets(N)) {
    auto part = GroupedPartition::consecutive(sizes);
    for (int k = 2; k <= m - 1; ++k) {
      scan.entries.push_back(codim_report(k, m, part));
      if (scan.entries.back().verdict != CodimVerdict::EmptyByCount) scan.uniformly_empty = false;
    }
  }
  return scan;
}

inline nlohmann::json to_json(const CodimReport& r) {
  return {{"k", r.k},
          {"m", r.m},
          {"blocks", r.sizes},
          {"codim", r.codimension},
          {"ambient_dim", r.ambient_dim},
          {"verdict", to_text(r.verdict)}};
}

inline nlohmann::json to_json(const ThresholdScan& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries) entries.push_back(to_json(e));
  return {{"m", s.m},
          {"N", s.N},
          {"threshold", s.threshold},
          {"at_or_above_threshold", s.N >= s.threshold},
          {"uniformly_empty", s.uniformly_empty},
          {"cases", s.entries.size()},
          {"entries", entries}};
}

/// True iff the restrictions of the given forms to the row space of W span
/// a space of dimension <= 1.
inline bool stratum_membership(const Matrix<Rational>& W, const Matrix<Rational>& block_forms) {
  if (W.empty()) throw Error("stratum_membership: empty W");
  if (rank(W) != W.size()) throw Error("stratum_membership: W is rank deficient");
  return rank(matmul(block_forms, transpose(W))) <= 1;
}

struct EmptinessEvidence {
  CodimReport codim;
  int trials = 0;
  std::size_t generic_rank = 0;
  bool certified_empty_by_count = false;
  std::optional<Matrix<Rational>> counterexample;
};

/// Uniform rational with numerator and denominator bounded by `height`.
inline Rational random_rational(std::mt19937_64& rng, long height) {
  std::uniform_int_distribution<long> num(-height, height), den(1, height);
  return make_rational(num(rng), den(rng));
}

namespace detail {

// rows H_j - c_j H_first for j past the first in each block; full blocks
// contribute every form instead
inline Matrix<Rational> evidence_stack(const HyperplaneSet& H, const GroupedPartition& part,
                                       const std::vector<std::vector<Rational>>& c, std::uint32_t full_mask) {
  Matrix<Rational> rows;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    const auto& blk = part.blocks[b];
    if (full_mask & (1U << b)) {
      for (int j : blk) rows.push_back(H.forms[j]);
      continue;
    }
    const auto& h1 = H.forms[blk[0]];
    for (std::size_t i = 1; i < blk.size(); ++i) {
      std::vector<Rational> r = H.forms[blk[i]];
      for (int col = 0; col < H.m; ++col) r[col] -= c[b][i - 1] * h1[col];
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace detail

/// Randomized exact-rank evidence for emptiness of the intersected strata.
inline EmptinessEvidence emptiness_evidence(const HyperplaneSet& H, const GroupedPartition& part, int k, int trials,
                                            std::uint64_t seed = 1, long height = 1000) {
  if (trials <= 0) throw Error("emptiness_evidence needs trials >= 1");
  part.validate(static_cast<int>(H.size()));
  EmptinessEvidence ev;
  ev.codim = codim_report(k, H.m, part);
  ev.trials = trials;
  std::mt19937_64 rng(seed);

  auto try_stack = [&](const Matrix<Rational>& rows) -> std::optional<Matrix<Rational>> {
    auto ker = kernel_basis(rows, static_cast<std::size_t>(H.m));
    if (ker.size() < static_cast<std::size_t>(k)) return std::nullopt;
    Matrix<Rational> W(ker.begin(), ker.begin() + k);
    for (const auto& blk : part.blocks) {
      Matrix<Rational> forms;
      for (int j : blk) forms.push_back(H.forms[j]);
      if (!stratum_membership(W, forms)) return std::nullopt;
    }
    return W;
  };

  bool all_small = true;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<Rational>> c;
    for (const auto& blk : part.blocks) {
      std::vector<Rational> cb;
      for (std::size_t i = 1; i < blk.size(); ++i) cb.push_back(random_rational(rng, height));
      c.push_back(std::move(cb));
    }
    auto rows = detail::evidence_stack(H, part, c, 0);
    std::size_t r = rank(rows);
    ev.generic_rank = std::max(ev.generic_rank, r);
    if (static_cast<std::size_t>(H.m) - r >= static_cast<std::size_t>(k)) all_small = false;
    if (!ev.counterexample) ev.counterexample = try_stack(rows);
    // degenerate branch: some blocks vanish entirely on W
    const std::size_t q = part.blocks.size();
    if (!ev.counterexample && t == 0 && q <= 10)
      for (std::uint32_t mask = 1; mask < (1U << q) && !ev.counterexample; ++mask)
        ev.counterexample = try_stack(detail::evidence_stack(H, part, c, mask));
  }
  ev.certified_empty_by_count = all_small && !ev.counterexample && ev.codim.verdict == CodimVerdict::EmptyByCount;
  return ev;
}

inline nlohmann::json to_json(const EmptinessEvidence& e) {
  nlohmann::json j{{"k", e.codim.k},
                   {"m", e.codim.m},
                   {"blocks", e.codim.sizes},
                   {"codim", e.codim.codimension},
                   {"ambient_dim", e.codim.ambient_dim},
                   {"verdict", to_text(e.codim.verdict)},
                   {"generic_rank", e.generic_rank},
                   {"certified_empty_by_count", e.certified_empty_by_count},
                   {"trials", e.trials}};
  if (e.counterexample) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : *e.counterexample) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& q : row) r.push_back(to_text(q));
      rows.push_back(r);
    }
    j["counterexample"] = rows;
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

}  // namespace hypcert
