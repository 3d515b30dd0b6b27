#pragma once

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hypcert/borel/borel.hpp"
#include "hypcert/grassmann/grassmann.hpp"
#include "hypcert/hypersurf/hypersurf.hpp"
#include "hypcert/jetalg/jet.hpp"
#include "hypcert/nevanlinna/nevanlinna.hpp"

namespace hypcert::cli {

enum ExitCode { kSuccess = 0, kUsage = 1, kRejected = 2, kUnknown = 3 };

struct RunConfig {
  std::uint64_t seed = 1;
  long precision = ComplexBall::kDefaultPrec;
  long max_precision = 4096;
  int truncation = 24;
  std::string output;  // empty: standard output
  int verbosity = 0;
  bool human = false;

  nlohmann::json to_json() const {
    return {{"seed", seed}, {"precision", precision}, {"max_precision", max_precision}, {"truncation", truncation}, {"output", output}, {"verbosity", verbosity}};
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    tok = hypcert::detail::strip(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

inline std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) out.push_back(std::stoi(t));
  return out;
}

inline GaussianRational gaussian_constant(const std::string& text) {
  std::string t = hypcert::detail::strip(text);
  if (t == "i") return {Rational(0), Rational(1)};
  if (t == "-i") return {Rational(0), Rational(-1)};
  auto p = parse_polynomial<GaussianRational>(t);
  if (!p.support_vars().empty()) throw Error("expected a constant, got '" + text + "'");
  return p.is_zero() ? GaussianRational(0) : p.constant_term();
}

inline cplx complex_value(const std::string& text) {
  std::string t = hypcert::detail::strip(text);
  if (t.find_first_of("eE.") != std::string::npos && t.front() != '(') return {std::stod(t), 0.0};
  return to_cplx(gaussian_constant(t));
}

/// "<poly>" or "<poly>*exp(<c>)", meaning poly(t) * exp(c t).
inline RationalSeries series_item(const std::string& item, const std::string& var, int order) {
  auto pos = item.rfind("exp(");
  if (pos == std::string::npos) return RationalSeries::from_polynomial(parse_polynomial<Rational>(item), var, order);
  std::string head = hypcert::detail::strip(item.substr(0, pos));
  if (!head.empty() && head.back() == '*') head.pop_back();
  auto close = item.find(')', pos);
  if (close == std::string::npos) throw Error("unterminated exp( in '" + item + "'");
  Rational a = parse_polynomial<Rational>(item.substr(pos + 4, close - pos - 4)).constant_term();
  RationalSeries e = exp_series<Rational>(a, var, order);
  if (head.empty() || head == "+") return e;
  if (head == "-") return Rational(-1) * e;
  return RationalSeries::from_polynomial(parse_polynomial<Rational>(head), var, order) * e;
}

template <class F>
nlohmann::json series_json(const TruncatedSeries<F>& s) {
  nlohmann::json c = nlohmann::json::array();
  for (int i = 0; i <= s.order(); ++i) c.push_back(to_text(s[i]));
  return {{"var", s.var()}, {"order", s.order()}, {"coefficients", c}, {"text", s.to_string()}};
}

inline std::string human_text(const nlohmann::json& j) {
  std::ostringstream os;
  std::size_t width = 0;
  for (auto it = j.begin(); it != j.end(); ++it) width = std::max(width, it.key().size());
  for (auto it = j.begin(); it != j.end(); ++it) {
    os << it.key() << std::string(width - it.key().size() + 2, ' ');
    if (it->is_string()) {
      os << it->get<std::string>();
    } else if (it->is_array() && !it->empty() && it->front().is_object()) {
      os << it->size() << " records\n";
      for (const auto& row : *it) os << "  " << row.dump() << "\n";
      continue;
    } else {
      os << it->dump();
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace detail

/// Parses argv (without the program name) and runs one subcommand. Reports
/// go to `out` as single-line JSON records (or the --output file).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates and numerics for jet differentials, Borel reductions, hyperbolic hypersurfaces and Nevanlinna functionals",
               "hypcert"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  if (const char* env = std::getenv("HYPCERT_PRECISION")) {
    try {
      cfg.precision = std::stol(env);
    } catch (const std::exception&) {
      err << "ignoring malformed HYPCERT_PRECISION=" << env << "\n";
    }
  }
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--precision", cfg.precision, "ball precision in bits (default from HYPCERT_PRECISION or 256)")
      ->check(CLI::Range(32L, 65536L));
  app.add_option("--max-precision", cfg.max_precision, "last rung of the precision ladder")
      ->capture_default_str()
      ->check(CLI::Range(32L, 65536L));
  app.add_option("--truncation", cfg.truncation, "series truncation order")->capture_default_str()->check(CLI::Range(1, 4096));
  app.add_option("--output", cfg.output, "write JSON-lines here instead of standard output");
  app.add_option("--verbosity", cfg.verbosity, "diagnostic level on standard error")->capture_default_str();
  app.add_flag("--human", cfg.human, "render reports as aligned text");
  app.set_config("--config", "", "key=value file merged under the flags");

  std::vector<nlohmann::json> records;
  int code = kSuccess;
  std::function<void()> action;

  auto verdict_code = [](Verdict v) { return v == Verdict::Certified ? kSuccess : v == Verdict::Rejected ? kRejected : kUnknown; };
  auto ladder = [&]() {
    PrecisionLadder l;
    l.start = std::min(cfg.precision, cfg.max_precision);
    l.max = cfg.max_precision;
    return l;
  };

  // construct
  auto* construct = app.add_subcommand("construct", "build explicit hypersurfaces");
  construct->require_subcommand(1);
  struct {
    int n = 2;
    int height = 10;
    bool emit_poly = false;
  } thm3;
  auto* c_thm3 = construct->add_subcommand("thm3", "power-sum hypersurface with N = 4n-3 generic forms");
  c_thm3->add_option("--n", thm3.n, "projective dimension")->required();
  c_thm3->add_option("--height", thm3.height, "coefficient bound")->capture_default_str();
  c_thm3->add_flag("--emit-poly", thm3.emit_poly, "include the expanded polynomial (n <= 3)");
  c_thm3->callback([&] {
    action = [&] {
      auto t = construct_theorem3(thm3.n, cfg.seed, thm3.height);
      auto j = to_json(t);
      if (thm3.emit_poly) j["polynomial"] = t.expanded().to_string();
      records.push_back(j);
    };
  });

  // check
  auto* check = app.add_subcommand("check", "run hyperbolicity certificates");
  check->require_subcommand(1);
  int check_n = 11;
  std::string g_text;
  std::string a_text[3] = {"0", "0", "0"};
  auto* c_thm4 = check->add_subcommand("thm4", "quadric-perturbed Fermat surface certificate");
  c_thm4->add_option("--n", check_n, "degree")->required();
  c_thm4->add_option("--g", g_text, "quadratic form in x0..x3 with x3^2 coefficient 1")->required();
  c_thm4->callback([&] {
    action = [&] {
      auto v = check_theorem4(make_theorem4(check_n, g_text), ladder());
      auto j = to_json(v);
      j["n"] = check_n;
      j["g"] = g_text;
      records.push_back(j);
      code = verdict_code(v.verdict);
    };
  });
  auto* c_cor = check->add_subcommand("corollary", "diagonal quadric closed-form conditions");
  c_cor->add_option("--n", check_n, "degree")->required();
  for (int i = 0; i < 3; ++i) c_cor->add_option("--a" + std::to_string(i), a_text[i], "coefficient a" + std::to_string(i))->required();
  c_cor->callback([&] {
    action = [&] {
      std::array<GaussianRational, 3> a;
      for (int i = 0; i < 3; ++i) a[i] = detail::gaussian_constant(a_text[i]);
      auto v = check_corollary(check_n, a, ladder());
      auto j = to_json(v);
      j["n"] = check_n;
      j["a"] = {to_text(a[0]), to_text(a[1]), to_text(a[2])};
      records.push_back(j);
      code = verdict_code(v.verdict);
    };
  });

  // borel
  auto* borel = app.add_subcommand("borel", "Borel lemma and Wronskian chart transfer");
  borel->require_subcommand(1);
  struct {
    int n = 2;
    int p = 0;
    std::string deltas, g, germ, series, var = "t";
  } bo;
  auto* b_thr = borel->add_subcommand("threshold", "least admissible p");
  b_thr->add_option("--n", bo.n)->required();
  b_thr->add_option("--deltas", bo.deltas, "comma-separated degrees delta_0..delta_n")->required();
  b_thr->callback([&] {
    action = [&] {
      auto d = detail::int_list(bo.deltas);
      records.push_back({{"n", bo.n}, {"deltas", d}, {"threshold", borel_threshold(bo.n, d)}});
    };
  });
  auto* b_part = borel->add_subcommand("partition", "find a Borel partition of series summing to zero");
  b_part->add_option("--series", bo.series, "';'-separated items, each '<poly>' or '<poly>*exp(c)' in t")->required();
  b_part->add_option("--var", bo.var)->capture_default_str();
  b_part->callback([&] {
    action = [&] {
      std::vector<RationalSeries> f;
      for (const auto& item : detail::split(bo.series, ';')) f.push_back(detail::series_item(item, bo.var, cfg.truncation));
      auto bp = find_borel_partition(f);
      nlohmann::json j{{"found", bp.has_value()}};
      if (bp) j["partition"] = to_json(*bp);
      records.push_back(j);
    };
  });
  auto* b_chart = borel->add_subcommand("chart", "compare the Wronskian in the z- and w-charts");
  b_chart->add_option("--n", bo.n)->required();
  b_chart->add_option("--p", bo.p)->required();
  b_chart->add_option("--deltas", bo.deltas)->required();
  b_chart->add_option("--g", bo.g, "';'-separated homogeneous g_0..g_n in x0..xn")->required();
  b_chart->add_option("--germ", bo.germ, "';'-separated polynomial components x_0(t)..x_n(t)")->required();
  b_chart->callback([&] {
    action = [&] {
      PowerSumInstance inst;
      inst.n = bo.n;
      inst.p = bo.p;
      inst.deltas = detail::int_list(bo.deltas);
      for (const auto& s : detail::split(bo.g, ';')) inst.g.push_back(parse_polynomial<Rational>(s));
      std::vector<std::string> names;
      std::vector<RationalPoly> comps;
      for (const auto& s : detail::split(bo.germ, ';')) {
        names.push_back(PowerSumInstance::x(static_cast<int>(comps.size())));
        comps.push_back(parse_polynomial<Rational>(s));
      }
      auto rep = wronskian_chart_transfer(inst, CurveGerm<Rational>::from_polynomials(names, comps, "t", cfg.truncation));
      records.push_back(to_json(rep));
      code = rep.identity_holds ? kSuccess : kRejected;
    };
  });

  // grassmann
  auto* grass = app.add_subcommand("grassmann", "degeneracy-stratum dimension counts");
  grass->require_subcommand(1);
  struct {
    int m = 4, N = 9, k = 2, trials = 10;
    std::string forms, blocks;
  } gr;
  auto* g_scan = grass->add_subcommand("scan", "exhaustive codimension scan over block-size multisets");
  g_scan->add_option("--m", gr.m)->required();
  g_scan->add_option("--N", gr.N)->required();
  g_scan->callback([&] { action = [&] { records.push_back(to_json(prop4_threshold_scan(gr.m, gr.N))); }; });
  auto* g_ev = grass->add_subcommand("evidence", "randomized rank evidence for one partition");
  g_ev->add_option("--forms", gr.forms, "';'-separated rows of comma-separated rationals")->required();
  g_ev->add_option("--blocks", gr.blocks, "comma-separated consecutive block sizes")->required();
  g_ev->add_option("--k", gr.k)->required();
  g_ev->add_option("--trials", gr.trials)->capture_default_str();
  g_ev->callback([&] {
    action = [&] {
      Matrix<Rational> rows;
      for (const auto& r : detail::split(gr.forms, ';')) {
        std::vector<Rational> row;
        for (const auto& c : detail::split(r, ',')) row.push_back(parse_rational(c));
        rows.push_back(row);
      }
      if (rows.empty()) throw Error("no forms given");
      HyperplaneSet H(static_cast<int>(rows[0].size()), rows);
      auto ev = emptiness_evidence(H, GroupedPartition::consecutive(detail::int_list(gr.blocks)), gr.k, gr.trials, cfg.seed);
      records.push_back(to_json(ev));
    };
  });

  // jet
  auto* jet = app.add_subcommand("jet", "jet differential algebra");
  jet->require_subcommand(1);
  struct {
    std::string omega, germ, u, var = "t";
    int times = 1;
  } je;
  auto* j_d = jet->add_subcommand("d", "total derivative");
  j_d->add_option("--omega", je.omega)->required();
  j_d->add_option("--times", je.times)->capture_default_str()->check(CLI::Range(0, 64));
  j_d->callback([&] {
    action = [&] {
      auto w = parse_jet<Rational>(je.omega, cfg.precision);
      auto dw = w.total_derivative(je.times);
      nlohmann::json j{{"input", w.to_string()}, {"output", dw.to_string()}, {"order", dw.order()}};
      if (auto wt = dw.homogeneous_weight()) j["weight"] = *wt;
      records.push_back(j);
    };
  });
  auto germ_of = [&](const std::string& text) {
    std::vector<std::string> names;
    std::vector<RationalPoly> comps;
    for (const auto& item : detail::split(text, ';')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Error("germ component '" + item + "' must look like name=poly");
      names.push_back(hypcert::detail::strip(item.substr(0, eq)));
      comps.push_back(parse_polynomial<Rational>(item.substr(eq + 1)));
    }
    return CurveGerm<Rational>::from_polynomials(names, comps, je.var, cfg.truncation);
  };
  auto* j_pb = jet->add_subcommand("pullback", "evaluate a jet differential along a curve germ");
  j_pb->add_option("--omega", je.omega)->required();
  j_pb->add_option("--germ", je.germ, "';'-separated name=poly(t) components")->required();
  j_pb->add_option("--var", je.var)->capture_default_str();
  j_pb->callback([&] {
    action = [&] {
      auto w = parse_jet<Rational>(je.omega, cfg.precision);
      records.push_back({{"omega", w.to_string()}, {"pullback", detail::series_json(pullback(w, germ_of(je.germ)))}});
    };
  });
  auto* j_w = jet->add_subcommand("wronskian", "Wronskian of polynomials in t");
  j_w->add_option("--u", je.u, "';'-separated polynomials")->required();
  j_w->add_option("--var", je.var)->capture_default_str();
  j_w->callback([&] {
    action = [&] {
      std::vector<RationalSeries> u;
      for (const auto& s : detail::split(je.u, ';'))
        u.push_back(RationalSeries::from_polynomial(parse_polynomial<Rational>(s), je.var, cfg.truncation));
      auto w = wronskian(u);
      records.push_back({{"wronskian", detail::series_json(w)}, {"identically_zero", w.is_zero_through_order()}});
    };
  });

  // nev
  auto* nev = app.add_subcommand("nev", "Nevanlinna functionals");
  nev->require_subcommand(1);
  struct {
    std::string f, grid = "log:32", tau = "i", c = "1", w = "z", g = "gauss";
    double rmax = 1000, h = 1e-3, constant = 2;
    int nodes = 512;
    int ell = 0;
  } nv;
  auto* n_prof = nev->add_subcommand("profile", "characteristic function profile of a rational function");
  n_prof->add_option("--f", nv.f, "rational:<num>/<den>")->required();
  n_prof->add_option("--rmax", nv.rmax)->capture_default_str();
  n_prof->add_option("--grid", nv.grid, "log:K or comma-separated radii")->capture_default_str();
  n_prof->add_option("--nodes", nv.nodes)->capture_default_str()->check(CLI::Range(4, 1 << 20));
  n_prof->add_option("--ell", nv.ell, "truncation level for N_ell (0 = off)");
  n_prof->callback([&] {
    action = [&] {
      auto F = MeromorphicSample::from_text(nv.f);
      auto prof = characteristic(F, parse_grid(nv.grid, nv.rmax), nv.nodes, nv.ell > 0 ? std::optional<int>(nv.ell) : std::nullopt);
      for (const auto& e : prof.entries) records.push_back(to_json(e));
      auto summary = to_json(prof);
      summary.erase("entries");
      records.push_back(summary);
    };
  });
  auto* n_def = nev->add_subcommand("defect", "elliptic-curve defect trend for zeta -> c zeta");
  n_def->add_option("--tau", nv.tau)->capture_default_str();
  n_def->add_option("--c", nv.c)->capture_default_str();
  n_def->add_option("--grid", nv.grid)->capture_default_str();
  n_def->add_option("--nodes", nv.nodes)->capture_default_str()->check(CLI::Range(4, 1 << 20));
  n_def->callback([&] {
    action = [&] {
      EllipticModel M(detail::complex_value(nv.tau));
      auto grid = nv.grid.rfind("log:", 0) == 0 ? parse_grid(nv.grid, 40.0) : parse_grid(nv.grid);
      auto rep = defect_estimate(M, detail::complex_value(nv.c), grid, nv.nodes);
      for (const auto& e : rep.entries) records.push_back(to_json(e));
      auto summary = to_json(rep);
      summary.erase("entries");
      records.push_back(summary);
    };
  });
  auto* n_curv = nev->add_subcommand("curvature", "finite-difference check of the scalar curvature identity");
  n_curv->add_option("--w", nv.w, "one of z, z2, exp, const")->capture_default_str()->check(CLI::IsMember({"z", "z2", "exp", "const"}));
  n_curv->add_option("--step", nv.h, "finite-difference step")->capture_default_str();
  n_curv->callback([&] {
    action = [&] {
      std::function<cplx(cplx)> w, dw;
      if (nv.w == "z") {
        w = [](cplx z) { return z; };
        dw = [](cplx) { return cplx(1); };
      } else if (nv.w == "z2") {
        w = [](cplx z) { return z * z; };
        dw = [](cplx z) { return 2.0 * z; };
      } else if (nv.w == "exp") {
        w = [](cplx z) { return std::exp(z); };
        dw = [](cplx z) { return std::exp(z); };
      } else {
        w = [](cplx) { return cplx(1); };
        dw = [](cplx) { return cplx(0); };
      }
      auto rep = curvature_identity_check(w, dw, nv.h);
      records.push_back({{"w", nv.w}, {"h", nv.h}, {"max_residual", rep.max_residual}, {"max_rhs", rep.max_rhs}, {"points", rep.points}});
    };
  });
  auto* n_calc = nev->add_subcommand("calculus", "probe the averaged-log inequality");
  n_calc->add_option("--g", nv.g, "one of one, gauss, poly")->capture_default_str()->check(CLI::IsMember({"one", "gauss", "poly"}));
  n_calc->add_option("--grid", nv.grid, "log:K on [1,20] or comma-separated radii")->capture_default_str();
  n_calc->add_option("--constant", nv.constant, "reference constant for violations")->capture_default_str();
  n_calc->callback([&] {
    action = [&] {
      std::function<double(cplx)> g;
      if (nv.g == "one") g = [](cplx) { return 1.0; };
      if (nv.g == "gauss") g = [](cplx z) { return std::exp(std::norm(z)); };
      if (nv.g == "poly") g = [](cplx z) { return std::norm(z) + 1; };
      auto grid = nv.grid.rfind("log:", 0) == 0 ? parse_grid(nv.grid, 20.0) : parse_grid(nv.grid);
      records.push_back(to_json(calculus_lemma_probe(g, grid, nv.constant)));
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    // help of the deepest selected subcommand
    const CLI::App* sub = &app;
    while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (cfg.verbosity > 0) err << "config " << cfg.to_json().dump() << "\n";
    action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::out | std::ios::trunc);
    if (!file) {
      err << "error: cannot open " << cfg.output << "\n";
      return kUsage;
    }
    sink = &file;
  }
  for (auto& r : records) {
    r["config"] = cfg.to_json();
    if (cfg.human) {
      *sink << detail::human_text(r) << "\n";
    } else {
      std::string line = r.dump() + "\n";
      sink->write(line.data(), static_cast<std::streamsize>(line.size()));
    }
  }
  sink->flush();
  return code;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace hypcert::cli
