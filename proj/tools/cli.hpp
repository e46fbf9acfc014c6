#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfalign/cfalign.hpp"

namespace cfalign::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

inline std::string to_string(const BigInt& v) { return v.str(); }

inline SearchMethod parse_method(const std::string& s) {
  if (s == "exhaustive") return SearchMethod::exhaustive;
  if (s == "lll") return SearchMethod::lll;
  return SearchMethod::automatic;
}

template <typename T>
json matrix_json(const Matrix<T>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<T, Rational> || std::is_same_v<T, BigInt>)
        row.push_back(to_string(m(i, j)));
      else
        row.push_back(m(i, j));
    }
    rows.push_back(row);
  }
  return rows;
}

template <typename T>
void print_matrix(std::ostream& out, const Matrix<T>& m, const std::string& indent) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << indent << "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ", ";
      if constexpr (std::is_same_v<T, Rational> || std::is_same_v<T, BigInt>)
        out << to_string(m(i, j));
      else
        out << m(i, j);
    }
    out << "]\n";
  }
}

inline std::vector<std::size_t> one_based(const std::vector<std::size_t>& pi) {
  std::vector<std::size_t> v(pi);
  for (auto& x : v) ++x;
  return v;
}

// ---------------------------------------------------------------- rates

struct RatesArgs {
  std::vector<double> h;
  std::vector<double> eff_g;
  std::vector<double> eff_b;
  double snr_db = 0.0;
  std::string method = "auto";
  std::size_t budget = kDefaultNodeBudget;
  std::string format = "text";
};

inline int cmd_rates(const RatesArgs& a, std::ostream& out) {
  const double snr = db_to_linear(a.snr_db);
  const ChannelSpec ch = a.h.empty() ? ChannelSpec::effective(a.eff_g, a.eff_b, snr) : ChannelSpec::plain(a.h, snr);
  const CfTransform t = transform(ch, parse_method(a.method), a.budget);
  const SumRateBounds bounds = sum_rate_bounds(t);
  const auto pts = pseudo_triangularize(t.A);

  if (a.format == "json") {
    json j;
    j["snr_db"] = a.snr_db;
    j["method_used"] = std::string(cfalign::to_string(t.method));
    j["A"] = matrix_json(t.A);
    json eqs = json::array();
    for (const auto& r : t.results)
      eqs.push_back({{"a", r.a.entries()}, {"beta", r.beta}, {"sigma2_eff", r.sigma2_eff}, {"r_comp", r.r_comp}});
    j["equations"] = eqs;
    j["sum_rate"] = {{"lower", bounds.lower}, {"sum", bounds.sum}, {"upper", bounds.upper},
                     {"certified", bounds.certified}};
    json perms = json::array();
    for (const auto& pt : pts) {
      const ModPLift lift = mod_p_lift(t.A, pt);
      perms.push_back({{"pi", one_based(pt.pi)},
                       {"L", matrix_json(pt.L)},
                       {"A_tilde", matrix_json(pt.A_tilde)},
                       {"allocation", rate_allocation(t, pt)},
                       {"p", to_string(lift.p)},
                       {"L_p", matrix_json(lift.L_p)}});
    }
    j["permutations"] = perms;
    j["permutations_complete"] = t.A.rows() <= kMaxEnumeratedOrder;
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  out << std::setprecision(6);
  out << "channel: " << (ch.is_effective() ? "effective" : "plain") << " MAC, K=" << ch.users()
      << ", SNR=" << a.snr_db << " dB, method=" << cfalign::to_string(t.method)
      << (t.fell_back ? " (node budget exceeded)" : "") << "\n";
  out << "A =\n";
  print_matrix(out, t.A, "  ");
  out << "m  a  beta  sigma2_eff  R_comp\n";
  for (std::size_t m = 0; m < t.results.size(); ++m) {
    const auto& r = t.results[m];
    out << m + 1 << "  [";
    for (std::size_t i = 0; i < r.a.size(); ++i) out << (i ? "," : "") << r.a[i];
    out << "]  " << r.beta << "  " << r.sigma2_eff << "  " << r.r_comp << "\n";
  }
  out << "sum-rate: lower=" << bounds.lower << " sum=" << bounds.sum << " upper=" << bounds.upper
      << " ratio=" << bounds.sum / bounds.upper << (bounds.certified ? "" : " (LLL, lower bound not guaranteed)")
      << "\n";
  out << "feasible permutations: " << pts.size()
      << (t.A.rows() > kMaxEnumeratedOrder ? " (greedy search only)" : "") << "\n";
  for (const auto& pt : pts) {
    out << "  pi = [";
    const auto pi = one_based(pt.pi);
    for (std::size_t i = 0; i < pi.size(); ++i) out << (i ? "," : "") << pi[i];
    out << "]\n  L =\n";
    print_matrix(out, pt.L, "    ");
    const ModPLift lift = mod_p_lift(t.A, pt);
    out << "  mod-p lift: p=" << to_string(lift.p) << "\n";
    out << "  allocation:";
    for (double r : rate_allocation(t, pt)) out << " " << r;
    out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  int users = 3;
  double g = 1.0;
  double snr_db = 0.0;
  double c = 2.0;
  std::string method = "auto";
  std::size_t budget = kDefaultNodeBudget;
  bool hk_grid = false;
  std::string format = "text";
};

inline json report_json(const RegimeReport& r) {
  return {{"alpha", r.alpha},
          {"regime", std::string(cfalign::to_string(r.regime))},
          {"r_single", r.r_single},
          {"r_noise", r.r_noise},
          {"r_hk", r.r_hk ? json(*r.r_hk) : json(nullptr)},
          {"r_tdma", r.r_tdma},
          {"r_best", r.r_best},
          {"lower_closed", r.lower_closed},
          {"upper_tight", r.upper_tight},
          {"upper_loose", r.upper_loose},
          {"in_outage", r.in_outage},
          {"method_used", std::string(cfalign::to_string(r.method_used))}};
}

inline int cmd_report(const ReportArgs& a, std::ostream& out) {
  const SymmetricIcSpec spec(a.users, a.g, db_to_linear(a.snr_db));
  const RegimeReport r = report(spec, a.c, {parse_method(a.method), a.budget, a.hk_grid});
  if (a.format == "json") {
    json j = report_json(r);
    j["users"] = a.users;
    j["g"] = a.g;
    j["snr_db"] = a.snr_db;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << std::setprecision(6);
  out << "K=" << a.users << " g=" << a.g << " SNR=" << a.snr_db << " dB  alpha=" << r.alpha << " ("
      << cfalign::to_string(r.regime) << ")\n";
  out << "  single-layer      " << r.r_single << "\n";
  out << "  treat-as-noise    " << r.r_noise << "\n";
  out << "  Han-Kobayashi     ";
  if (r.r_hk)
    out << *r.r_hk << "\n";
  else
    out << "n/a (INR <= 1)\n";
  out << "  time-division     " << r.r_tdma << "  (baseline only)\n";
  out << "  best              " << r.r_best << "\n";
  out << "  closed-form lower " << r.lower_closed << "  (c=" << a.c << ")\n";
  out << "  upper (tight)     " << r.upper_tight << "\n";
  out << "  upper (loose)     " << r.upper_loose << "\n";
  out << "  in outage         " << (r.in_outage ? "yes" : "no") << "\n";
  out << "  lattice search    " << cfalign::to_string(r.method_used) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepConfig {
  int users = 3;
  std::vector<double> snr_db{15.0};
  double g_min = 0.0;
  double g_max = 1.0;
  std::size_t n_points = 100;
  std::string scale = "linear";
  double c = 2.0;
  std::string method = "auto";
  std::size_t budget = kDefaultNodeBudget;
  std::string format = "csv";
  std::string output;  // empty means stdout
  std::string mode = "ic";
  bool hk_grid = false;
  unsigned threads = 0;  // 0 picks hardware concurrency
};

inline std::vector<double> sweep_grid(const SweepConfig& cfg) {
  if (cfg.n_points < 2) throw InvalidArgument("sweep needs at least two points");
  if (!(cfg.g_min > 0.0)) throw InvalidArgument("g-min must be positive");
  if (!(cfg.g_min < cfg.g_max)) throw InvalidArgument("g-min must be below g-max");
  std::vector<double> grid(cfg.n_points);
  const auto last = static_cast<double>(cfg.n_points - 1);
  for (std::size_t i = 0; i < cfg.n_points; ++i) {
    const double t = static_cast<double>(i) / last;
    grid[i] = cfg.scale == "log" ? cfg.g_min * std::pow(cfg.g_max / cfg.g_min, t)
                                 : cfg.g_min + (cfg.g_max - cfg.g_min) * t;
  }
  grid.back() = cfg.g_max;
  return grid;
}

// One output row: ordered (column, value) pairs. Values are numbers, bools,
// strings, or null.
using Row = std::vector<std::pair<std::string, json>>;

inline Row ic_row(const SweepConfig& cfg, double snr_db, double g) {
  const SymmetricIcSpec spec(cfg.users, g, db_to_linear(snr_db));
  const RegimeReport r = report(spec, cfg.c, {parse_method(cfg.method), cfg.budget, cfg.hk_grid});
  return {{"snr_db", snr_db},
          {"g", g},
          {"alpha", r.alpha},
          {"regime", std::string(cfalign::to_string(r.regime))},
          {"r_single", r.r_single},
          {"r_noise", r.r_noise},
          {"r_hk", r.r_hk ? json(*r.r_hk) : json(nullptr)},
          {"r_tdma", r.r_tdma},
          {"r_best", r.r_best},
          {"lower_closed", r.lower_closed},
          {"upper_tight", r.upper_tight},
          {"upper_loose", r.upper_loose},
          {"in_outage", r.in_outage},
          {"method_used", std::string(cfalign::to_string(r.method_used))}};
}

// Two-user MAC y = x1 + h x2 + z: both computation rates against sum capacity.
inline Row mac_row(const SweepConfig& cfg, double snr_db, double h) {
  const double snr = db_to_linear(snr_db);
  const CfTransform t = transform(ChannelSpec::plain({1.0, h}, snr), parse_method(cfg.method), cfg.budget);
  const double sum = t.results[0].r_comp + t.results[1].r_comp;
  const double c_mac = 0.5 * std::log2(1.0 + (1.0 + h * h) * snr);
  return {{"snr_db", snr_db},   {"h", h},         {"r_comp_1", t.results[0].r_comp},
          {"r_comp_2", t.results[1].r_comp}, {"sum", sum}, {"c_mac", c_mac},
          {"normalized", sum / c_mac}, {"method_used", std::string(cfalign::to_string(t.method))}};
}

inline std::vector<Row> sweep_rows(const SweepConfig& cfg) {
  if (cfg.mode != "ic" && cfg.mode != "mac") throw InvalidArgument("mode must be ic or mac");
  if (cfg.snr_db.empty()) throw InvalidArgument("sweep needs at least one snr value");
  const std::vector<double> grid = sweep_grid(cfg);
  const std::size_t total = grid.size() * cfg.snr_db.size();
  std::vector<Row> rows(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const double snr_db = cfg.snr_db[i / grid.size()];
      const double g = grid[i % grid.size()];
      try {
        rows[i] = cfg.mode == "mac" ? mac_row(cfg, snr_db, g) : ic_row(cfg, snr_db, g);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, total));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return fmt(v.get<double>());
}

inline void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  if (rows.empty()) return;
  for (std::size_t i = 0; i < rows.front().size(); ++i) out << (i ? "," : "") << rows.front()[i].first;
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i].second);
    out << '\n';
  }
}

inline void write_json(std::ostream& out, const std::vector<Row>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (const auto& [k, v] : row) obj[k] = v;
    arr.push_back(obj);
  }
  out << arr.dump(2) << '\n';
}

inline int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<Row> rows = sweep_rows(cfg);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file " << cfg.output << "\n";
      return kExitFailure;
    }
    sink = &file;
  }
  if (cfg.format == "json")
    write_json(*sink, rows);
  else
    write_csv(*sink, rows);
  sink->flush();
  if (!*sink) {
    err << "error: failed writing sweep output\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- outage

struct OutageArgs {
  std::string regime = "strong";
  int b = 1;
  double snr_db = 40.0;
  double c = 2.0;
  std::string format = "text";
};

inline int cmd_outage(const OutageArgs& a, std::ostream& out) {
  const double snr = db_to_linear(a.snr_db);
  const bool strong = a.regime == "strong";
  const OutageParams p = strong ? strong_outage_params(a.b, snr, a.c) : weak_outage_params(a.b, snr, a.c);
  IntervalSet set = strong ? strong_outage_set(a.b, snr, a.c) : weak_outage_set(a.b, snr, a.c);
  const double measure = set.measure();
  const double limit = std::exp2(-a.c);
  const bool ok = measure <= limit;
  if (a.format == "json") {
    json ivs = json::array();
    for (const auto& iv : set.intervals()) ivs.push_back({iv.lo, iv.hi});
    json j = {{"regime", std::string(cfalign::to_string(p.regime))},
              {"b", p.b},
              {"snr_db", a.snr_db},
              {"c", p.c},
              {"delta", p.delta},
              {"q_max", p.q_max},
              {"phi", p.phi},
              {"domain", {p.domain_lo(), p.domain_hi()}},
              {"intervals", ivs},
              {"measure", measure},
              {"limit", limit},
              {"within_limit", ok}};
    out << j.dump(2) << "\n";
  } else {
    out << std::setprecision(17);
    out << "regime=" << cfalign::to_string(p.regime) << " b=" << p.b << " SNR=" << a.snr_db << " dB c=" << p.c
        << "\n";
    out << "delta=" << p.delta << " q_max=" << p.q_max << " phi=" << p.phi << "\n";
    out << "domain [" << p.domain_lo() << ", " << p.domain_hi() << ")\n";
    for (const auto& iv : set.intervals()) out << "[" << iv.lo << ", " << iv.hi << ")\n";
    out << "measure=" << measure << " limit=2^-c=" << limit << " " << (ok ? "OK" : "EXCEEDED") << "\n";
  }
  return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- gdof

inline int cmd_gdof(double alpha, int users, std::ostream& out) {
  out << fmt(gdof(alpha, users)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- driver

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compute-and-forward rates, interference-channel bounds and outage sets"};
  // -h stays free for the channel vector option; help is --help only.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  const std::vector<std::string> methods{"exhaustive", "lll", "auto"};

  RatesArgs ra;
  auto* rates = app.add_subcommand("rates", "optimal coefficient vectors and the CF transform of a MAC");
  auto* opt_h = rates->add_option("--h", ra.h, "channel vector, comma separated")->delimiter(',');
  auto* opt_g = rates->add_option("--eff-g", ra.eff_g, "effective gains, comma separated")->delimiter(',');
  auto* opt_b = rates->add_option("--eff-b", ra.eff_b, "squared effective weights, comma separated")->delimiter(',');
  opt_h->excludes(opt_g)->excludes(opt_b);
  opt_g->needs(opt_b);
  opt_b->needs(opt_g);
  rates->add_option("--snr-db", ra.snr_db, "SNR in dB")->required();
  rates->add_option("--method", ra.method)->check(CLI::IsMember(methods));
  rates->add_option("--budget", ra.budget, "enumeration node budget");
  rates->add_option("--format", ra.format)->check(CLI::IsMember({"text", "json"}));

  ReportArgs rp;
  auto* rep = app.add_subcommand("report", "all scheme rates and bounds for one symmetric IC");
  rep->add_option("--users,-K", rp.users, "number of users")->required();
  rep->add_option("--g", rp.g, "cross gain")->required();
  rep->add_option("--snr-db", rp.snr_db, "SNR in dB")->required();
  rep->add_option("--c", rp.c, "outage gap constant");
  rep->add_option("--method", rp.method)->check(CLI::IsMember(methods));
  rep->add_option("--budget", rp.budget);
  rep->add_flag("--hk-grid", rp.hk_grid, "also search a 64-point gamma grid");
  rep->add_option("--format", rp.format)->check(CLI::IsMember({"text", "json"}));

  SweepConfig sw;
  auto* sweep = app.add_subcommand("sweep", "tabulate rates and bounds over a grid of gains");
  sweep->add_option("--users,-K", sw.users);
  sweep->add_option("--snr-db", sw.snr_db, "one or more SNR values in dB")->delimiter(',')->required();
  sweep->add_option("--g-min", sw.g_min)->required();
  sweep->add_option("--g-max", sw.g_max)->required();
  sweep->add_option("--n-points", sw.n_points);
  sweep->add_option("--scale", sw.scale)->check(CLI::IsMember({"linear", "log"}));
  sweep->add_option("--c", sw.c);
  sweep->add_option("--method", sw.method)->check(CLI::IsMember(methods));
  sweep->add_option("--budget", sw.budget);
  sweep->add_option("--format", sw.format)->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--output,-o", sw.output, "output path, stdout when omitted");
  sweep->add_option("--mode", sw.mode, "ic: symmetric interference channel, mac: y = x1 + h x2 + z")
      ->check(CLI::IsMember({"ic", "mac"}));
  sweep->add_flag("--hk-grid", sw.hk_grid);
  sweep->add_option("--threads", sw.threads);

  OutageArgs oa;
  auto* outage = app.add_subcommand("outage", "dump a Diophantine outage set and its measure");
  outage->add_option("--regime", oa.regime)->check(CLI::IsMember({"strong", "moderately-weak", "weak"}));
  outage->add_option("--b", oa.b)->required();
  outage->add_option("--snr-db", oa.snr_db)->required();
  outage->add_option("--c", oa.c);
  outage->add_option("--format", oa.format)->check(CLI::IsMember({"text", "json"}));

  double alpha = 0.0;
  int gd_users = 2;
  auto* gd = app.add_subcommand("gdof", "generalized degrees of freedom");
  gd->add_option("--alpha", alpha)->required();
  gd->add_option("--users,-K", gd_users);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (*rates && ra.h.empty() && ra.eff_g.empty()) {
    err << "usage error: rates needs --h or --eff-g/--eff-b\n";
    return kExitUsage;
  }

  try {
    if (*rates) return cmd_rates(ra, out);
    if (*rep) return cmd_report(rp, out);
    if (*sweep) return cmd_sweep(sw, out, err);
    if (*outage) return cmd_outage(oa, out);
    if (*gd) return cmd_gdof(alpha, gd_users, out);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace cfalign::cli
