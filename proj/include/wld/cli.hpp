#pragma once

// The wld command line: argument parsing, config validation, and the JSON/CSV
// artifacts each subcommand writes. tools/wld_cli.cpp is a thin main().

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wld/empirical_statistics.hpp"
#include "wld/errors.hpp"
#include "wld/golden.hpp"
#include "wld/kernels_identities.hpp"
#include "wld/main_terms.hpp"
#include "wld/rmt_cue.hpp"
#include "wld/test_functions.hpp"
#include "wld/zero_finder.hpp"

namespace wld {

inline constexpr const char* kVersion = "0.3.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitMissingCache = 3,
  kExitTolerance = 4,
  kExitIdentity = 5,
};

/// Signals that the zero cache lacks a window a command needs.
class MissingCache : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  // shared
  int k = 1;
  double T = 1000;
  double delta = 0.45;
  std::string shape = "bump";
  std::string phi = "bump12";
  unsigned threads = 0;
  std::string out;  ///< JSON destination, stdout when empty
  std::string csv;
  // zeros
  double lo = 0, hi = 0;
  // verify-identities
  int k_max = 8;
  // rmt
  int n = 30;
  std::size_t samples = 200000;
  std::uint64_t seed = 20240601;
  int bins = 40;
  double x_min = -5, x_max = 5;
  double x_cmp = 3;
  std::string sampling = "reweight";
  // largevalues
  std::vector<double> U{1, 2, 3};
  double window = 0;
  // report
  std::vector<double> report_T{1000, 10000};
  double tol_k0 = 0.05, tol_k1 = 0.15, tol_k2 = 0.25;
  // oracle
  std::vector<std::string> only;
  bool skip_slow = false;
  bool list = false;

  TestFunction test_function() const { return make_bump_pair(delta, shape_from_string(shape)); }
  WeightFunction weight() const { return weight_from_name(phi); }

  /// Throws DomainError on any bad parameter; nothing is computed before this.
  void validate() const {
    const auto need = [](bool ok, const std::string& msg) {
      if (!ok) throw DomainError(msg);
    };
    test_function();
    weight();
    if (command == "zeros") {
      need(T >= 100 || (lo >= 0 && hi > lo), "zeros: give --T >= 100 or 0 <= --lo < --hi");
    } else if (command == "density" || command == "predict") {
      need(k >= 0 && k <= 2, command + ": --k must be 0, 1 or 2");
      need(T >= 100 && std::isfinite(T), command + ": --T must be >= 100");
    } else if (command == "verify-identities") {
      need(k_max >= 1 && k_max <= 12, "verify-identities: --k-max must be in 1..12");
    } else if (command == "rmt") {
      check_dimension(n);
      need(k >= 0 && k <= 2, "rmt: --k must be 0, 1 or 2");
      need(samples >= 10000, "rmt: --samples must be >= 10000");
      need(bins >= 1 && x_max > x_min, "rmt: bad bin layout");
      need(sampling == "reweight" || sampling == "direct", "rmt: --sampling is reweight or direct");
      need(x_cmp > 0, "rmt: --x-cmp must be > 0");
    } else if (command == "largevalues") {
      LargeValueQuery q{k, T, 1, window};
      q.validate();
      need(!U.empty(), "largevalues: need at least one --U");
      for (double u : U) need(u > 0, "largevalues: --U must be > 0");
    } else if (command == "report") {
      need(!report_T.empty(), "report: need at least one --T");
      for (double t : report_T) need(t >= 100, "report: --T must be >= 100");
      need(tol_k0 > 0 && tol_k1 > 0 && tol_k2 > 0, "report: tolerances must be > 0");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"command", command}};
    const auto f = nlohmann::json{{"delta", delta}, {"shape", shape}, {"phi", phi}};
    if (command == "zeros") {
      j.update(f);
      j.update({{"T", T}, {"lo", lo}, {"hi", hi}});
    } else if (command == "density" || command == "predict") {
      j.update(f);
      j.update({{"k", k}, {"T", T}});
    } else if (command == "verify-identities") {
      j["k_max"] = k_max;
    } else if (command == "rmt") {
      j.update({{"n", n}, {"k", k}, {"samples", samples}, {"seed", seed}, {"bins", bins},
                {"x_min", x_min}, {"x_max", x_max}, {"x_cmp", x_cmp}, {"sampling", sampling}});
    } else if (command == "largevalues") {
      j.update({{"k", k}, {"T", T}, {"U", U}, {"window", window}});
    } else if (command == "report") {
      j.update(f);
      j.update({{"T", report_T}, {"tol_k0", tol_k0}, {"tol_k1", tol_k1}, {"tol_k2", tol_k2}});
    } else if (command == "oracle") {
      j.update({{"only", only}, {"skip_slow", skip_slow}, {"list", list}});
    }
    return j;
  }
};

namespace cli_detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

/// Cached zeros for [lo, hi]; the CLI never starts a scan outside `zeros`.
inline ZeroSet cached(double lo, double hi) {
  auto z = find_cached_zeros(lo, hi);
  if (!z) {
    std::ostringstream msg;
    msg << "no cached zeros cover [" << lo << ", " << hi << "] in " << cache_dir().string()
        << "; run `wld zeros` first";
    throw MissingCache(msg.str());
  }
  return *z;
}

inline std::string golden_path() {
#ifdef WLD_SOURCE_DIR
  return std::string(WLD_SOURCE_DIR) + "/tests/golden/golden.json";
#else
  return "tests/golden/golden.json";
#endif
}

inline std::string oracle_script() {
#ifdef WLD_SOURCE_DIR
  return std::string(WLD_SOURCE_DIR) + "/tools/oracle/mpmath_oracle.py";
#else
  return "tools/oracle/mpmath_oracle.py";
#endif
}

struct Outcome {
  nlohmann::json result;
  int code = kExitOk;
};

inline Outcome run_zeros(const RunConfig& c) {
  double lo = c.lo, hi = c.hi;
  if (!(hi > lo)) std::tie(lo, hi) = density_window(c.test_function(), c.weight(), c.T);
  const ZeroSet zs = zeros_for_window(lo, hi);
  return {{{"lo", lo},
           {"hi", hi},
           {"count", zs.size()},
           {"complete", zs.complete},
           {"first_index", zs.zeros.empty() ? 0 : zs.zeros.front().index},
           {"cache_dir", cache_dir().string()}}};
}

inline Outcome run_density(const RunConfig& c) {
  const auto f = c.test_function();
  const auto phi = c.weight();
  const auto [lo, hi] = density_window(f, phi, c.T);
  const ZeroSet zs = cached(lo, hi);
  DensityOptions opt;
  opt.threads = c.threads;
  return {to_json(weighted_density(c.k, f, phi, c.T, zs, opt))};
}

inline Outcome run_predict(const RunConfig& c) {
  const auto f = c.test_function();
  const auto phi = c.weight();
  nlohmann::json j{{"prediction", kernel_prediction(f, c.k)},
                   {"fhat0", f.fhat(0)},
                   {"psi", psi_limit(c.T, phi)},
                   {"mass_k0", c.T * phi.mellin(1).real()}};
  if (c.k == 1) {
    MainTermContext ctx;
    ctx.T = c.T;
    ctx.phi = phi;
    j["rhs_k1"] = rhs_k1(f, ctx).value;
  }
  return {j};
}

inline Outcome run_identities(const RunConfig& c) {
  const auto r = verify_identities(c.k_max);
  return {to_json(r), r.all_pass() ? kExitOk : kExitIdentity};
}

inline BinSpec rmt_bins(const RunConfig& c) { return BinSpec::uniform(c.x_min, c.x_max, c.bins); }

inline Outcome run_rmt(const RunConfig& c, std::ostream& out) {
  HistOptions opt;
  opt.threads = c.threads;
  opt.sampling = c.sampling == "direct" ? TiltSampling::direct : TiltSampling::reweight;
  const auto h = weighted_density_hist(c.n, c.k, c.samples, rmt_bins(c), c.seed, opt);
  const auto d = compare_to_kernel(h, c.x_cmp);
  nlohmann::json j = to_json(h);
  j["kernel_deviation"] = {{"x_max", c.x_cmp},
                           {"max_dev", d.max_dev},
                           {"worst_stderr", d.worst_stderr},
                           {"max_sigma", d.max_sigma},
                           {"pass", d.pass}};
  if (c.k == 2) {
    try {
      const auto fit = fit_power_law(h, 0.05, 0.3);
      j["power_fit"] = {{"exponent", fit.exponent}, {"err", fit.exponent_err}, {"points", fit.points}};
    } catch (const SamplingError& e) {
      j["power_fit"] = {{"error", e.what()}};
    }
  }
  if (!c.csv.empty()) {
    std::ostringstream os;
    os << "x_lo,x_hi,density,stderr\n" << std::setprecision(10);
    for (std::size_t b = 0; b < h.density.size(); ++b)
      os << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.density[b] << ',' << h.std_err[b] << '\n';
    write_text(c.csv == "-" ? "" : c.csv, os.str(), out);
  }
  return {j};
}

inline Outcome run_largevalues(const RunConfig& c, std::ostream& out) {
  LargeValueQuery q{c.k, c.T, c.U.front(), c.window};
  const double w = q.resolved_window();
  const ZeroSet zs = cached(c.T - w, 2 * c.T + w);
  const auto rows = large_value_table(q, zs, c.threads);
  nlohmann::json counts = nlohmann::json::array();
  std::size_t prev = 0;
  bool monotone = true;
  for (double u : c.U) {
    const auto n = count_within(rows, u);
    if (n < prev) monotone = false;
    prev = n;
    counts.push_back({{"U", u},
                      {"count", n},
                      {"within_envelope", within_large_value_envelope(n, c.k, c.T, u)}});
  }
  if (!c.csv.empty()) {
    std::ostringstream os;
    write_large_value_csv(rows, os);
    write_text(c.csv == "-" ? "" : c.csv, os.str(), out);
  }
  return {{{"zeros", rows.size()}, {"window", w}, {"counts", counts}, {"monotone", monotone}}};
}

inline Outcome run_report(const RunConfig& c) {
  const auto f = c.test_function();
  const auto phi = c.weight();
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  std::vector<double> k1_dev, k2_dev;
  for (double T : c.report_T) {
    const auto [lo, hi] = density_window(f, phi, T);
    const ZeroSet zs = cached(lo, hi);
    DensityOptions opt;
    opt.threads = c.threads;
    for (int k = 0; k <= 2; ++k) {
      const auto r = weighted_density(k, f, phi, T, zs, opt);
      nlohmann::json row = to_json(r);
      double dev = 0, tol = 0;
      if (k == 1) {
        dev = std::fabs(r.lhs - *r.rhs_k1) / *r.rhs_k1;
        tol = c.tol_k1;
        k1_dev.push_back(dev);
      } else {
        dev = std::fabs(r.ratio - r.prediction) / r.prediction;
        tol = k == 0 ? c.tol_k0 : c.tol_k2;
        if (k == 2) k2_dev.push_back(dev);
      }
      row["deviation"] = dev;
      row["tolerance"] = tol;
      row["pass"] = dev <= tol;
      ok = ok && dev <= tol;
      rows.push_back(row);
    }
  }
  const auto non_increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) return false;
    return true;
  };
  // heights are taken in the order given, so pass them increasing
  const bool trend = non_increasing(k1_dev) && non_increasing(k2_dev);
  ok = ok && trend;
  return {{{"rows", rows}, {"deviation_non_increasing", trend}, {"pass", ok}},
          ok ? kExitOk : kExitTolerance};
}

inline Outcome run_oracle(const RunConfig& c) {
  if (c.list) {
    const auto g = GoldenStore::load(golden_path());
    std::map<std::string, int> by_provenance;
    for (const auto& [key, e] : g.entries()) ++by_provenance[e.provenance];
    return {{{"path", golden_path()}, {"entries", g.entries().size()}, {"by_provenance", by_provenance}}};
  }
  std::string cmd = "python3 '" + oracle_script() + "'";
  for (const auto& o : c.only) cmd += " --only " + o;
  if (c.skip_slow) cmd += " --skip-slow";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw Error("oracle script failed: " + cmd);
  return {{{"path", golden_path()}, {"ran", cmd}}};
}

}  // namespace cli_detail

/// Parses argv into a config. Returns an exit code when parsing ends the run
/// (help, or a malformed command line).
inline std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& c,
                                     std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted one-level density lab for zeta zeros", "wld"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const auto shared = [&](CLI::App* s) {
    s->add_option("--delta", c.delta, "Fourier support of the bump test function");
    s->add_option("--shape", c.shape, "bump or fejer")->check(CLI::IsMember({"bump", "fejer"}));
    s->add_option("--phi", c.phi, "weight function (bump12)");
    s->add_option("--threads", c.threads, "worker threads, 0 = all cores");
    s->add_option("--out", c.out, "JSON output path (default stdout)");
  };

  auto* zeros = app.add_subcommand("zeros", "find and cache zeros");
  shared(zeros);
  zeros->add_option("--T", c.T, "cache the window a density run at T needs");
  zeros->add_option("--lo", c.lo, "window start");
  zeros->add_option("--hi", c.hi, "window end");

  auto* density = app.add_subcommand("density", "weighted one-level density from cached zeros");
  shared(density);
  density->add_option("--k", c.k, "moment order 0, 1 or 2");
  density->add_option("--T", c.T, "height");

  auto* predict = app.add_subcommand("predict", "kernel prediction and main terms");
  shared(predict);
  predict->add_option("--k", c.k, "moment order 0, 1 or 2");
  predict->add_option("--T", c.T, "height");

  auto* ids = app.add_subcommand("verify-identities", "exact rational identity suite");
  ids->add_option("--k-max", c.k_max, "largest k checked");
  ids->add_option("--out", c.out, "JSON output path (default stdout)");

  auto* rmt = app.add_subcommand("rmt", "CUE Monte Carlo weighted density");
  rmt->add_option("--n", c.n, "matrix size");
  rmt->add_option("--k", c.k, "moment order 0, 1 or 2");
  rmt->add_option("--samples", c.samples, "matrices sampled");
  rmt->add_option("--seed", c.seed, "seed");
  rmt->add_option("--bins", c.bins, "number of bins");
  rmt->add_option("--x-min", c.x_min, "left edge");
  rmt->add_option("--x-max", c.x_max, "right edge");
  rmt->add_option("--x-cmp", c.x_cmp, "compare with the kernel over |x| <= x-cmp");
  rmt->add_option("--sampling", c.sampling, "reweight or direct");
  rmt->add_option("--threads", c.threads, "worker threads, 0 = all cores");
  rmt->add_option("--csv", c.csv, "histogram CSV path, - for stdout");
  rmt->add_option("--out", c.out, "JSON output path (default stdout)");

  auto* lv = app.add_subcommand("largevalues", "large values of zeta near zeros");
  lv->add_option("--k", c.k, "moment order");
  lv->add_option("--T", c.T, "zeros in [T, 2T]");
  lv->add_option("--U", c.U, "thresholds (repeatable)");
  lv->add_option("--window", c.window, "half-width around each zero, 0 = 1/log T");
  lv->add_option("--threads", c.threads, "worker threads, 0 = all cores");
  lv->add_option("--csv", c.csv, "per-zero CSV path, - for stdout");
  lv->add_option("--out", c.out, "JSON output path (default stdout)");

  auto* report = app.add_subcommand("report", "density checks against tolerances");
  shared(report);
  report->add_option("--T", c.report_T, "heights, increasing (repeatable)");
  report->add_option("--tol-k0", c.tol_k0, "relative tolerance on the k=0 ratio");
  report->add_option("--tol-k1", c.tol_k1, "relative tolerance of lhs against rhs_k1");
  report->add_option("--tol-k2", c.tol_k2, "relative tolerance on the k=2 ratio");

  auto* oracle = app.add_subcommand("oracle", "run the mpmath oracle or list the golden store");
  oracle->add_option("--only", c.only, "oracle groups to run");
  oracle->add_flag("--skip-slow", c.skip_slow, "skip slow groups");
  oracle->add_flag("--list", c.list, "summarise the golden store instead");
  oracle->add_option("--out", c.out, "JSON output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  c.command = app.get_subcommands().front()->get_name();
  return std::nullopt;
}

/// Runs one command. JSON goes to --out (or `out`); diagnostics go to `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  try {
    c.validate();
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  Outcome o;
  try {
    if (c.command == "zeros") o = run_zeros(c);
    else if (c.command == "density") o = run_density(c);
    else if (c.command == "predict") o = run_predict(c);
    else if (c.command == "verify-identities") o = run_identities(c);
    else if (c.command == "rmt") o = run_rmt(c, out);
    else if (c.command == "largevalues") o = run_largevalues(c, out);
    else if (c.command == "report") o = run_report(c);
    else if (c.command == "oracle") o = run_oracle(c);
    else throw DomainError("unknown command " + c.command);
  } catch (const MissingCache& e) {
    err << "missing cache: " << e.what() << '\n';
    return kExitMissingCache;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    // coverage, convergence and sampling failures
    err << "numerical failure: " << e.what() << '\n';
    return kExitTolerance;
  }
  nlohmann::json doc{{"config", c.to_json()},
                     {"version", kVersion},
                     {"generated_at", utc_now()},
                     {"result", o.result},
                     {"exit_code", o.code}};
  try {
    write_text(c.out, doc.dump(2) + "\n", out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  if (o.code == kExitIdentity) err << "identity failure\n";
  if (o.code == kExitTolerance) err << "tolerance violation\n";
  return o.code;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  RunConfig c;
  if (auto rc = parse_args(argc, argv, c, out, err)) return *rc;
  return run(c, out, err);
}

}  // namespace wld
