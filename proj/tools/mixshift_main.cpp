// mixshift command line interface: estimation, confidence intervals, moment
// propagation, Monte Carlo coverage studies, and sampling-distribution export.
//
// Exit codes: 0 success, 1 usage error, 2 data or computation error.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixshift/mixshift.hpp"

using json = nlohmann::ordered_json;
using namespace mixshift;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

// Single-column numeric file: '#' comments and blank lines ignored, an
// optional non-numeric first row is treated as a header.
std::vector<double> read_column_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string tok = trim(line);
    if (tok.empty() || tok[0] == '#') continue;
    double v = 0.0;
    if (!parse_number(tok, v)) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse '" + tok +
                      "' as a number");
    }
    first_content = false;
    values.push_back(v);
  }
  return values;
}

// Long-format CSV: a header row names the columns; the group column holds the
// labels 'control'/'treatment'.
std::pair<std::vector<double>, std::vector<double>> read_long_file(const std::string& path,
                                                                   const std::string& group_col,
                                                                   std::string value_col) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw DataError(path + ": missing header row");
  auto find_col = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DataError(path + ": no column named '" + name + "'");
  };
  const std::size_t gi = find_col(group_col);
  if (value_col.empty()) {
    if (header.size() != 2)
      throw UsageError("--value-column is required when the file has more than two columns");
    value_col = header[gi == 0 ? 1 : 0];
  }
  const std::size_t vi = find_col(value_col);

  std::pair<std::vector<double>, std::vector<double>> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() <= std::max(gi, vi))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected at least " +
                      std::to_string(std::max(gi, vi) + 1) + " fields");
    double v = 0.0;
    if (!parse_number(fields[vi], v))
      throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse '" + fields[vi] +
                      "' as a number");
    const std::string label = lower(fields[gi]);
    if (label == "control")
      out.first.push_back(v);
    else if (label == "treatment")
      out.second.push_back(v);
    else
      throw DataError(path + ":" + std::to_string(lineno) + ": unknown group label '" +
                      fields[gi] + "' (expected control or treatment)");
  }
  return out;
}

Family parse_family(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "normal") return Family::Normal;
  if (n == "logistic") return Family::Logistic;
  if (n == "laplace") return Family::Laplace;
  throw UsageError("unknown family '" + name + "' (normal, logistic, laplace)");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& raw : names) {
    const std::string n = lower(trim(raw));
    Method m;
    if (n == "asymptotic") m = Method::Asymptotic;
    else if (n == "bca") m = Method::BCa;
    else if (n == "centered") m = Method::CenteredPercentile;
    else if (n == "all") {
      for (Method mm : {Method::Asymptotic, Method::BCa, Method::CenteredPercentile})
        if (std::find(out.begin(), out.end(), mm) == out.end()) out.push_back(mm);
      continue;
    } else {
      throw UsageError("unknown method '" + raw + "' (asymptotic, bca, centered, all)");
    }
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw UsageError("no interval method selected");
  return out;
}

double resolve_log_base(double flag) { return flag > 0.0 ? flag : std::numbers::e; }

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(out_path, text);
  }
}

// ---- shared input options for estimate/ci ----

struct InputOptions {
  std::string control_path;
  std::string treatment_path;
  std::string data_path;
  std::string group_column;
  std::string value_column;
  double log_base = 0.0;  // 0 = natural log

  void attach(CLI::App* cmd) {
    cmd->add_option("--control", control_path, "single-column CSV of control responses");
    cmd->add_option("--treatment", treatment_path, "single-column CSV of treatment responses");
    cmd->add_option("--data", data_path, "long-format CSV holding both groups");
    cmd->add_option("--group-column", group_column,
                    "column with labels control/treatment (requires --data)");
    cmd->add_option("--value-column", value_column, "response column for --data input");
    cmd->add_option("--eps-log-base", log_base,
                    "base of the regularizer logarithm (0 = natural)");
  }

  TwoSample load() const {
    if (!data_path.empty()) {
      if (group_column.empty())
        throw UsageError("--data requires --group-column");
      if (!control_path.empty() || !treatment_path.empty())
        throw UsageError("--data conflicts with --control/--treatment");
      auto [xs, ys] = read_long_file(data_path, group_column, value_column);
      if (xs.size() < 2 || ys.size() < 2)
        throw DataError(data_path + ": each group needs at least 2 observations, got " +
                        std::to_string(xs.size()) + " control / " + std::to_string(ys.size()) +
                        " treatment");
      return TwoSample::from_observations(std::move(xs), std::move(ys));
    }
    if (control_path.empty() || treatment_path.empty())
      throw UsageError("provide --control and --treatment, or --data with --group-column");
    std::vector<double> xs = read_column_file(control_path);
    std::vector<double> ys = read_column_file(treatment_path);
    if (xs.size() < 2)
      throw DataError(control_path + ": need at least 2 observations, got " +
                      std::to_string(xs.size()));
    if (ys.size() < 2)
      throw DataError(treatment_path + ": need at least 2 observations, got " +
                      std::to_string(ys.size()));
    return TwoSample::from_observations(std::move(xs), std::move(ys));
  }
};

json stats_json(const SampleStats& s) {
  return json{{"n", s.n},
              {"mean", s.mean},
              {"var", s.var_unbiased},
              {"c3", s.c3_plugin},
              {"c4", s.c4_plugin}};
}

json estimate_json(const EstimateResult& est, const TwoSample& ts) {
  return json{{"theta_hat", est.theta_hat},
              {"delta_hat", est.delta_hat},
              {"delta_avg_hat", est.delta_avg_hat},
              {"epsilon_n", est.epsilon_n},
              {"flags",
               {{"mean_diff_clamped", est.mean_diff_clamped},
                {"var_diff_clamped", est.var_diff_clamped},
                {"degenerate", est.degenerate}}},
              {"control", stats_json(ts.control)},
              {"treatment", stats_json(ts.treatment)}};
}

json interval_json(const IntervalResult& iv) {
  json j{{"method", method_name(iv.method)},
         {"target", target_name(iv.target)},
         {"lower", iv.lower},
         {"upper", iv.upper},
         {"level", iv.level},
         {"truncated_low", iv.truncated_low},
         {"truncated_high", iv.truncated_high}};
  if (iv.diagnostics) {
    j["diagnostics"] = json{{"z0", iv.diagnostics->z0},
                            {"a", iv.diagnostics->a},
                            {"alpha_l", iv.diagnostics->alpha_l},
                            {"alpha_u", iv.diagnostics->alpha_u},
                            {"fallback", iv.diagnostics->fallback_used}};
  }
  return j;
}

void warn_flags(const EstimateResult& est) {
  if (est.degenerate)
    std::cerr << "warning: degenerate input (no spread, no mean gap); reporting theta=1, delta=0\n";
  else if (est.mean_diff_clamped)
    std::cerr << "warning: treatment mean does not exceed control mean; delta clamped to 0\n";
  if (est.var_diff_clamped && !est.degenerate)
    std::cerr << "warning: treatment variance does not exceed control variance; theta set to 1\n";
}

// ---- subcommand runners ----

struct EstimateArgs {
  InputOptions input;
  std::string out_path;
};

int run_estimate(const EstimateArgs& a) {
  const TwoSample ts = a.input.load();
  const EstimateResult est = estimate(ts, resolve_log_base(a.input.log_base));
  warn_flags(est);
  emit(estimate_json(est, ts).dump(2), a.out_path);
  return 0;
}

struct CiArgs {
  InputOptions input;
  std::vector<std::string> methods{"all"};
  double level = 0.95;
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  std::string jackknife = "all";
  std::string accel_center = "jackknife";
  bool no_s2_correction = false;
  int mid_exponent = 1;
  std::string out_path;
};

int run_ci(const CiArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie strictly in (0,1)");
  if (a.mid_exponent != 1 && a.mid_exponent != 2) throw UsageError("--mid-exponent must be 1 or 2");
  const std::vector<Method> methods = parse_methods(a.methods);
  const double log_base = resolve_log_base(a.input.log_base);

  const TwoSample ts = a.input.load();
  const EstimateResult est = estimate(ts, log_base);
  warn_flags(est);

  BootstrapConfig bcfg;
  bcfg.B = a.B;
  bcfg.level = a.level;
  bcfg.seed = Seed{a.seed, 0};
  bcfg.eps_log_base = log_base;
  if (a.jackknife == "per-group") bcfg.jackknife = JackknifeScheme::PerGroup;
  else if (a.jackknife != "all") throw UsageError("--jackknife must be all or per-group");
  if (a.accel_center == "bootstrap") bcfg.accel_center = AccelCenter::BootstrapMean;
  else if (a.accel_center != "jackknife")
    throw UsageError("--accel-center must be jackknife or bootstrap");

  const bool wants_bootstrap =
      std::find(methods.begin(), methods.end(), Method::BCa) != methods.end() ||
      std::find(methods.begin(), methods.end(), Method::CenteredPercentile) != methods.end();
  BootstrapDistribution boot;
  if (wants_bootstrap) {
    if (a.B < 2) throw UsageError("--B must be at least 2 for bootstrap methods");
    boot = resample(ts, bcfg);
  }

  json out;
  out["point"] = estimate_json(est, ts);
  out["level"] = a.level;
  out["seed"] = a.seed;
  if (wants_bootstrap) {
    out["B"] = a.B;
    out["bootstrap_skipped"] = boot.skipped;
  }
  json intervals = json::array();
  for (Method m : methods) {
    switch (m) {
      case Method::Asymptotic: {
        PluginMoments pm = PluginMoments::from(ts.control, ts.treatment, log_base);
        pm.var_s2_correction = !a.no_s2_correction;
        pm.mid_term_exponent = a.mid_exponent;
        const VarianceEstimates ve = finite_sample_variances(ts.control, ts.treatment, pm);
        const auto [th, de] = asymptotic_ci(est, ve, a.level);
        intervals.push_back(interval_json(th));
        intervals.push_back(interval_json(de));
        break;
      }
      case Method::BCa:
        intervals.push_back(interval_json(bca_interval(boot, ts, bcfg, Target::Theta)));
        intervals.push_back(interval_json(bca_interval(boot, ts, bcfg, Target::Delta)));
        break;
      case Method::CenteredPercentile:
        intervals.push_back(interval_json(centered_percentile_interval(boot, bcfg, Target::Theta)));
        intervals.push_back(interval_json(centered_percentile_interval(boot, bcfg, Target::Delta)));
        break;
    }
  }
  out["intervals"] = std::move(intervals);
  emit(out.dump(2), a.out_path);
  return 0;
}

struct MomentsArgs {
  std::string family = "normal";
  double mu = 0.0;
  double sigma = 1.0;
  double theta = -1.0;
  double delta = -1.0;
  double K = -1.0;
  std::string format = "json";
  std::string out_path;
};

int run_moments(const MomentsArgs& a) {
  if (!(a.sigma > 0.0)) throw UsageError("--sigma must be > 0");
  if (!(a.theta > 0.0 && a.theta <= 1.0)) throw UsageError("--theta must lie in (0,1]");
  if (a.delta >= 0.0 && a.K >= 0.0) throw UsageError("give either --delta or --K, not both");
  if (a.delta < 0.0 && a.K < 0.0) throw UsageError("one of --delta or --K is required");
  const double delta = a.delta >= 0.0 ? a.delta : a.K * a.sigma;
  const FamilySpec spec{parse_family(a.family), a.mu, a.sigma};
  const MomentSet f = theoretical_moments_F(spec);
  const MomentSet g = mixture_moments(f, MixtureParams{a.theta, delta});

  if (a.format == "json") {
    const json out{{"family", family_name(spec.family)},
                   {"mu", a.mu},
                   {"sigma", a.sigma},
                   {"theta", a.theta},
                   {"delta", delta},
                   {"K", delta / a.sigma},
                   {"delta_avg", a.theta * delta},
                   {"F", {{"mean", f.mean}, {"var", f.var}, {"c3", f.c3}, {"c4", f.c4}}},
                   {"G", {{"mean", g.mean}, {"var", g.var}, {"c3", g.c3}, {"c4", g.c4}}}};
    emit(out.dump(2), a.out_path);
  } else if (a.format == "markdown") {
    std::string md = "| law | mean | var | c3 | c4 |\n|---|---|---|---|---|\n";
    md += "| F | " + format_sig6(f.mean) + " | " + format_sig6(f.var) + " | " +
          format_sig6(f.c3) + " | " + format_sig6(f.c4) + " |\n";
    md += "| G | " + format_sig6(g.mean) + " | " + format_sig6(g.var) + " | " +
          format_sig6(g.c3) + " | " + format_sig6(g.c4) + " |\n";
    emit(md, a.out_path);
  } else {
    throw UsageError("--format must be json or markdown");
  }
  return 0;
}

struct SimulateArgs {
  std::vector<std::string> families;
  std::vector<double> thetas;
  std::vector<double> Ks;
  std::vector<std::size_t> sizes;
  std::size_t R = 1000;
  std::size_t B = 1000;
  double level = 0.95;
  std::vector<std::string> methods{"asymptotic"};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_csv = "coverage.csv";
  std::string out_md = "coverage.md";
  std::string table = "both";
  bool use_paper_grid = false;
  double log_base = 0.0;
  bool quiet = false;
};

int run_simulate(const SimulateArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must lie strictly in (0,1)");
  if (a.R < 1) throw UsageError("--R must be at least 1");
  if (a.threads < 1) throw UsageError("--threads must be at least 1");
  if (a.table != "theta" && a.table != "delta" && a.table != "both")
    throw UsageError("--table must be theta, delta, or both");

  SimulationGrid grid = paper_grid();  // defaults mirror the published study
  if (!a.use_paper_grid) {
    if (!a.families.empty()) {
      grid.families.clear();
      for (const std::string& f : a.families) grid.families.push_back(FamilySpec{parse_family(f)});
    }
    if (!a.thetas.empty()) grid.thetas = a.thetas;
    if (!a.Ks.empty()) grid.Ks = a.Ks;
    if (!a.sizes.empty()) grid.sizes = a.sizes;
  }
  for (double th : grid.thetas)
    if (!(th > 0.0 && th <= 1.0)) throw UsageError("--thetas entries must lie in (0,1]");
  for (double k : grid.Ks)
    if (!(k >= 0.0)) throw UsageError("--Ks entries must be >= 0");
  for (std::size_t n : grid.sizes)
    if (n < 2) throw UsageError("--sizes entries must be at least 2");
  grid.R = a.R;
  grid.B = a.B;
  grid.level = a.level;
  grid.methods = parse_methods(a.methods);
  grid.master = Seed{a.seed, 0};
  grid.threads = a.threads;
  grid.eps_log_base = resolve_log_base(a.log_base);
  const bool wants_bootstrap =
      std::find(grid.methods.begin(), grid.methods.end(), Method::BCa) != grid.methods.end() ||
      std::find(grid.methods.begin(), grid.methods.end(), Method::CenteredPercentile) !=
          grid.methods.end();
  if (wants_bootstrap && a.B < 2) throw UsageError("--B must be at least 2 for bootstrap methods");

  const auto t0 = std::chrono::steady_clock::now();
  ProgressFn progress = nullptr;
  if (!a.quiet) {
    progress = [](std::size_t done, std::size_t total, const CoverageRow& row) {
      std::cerr << "[" << done << "/" << total << "] " << family_name(row.cell.family.family)
                << " theta=" << format_double(row.cell.theta) << " K="
                << format_double(row.cell.K) << " n=" << row.cell.n << "\n";
    };
  }
  const std::vector<CoverageRow> rows = run_grid(grid, progress);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_text_file(a.out_csv, coverage_csv(rows));
  std::string md;
  if (a.table == "theta" || a.table == "both") md += coverage_markdown(rows, Target::Theta);
  if (a.table == "delta" || a.table == "both") {
    if (!md.empty()) md += "\n";
    md += coverage_markdown(rows, Target::Delta);
  }
  write_text_file(a.out_md, md);

  std::string mnames;
  for (const Method m : grid.methods) {
    if (!mnames.empty()) mnames += ",";
    mnames += method_name(m);
  }
  std::cout << "cells=" << rows.size() << " R=" << grid.R << " methods=" << mnames
            << " seed=" << a.seed << " elapsed=" << format_sig6(elapsed) << "s wrote "
            << a.out_csv << " " << a.out_md << "\n";
  return 0;
}

struct ExportArgs {
  std::string family = "normal";
  double mu = 0.0;
  double sigma = 1.0;
  double theta = -1.0;
  double delta = -1.0;
  double K = -1.0;
  std::size_t n = 100;
  std::size_t R = 1000;
  std::uint64_t seed = 0;
  double log_base = 0.0;
  std::string out_path;
};

int run_export(const ExportArgs& a) {
  if (!(a.sigma > 0.0)) throw UsageError("--sigma must be > 0");
  if (!(a.theta > 0.0 && a.theta <= 1.0)) throw UsageError("--theta must lie in (0,1]");
  if (a.delta >= 0.0 && a.K >= 0.0) throw UsageError("give either --delta or --K, not both");
  if (a.delta < 0.0 && a.K < 0.0) throw UsageError("one of --delta or --K is required");
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (a.R < 1) throw UsageError("--R must be at least 1");
  const double K = a.delta >= 0.0 ? a.delta / a.sigma : a.K;
  const CellSpec cell{FamilySpec{parse_family(a.family), a.mu, a.sigma}, a.theta, K, a.n};
  RunOptions opt;
  opt.eps_log_base = resolve_log_base(a.log_base);
  const SamplingDistribution sd = export_sampling_distribution(cell, a.R, Seed{a.seed, 0}, opt);
  emit(sampling_csv(sd), a.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"method-of-moments estimation for shift-mixture treatment effects"};
  app.require_subcommand(1);

  EstimateArgs est_args;
  CLI::App* est_cmd = app.add_subcommand("estimate", "point estimates from two samples");
  est_args.input.attach(est_cmd);
  est_cmd->add_option("--out", est_args.out_path, "write the JSON report here (default stdout)");

  CiArgs ci_args;
  CLI::App* ci_cmd = app.add_subcommand("ci", "confidence intervals for theta and delta");
  ci_args.input.attach(ci_cmd);
  ci_cmd->add_option("--method", ci_args.methods, "asymptotic, bca, centered, or all")
      ->delimiter(',');
  ci_cmd->add_option("--level", ci_args.level, "confidence level (default 0.95)");
  ci_cmd->add_option("--B", ci_args.B, "bootstrap replicates (default 1000)");
  ci_cmd->add_option("--seed", ci_args.seed, "master seed (default 0)");
  ci_cmd->add_option("--jackknife", ci_args.jackknife, "acceleration scheme: all or per-group");
  ci_cmd->add_option("--accel-center", ci_args.accel_center,
                     "acceleration center: jackknife or bootstrap");
  ci_cmd->add_flag("--no-s2-correction", ci_args.no_s2_correction,
                   "drop the (n-3)/(n-1) factor inside Var(S^2)");
  ci_cmd->add_option("--mid-exponent", ci_args.mid_exponent,
                     "middle-term exponent of the theta variance: 1 (default) or 2");
  ci_cmd->add_option("--out", ci_args.out_path, "write the JSON report here (default stdout)");

  MomentsArgs mom_args;
  CLI::App* mom_cmd = app.add_subcommand("moments", "exact mixture moment propagation");
  mom_cmd->add_option("--family", mom_args.family, "normal, logistic, or laplace");
  mom_cmd->add_option("--mu", mom_args.mu, "location of F (default 0)");
  mom_cmd->add_option("--sigma", mom_args.sigma, "SD of F (default 1)");
  mom_cmd->add_option("--theta", mom_args.theta, "responder fraction in (0,1]")->required();
  mom_cmd->add_option("--delta", mom_args.delta, "shift in response units");
  mom_cmd->add_option("--K", mom_args.K, "shift in units of sigma");
  mom_cmd->add_option("--format", mom_args.format, "json (default) or markdown");
  mom_cmd->add_option("--out", mom_args.out_path, "output path (default stdout)");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo coverage study over a грид"
                                                     " of cells");
  sim_cmd->description("Monte Carlo coverage study over a grid of cells");
  sim_cmd->add_option("--families", sim_args.families, "families (default: the full study)")
      ->delimiter(',');
  sim_cmd->add_option("--thetas", sim_args.thetas, "responder fractions")->delimiter(',');
  sim_cmd->add_option("--Ks", sim_args.Ks, "shifts in units of sigma")->delimiter(',');
  sim_cmd->add_option("--sizes", sim_args.sizes, "group sizes m = n")->delimiter(',');
  sim_cmd->add_option("--R", sim_args.R, "replications per cell (default 1000)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--B", sim_args.B, "bootstrap replicates (default 1000)");
  sim_cmd->add_option("--level", sim_args.level, "confidence level (default 0.95)");
  sim_cmd->add_option("--methods", sim_args.methods,
                      "asymptotic, bca, centered, all (default asymptotic)")
      ->delimiter(',');
  sim_cmd->add_option("--seed", sim_args.seed, "master seed (default 0)");
  sim_cmd->add_option("--threads", sim_args.threads, "worker threads (default 1)");
  sim_cmd->add_option("--out-csv", sim_args.out_csv, "coverage CSV path (default coverage.csv)");
  sim_cmd->add_option("--out-md", sim_args.out_md, "markdown table path (default coverage.md)");
  sim_cmd->add_option("--table", sim_args.table, "markdown target: theta, delta, both");
  sim_cmd->add_flag("--paper-grid", sim_args.use_paper_grid,
                    "force the full published grid, ignoring the cell lists");
  sim_cmd->add_option("--eps-log-base", sim_args.log_base,
                      "base of the regularizer logarithm (0 = natural)");
  sim_cmd->add_flag("--quiet", sim_args.quiet, "suppress per-cell progress on stderr");
  sim_cmd->set_config("--config", "", "read options from an INI file");

  ExportArgs exp_args;
  CLI::App* exp_cmd = app.add_subcommand("export-dist",
                                         "raw sampling distribution of the estimators");
  exp_cmd->add_option("--family", exp_args.family, "normal, logistic, or laplace");
  exp_cmd->add_option("--mu", exp_args.mu, "location of F (default 0)");
  exp_cmd->add_option("--sigma", exp_args.sigma, "SD of F (default 1)");
  exp_cmd->add_option("--theta", exp_args.theta, "responder fraction in (0,1]")->required();
  exp_cmd->add_option("--delta", exp_args.delta, "shift in response units");
  exp_cmd->add_option("--K", exp_args.K, "shift in units of sigma");
  exp_cmd->add_option("--n", exp_args.n, "group size m = n (default 100)");
  exp_cmd->add_option("--R", exp_args.R, "replications (default 1000)")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--seed", exp_args.seed, "master seed (default 0)");
  exp_cmd->add_option("--eps-log-base", exp_args.log_base,
                      "base of the regularizer logarithm (0 = natural)");
  exp_cmd->add_option("--out", exp_args.out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : 1;
  }

  try {
    if (est_cmd->parsed()) return run_estimate(est_args);
    if (ci_cmd->parsed()) return run_ci(ci_args);
    if (mom_cmd->parsed()) return run_moments(mom_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (exp_cmd->parsed()) return run_export(exp_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
