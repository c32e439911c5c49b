#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "mixshift/errors.hpp"
#include "mixshift/simulation.hpp"

namespace mixshift {

// Locale-independent shortest round-trip rendering; identical bytes on every
// run is part of the output contract.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// 6 significant digits, the documented human-readable text rendering.
inline std::string format_sig6(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

// Two decimals, the rendering used by the markdown coverage tables.
inline std::string format_fixed2(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

// Coverage table, one line per (cell, method).  The schema comment is the
// versioned header required by downstream consumers.
inline constexpr const char* coverage_csv_schema = "# mixshift coverage csv v1";

inline std::string coverage_csv(const std::vector<CoverageRow>& rows) {
  std::string csv(coverage_csv_schema);
  csv +=
      "\nfamily,theta,K,n,R,level,method,"
      "coverage_theta,avg_len_theta,coverage_delta,avg_len_delta,"
      "mc_se_theta,mc_se_delta,mean_abs_err_theta,mean_abs_err_delta,"
      "truncations,fallbacks,floors,failures\n";
  for (const auto& row : rows) {
    for (const auto& m : row.methods) {
      csv += family_name(row.cell.family.family);
      csv += ',';
      csv += format_double(row.cell.theta);
      csv += ',';
      csv += format_double(row.cell.K);
      csv += ',';
      csv += std::to_string(row.cell.n);
      csv += ',';
      csv += std::to_string(row.R);
      csv += ',';
      csv += format_double(row.level);
      csv += ',';
      csv += method_name(m.method);
      csv += ',';
      csv += format_double(m.coverage_theta);
      csv += ',';
      csv += format_double(m.avg_len_theta);
      csv += ',';
      csv += format_double(m.coverage_delta);
      csv += ',';
      csv += format_double(m.avg_len_delta);
      csv += ',';
      csv += format_double(m.mc_se_theta);
      csv += ',';
      csv += format_double(m.mc_se_delta);
      csv += ',';
      csv += format_double(row.mean_abs_err_theta);
      csv += ',';
      csv += format_double(row.mean_abs_err_delta);
      csv += ',';
      csv += std::to_string(m.truncations);
      csv += ',';
      csv += std::to_string(m.fallbacks);
      csv += ',';
      csv += std::to_string(m.floors);
      csv += ',';
      csv += std::to_string(m.failures);
      csv += '\n';
    }
  }
  return csv;
}

// Markdown coverage tables in the familiar journal layout: one block per
// group size, rows (F, theta, K), a Cov/Len column pair per method, two
// decimals throughout.
inline std::string coverage_markdown(const std::vector<CoverageRow>& rows, Target target) {
  std::string md;
  std::vector<std::size_t> sizes;
  for (const auto& r : rows)
    if (std::find(sizes.begin(), sizes.end(), r.cell.n) == sizes.end()) sizes.push_back(r.cell.n);
  md += target == Target::Theta ? "## Coverage and average length: theta intervals\n"
                                : "## Coverage and average length: delta intervals\n";
  for (std::size_t n : sizes) {
    md += "\n### m = n = " + std::to_string(n) + "\n\n";
    bool header_done = false;
    for (const auto& row : rows) {
      if (row.cell.n != n) continue;
      if (!header_done) {
        std::string h1 = "| F | theta | K |";
        std::string h2 = "|---|---|---|";
        for (const auto& m : row.methods) {
          const std::string name = method_name(m.method);
          h1 += " " + name + " Cov | " + name + " Len |";
          h2 += "---|---|";
        }
        md += h1 + "\n" + h2 + "\n";
        header_done = true;
      }
      md += "| ";
      md += family_name(row.cell.family.family);
      md += " | " + format_double(row.cell.theta);
      md += " | " + format_double(row.cell.K);
      md += " |";
      for (const auto& m : row.methods) {
        const double cov = target == Target::Theta ? m.coverage_theta : m.coverage_delta;
        const double len = target == Target::Theta ? m.avg_len_theta : m.avg_len_delta;
        md += " " + format_fixed2(cov) + " | " + format_fixed2(len) + " |";
      }
      md += "\n";
    }
  }
  return md;
}

// Sampling-distribution export: commented metadata (cell and the population
// normal parameters), then one line per replication.
inline std::string sampling_csv(const SamplingDistribution& sd) {
  std::string csv = "# mixshift sampling csv v1\n";
  csv += "# family=";
  csv += family_name(sd.cell.family.family);
  csv += " theta=" + format_double(sd.theta);
  csv += " delta=" + format_double(sd.delta);
  csv += " n=" + std::to_string(sd.cell.n);
  csv += "\n# sd_theta=" + format_double(sd.sd_theta);
  csv += " sd_delta=" + format_double(sd.sd_delta);
  csv += "\nrep,theta_hat,delta_hat\n";
  for (std::size_t r = 0; r < sd.theta_hat.size(); ++r) {
    csv += std::to_string(r);
    csv += ',';
    csv += format_double(sd.theta_hat[r]);
    csv += ',';
    csv += format_double(sd.delta_hat[r]);
    csv += '\n';
  }
  return csv;
}

}  // namespace mixshift
