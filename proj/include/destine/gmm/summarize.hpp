#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "destine/errors.hpp"
#include "destine/gmm/gmm.hpp"

namespace destine::gmm {

// One fitted group of the benchmark output: a (column, size, op) cell with
// its selected mixture.
struct SummaryRow {
  std::string column;  // elapsed_ms | vsz_mb
  std::string size;
  std::string op;
  std::size_t n = 0;
  GmmFit fit;
};

struct DensityCurve {
  std::string column, size, op;
  std::vector<double> x;        // 256 sample points over [min, max]
  std::vector<double> density;  // mixture pdf at each point
};

struct SummaryResult {
  std::vector<SummaryRow> rows;
  std::vector<DensityCurve> curves;
  std::vector<std::string> warnings;
};

inline constexpr int kCurvePoints = 256;
inline constexpr std::size_t kMinGroupSamples = 40;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::string size_rank(const std::string& s) {
  if (s == "1k") return "0";
  if (s == "10k") return "1";
  if (s == "100k") return "2";
  if (s == "1m") return "3";
  return "9" + s;
}

}  // namespace detail

// Reads a benchmark CSV (iteration,size,op,elapsed_ms,vsz_mb) and fits a
// mixture per size x op group for each numeric column. Groups with fewer
// than 40 samples are skipped with a warning; empty vsz cells simply drop
// out of the memory column.
inline SummaryResult summarize(const std::filesystem::path& csv_path, int k_max = 4,
                               std::uint64_t seed = 0) {
  std::ifstream in(csv_path);
  if (!in) throw StorageError("cannot open benchmark CSV " + csv_path.string());

  std::string header;
  if (!std::getline(in, header)) throw FormatError("benchmark CSV is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (detail::split_csv_line(header) !=
      std::vector<std::string>{"iteration", "size", "op", "elapsed_ms", "vsz_mb"})
    throw FormatError("benchmark CSV header mismatch: " + header);

  // (size, op) -> column samples.
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>,
                                                          std::vector<double>>>
      groups;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 5)
      throw FormatError("benchmark CSV row " + std::to_string(lineno) + " malformed");
    auto& group = groups[{fields[1], fields[2]}];
    try {
      group.first.push_back(std::stod(fields[3]));
      if (!fields[4].empty()) group.second.push_back(std::stod(fields[4]));
    } catch (const std::exception&) {
      throw FormatError("benchmark CSV row " + std::to_string(lineno) +
                        " has a non-numeric cell");
    }
  }

  SummaryResult result;
  auto fit_group = [&](const std::string& column, const std::string& size,
                       const std::string& op, const std::vector<double>& samples) {
    if (samples.size() < kMinGroupSamples) {
      result.warnings.push_back("skipping " + size + "/" + op + "/" + column + ": only " +
                                std::to_string(samples.size()) + " samples");
      return;
    }
    GmmFit fit = select_model(samples, k_max, seed);
    result.rows.push_back({column, size, op, samples.size(), fit});

    double lo = *std::min_element(samples.begin(), samples.end());
    double hi = *std::max_element(samples.begin(), samples.end());
    if (hi <= lo) hi = lo + 1.0;  // constant column still gets a drawable curve
    DensityCurve curve{column, size, op, {}, {}};
    curve.x.reserve(kCurvePoints);
    curve.density.reserve(kCurvePoints);
    for (int i = 0; i < kCurvePoints; ++i) {
      double x = lo + (hi - lo) * i / (kCurvePoints - 1);
      curve.x.push_back(x);
      curve.density.push_back(density(fit, x));
    }
    result.curves.push_back(std::move(curve));
  };

  // Deterministic row order: elapsed_ms rows first, sizes in protocol order,
  // upload before retrieve.
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [key, _] : groups) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    std::string ra = detail::size_rank(a.first) + (a.second == "upload" ? "0" : "1");
    std::string rb = detail::size_rank(b.first) + (b.second == "upload" ? "0" : "1");
    return ra < rb;
  });
  for (const auto& key : keys) fit_group("elapsed_ms", key.first, key.second,
                                         groups[key].first);
  for (const auto& key : keys) fit_group("vsz_mb", key.first, key.second,
                                         groups[key].second);
  return result;
}

namespace detail {

inline std::string join_values(const std::vector<GmmComponent>& comps,
                               double GmmComponent::*field) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f", comps[i].*field);
    if (i) out += ';';
    out += buf;
  }
  return out;
}

}  // namespace detail

inline void write_summary_csv(const SummaryResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StorageError("cannot write summary CSV " + path.string());
  out << "column,size,op,n,k,log_likelihood,bic,means,variances,weights,degenerate\n";
  char buf[64];
  for (const auto& row : result.rows) {
    out << row.column << ',' << row.size << ',' << row.op << ',' << row.n << ','
        << row.fit.k << ',';
    std::snprintf(buf, sizeof buf, "%.4f,%.4f", row.fit.log_likelihood, row.fit.bic);
    out << buf << ',' << detail::join_values(row.fit.components, &GmmComponent::mean) << ','
        << detail::join_values(row.fit.components, &GmmComponent::variance) << ','
        << detail::join_values(row.fit.components, &GmmComponent::weight) << ','
        << (row.fit.degenerate ? "true" : "false") << '\n';
  }
}

inline void write_curves_csv(const SummaryResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StorageError("cannot write curves CSV " + path.string());
  out << "column,size,op,x,density\n";
  char buf[64];
  for (const auto& curve : result.curves) {
    for (int i = 0; i < kCurvePoints; ++i) {
      std::snprintf(buf, sizeof buf, "%.6g,%.6g", curve.x[i], curve.density[i]);
      out << curve.column << ',' << curve.size << ',' << curve.op << ',' << buf << '\n';
    }
  }
}

inline std::string summary_markdown(const SummaryResult& result) {
  std::ostringstream out;
  out << "| Variable | K | Log Likelihood | BIC | Cluster Means | Cluster Variances |\n";
  out << "|---|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& row : result.rows) {
    out << "| " << row.size << " " << row.op << " (" << row.column << ") | " << row.fit.k
        << " | ";
    std::snprintf(buf, sizeof buf, "%.2f | %.2f", row.fit.log_likelihood, row.fit.bic);
    out << buf << " | [" << detail::join_values(row.fit.components, &GmmComponent::mean)
        << "] | [" << detail::join_values(row.fit.components, &GmmComponent::variance)
        << "] |\n";
  }
  return out.str();
}

}  // namespace destine::gmm
