#include "extreg/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "extreg/errors.hpp"

namespace extreg {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

LoadedCsv load_csv_named(const std::string& path, const std::string& response_column,
                         bool for_fitting) {
  std::ifstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot open " + path);

  std::string line;
  if (!std::getline(file, line))
    fail(ErrorCode::parse_error, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split(line, ',');
  for (auto& name : header) name = trim(name);
  double ignored;
  const bool header_numeric =
      std::all_of(header.begin(), header.end(),
                  [&](const std::string& f) { return parse_double(f, ignored); });
  if (header.empty() || header_numeric)
    fail(ErrorCode::parse_error, path + ": missing header row");

  const auto response_it = std::find(header.begin(), header.end(), response_column);
  if (response_it == header.end())
    fail(ErrorCode::parse_error,
         path + ": response column '" + response_column + "' not found");
  const std::size_t response_index =
      static_cast<std::size_t>(response_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::size_t line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != header.size())
      fail(ErrorCode::parse_error,
           path + ": row " + std::to_string(line_number) + " has " +
               std::to_string(fields.size()) + " cells, expected " +
               std::to_string(header.size()));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], row[c]) || !std::isfinite(row[c]))
        fail(ErrorCode::parse_error,
             path + ": row " + std::to_string(line_number) + ", column '" +
                 header[c] + "': non-numeric cell '" + trim(fields[c]) + "'");
    }
    rows.push_back(std::move(row));
  }

  LoadedCsv out;
  out.response_name = response_column;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != response_index) out.predictor_names.push_back(header[c]);

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  out.data.has_intercept = true;
  out.data.responses.resize(n);
  out.data.predictors.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == response_index)
        out.data.responses(i) = row[c];
      else
        out.data.predictors(i, k++) = row[c];
    }
  }
  if (for_fitting && n < p + 2)
    fail(ErrorCode::parse_error,
         path + ": only " + std::to_string(n) + " data rows for " +
             std::to_string(p) + " predictors; need at least " + std::to_string(p + 2));
  return out;
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
  return load_csv_named(path, response_column).data;
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name,
                       const std::vector<std::string>& predictor_names) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot write " + path);
  file << response_name;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (static_cast<std::size_t>(j) < predictor_names.size())
      file << ',' << predictor_names[static_cast<std::size_t>(j)];
    else
      file << ",x" << (j + 1);
  }
  file << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    file << format_double(data.responses(i));
    for (Eigen::Index j = 0; j < data.p(); ++j)
      file << ',' << format_double(data.predictors(i, j));
    file << '\n';
  }
}

namespace {

Eigen::VectorXd parse_vector(const std::string& value, const std::string& key,
                             const std::string& path) {
  const std::vector<std::string> parts = split(value, ',');
  Eigen::VectorXd out(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double v;
    if (!parse_double(parts[i], v))
      fail(ErrorCode::parse_error,
           path + ": key '" + key + "': non-numeric entry '" + trim(parts[i]) + "'");
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot open " + path);

  ScenarioSpec spec;
  spec.noise_var_target_np = -1.0;  // defaults to noise_var_prob when unset
  bool mode_seen = false;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse_error,
           path + ": line " + std::to_string(line_number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    auto scalar = [&]() {
      double v;
      if (!parse_double(value, v))
        fail(ErrorCode::parse_error, path + ": key '" + key + "': non-numeric value '" +
                                         value + "'");
      return v;
    };
    auto integer = [&]() { return static_cast<Eigen::Index>(scalar()); };

    if (key == "p") spec.p = integer();
    else if (key == "n") spec.n = integer();
    else if (key == "n1") spec.n1 = integer();
    else if (key == "n2") spec.n2 = integer();
    else if (key == "mu0") spec.mu0 = parse_vector(value, key, path);
    else if (key == "pairwise_corr") spec.pairwise_corr = scalar();
    else if (key == "beta0") spec.beta0 = parse_vector(value, key, path);
    else if (key == "noise_var_prob") spec.noise_var_prob = scalar();
    else if (key == "noise_var_target_np") spec.noise_var_target_np = scalar();
    else if (key == "noise_var_polluted") spec.noise_var_polluted = scalar();
    else if (key == "pollution_mode") {
      mode_seen = true;
      if (value == "fixed") spec.pollution_mode = PollutionMode::fixed;
      else if (value == "random") spec.pollution_mode = PollutionMode::random;
      else
        fail(ErrorCode::parse_error,
             path + ": pollution_mode must be 'fixed' or 'random', got '" + value + "'");
    }
    else if (key == "mu_shift") spec.mu_shift = parse_vector(value, key, path);
    else if (key == "beta_polluted") spec.beta_polluted = parse_vector(value, key, path);
    else if (key == "sigma_loc") spec.sigma_loc = scalar();
    else if (key == "sigma_par") spec.sigma_par = scalar();
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(scalar());
    else
      fail(ErrorCode::parse_error, path + ": unknown key '" + key + "'");
  }
  if (!mode_seen)
    fail(ErrorCode::parse_error, path + ": pollution_mode is required");
  if (spec.noise_var_target_np < 0.0) spec.noise_var_target_np = spec.noise_var_prob;
  validate(spec);
  return spec;
}

}  // namespace extreg
