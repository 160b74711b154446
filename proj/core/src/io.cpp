#include "corrsbl/io.hpp"

#include <cctype>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrsbl {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_cell(const std::string& cell, const std::string& path) {
  const std::string t = trim(cell);
  if (t.empty()) {
    throw std::runtime_error(path + ": empty numeric cell");
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw std::runtime_error(path + ": malformed numeric cell '" + t + "'");
  }
  return v;
}

}  // namespace

MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open matrix file " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      // Blank lines are tolerated only at the end of the file.
      std::string rest;
      while (std::getline(in, rest)) {
        if (!trim(rest).empty()) {
          throw std::runtime_error(path + ": blank line inside matrix body");
        }
      }
      break;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_cell(cell, path));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": matrix file is empty");
  }

  std::ifstream meta(path + ".meta");
  if (meta) {
    int want_rows = -1;
    int want_cols = -1;
    std::string mline;
    while (std::getline(meta, mline)) {
      const std::string t = trim(mline);
      if (t.empty() || t[0] == '#') continue;
      const std::size_t eq = t.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(path + ".meta: expected key=value lines");
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key == "rows") {
        want_rows = static_cast<int>(parse_cell(value, path + ".meta"));
      } else if (key == "cols") {
        want_cols = static_cast<int>(parse_cell(value, path + ".meta"));
      } else {
        throw std::runtime_error(path + ".meta: unknown key '" + key + "'");
      }
    }
    if (want_rows >= 0 && want_rows != static_cast<int>(rows.size())) {
      throw std::runtime_error(path + ": row count disagrees with sidecar");
    }
    if (want_cols >= 0 &&
        want_cols != static_cast<int>(rows.front().size())) {
      throw std::runtime_error(path + ": column count disagrees with sidecar");
    }
  }

  MatrixXd out(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return out;
}

void write_matrix_csv(const std::string& path, const MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument("cannot write an empty matrix");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      if (c > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("write to " + path + " failed");
  }
  std::ofstream meta(path + ".meta");
  if (!meta) {
    throw std::runtime_error("cannot open " + path + ".meta for writing");
  }
  meta << "rows=" << m.rows() << "\ncols=" << m.cols() << "\n";
  if (!meta) {
    throw std::runtime_error("write to " + path + ".meta failed");
  }
}

std::map<std::string, std::string> read_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": duplicate key '" + key + "'");
    }
  }
  return out;
}

void apply_assignment(std::map<std::string, std::string>& config,
                      const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    throw std::invalid_argument("empty key in '" + assignment + "'");
  }
  config[key] = value;
}

}  // namespace corrsbl
