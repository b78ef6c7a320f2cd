#include "adjrobust/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace adjrobust {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  const char* s = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == s || (end && *end != '\0') || errno == ERANGE)
    throw Error(ErrorCode::NonNumericCell,
                "non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                ", column '" + col + "'");
  return v;
}

}  // namespace

ObservationTable load_csv(const std::string& path, const std::string& outcome_col,
                          const std::string& treatment_col) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, path + " is empty");
  const auto header = split_line(line);

  int y_idx = -1, a_idx = -1;
  std::vector<int> cov_cols;
  std::vector<std::string> cov_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == outcome_col) y_idx = static_cast<int>(j);
    else if (header[j] == treatment_col) a_idx = static_cast<int>(j);
    else {
      cov_cols.push_back(static_cast<int>(j));
      cov_names.push_back(header[j]);
    }
  }
  if (y_idx < 0)
    throw Error(ErrorCode::MissingColumn, "outcome column '" + outcome_col + "' not found");
  if (a_idx < 0)
    throw Error(ErrorCode::MissingColumn, "treatment column '" + treatment_col + "' not found");

  std::vector<double> ys, as;
  std::vector<std::vector<double>> cols(cov_cols.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::NonNumericCell,
                  "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                  " cells, expected " + std::to_string(header.size()));
    ys.push_back(parse_cell(cells[y_idx], row, outcome_col));
    const double av = parse_cell(cells[a_idx], row, treatment_col);
    if (av != 0.0 && av != 1.0)
      throw Error(ErrorCode::NonBinaryTreatment,
                  "treatment value " + cells[a_idx] + " at row " + std::to_string(row));
    as.push_back(av);
    for (std::size_t c = 0; c < cov_cols.size(); ++c)
      cols[c].push_back(parse_cell(cells[cov_cols[c]], row, header[cov_cols[c]]));
  }
  if (ys.empty()) throw Error(ErrorCode::EmptyFile, path + " has no data rows");

  ObservationTable t;
  const auto n = static_cast<Eigen::Index>(ys.size());
  t.y = Eigen::Map<VectorXd>(ys.data(), n);
  t.a = Eigen::Map<VectorXd>(as.data(), n);
  t.x.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    t.x.col(static_cast<Eigen::Index>(c)) = Eigen::Map<VectorXd>(cols[c].data(), n);
  t.col_names = cov_names;
  t.validate();
  return t;
}

void write_csv(const ObservationTable& table, const std::string& path,
               const std::string& outcome_col, const std::string& treatment_col) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << outcome_col << ',' << treatment_col;
  for (const auto& name : table.col_names) out << ',' << name;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < table.n(); ++i) {
    put(table.y[i]);
    out << ',';
    put(table.a[i]);
    for (Eigen::Index j = 0; j < table.p(); ++j) {
      out << ',';
      put(table.x(i, j));
    }
    out << '\n';
  }
}

}  // namespace adjrobust
