#include "resub/compat.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace resub {

namespace {

void validate(const CompatMatrix& m, const char* where) {
  if (m.resources.empty()) throw Error(std::string(where) + ": empty resource list");
  std::set<std::string> seen;
  for (const auto& id : m.resources)
    if (!seen.insert(id).second)
      throw Error(std::string(where) + ": duplicate resource id '" + id + "'");
  if (m.cells.size() != m.resources.size() * m.resources.size())
    throw Error(std::string(where) + ": matrix is not square");
  for (int32_t i = 0; i < m.size(); ++i)
    if (!m.at(i, i))
      throw Error(std::string(where) + ": resource '" + m.resources[i] +
                  "' cannot substitute for itself (diagonal must be 1)");
}

}  // namespace

int32_t CompatMatrix::index_of(const std::string& id) const {
  auto it = std::find(resources.begin(), resources.end(), id);
  return it == resources.end() ? -1 : static_cast<int32_t>(it - resources.begin());
}

CompatMatrix builtin_matrix() {
  // Row = original class, column = admissible substitute.
  static const char* rows[14] = {
      "11110000000000",  // r1
      "11110000000000",  // r2
      "11110000000000",  // r3
      "11111000000001",  // r4
      "11111000000001",  // r5
      "11111100000001",  // r6
      "11111110000001",  // r7
      "11111111000001",  // r8
      "11111111100001",  // r9
      "11111111110001",  // r10
      "11111111111001",  // r11
      "00000000000100",  // r12
      "11111111111011",  // r13
      "11111111111011",  // r14
  };
  CompatMatrix m;
  for (int i = 1; i <= 14; ++i) m.resources.push_back("r" + std::to_string(i));
  m.cells.reserve(14 * 14);
  for (const char* row : rows)
    for (int j = 0; j < 14; ++j) m.cells.push_back(row[j] == '1' ? 1 : 0);
  return m;
}

CompatMatrix identity_matrix(std::vector<std::string> resources) {
  CompatMatrix m;
  m.resources = std::move(resources);
  size_t n = m.resources.size();
  m.cells.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i) m.cells[i * n + i] = 1;
  validate(m, "identity_matrix");
  return m;
}

CompatMatrix full_matrix(std::vector<std::string> resources) {
  CompatMatrix m;
  m.resources = std::move(resources);
  m.cells.assign(m.resources.size() * m.resources.size(), 1);
  validate(m, "full_matrix");
  return m;
}

std::vector<std::string> candidates_for(const CompatMatrix& m, const std::string& original) {
  int32_t i = m.index_of(original);
  if (i < 0) throw Error("candidates_for: unknown resource '" + original + "'");
  std::vector<std::string> out;
  for (int32_t j = 0; j < m.size(); ++j)
    if (m.at(i, j)) out.push_back(m.resources[j]);
  return out;
}

CompatMatrix load_compat_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("compat csv: empty input");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };
  std::vector<std::string> header = split(line);
  if (header.size() < 2) throw Error("compat csv: header must list resource ids");
  CompatMatrix m;
  m.resources.assign(header.begin() + 1, header.end());
  size_t n = m.resources.size();
  size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != n + 1)
      throw Error("compat csv: row " + std::to_string(row + 1) + " has " +
                  std::to_string(cells.size() - 1) + " cells, expected " + std::to_string(n));
    if (row >= n) throw Error("compat csv: more rows than header columns");
    if (cells[0] != m.resources[row])
      throw Error("compat csv: row order must match header (row '" + cells[0] + "' vs header '" +
                  m.resources[row] + "')");
    for (size_t j = 0; j < n; ++j) {
      if (cells[j + 1] != "0" && cells[j + 1] != "1")
        throw Error("compat csv: cell for (" + cells[0] + "," + m.resources[j] +
                    ") must be 0 or 1, got '" + cells[j + 1] + "'");
      m.cells.push_back(cells[j + 1] == "1" ? 1 : 0);
    }
    ++row;
  }
  if (row != n) throw Error("compat csv: expected " + std::to_string(n) + " rows, got " +
                            std::to_string(row));
  validate(m, "compat csv");
  return m;
}

void write_compat_csv(const CompatMatrix& m, std::ostream& out) {
  for (const auto& id : m.resources) out << "," << id;
  out << "\n";
  for (int32_t i = 0; i < m.size(); ++i) {
    out << m.resources[i];
    for (int32_t j = 0; j < m.size(); ++j) out << "," << (m.at(i, j) ? 1 : 0);
    out << "\n";
  }
}

CompatMatrix load_compat_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open compatibility file: " + path);
  return load_compat_csv(in);
}

void save_compat_file(const CompatMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write compatibility file: " + path);
  write_compat_csv(m, out);
}

}  // namespace resub
