#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "resub/common.hpp"

namespace resub {

// Substitution rules: at(i, j) says whether a task initially planned on
// resource i may be reassigned to resource j.  Reflexive by construction so
// the initial plan is always admissible.
struct CompatMatrix {
  std::vector<std::string> resources;
  std::vector<uint8_t> cells;  // row-major, row = original, column = substitute

  bool at(int32_t original, int32_t substitute) const {
    return cells[static_cast<size_t>(original) * resources.size() + substitute] != 0;
  }
  int32_t index_of(const std::string& id) const;
  int32_t size() const { return static_cast<int32_t>(resources.size()); }
};

// The 14-resource fleet table used by the desk fixtures: three interchangeable
// small classes, a chain of one-directional upgrades, one isolated specialty
// class (r12) and two top classes that can stand in for nearly everything.
CompatMatrix builtin_matrix();

CompatMatrix identity_matrix(std::vector<std::string> resources);
CompatMatrix full_matrix(std::vector<std::string> resources);

// Allowed substitutes for an original resource, in matrix column order.
std::vector<std::string> candidates_for(const CompatMatrix& m, const std::string& original);

CompatMatrix load_compat_csv(std::istream& in);
void write_compat_csv(const CompatMatrix& m, std::ostream& out);
CompatMatrix load_compat_file(const std::string& path);
void save_compat_file(const CompatMatrix& m, const std::string& path);

}  // namespace resub
