#include "treeglm/bounds.hpp"

#include <sstream>

namespace treeglm {

std::string render_bounds_table(int b_max) {
  if (b_max < 1) throw std::invalid_argument("bounds table: b_max must be >= 1");
  std::ostringstream out;
  out << "| B | max useful S (composite) | max useful S (mixture) |\n";
  out << "|---|---:|---:|\n";
  for (int b = 1; b <= b_max; ++b) {
    out << "| " << b << " | " << max_useful_submodels_multiresp(b) << " | "
        << max_useful_submodels_mixture(b) << " |\n";
  }
  return out.str();
}

}  // namespace treeglm
