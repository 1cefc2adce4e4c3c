#pragma once

#include <vector>

namespace qr {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// min c.x subject to A x = b, x >= 0, by the two-phase dense simplex
// method with Bland's rule. A is given row by row.
LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                  double eps = 1e-10);

}  // namespace qr
