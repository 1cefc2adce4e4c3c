#include "qrcert/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace qr {

namespace {

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double piv = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= piv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Runs simplex iterations over columns [0, allowed). Returns false when
  // the objective is unbounded below.
  bool optimize(std::size_t allowed, double eps) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j)
        if (cost(j) < -eps) {
          enter = j;
          break;
        }
      if (enter == allowed) return true;
      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (at(i, enter) <= eps) continue;
        const double ratio = rhs(i) / at(i, enter);
        if (leave == m_ || ratio < best - eps || (std::abs(ratio - best) <= eps && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const std::vector<double>& c, const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                  double eps) {
  const std::size_t m = a.size(), n = c.size();
  if (b.size() != m) throw std::invalid_argument("lp: b length does not match rows");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("lp: row length does not match c");

  // Columns [0, n) are the variables, [n, n + m) the phase-one artificials.
  Tableau tab(m, n + m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * a[i][j];
    tab.at(i, n + i) = 1.0;
    tab.rhs(i) = sign * b[i];
    tab.basis()[i] = n + i;
  }
  for (std::size_t j = 0; j <= n + m; ++j) {
    if (j >= n && j < n + m) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += tab.at(i, j);
    tab.cost(j) = -s;
  }
  tab.optimize(n + m, eps);

  LpResult result;
  if (-tab.cost(n + m) > 1e-7 * (1.0 + static_cast<double>(m))) return result;

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and keep a zero artificial.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(tab.at(i, j)) > eps) {
        tab.pivot(i, j);
        break;
      }
  }

  for (std::size_t j = 0; j <= n + m; ++j) tab.cost(j) = j < n ? c[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = tab.basis()[i];
    const double cb = bj < n ? c[bj] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= n + m; ++j) tab.cost(j) -= cb * tab.at(i, j);
  }
  if (!tab.optimize(n, eps)) {
    result.status = LpResult::Status::unbounded;
    return result;
  }
  result.status = LpResult::Status::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis()[i] < n) result.x[tab.basis()[i]] = tab.rhs(i);
  result.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.value += c[j] * result.x[j];
  return result;
}

}  // namespace qr
