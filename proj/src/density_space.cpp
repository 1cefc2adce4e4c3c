#include "qrcert/density_space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qrcert/lp.hpp"

namespace qr {

namespace {

void check_shape(int t, int k) {
  if (t < 2 || t % 2 != 0) throw std::invalid_argument("W needs t even and >= 2");
  if (t > 16) throw std::invalid_argument("W needs t <= 16");
  if (k < 1 || k > t) throw std::invalid_argument("W needs 1 <= k <= t");
}

}  // namespace

DensityVectorK u_vector(int t, int k, double p, std::uint64_t subset_i) {
  check_shape(t, k);
  if (subset_i >> t) throw std::invalid_argument("I is not a subset of [t]");
  if (std::popcount(subset_i) != t / 2) throw std::invalid_argument("u-vector needs |I| = t/2");
  DensityVectorK u(t, k);
  const auto masks = subsets_colex(t, k);
  for (std::size_t i = 0; i < masks.size(); ++i)
    u.values[i] = 2.0 * p * std::popcount(masks[i] & subset_i) / k;
  return u;
}

DensityVectorK w_point(int t, int k, double p, const std::vector<double>& weights) {
  check_shape(t, k);
  if (weights.size() != static_cast<std::size_t>(t)) throw std::invalid_argument("need one weight per element");
  DensityVectorK out(t, k);
  const auto masks = subsets_colex(t, k);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    double s = 0.0;
    for (int e : mask_elements(masks[i])) s += weights[static_cast<std::size_t>(e)];
    out.values[i] = 2.0 * p * s / k;
  }
  return out;
}

std::vector<double> generator_coefficients(int t, const std::vector<double>& weights) {
  check_shape(t, 1);
  const int h = t / 2;
  const auto gens = subsets_colex(t, h);
  const double n = static_cast<double>(gens.size());
  // c_I = 1/C(t,h) + (sum_{i in I} w_i - h/2) / C(t-2, h-1).
  const double scale = t >= 2 ? static_cast<double>(binomial(static_cast<std::uint64_t>(t - 2), static_cast<std::uint64_t>(h - 1))) : 1.0;
  std::vector<double> c(gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    double s = 0.0;
    for (int e : mask_elements(gens[g])) s += weights[static_cast<std::size_t>(e)];
    c[g] = 1.0 / n + (s - h / 2.0) / scale;
  }
  return c;
}

WDistance distance_to_W(const DensityVectorK& d, double p, bool exact_linf) {
  const int t = d.t, k = d.k;
  check_shape(t, k);
  const auto masks = subsets_colex(t, k);
  if (d.values.size() != masks.size()) throw std::invalid_argument("density vector length is not C(t,k)");
  const int h = t / 2;
  const double scale = 2.0 * p / k;
  const std::uint64_t last = std::uint64_t{1} << (t - 1);

  // Eliminate w_{t-1} = h - sum of the others; the remaining t-1 weights are free.
  const auto rows = static_cast<Eigen::Index>(masks.size());
  Eigen::MatrixXd a(rows, t - 1);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::uint64_t e = masks[static_cast<std::size_t>(r)];
    const double has_last = (e & last) ? 1.0 : 0.0;
    for (int i = 0; i < t - 1; ++i) a(r, i) = scale * ((((e >> i) & 1) ? 1.0 : 0.0) - has_last);
    rhs(r) = d.values[static_cast<std::size_t>(r)] - scale * h * has_last;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd z = cod.solve(rhs);

  WDistance out;
  out.weights.assign(static_cast<std::size_t>(t), 0.0);
  double rest = h;
  for (int i = 0; i < t - 1; ++i) {
    out.weights[static_cast<std::size_t>(i)] = z(i);
    rest -= z(i);
  }
  out.weights[static_cast<std::size_t>(t - 1)] = rest;
  const DensityVectorK fit = w_point(t, k, p, out.weights);
  double l2 = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double r = d.values[i] - fit.values[i];
    l2 += r * r;
    linf = std::max(linf, std::abs(r));
  }
  out.l2 = std::sqrt(l2);
  out.linf = linf;
  out.coefficients = generator_coefficients(t, out.weights);

  if (exact_linf) {
    // min s subject to |d_e - scale * sum_{i in e} w_i| <= s and sum w = h,
    // with w = w+ - w-. Variables: w+ (t), w- (t), s, then one slack per inequality.
    const std::size_t e_count = masks.size();
    const std::size_t nv = 2 * static_cast<std::size_t>(t) + 1 + 2 * e_count;
    std::vector<double> c(nv, 0.0);
    c[2 * static_cast<std::size_t>(t)] = 1.0;
    std::vector<std::vector<double>> rows_lp;
    std::vector<double> b;
    for (std::size_t e = 0; e < e_count; ++e) {
      for (int sign : {1, -1}) {
        std::vector<double> row(nv, 0.0);
        for (int i = 0; i < t; ++i)
          if ((masks[e] >> i) & 1) {
            row[static_cast<std::size_t>(i)] = sign * scale;
            row[static_cast<std::size_t>(t + i)] = -sign * scale;
          }
        row[2 * static_cast<std::size_t>(t)] = -1.0;
        row[2 * static_cast<std::size_t>(t) + 1 + 2 * e + (sign == 1 ? 0 : 1)] = 1.0;
        rows_lp.push_back(std::move(row));
        b.push_back(sign * d.values[e]);
      }
    }
    std::vector<double> sum_row(nv, 0.0);
    for (int i = 0; i < t; ++i) {
      sum_row[static_cast<std::size_t>(i)] = 1.0;
      sum_row[static_cast<std::size_t>(t + i)] = -1.0;
    }
    rows_lp.push_back(std::move(sum_row));
    b.push_back(h);
    const LpResult lp = solve_lp(c, rows_lp, b);
    if (lp.status != LpResult::Status::optimal) throw std::runtime_error("max-norm distance LP did not reach an optimum");
    out.linf_exact = std::min(lp.value, out.linf);
  }
  return out;
}

}  // namespace qr
