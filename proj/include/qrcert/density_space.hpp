#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrcert/combinatorics.hpp"

namespace qr {

// u_{t,p,I}: entry 2p|e n I|/k at every k-subset e of [t]. I is a bit mask
// with exactly t/2 elements; t must be even.
DensityVectorK u_vector(int t, int k, double p, std::uint64_t subset_i);

// Every point of the affine hull W_{t,p} of the u-vectors has the form
// e -> (2p/k) sum_{i in e} w_i with sum_i w_i = t/2; this evaluates it.
DensityVectorK w_point(int t, int k, double p, const std::vector<double>& weights);

// Affine coefficients c_I (sum 1, over the t/2-subsets of [t] in colex
// order) with sum_I c_I u_{t,p,I} = w_point(t, k, p, weights). This is
// the minimum-norm choice.
std::vector<double> generator_coefficients(int t, const std::vector<double>& weights);

struct WDistance {
  double l2 = 0.0;
  // Max-norm of the least-squares residual: a feasible value, so an upper
  // bound on the true max-norm distance to W.
  double linf = 0.0;
  std::vector<double> weights;
  std::vector<double> coefficients;
  // Exact max-norm distance, when requested.
  std::optional<double> linf_exact;
};

// Least-squares projection of d onto W_{t,p} (t = d.t, k = d.k). Requires
// t even and t <= 16.
WDistance distance_to_W(const DensityVectorK& d, double p, bool exact_linf = false);

}  // namespace qr
