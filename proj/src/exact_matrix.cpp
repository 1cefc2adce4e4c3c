#include "qrcert/exact_matrix.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <ostream>
#include <unordered_set>

#include "qrcert/combinatorics.hpp"
#include "qrcert/parallel.hpp"

namespace qr {

namespace {

std::string cut_label(const std::vector<int>& assignment, int r) {
  std::vector<std::string> parts(static_cast<std::size_t>(r));
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    auto& s = parts[static_cast<std::size_t>(assignment[v])];
    if (!s.empty()) s += ',';
    s += std::to_string(v);
  }
  std::string out;
  for (int i = 0; i < r; ++i) {
    if (i) out += '|';
    out += parts[static_cast<std::size_t>(i)];
  }
  return out;
}

bool crosses(const std::vector<int>& assignment, std::uint64_t mask) {
  std::uint64_t seen = 0;
  for (; mask; mask &= mask - 1) {
    const auto bit = std::uint64_t{1} << assignment[static_cast<std::size_t>(std::countr_zero(mask))];
    if (seen & bit) return false;
    seen |= bit;
  }
  return true;
}

void check_cut_params(int t, int r, int k) {
  if (t < 1 || t > 63) throw std::invalid_argument("crossing matrix needs 1 <= t <= 63");
  if (r < 1 || t % r != 0) throw std::invalid_argument("crossing matrix needs r | t");
  if (k < 1 || k > t) throw std::invalid_argument("crossing matrix needs 1 <= k <= t");
}

std::vector<std::uint64_t> columns_containing_01(int t, int k) {
  if (k < 2) throw std::invalid_argument("N needs k >= 2");
  std::vector<std::uint64_t> cols;
  for (std::uint64_t mask : subsets_colex(t, k))
    if ((mask & 3) == 3) cols.push_back(mask);
  return cols;
}

ExactMatrix build_crossing(const std::vector<std::vector<int>>& cuts, int r, const std::vector<std::uint64_t>& cols) {
  ExactMatrix m(cuts.size(), cols.size());
  m.row_labels.resize(cuts.size());
  for (std::uint64_t c : cols) m.col_labels.push_back(subset_label(c));
  parallel_for(cuts.size(), [&](std::size_t i) {
    m.row_labels[i] = cut_label(cuts[i], r);
    for (std::size_t j = 0; j < cols.size(); ++j) m.at(i, j) = crosses(cuts[i], cols[j]) ? 1 : 0;
  });
  return m;
}

std::vector<std::vector<int>> balanced_cuts(int t, int r, std::uint64_t budget) {
  const auto alpha = balanced_alpha(r);
  CutEnumerator en(t, alpha, budget);
  std::vector<std::vector<int>> out;
  out.reserve(en.count());
  std::vector<int> a;
  while (en.next(a)) out.push_back(a);
  return out;
}

}  // namespace

void ExactMatrix::check() const {
  if (entries.size() != rows * cols) throw std::logic_error("matrix entry count does not match dimensions");
  if (!row_labels.empty() && row_labels.size() != rows) throw std::logic_error("row labels do not match rows");
  if (!col_labels.empty() && col_labels.size() != cols) throw std::logic_error("column labels do not match columns");
}

std::vector<double> ExactMatrix::multiply(const std::vector<double>& v) const {
  if (v.size() != cols) throw std::invalid_argument("vector length does not match matrix columns");
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i] += static_cast<double>(at(i, j)) * v[j];
  return out;
}

ExactMatrix inclusion_matrix(int t, int h, int k) {
  if (k < 1) throw std::invalid_argument("inclusion matrix needs k >= 1");
  if (!(h >= k)) throw std::invalid_argument("inclusion matrix needs h >= k");
  if (!(t > h)) throw std::invalid_argument("inclusion matrix needs t > h");
  if (t > 63) throw std::invalid_argument("inclusion matrix needs t <= 63");
  const auto rows = subsets_colex(t, h);
  const auto cols = subsets_colex(t, k);
  ExactMatrix m(rows.size(), cols.size());
  if (k < 2) m.flags.push_back("k<2");
  for (auto r : rows) m.row_labels.push_back(subset_label(r));
  for (auto c : cols) m.col_labels.push_back(subset_label(c));
  parallel_for(rows.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j) m.at(i, j) = (cols[j] & ~rows[i]) == 0 ? 1 : 0;
  });
  return m;
}

ExactMatrix crossing_matrix_M(int t, int r, int k, std::uint64_t budget) {
  check_cut_params(t, r, k);
  return build_crossing(balanced_cuts(t, r, budget), r, subsets_colex(t, k));
}

ExactMatrix crossing_submatrix_N(int t, int r, int k, std::uint64_t budget) {
  check_cut_params(t, r, k);
  const auto cols = columns_containing_01(t, k);
  auto cuts = balanced_cuts(t, r, budget);
  std::erase_if(cuts, [](const std::vector<int>& a) { return a[0] == a[1]; });
  return build_crossing(cuts, r, cols);
}

ExactMatrix crossing_submatrix_N_distinct(int t, int r, int k) {
  check_cut_params(t, r, k);
  const auto cols = columns_containing_01(t, k);
  const int size = t / r;
  std::vector<int> block(static_cast<std::size_t>(t), -1);
  std::vector<int> fill(static_cast<std::size_t>(r), 0);
  std::unordered_set<std::string> seen;
  ExactMatrix m(0, cols.size());
  for (auto c : cols) m.col_labels.push_back(subset_label(c));

  // Restricted growth: element v joins an open block or starts the next one.
  std::function<void(int, int)> place = [&](int v, int used) {
    if (v == t) {
      if (block[0] == block[1]) return;
      std::string key(cols.size(), '0');
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (crosses(block, cols[j])) key[j] = '1';
      if (!seen.insert(key).second) return;
      ++m.rows;
      for (char ch : key) m.entries.push_back(ch == '1' ? 1 : 0);
      m.row_labels.push_back(cut_label(block, r));
      return;
    }
    for (int b = 0; b < std::min(used + 1, r); ++b) {
      if (fill[static_cast<std::size_t>(b)] == size) continue;
      block[static_cast<std::size_t>(v)] = b;
      ++fill[static_cast<std::size_t>(b)];
      place(v + 1, std::max(used, b + 1));
      --fill[static_cast<std::size_t>(b)];
    }
    block[static_cast<std::size_t>(v)] = -1;
  };
  place(0, 0);
  return m;
}

ExactMatrix dedup_rows(const ExactMatrix& m) {
  ExactMatrix out(0, m.cols);
  out.col_labels = m.col_labels;
  out.flags = m.flags;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto* begin = m.entries.data() + i * m.cols;
    std::string key(reinterpret_cast<const char*>(begin), m.cols * sizeof(std::int64_t));
    if (!seen.insert(std::move(key)).second) continue;
    out.entries.insert(out.entries.end(), begin, begin + m.cols);
    if (!m.row_labels.empty()) out.row_labels.push_back(m.row_labels[i]);
    ++out.rows;
  }
  return out;
}

void write_triplets(std::ostream& out, const ExactMatrix& m) {
  std::size_t nnz = 0;
  for (auto e : m.entries) nnz += e != 0;
  out << "# " << m.rows << ' ' << m.cols << ' ' << nnz << '\n';
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (m.at(i, j) != 0)
        out << (m.row_labels.empty() ? std::to_string(i) : m.row_labels[i]) << ' '
            << (m.col_labels.empty() ? std::to_string(j) : m.col_labels[j]) << ' ' << m.at(i, j) << '\n';
}

}  // namespace qr
