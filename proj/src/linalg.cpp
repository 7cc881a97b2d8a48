#include "kinap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <string>

namespace kinap::linalg {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const Triplet> triplets, bool symmetric) {
  SparseMatrix A;
  A.rows_ = rows;
  A.cols_ = cols;
  A.symmetric_ = symmetric;

  std::vector<std::size_t> count(rows + 1, 0);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw std::out_of_range("sparse matrix: triplet (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(rows) +
                              " x " + std::to_string(cols));
    }
    if (!std::isfinite(t.value)) {
      throw std::invalid_argument("sparse matrix: non-finite entry");
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  std::vector<std::size_t> cols_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (const auto& t : triplets) {
    cols_tmp[fill[t.row]] = t.col;
    vals_tmp[fill[t.row]] = t.value;
    ++fill[t.row];
  }

  A.row_ptr_.assign(rows + 1, 0);
  A.col_idx_.reserve(triplets.size());
  A.values_.reserve(triplets.size());
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < rows; ++r) {
    order.resize(count[r + 1] - count[r]);
    std::iota(order.begin(), order.end(), count[r]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cols_tmp[a] < cols_tmp[b]; });
    for (std::size_t k = 0; k < order.size();) {
      const std::size_t c = cols_tmp[order[k]];
      double v = 0.0;
      while (k < order.size() && cols_tmp[order[k]] == c) v += vals_tmp[order[k++]];
      A.col_idx_.push_back(c);
      A.values_.push_back(v);
    }
    A.row_ptr_[r + 1] = A.col_idx_.size();
  }
  return A;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = {i, i, 1.0};
  return from_triplets(n, n, t, true);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("sparse multiply: dimension mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) {
    throw std::invalid_argument("sparse transpose multiply: dimension mismatch");
  }
  std::vector<double> y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * xr;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      t.push_back({col_idx_[k], r, values_[k]});
    }
  }
  return from_triplets(cols_, rows_, t, symmetric_);
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d[r * cols_ + col_idx_[k]] = values_[k];
    }
  }
  return d;
}

double SparseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

SparseMatrix normal_system(const SparseMatrix& A) {
  // Row c of A^T A is sum over rows r with A(r, c) != 0 of A(r, c) * A(r, :).
  // Only the upper triangle is accumulated, then mirrored.
  const SparseMatrix At = A.transpose();
  const std::size_t n = A.cols();
  std::vector<double> acc(n, 0.0);
  std::vector<char> used(n, 0);
  std::vector<std::size_t> pattern;
  std::vector<Triplet> upper;

  for (std::size_t c = 0; c < n; ++c) {
    pattern.clear();
    const auto rows = At.row_cols(c);
    const auto avals = At.row_values(c);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      const std::size_t r = rows[p];
      const double arc = avals[p];
      const auto cols = A.row_cols(r);
      const auto vals = A.row_values(r);
      for (std::size_t q = 0; q < cols.size(); ++q) {
        const std::size_t c2 = cols[q];
        if (c2 < c) continue;
        if (!used[c2]) {
          used[c2] = 1;
          pattern.push_back(c2);
        }
        acc[c2] += arc * vals[q];
      }
    }
    for (std::size_t c2 : pattern) {
      upper.push_back({c, c2, acc[c2]});
      acc[c2] = 0.0;
      used[c2] = 0;
    }
  }

  std::vector<Triplet> all;
  all.reserve(2 * upper.size());
  for (const auto& t : upper) {
    all.push_back(t);
    if (t.row != t.col) all.push_back({t.col, t.row, t.value});
  }
  return SparseMatrix::from_triplets(n, n, all, true);
}

// ---------------------------------------------------------------------------
// Solvers

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                         " has value " + std::to_string(value)),
      pivot_(pivot) {}

SpdSolver::SpdSolver(SparseMatrix A) : matrix_(std::move(A)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("SPD factorization requires a square matrix");
  }
}

std::vector<double> SpdSolver::solve(std::span<const double> b, SolveReport* report) const {
  if (b.size() != size()) throw std::invalid_argument("SPD solve: dimension mismatch");
  std::vector<double> x = solve_unrefined(b);
  const double bnorm = norm2(b);
  int passes = 0;
  double rel = 0.0;
  while (true) {
    std::vector<double> r = matrix_.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double rnorm = norm2(r);
    rel = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    if (rel <= kRefineTolerance || passes == kMaxRefinements) break;
    const std::vector<double> dx = solve_unrefined(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    ++passes;
  }
  if (report) {
    report->refinements = passes;
    report->relative_residual = rel;
  }
  return x;
}

SparseMatrix diagonally_scaled(const SparseMatrix& A, std::span<const double> row,
                               std::span<const double> col) {
  if (row.size() != A.rows() || col.size() != A.cols()) {
    throw std::invalid_argument("diagonal scaling: dimension mismatch");
  }
  std::vector<Triplet> t;
  t.reserve(A.nnz());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    const auto cols = A.row_cols(r);
    const auto vals = A.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      t.push_back({r, cols[k], row[r] * vals[k] * col[cols[k]]});
    }
  }
  return SparseMatrix::from_triplets(A.rows(), A.cols(), t, A.symmetric());
}

std::vector<double> solve_least_squares(const SparseMatrix& A, const SpdSolver& normal,
                                        std::span<const double> b, SolveReport* report,
                                        double tolerance, int max_refinements) {
  if (b.size() != A.rows() || normal.size() != A.cols()) {
    throw std::invalid_argument("least-squares solve: dimension mismatch");
  }
  const std::vector<double> rhs = A.multiply_transpose(b);
  const double rhs_norm = norm2(rhs);
  std::vector<double> x = normal.solve_unrefined(rhs);
  int passes = 0;
  double rel = 0.0;
  while (true) {
    std::vector<double> r = A.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const std::vector<double> g = A.multiply_transpose(r);
    const double gnorm = norm2(g);
    rel = rhs_norm > 0.0 ? gnorm / rhs_norm : gnorm;
    if (rel <= tolerance || passes == max_refinements) break;
    const std::vector<double> dx = normal.solve_unrefined(g);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    ++passes;
  }
  if (report) {
    report->refinements = passes;
    report->relative_residual = rel;
  }
  return x;
}

std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& A) {
  const std::size_t n = A.rows();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c : A.row_cols(r)) {
      if (c != r) {
        adj[r].push_back(c);
        adj[c].push_back(r);
      }
    }
  }
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    degree[i] = a.size();
  }

  std::vector<char> visited(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);

  // Breadth-first levels from root; returns the last node reached (a far
  // node, used to find a pseudo-peripheral start).
  auto bfs_far = [&](std::size_t root, std::vector<int>& level) {
    std::queue<std::size_t> q;
    level[root] = 0;
    q.push(root);
    std::size_t last = root;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      if (level[u] > level[last] || (level[u] == level[last] && degree[u] < degree[last])) {
        last = u;
      }
      for (std::size_t w : adj[u]) {
        if (level[w] < 0) {
          level[w] = level[u] + 1;
          q.push(w);
        }
      }
    }
    return last;
  };

  std::vector<int> level(n, -1);
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (visited[seed]) continue;
    // Component of seed: start from its minimum-degree node.
    std::vector<int> comp_level(n, -1);
    bfs_far(seed, comp_level);
    std::size_t start = seed;
    for (std::size_t i = 0; i < n; ++i) {
      if (comp_level[i] >= 0 && degree[i] < degree[start]) start = i;
    }
    for (int sweep = 0; sweep < 2; ++sweep) {
      std::vector<int> lv(n, -1);
      start = bfs_far(start, lv);
    }

    std::queue<std::size_t> q;
    visited[start] = 1;
    q.push(start);
    std::vector<std::size_t> nbrs;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      order.push_back(u);
      nbrs.clear();
      for (std::size_t w : adj[u]) {
        if (!visited[w]) {
          visited[w] = 1;
          nbrs.push_back(w);
        }
      }
      std::stable_sort(nbrs.begin(), nbrs.end(),
                       [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });
      for (std::size_t w : nbrs) q.push(w);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

SpdFactorization::SpdFactorization(SparseMatrix A) : SpdSolver(std::move(A)) {
  const SparseMatrix& M = matrix_;
  const std::size_t n = M.rows();
  perm_ = reverse_cuthill_mckee(M);
  inv_perm_.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) inv_perm_[perm_[k]] = k;

  first_.assign(n, 0);
  start_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i;
    for (std::size_t c : M.row_cols(perm_[i])) lo = std::min(lo, inv_perm_[c]);
    first_[i] = lo;
    start_[i + 1] = start_[i] + (i - lo + 1);
  }
  values_.assign(start_[n], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = M.row_cols(perm_[i]);
    const auto vals = M.row_values(perm_[i]);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      const std::size_t k = inv_perm_[cols[q]];
      if (k <= i) row(i)[k - first_[i]] = vals[q];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    double* Li = row(i);
    const std::size_t fi = first_[i];
    for (std::size_t k = fi; k < i; ++k) {
      const double* Lk = row(k);
      const std::size_t fk = first_[k];
      const std::size_t lo = std::max(fi, fk);
      double s = Li[k - fi];
      for (std::size_t m = lo; m < k; ++m) s -= Li[m - fi] * Lk[m - fk];
      Li[k - fi] = s / Lk[k - fk];
    }
    double d = Li[i - fi];
    for (std::size_t m = fi; m < i; ++m) d -= Li[m - fi] * Li[m - fi];
    if (!(d > 0.0)) throw NotPositiveDefinite(perm_[i], d);
    Li[i - fi] = std::sqrt(d);
  }
}

std::size_t SpdFactorization::bandwidth() const {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < first_.size(); ++i) bw = std::max(bw, i - first_[i]);
  return bw;
}

std::vector<double> SpdFactorization::solve_unrefined(std::span<const double> b) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const double* Li = row(i);
    const std::size_t fi = first_[i];
    double s = y[i];
    for (std::size_t m = fi; m < i; ++m) s -= Li[m - fi] * y[m];
    y[i] = s / Li[i - fi];
  }
  for (std::size_t i = n; i-- > 0;) {
    const double* Li = row(i);
    const std::size_t fi = first_[i];
    y[i] /= Li[i - fi];
    const double yi = y[i];
    for (std::size_t m = fi; m < i; ++m) y[m] -= Li[m - fi] * yi;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

std::vector<double> SpdFactorization::apply_factor_product(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[perm_[i]];
  // z = L^T y
  for (std::size_t i = 0; i < n; ++i) {
    const double* Li = row(i);
    for (std::size_t m = first_[i]; m <= i; ++m) z[m] += Li[m - first_[i]] * y[i];
  }
  // y = L z
  for (std::size_t i = 0; i < n; ++i) {
    const double* Li = row(i);
    double s = 0.0;
    for (std::size_t m = first_[i]; m <= i; ++m) s += Li[m - first_[i]] * z[m];
    y[i] = s;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[perm_[i]] = y[i];
  return out;
}

DenseSpdFactorization::DenseSpdFactorization(SparseMatrix A) : SpdSolver(std::move(A)) {
  n_ = matrix_.rows();
  lower_ = matrix_.to_dense();
  for (std::size_t j = 0; j < n_; ++j) {
    double d = lower_[j * n_ + j];
    for (std::size_t k = 0; k < j; ++k) d -= lower_[j * n_ + k] * lower_[j * n_ + k];
    if (!(d > 0.0)) throw NotPositiveDefinite(j, d);
    const double ljj = std::sqrt(d);
    lower_[j * n_ + j] = ljj;
    for (std::size_t i = j + 1; i < n_; ++i) {
      double s = lower_[i * n_ + j];
      for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
      lower_[i * n_ + j] = s / ljj;
    }
  }
}

std::vector<double> DenseSpdFactorization::solve_unrefined(std::span<const double> b) const {
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * y[k];
    y[i] = s / lower_[i * n_ + i];
  }
  for (std::size_t i = n_; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n_; ++k) s -= lower_[k * n_ + i] * y[k];
    y[i] = s / lower_[i * n_ + i];
  }
  return y;
}

std::vector<double> DenseSpdFactorization::apply_factor_product(std::span<const double> x) const {
  std::vector<double> z(n_, 0.0), y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = i; k < n_; ++k) z[i] += lower_[k * n_ + i] * x[k];
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k <= i; ++k) y[i] += lower_[i * n_ + k] * z[k];
  }
  return y;
}

// ---------------------------------------------------------------------------
// Condition estimation

namespace {

std::vector<double> start_vector(std::size_t n) {
  std::mt19937_64 rng(0x5eed);
  std::vector<double> x(n);
  for (double& v : x) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  const double nx = norm2(x);
  for (double& v : x) v /= nx;
  return x;
}

template <class Apply>
double dominant_eigenvalue(std::size_t n, Apply&& apply, int max_iterations, double tolerance,
                           int& iterations, bool& converged) {
  std::vector<double> x = start_vector(n);
  double estimate = 0.0;
  converged = false;
  for (iterations = 1; iterations <= max_iterations; ++iterations) {
    std::vector<double> y = apply(x);
    const double rayleigh = dot(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (iterations > 1 && std::abs(rayleigh - estimate) <= tolerance * std::abs(rayleigh)) {
      estimate = rayleigh;
      converged = true;
      break;
    }
    estimate = rayleigh;
  }
  iterations = std::min(iterations, max_iterations);
  return estimate;
}

}  // namespace

ConditionEstimate condition_estimate(const SparseMatrix& A, bool symmetric, int max_iterations,
                                     double tolerance) {
  if (A.rows() != A.cols()) throw std::invalid_argument("condition estimate: square matrix required");
  if (!symmetric) {
    ConditionEstimate e = condition_estimate(normal_system(A), true, max_iterations, tolerance);
    e.value = std::sqrt(e.value);
    e.lambda_max = std::sqrt(e.lambda_max);
    e.lambda_min = std::sqrt(e.lambda_min);
    return e;
  }
  const std::size_t n = A.rows();
  ConditionEstimate e;
  int it_max = 0, it_min = 0;
  bool ok_max = false, ok_min = false;
  e.lambda_max = dominant_eigenvalue(
      n, [&](std::span<const double> x) { return A.multiply(x); }, max_iterations, tolerance,
      it_max, ok_max);
  const SpdFactorization factor(A);
  const double inv_min = dominant_eigenvalue(
      n, [&](std::span<const double> x) { return factor.solve_unrefined(x); }, max_iterations,
      tolerance, it_min, ok_min);
  e.lambda_min = 1.0 / inv_min;
  e.value = e.lambda_max / e.lambda_min;
  e.iterations = std::max(it_max, it_min);
  e.converged = ok_max && ok_min;
  return e;
}

}  // namespace kinap::linalg
