#include "minsurf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minsurf {

SparseOperator SparseOperator::from_triplets(Index size,
                                             std::vector<Triplet> triplets) {
  if (size < 0) throw StructuralError("sparse: negative size");
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= size || t.col < 0 || t.col >= size) {
      throw StructuralError("sparse: triplet index out of range");
    }
  }
  // Explicit diagonal entries keep Jacobi scaling and constrain() in-place.
  triplets.reserve(triplets.size() + size);
  for (Index i = 0; i < size; ++i) triplets.push_back({i, i, 0.0});

  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });

  SparseOperator op;
  op.row_ptr_.assign(1, 0);
  op.row_ptr_.reserve(size + 1);
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i;
    double sum = 0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      sum += triplets[j].value;
      ++j;
    }
    while (static_cast<Index>(op.row_ptr_.size()) - 1 < triplets[i].row) {
      op.row_ptr_.push_back(op.values_.size());
    }
    op.cols_.push_back(triplets[i].col);
    op.values_.push_back(sum);
    i = j;
  }
  while (static_cast<Index>(op.row_ptr_.size()) - 1 < size) {
    op.row_ptr_.push_back(op.values_.size());
  }
  return op;
}

void SparseOperator::apply(std::span<const double> x,
                           std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(size()) || y.size() != x.size()) {
    throw StructuralError("sparse apply: size mismatch");
  }
  for (Index i = 0; i < size(); ++i) {
    double sum = 0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      sum += values_[k] * x[cols_[k]];
    }
    y[i] = sum;
  }
}

std::vector<double> SparseOperator::multiply(std::span<const double> x) const {
  std::vector<double> y(x.size());
  apply(x, y);
  return y;
}

double SparseOperator::entry(Index row, Index col) const {
  const auto cols = row_entries_cols(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return values_[row_ptr_[row] + (it - cols.begin())];
}

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(size());
  for (Index i = 0; i < size(); ++i) d[i] = entry(i, i);
  return d;
}

double SparseOperator::sum_entries() const {
  long double sum = 0;
  for (double v : values_) sum += v;
  return static_cast<double>(sum);
}

double SparseOperator::frobenius_norm() const {
  long double sum = 0;
  for (double v : values_) sum += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(static_cast<double>(sum)));
}

double SparseOperator::quadratic_form(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(size())) {
    throw StructuralError("quadratic form: size mismatch");
  }
  long double sum = 0;
  for (Index i = 0; i < size(); ++i) {
    double row = 0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      row += values_[k] * x[cols_[k]];
    }
    sum += static_cast<long double>(x[i]) * row;
  }
  return static_cast<double>(sum);
}

double SparseOperator::symmetry_defect() const {
  double defect = 0;
  for (Index i = 0; i < size(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] == i) continue;
      defect = std::max(defect, std::abs(values_[k] - entry(cols_[k], i)));
    }
  }
  return defect;
}

SparseOperator& SparseOperator::add_scaled(const SparseOperator& other,
                                           double factor) {
  if (other.size() != size()) {
    throw StructuralError("sparse add: size mismatch");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(values_.size() + other.values_.size());
  for (Index i = 0; i < size(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      triplets.push_back({i, cols_[k], values_[k]});
    }
    for (std::size_t k = other.row_ptr_[i]; k < other.row_ptr_[i + 1]; ++k) {
      triplets.push_back({i, other.cols_[k], factor * other.values_[k]});
    }
  }
  *this = from_triplets(size(), std::move(triplets));
  return *this;
}

void SparseOperator::constrain(std::span<const std::uint8_t> flagged) {
  if (flagged.size() != static_cast<std::size_t>(size())) {
    throw StructuralError("constrain: mask size mismatch");
  }
  for (Index i = 0; i < size(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (flagged[i] || flagged[cols_[k]]) {
        values_[k] = cols_[k] == i && flagged[i] ? 1.0 : 0.0;
      }
    }
  }
}

PcgOutcome pcg_jacobi(const SparseOperator& op, std::span<const double> rhs,
                      double rel_tol, int max_iterations) {
  const Index n = op.size();
  if (rhs.size() != static_cast<std::size_t>(n)) {
    throw StructuralError("pcg: rhs size mismatch");
  }
  const std::vector<double> diag = op.diagonal();
  for (Index i = 0; i < n; ++i) {
    if (!(diag[i] > 0)) {
      throw SolveError("pcg: nonpositive diagonal at index " + std::to_string(i),
                       {});
    }
  }

  PcgOutcome out;
  out.solution.assign(n, 0.0);

  const auto norm = [](std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const auto dot = [](std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  const double rhs_norm = norm(rhs);
  out.residual_history.push_back(rhs_norm);
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = rel_tol * rhs_norm;

  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> z(n);
  for (Index i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  std::vector<double> p = z;
  std::vector<double> ap(n);
  double rz = dot(r, z);

  for (int it = 1; it <= max_iterations; ++it) {
    op.apply(p, ap);
    const double p_ap = dot(p, ap);
    if (!(p_ap > 0)) {
      out.iterations = it - 1;
      return out;  // breakdown: operator not positive definite along p
    }
    const double alpha = rz / p_ap;
    for (Index i = 0; i < n; ++i) {
      out.solution[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double r_norm = norm(r);
    out.residual_history.push_back(r_norm);
    out.iterations = it;
    if (r_norm <= target) {
      out.converged = true;
      return out;
    }
    for (Index i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    for (Index i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_next;
  }
  return out;
}

}  // namespace minsurf
