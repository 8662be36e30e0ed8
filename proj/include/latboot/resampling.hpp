#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "latboot/combinatorics.hpp"
#include "latboot/errors.hpp"
#include "latboot/lattice.hpp"
#include "latboot/moments.hpp"
#include "latboot/scalar.hpp"

namespace latboot {

/// Coefficient vector over a LatticeIndex.
template <Scalar S>
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::size_t n) : values_(n, S(0)) {}
  explicit LatticeVector(std::vector<S> values) : values_(std::move(values)) {}

  static LatticeVector basis(std::size_t n, std::size_t i) {
    LatticeVector e(n);
    e.values_[i] = S(1);
    return e;
  }

  std::size_t size() const { return values_.size(); }
  S& operator[](std::size_t i) { return values_[i]; }
  const S& operator[](std::size_t i) const { return values_[i]; }
  std::span<const S> values() const { return values_; }

  bool is_zero_vector() const {
    for (const auto& v : values_) {
      if (!is_zero(v)) {
        return false;
      }
    }
    return true;
  }

  S one_norm() const {
    S total(0);
    for (const auto& v : values_) {
      total += abs_value(v);
    }
    return total;
  }

  S max_abs() const {
    S best(0);
    for (const auto& v : values_) {
      if (abs_value(v) > best) {
        best = abs_value(v);
      }
    }
    return best;
  }

  LatticeVector& operator+=(const LatticeVector& o) {
    check(o);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      values_[i] += o.values_[i];
    }
    return *this;
  }
  LatticeVector& operator-=(const LatticeVector& o) {
    check(o);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      values_[i] -= o.values_[i];
    }
    return *this;
  }
  LatticeVector& operator*=(const S& a) {
    for (auto& v : values_) {
      v *= a;
    }
    return *this;
  }

  friend LatticeVector operator+(LatticeVector a, const LatticeVector& b) { return a += b; }
  friend LatticeVector operator-(LatticeVector a, const LatticeVector& b) { return a -= b; }
  friend LatticeVector operator*(const S& s, LatticeVector a) { return a *= s; }
  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

 private:
  void check(const LatticeVector& o) const {
    if (o.size() != size()) {
      throw DimensionError("lattice vectors of length " + std::to_string(size()) + " and " +
                           std::to_string(o.size()));
    }
  }

  std::vector<S> values_;
};

/// Dense row-major matrix; only used at desk-scale sizes.
template <Scalar S>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, S(0)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      id(i, i) = S(1);
    }
    return id;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  const S& operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  S column_sum(std::size_t c) const {
    S total(0);
    for (std::size_t r = 0; r < rows_; ++r) {
      total += (*this)(r, c);
    }
    return total;
  }

  /// Max column absolute sum.
  S one_norm() const {
    S best(0);
    for (std::size_t c = 0; c < cols_; ++c) {
      S total(0);
      for (std::size_t r = 0; r < rows_; ++r) {
        total += abs_value((*this)(r, c));
      }
      if (total > best) {
        best = total;
      }
    }
    return best;
  }

  S max_abs() const {
    S best(0);
    for (const auto& v : values_) {
      if (abs_value(v) > best) {
        best = abs_value(v);
      }
    }
    return best;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        t(c, r) = (*this)(r, c);
      }
    }
    return t;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("matrix product dimension mismatch");
    }
    DenseMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (is_zero(aik)) {
          continue;
        }
        for (std::size_t j = 0; j < b.cols_; ++j) {
          out(i, j) += aik * b(k, j);
        }
      }
    }
    return out;
  }

  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.values_.size(); ++i) {
      out.values_[i] -= b.values_[i];
    }
    return out;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> values_;
};

/// Pi(m) with its coarsening table, shared between operators for different N.
struct LatticeTables {
  LatticeIndex index;
  std::vector<std::vector<std::uint32_t>> up;  // ordinals of coarsenings, ascending

  explicit LatticeTables(int m, int max_order = kDefaultMaxOrder)
      : index(m, max_order), up(coarsening_table(index)) {}
};

std::shared_ptr<const LatticeTables> make_lattice_tables(int m, int max_order = kDefaultMaxOrder);

/// The sampling operator on coefficient vectors over Pi(m): coefficients move
/// from each sigma to every coarsening pi with weight falling(N, #pi) / N^#sigma.
/// Sparse; never materializes the Bell(m) x Bell(m) matrix.
class SamplingOperator {
 public:
  SamplingOperator(std::shared_ptr<const LatticeTables> tables, std::uint64_t n);
  SamplingOperator(int m, std::uint64_t n) : SamplingOperator(make_lattice_tables(m), n) {}

  int order() const { return tables_->index.order(); }
  std::uint64_t sample_size() const { return n_; }
  const LatticeIndex& index() const { return tables_->index; }
  const LatticeTables& tables() const { return *tables_; }
  std::size_t size() const { return tables_->index.size(); }

  /// Entry (row pi, column sigma), zero unless sigma <= pi.
  template <Scalar S>
  S entry(std::size_t pi, std::size_t sigma) const {
    const auto& up = tables_->up[sigma];
    if (!std::binary_search(up.begin(), up.end(), static_cast<std::uint32_t>(pi))) {
      return S(0);
    }
    return level_weight<S>(index()[pi].block_count(), index()[sigma].block_count());
  }

  /// falling(N, to) / N^from.
  template <Scalar S>
  S level_weight(int to, int from) const {
    return make_ratio<S>(falling_factorial(n_, static_cast<std::uint64_t>(to)),
                         power(n_, static_cast<std::uint64_t>(from)));
  }

  template <Scalar S>
  LatticeVector<S> apply(const LatticeVector<S>& f) const;

  std::size_t nonzeros() const;

 private:
  std::shared_ptr<const LatticeTables> tables_;
  std::uint64_t n_;
  // scaled_[to][from] = falling(N, to) * N^(m - from); every entry over N^m.
  std::vector<std::vector<BigInt>> scaled_;
  std::vector<std::vector<double>> weights_;
};

template <>
LatticeVector<Rational> SamplingOperator::apply(const LatticeVector<Rational>& f) const;
template <>
LatticeVector<double> SamplingOperator::apply(const LatticeVector<double>& f) const;

/// Dense S over Pi(m) in LatticeIndex order (rows coarser, columns finer).
template <Scalar S>
struct SamplingMatrix {
  int m = 0;
  std::uint64_t n = 0;
  DenseMatrix<S> entries;
};

template <Scalar S>
SamplingMatrix<S> sampling_matrix(const SamplingOperator& op, int dense_max_order = kDefaultDenseMaxOrder) {
  check_order(op.order(), dense_max_order, "sampling_matrix (dense)");
  const std::size_t n = op.size();
  SamplingMatrix<S> out{op.order(), op.sample_size(), DenseMatrix<S>(n, n)};
  const int m = op.order();
  std::vector<std::vector<S>> w(static_cast<std::size_t>(m) + 1, std::vector<S>(static_cast<std::size_t>(m) + 1));
  for (int to = 1; to <= m; ++to) {
    for (int from = to; from <= m; ++from) {
      w[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)] = op.level_weight<S>(to, from);
    }
  }
  for (std::size_t sigma = 0; sigma < n; ++sigma) {
    const auto from = static_cast<std::size_t>(op.index()[sigma].block_count());
    for (auto pi : op.tables().up[sigma]) {
      out.entries(pi, sigma) = w[static_cast<std::size_t>(op.index()[pi].block_count())][from];
    }
  }
  return out;
}

template <Scalar S>
SamplingMatrix<S> sampling_matrix(int m, std::uint64_t n) {
  return sampling_matrix<S>(SamplingOperator(m, n));
}

/// Diagonal scalings relating S to the zeta matrix: R = falling(N, #pi),
/// C = N^#pi. S = R * zeta * C^-1 is the identity that holds for this
/// orientation of S; the left/right-swapped form C^-1 * zeta * R is checked and
/// reported separately, as is its transposed counterpart S^T = C^-1 * zeta^T * R.
struct Factorization {
  std::vector<BigInt> r;
  std::vector<BigInt> c;
  bool r_zeta_cinv = false;       // S == R * zeta * C^-1
  bool cinv_zeta_r = false;       // S == C^-1 * zeta * R
  bool transpose_cinv_zeta_r = false;  // S^T == C^-1 * zeta^T * R
};

Factorization factorization(const SamplingOperator& op, int dense_max_order = kDefaultDenseMaxOrder);

/// Sampling operator on moment polynomials: each term's coefficient moves to
/// every block-merged coarsening with weight falling(N, #merged) / N^#blocks.
/// Works on labeled terms directly; constants are fixed.
template <Scalar S>
MomentPolynomial<S> apply_S(const MomentPolynomial<S>& poly, std::uint64_t n) {
  MomentPolynomial<S> out;
  if (poly.dimension() > 0) {
    out = MomentPolynomial<S>(poly.dimension());
  }
  std::map<int, std::vector<Partition>> merges;
  for (const auto& [term, c] : poly.terms()) {
    const int k = term.block_count();
    auto it = merges.find(k);
    if (it == merges.end()) {
      it = merges.emplace(k, all_partitions_lex(k)).first;
    }
    const BigInt denominator = power(n, static_cast<std::uint64_t>(k));
    for (const auto& merge : it->second) {
      const BigInt count = falling_factorial(n, static_cast<std::uint64_t>(merge.block_count()));
      if (count == 0) {
        continue;
      }
      out.add(merge_term(term, merge), S(c * make_ratio<S>(count, denominator)));
    }
  }
  return out;
}

/// Level-sum compression of S: entry (i, j) = stirling2(j, i) falling(N, i) / N^j
/// for i <= j, levels 1..m stored at 0..m-1. Upper triangular.
template <Scalar S>
DenseMatrix<S> reduced_matrix(int m, std::uint64_t n) {
  if (m < 1) {
    throw DomainError("reduced_matrix needs m >= 1");
  }
  DenseMatrix<S> out(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    const auto row = stirling2_row(static_cast<unsigned>(j));
    const BigInt denominator = power(n, static_cast<std::uint64_t>(j));
    for (int i = 1; i <= j; ++i) {
      out(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) =
          make_ratio<S>(row[static_cast<std::size_t>(i)] * falling_factorial(n, static_cast<std::uint64_t>(i)),
                        denominator);
    }
  }
  return out;
}

/// Sums of coefficients per block count: entry i-1 holds level i.
template <Scalar S>
std::vector<S> level_sums(const LatticeIndex& index, const LatticeVector<S>& f) {
  if (f.size() != index.size()) {
    throw DimensionError("level_sums: vector length does not match Bell(" + std::to_string(index.order()) + ")");
  }
  std::vector<S> out(static_cast<std::size_t>(index.order()), S(0));
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[static_cast<std::size_t>(index[i].block_count() - 1)] += f[i];
  }
  return out;
}

template <Scalar S>
std::vector<S> multiply(const DenseMatrix<S>& a, std::span<const S> v) {
  if (v.size() != a.cols()) {
    throw DimensionError("matrix-vector dimension mismatch");
  }
  std::vector<S> out(a.rows(), S(0));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      out[r] += a(r, c) * v[c];
    }
  }
  return out;
}

/// falling(N, m) / N^m, accumulated as a sum of logs so large m and real N
/// stay finite. Zero when m > N.
double gamma_ratio(double m, double n);

/// Exact falling(N, m) / N^m.
Rational gamma_ratio_exact(std::uint64_t m, std::uint64_t n);

/// True iff gamma_ratio(m, ceil(max(alpha m^2, m + 1))) >= exp(-1/4) exp(-1/alpha).
bool linear_regime_check(int m, double alpha);

/// ||Id - S||_1 in closed form: 2 (1 - falling(N, m) / N^m) if m <= N, else 2.
template <Scalar S>
S one_norm_id_minus_S(int m, std::uint64_t n) {
  if (static_cast<std::uint64_t>(m) > n) {
    return S(2);
  }
  if constexpr (is_exact_v<S>) {
    return Rational(2) * (Rational(1) - gamma_ratio_exact(static_cast<std::uint64_t>(m), n));
  } else {
    return 2.0 * (1.0 - gamma_ratio(m, static_cast<double>(n)));
  }
}

/// Max column 1-norm of Id - S, computed column by column from the sparse table.
template <Scalar S>
S one_norm_direct(const SamplingOperator& op) {
  S best(0);
  for (std::size_t sigma = 0; sigma < op.size(); ++sigma) {
    S total(0);
    const int from = op.index()[sigma].block_count();
    for (auto pi : op.tables().up[sigma]) {
      S entry = op.level_weight<S>(op.index()[pi].block_count(), from);
      total += abs_value(S((pi == sigma ? S(1) : S(0)) - entry));
    }
    if (total > best) {
      best = total;
    }
  }
  return best;
}

}  // namespace latboot
