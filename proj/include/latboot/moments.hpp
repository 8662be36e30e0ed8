#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latboot/errors.hpp"
#include "latboot/lattice.hpp"
#include "latboot/scalar.hpp"

namespace latboot {

/// A moment product over a d-variate distribution: the multiset of blocks, each
/// block a sorted multiset of variable indices. Positions are laid out block by
/// block in canonical order, so the position partition and label map are
/// recovered from the blocks. Blocks are sorted by (size, labels).
class LabeledTerm {
 public:
  /// The constant term (no blocks, order 0).
  LabeledTerm() = default;

  explicit LabeledTerm(std::vector<std::vector<int>> blocks);

  /// Position partition plus position -> variable map.
  LabeledTerm(const Partition& positions, std::span<const int> labels);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int order() const { return order_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  bool is_constant() const { return blocks_.empty(); }
  int max_label() const;

  Partition positions() const;
  std::vector<int> labels() const;

  /// e.g. "(x0 x0)(x1)"; the constant term prints as "1".
  std::string to_string() const;

  friend bool operator==(const LabeledTerm&, const LabeledTerm&) = default;
  friend auto operator<=>(const LabeledTerm& a, const LabeledTerm& b) {
    if (auto c = a.order_ <=> b.order_; c != 0) {
      return c;
    }
    return a.blocks_ <=> b.blocks_;
  }

 private:
  std::vector<std::vector<int>> blocks_;
  int order_ = 0;
};

/// Term of Pi(m) with distinct variables: position i carries variable i.
LabeledTerm lattice_term(const Partition& pi);

/// Inverse of lattice_term; DimensionError if `term` repeats a variable or does
/// not use exactly the variables 0..m-1.
Partition lattice_partition(const LabeledTerm& term);

/// Block merge on a labeled term: `merge` partitions the term's block set.
LabeledTerm merge_term(const LabeledTerm& term, const Partition& merge);

/// N x d sample matrix, row-major. Doubles must be finite.
template <Scalar S>
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t rows, std::size_t cols, std::vector<S> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ == 0 || cols_ == 0) {
      throw DimensionError("dataset needs at least one row and one column");
    }
    if (values_.size() != rows_ * cols_) {
      throw DimensionError("dataset is not rectangular");
    }
    if constexpr (!is_exact_v<S>) {
      for (double v : values_) {
        if (!std::isfinite(v)) {
          throw DomainError("dataset contains a non-finite entry");
        }
      }
    }
  }

  static Dataset from_rows(const std::vector<std::vector<S>>& rows) {
    if (rows.empty()) {
      throw DimensionError("dataset needs at least one row");
    }
    std::vector<S> values;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) {
        throw DimensionError("dataset is not rectangular");
      }
      values.insert(values.end(), r.begin(), r.end());
    }
    return Dataset(rows.size(), rows.front().size(), std::move(values));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const S& operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const S> row(std::size_t r) const { return std::span<const S>(values_).subspan(r * cols_, cols_); }
  std::span<const S> values() const { return values_; }

  /// Rows picked by index (with repetition): the resampled dataset.
  Dataset select(std::span<const std::size_t> indices) const {
    std::vector<S> out;
    out.reserve(indices.size() * cols_);
    for (auto i : indices) {
      auto r = row(i);
      out.insert(out.end(), r.begin(), r.end());
    }
    return Dataset(indices.size(), cols_, std::move(out));
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> values_;
};

/// Block moments keyed by sorted label multisets.
template <Scalar S>
class MomentTable {
 public:
  MomentTable() = default;
  explicit MomentTable(int d) : d_(d) {}

  int dimension() const { return d_; }

  void insert(std::vector<int> labels, S value) {
    std::sort(labels.begin(), labels.end());
    for (int l : labels) {
      if (l < 0 || l >= d_) {
        throw DimensionError("moment label " + std::to_string(l) + " out of range for d = " + std::to_string(d_));
      }
    }
    values_[std::move(labels)] = std::move(value);
  }

  bool contains(std::vector<int> labels) const {
    std::sort(labels.begin(), labels.end());
    return labels.empty() || values_.contains(labels);
  }

  /// The empty block has moment one.
  S moment(std::span<const int> labels) const {
    if (labels.empty()) {
      return S(1);
    }
    std::vector<int> key(labels.begin(), labels.end());
    std::sort(key.begin(), key.end());
    auto it = values_.find(key);
    if (it == values_.end()) {
      std::string name;
      for (int l : key) {
        name += "x" + std::to_string(l);
      }
      throw MissingMomentError("moment table has no entry for E[" + name + "]");
    }
    return it->second;
  }

  const std::map<std::vector<int>, S>& entries() const { return values_; }

 private:
  int d_ = 0;
  std::map<std::vector<int>, S> values_;
};

/// (1/N) sum over rows of the product of the labelled columns. Empty block -> 1.
template <Scalar S>
S empirical_moment(const Dataset<S>& data, std::span<const int> labels) {
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= data.cols()) {
      throw DimensionError("moment label " + std::to_string(l) + " out of range for d = " +
                           std::to_string(data.cols()));
    }
  }
  if (labels.empty()) {
    return S(1);
  }
  S total(0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    S product(1);
    for (int l : labels) {
      product *= data(r, static_cast<std::size_t>(l));
    }
    total += product;
  }
  return S(total / S(static_cast<long>(data.rows())));
}

/// Sparse linear combination of moment products, F = sum_pi f_pi mu_pi.
/// Zero coefficients are never stored.
template <Scalar S>
class MomentPolynomial {
 public:
  using Terms = std::map<LabeledTerm, S>;

  MomentPolynomial() = default;
  explicit MomentPolynomial(int d) : d_(d) {
    if (d < 1) {
      throw DimensionError("moment polynomial needs d >= 1");
    }
  }

  int dimension() const { return d_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds `coeff` to the coefficient of `term`.
  void add(const LabeledTerm& term, const S& coeff) {
    if (is_zero(coeff)) {
      return;
    }
    if (term.max_label() >= d_) {
      throw DimensionError("term " + term.to_string() + " uses a variable beyond d = " + std::to_string(d_));
    }
    auto [it, inserted] = terms_.try_emplace(term, coeff);
    if (!inserted) {
      it->second += coeff;
      if (is_zero(it->second)) {
        terms_.erase(it);
      }
    }
  }

  S coefficient(const LabeledTerm& term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? S(0) : it->second;
  }

  /// Largest term order m; zero for constants and the empty polynomial.
  int max_order() const {
    int m = 0;
    for (const auto& [term, c] : terms_) {
      m = std::max(m, term.order());
    }
    return m;
  }

  int max_block_count() const {
    int k = 0;
    for (const auto& [term, c] : terms_) {
      k = std::max(k, term.block_count());
    }
    return k;
  }

  S one_norm() const {
    S total(0);
    for (const auto& [term, c] : terms_) {
      total += abs_value(c);
    }
    return total;
  }

  MomentPolynomial& operator+=(const MomentPolynomial& other) {
    merge_dimension(other);
    for (const auto& [term, c] : other.terms_) {
      add(term, c);
    }
    return *this;
  }

  MomentPolynomial& operator-=(const MomentPolynomial& other) {
    merge_dimension(other);
    for (const auto& [term, c] : other.terms_) {
      add(term, S(-c));
    }
    return *this;
  }

  MomentPolynomial& operator*=(const S& factor) {
    if (is_zero(factor)) {
      terms_.clear();
      return *this;
    }
    for (auto& [term, c] : terms_) {
      c *= factor;
    }
    return *this;
  }

  friend MomentPolynomial operator+(MomentPolynomial a, const MomentPolynomial& b) { return a += b; }
  friend MomentPolynomial operator-(MomentPolynomial a, const MomentPolynomial& b) { return a -= b; }
  friend MomentPolynomial operator*(const S& factor, MomentPolynomial a) { return a *= factor; }

  friend bool operator==(const MomentPolynomial& a, const MomentPolynomial& b) {
    return a.d_ == b.d_ && a.terms_ == b.terms_;
  }

 private:
  void merge_dimension(const MomentPolynomial& other) {
    if (d_ == 0) {
      d_ = other.d_;
    } else if (other.d_ != 0 && other.d_ != d_) {
      throw DimensionError("moment polynomials over d = " + std::to_string(d_) + " and d = " +
                           std::to_string(other.d_));
    }
  }

  int d_ = 0;
  Terms terms_;
};

/// Unlabeled coefficient vector over Pi(m) as a polynomial with d = m.
template <Scalar S>
MomentPolynomial<S> from_lattice_vector(const LatticeIndex& index, std::span<const S> f) {
  if (f.size() != index.size()) {
    throw DimensionError("coefficient vector length " + std::to_string(f.size()) + " does not match Bell(" +
                         std::to_string(index.order()) + ") = " + std::to_string(index.size()));
  }
  MomentPolynomial<S> poly(index.order());
  for (std::size_t i = 0; i < f.size(); ++i) {
    poly.add(lattice_term(index[i]), f[i]);
  }
  return poly;
}

template <Scalar S>
std::vector<S> to_lattice_vector(const LatticeIndex& index, const MomentPolynomial<S>& poly) {
  std::vector<S> f(index.size(), S(0));
  for (const auto& [term, c] : poly.terms()) {
    if (term.order() != index.order()) {
      throw DimensionError("term " + term.to_string() + " is not of order " + std::to_string(index.order()));
    }
    f[index.position(lattice_partition(term))] = c;
  }
  return f;
}

template <Scalar S>
S source_moment(const Dataset<S>& data, std::span<const int> labels) {
  return empirical_moment(data, labels);
}

template <Scalar S>
S source_moment(const MomentTable<S>& table, std::span<const int> labels) {
  return table.moment(labels);
}

/// Product over blocks of the block moments provided by `source`.
template <Scalar S, class Source>
S moment_product(const LabeledTerm& term, const Source& source) {
  S product(1);
  for (const auto& block : term.blocks()) {
    product *= source_moment<S>(source, block);
  }
  return product;
}

/// Plug-in evaluation: sum of coefficient times moment product.
template <Scalar S, class Source>
S evaluate(const MomentPolynomial<S>& poly, const Source& source) {
  S total(0);
  for (const auto& [term, c] : poly.terms()) {
    total += c * moment_product<S>(term, source);
  }
  return total;
}

/// Average over respecting multiindices (distinct rows for distinct blocks) of
/// the sample product; the unbiased symmetric statistic for mu_pi. Costs
/// falling(N, #pi) * m, i.e. exponential in the block count.
template <Scalar S>
S symmetric_statistic(const Dataset<S>& data, const LabeledTerm& term) {
  const std::size_t n = data.rows();
  const std::size_t k = static_cast<std::size_t>(term.block_count());
  if (k > n) {
    throw InfeasibleError("symmetric statistic of " + term.to_string() + " needs N >= " + std::to_string(k) +
                          " rows, got N = " + std::to_string(n) + " (no respecting multiindex)");
  }
  if (k == 0) {
    return S(1);
  }
  // Per-block row products; the statistic sums their products over injective
  // block -> row assignments.
  std::vector<std::vector<S>> block_values(k, std::vector<S>(n, S(1)));
  for (std::size_t b = 0; b < k; ++b) {
    for (int l : term.blocks()[b]) {
      if (l < 0 || static_cast<std::size_t>(l) >= data.cols()) {
        throw DimensionError("moment label " + std::to_string(l) + " out of range for d = " +
                             std::to_string(data.cols()));
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (int l : term.blocks()[b]) {
        block_values[b][r] *= data(r, static_cast<std::size_t>(l));
      }
    }
  }
  std::vector<bool> used(n, false);
  S total(0);
  auto recurse = [&](auto&& self, std::size_t b, const S& partial) -> void {
    if (b == k) {
      total += partial;
      return;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (used[r]) {
        continue;
      }
      used[r] = true;
      self(self, b + 1, S(partial * block_values[b][r]));
      used[r] = false;
    }
  };
  recurse(recurse, 0, S(1));
  return S(total / from_bigint<S>(falling_factorial(n, k)));
}

/// Sum of coefficient times symmetric statistic: unbiased for evaluate(F, population).
template <Scalar S>
S unbiased_evaluate(const MomentPolynomial<S>& poly, const Dataset<S>& data) {
  S total(0);
  for (const auto& [term, c] : poly.terms()) {
    total += c * symmetric_statistic(data, term);
  }
  return total;
}

/// mu_pi for every pi in Pi(m), reading variable i at position i.
template <Scalar S, class Source>
std::vector<S> moment_product_vector(const LatticeIndex& index, const Source& source) {
  std::vector<S> out;
  out.reserve(index.size());
  for (const auto& pi : index) {
    out.push_back(moment_product<S>(lattice_term(pi), source));
  }
  return out;
}

template <Scalar S>
std::vector<S> apply_incidence(const IncidenceMatrix& matrix, std::span<const S> v) {
  if (v.size() != matrix.size()) {
    throw DimensionError("vector length " + std::to_string(v.size()) + " does not match incidence matrix size " +
                         std::to_string(matrix.size()));
  }
  std::vector<S> out(matrix.size(), S(0));
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    auto row = matrix.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0) {
        out[r] += S(row[c]) * v[c];
      }
    }
  }
  return out;
}

/// mu = zeta * kappa over Pi(m).
template <Scalar S>
std::vector<S> moments_from_cumulants(const IncidenceMatrix& zeta, std::span<const S> kappa) {
  if (zeta.kind() != IncidenceKind::zeta) {
    throw DomainError("moments_from_cumulants needs the zeta matrix");
  }
  return apply_incidence<S>(zeta, kappa);
}

/// kappa = mobius * mu over Pi(m).
template <Scalar S>
std::vector<S> cumulants_from_moments(const IncidenceMatrix& mobius, std::span<const S> mu) {
  if (mobius.kind() != IncidenceKind::mobius) {
    throw DomainError("cumulants_from_moments needs the Mobius matrix");
  }
  return apply_incidence<S>(mobius, mu);
}

/// Every block (sorted label multiset) appearing in `poly` or in any coarsening
/// of its terms: what a MomentTable must hold for the bootstrap iterations.
template <Scalar S>
std::set<std::vector<int>> required_blocks(const MomentPolynomial<S>& poly, bool include_coarsenings = true) {
  std::set<std::vector<int>> out;
  for (const auto& [term, c] : poly.terms()) {
    if (!include_coarsenings) {
      out.insert(term.blocks().begin(), term.blocks().end());
      continue;
    }
    for (const auto& merge : all_partitions_lex(term.block_count())) {
      const auto merged = merge_term(term, merge);
      out.insert(merged.blocks().begin(), merged.blocks().end());
    }
  }
  return out;
}

/// Table of every block moment `poly` can reach, computed from `data`.
template <Scalar S>
MomentTable<S> moment_table_from(const Dataset<S>& data, const MomentPolynomial<S>& poly) {
  MomentTable<S> table(static_cast<int>(data.cols()));
  for (const auto& block : required_blocks(poly)) {
    if (!block.empty()) {
      table.insert(block, empirical_moment(data, block));
    }
  }
  return table;
}

/// max |mu_pi| over the terms reachable from `poly` by coarsening.
template <Scalar S, class Source>
S max_moment_product(const MomentPolynomial<S>& poly, const Source& source) {
  S best(0);
  for (const auto& [term, c] : poly.terms()) {
    for (const auto& merge : all_partitions_lex(term.block_count())) {
      S v = abs_value(moment_product<S>(merge_term(term, merge), source));
      if (v > best) {
        best = v;
      }
    }
  }
  return best;
}

}  // namespace latboot
