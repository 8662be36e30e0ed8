#include "latboot/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace latboot {

std::shared_ptr<const LatticeTables> make_lattice_tables(int m, int max_order) {
  return std::make_shared<const LatticeTables>(m, max_order);
}

SamplingOperator::SamplingOperator(std::shared_ptr<const LatticeTables> tables, std::uint64_t n)
    : tables_(std::move(tables)), n_(n) {
  if (n_ == 0) {
    throw DomainError("sampling operator needs N >= 1");
  }
  const auto m = static_cast<std::uint64_t>(order());
  scaled_.assign(m + 1, std::vector<BigInt>(m + 1));
  weights_.assign(m + 1, std::vector<double>(m + 1, 0.0));
  for (std::uint64_t to = 1; to <= m; ++to) {
    const BigInt count = falling_factorial(n_, to);
    for (std::uint64_t from = to; from <= m; ++from) {
      scaled_[to][from] = count * power(n_, m - from);
      weights_[to][from] = make_ratio<double>(count, power(n_, from));
    }
  }
}

std::size_t SamplingOperator::nonzeros() const {
  std::size_t total = 0;
  for (std::size_t sigma = 0; sigma < size(); ++sigma) {
    const auto from = static_cast<std::uint64_t>(index()[sigma].block_count());
    for (auto pi : tables_->up[sigma]) {
      if (from >= static_cast<std::uint64_t>(index()[pi].block_count()) &&
          falling_factorial(n_, static_cast<std::uint64_t>(index()[pi].block_count())) != 0) {
        ++total;
      }
    }
  }
  return total;
}

template <>
LatticeVector<Rational> SamplingOperator::apply(const LatticeVector<Rational>& f) const {
  if (f.size() != size()) {
    throw DimensionError("vector length " + std::to_string(f.size()) + " does not match Bell(" +
                         std::to_string(order()) + ") = " + std::to_string(size()));
  }
  // Clear denominators once, accumulate in integers, divide at the end.
  BigInt lcd = 1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!is_zero(f[i])) {
      mpz_lcm(lcd.get_mpz_t(), lcd.get_mpz_t(), f[i].get_den_mpz_t());
    }
  }
  const auto m = static_cast<std::size_t>(order());
  std::vector<BigInt> acc(size());
  std::vector<BigInt> contribution(m + 1);
  BigInt g;
  for (std::size_t sigma = 0; sigma < size(); ++sigma) {
    if (is_zero(f[sigma])) {
      continue;
    }
    g = lcd / f[sigma].get_den();
    g *= f[sigma].get_num();
    const auto from = static_cast<std::size_t>(index()[sigma].block_count());
    for (std::size_t to = 1; to <= from; ++to) {
      contribution[to] = g * scaled_[to][from];
    }
    for (auto pi : tables_->up[sigma]) {
      acc[pi] += contribution[static_cast<std::size_t>(index()[pi].block_count())];
    }
  }
  const BigInt denominator = lcd * power(n_, m);
  LatticeVector<Rational> out(size());
  for (std::size_t pi = 0; pi < size(); ++pi) {
    if (acc[pi] != 0) {
      out[pi] = Rational(acc[pi], denominator);
      out[pi].canonicalize();
    }
  }
  return out;
}

template <>
LatticeVector<double> SamplingOperator::apply(const LatticeVector<double>& f) const {
  if (f.size() != size()) {
    throw DimensionError("vector length " + std::to_string(f.size()) + " does not match Bell(" +
                         std::to_string(order()) + ") = " + std::to_string(size()));
  }
  LatticeVector<double> out(size());
  for (std::size_t sigma = 0; sigma < size(); ++sigma) {
    if (f[sigma] == 0.0) {
      continue;
    }
    const auto from = static_cast<std::size_t>(index()[sigma].block_count());
    for (auto pi : tables_->up[sigma]) {
      out[pi] += weights_[static_cast<std::size_t>(index()[pi].block_count())][from] * f[sigma];
    }
  }
  return out;
}

Factorization factorization(const SamplingOperator& op, int dense_max_order) {
  const auto s = sampling_matrix<Rational>(op, dense_max_order).entries;
  const auto zeta = zeta_matrix(op.index(), dense_max_order);
  const std::size_t n = op.size();
  Factorization out;
  out.r.reserve(n);
  out.c.reserve(n);
  for (const auto& p : op.index()) {
    const auto k = static_cast<std::uint64_t>(p.block_count());
    out.r.push_back(falling_factorial(op.sample_size(), k));
    out.c.push_back(power(op.sample_size(), k));
  }
  out.r_zeta_cinv = true;
  out.cinv_zeta_r = true;
  out.transpose_cinv_zeta_r = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Rational z(zeta(i, j));
      Rational lhs = Rational(out.r[i]) * z / Rational(out.c[j]);
      if (lhs != s(i, j)) {
        out.r_zeta_cinv = false;
      }
      Rational rhs = z * Rational(out.r[j]) / Rational(out.c[i]);
      if (rhs != s(i, j)) {
        out.cinv_zeta_r = false;
      }
      // (C^-1 zeta^T R)(i, j) = zeta(j, i) R_j / C_i, compared against S(j, i).
      Rational t = Rational(zeta(j, i)) * Rational(out.r[j]) / Rational(out.c[i]);
      if (t != s(j, i)) {
        out.transpose_cinv_zeta_r = false;
      }
    }
  }
  return out;
}

double gamma_ratio(double m, double n) {
  if (m < 0 || n <= 0) {
    throw DomainError("gamma_ratio needs m >= 0 and N > 0");
  }
  if (m > n) {
    return 0.0;
  }
  double log_sum = 0.0;
  for (double i = 1; i < m; i += 1) {
    log_sum += std::log1p(-i / n);
  }
  return std::exp(log_sum);
}

Rational gamma_ratio_exact(std::uint64_t m, std::uint64_t n) {
  if (n == 0) {
    throw DomainError("gamma_ratio needs N > 0");
  }
  return make_ratio<Rational>(falling_factorial(n, m), power(n, m));
}

bool linear_regime_check(int m, double alpha) {
  if (m < 1 || alpha <= 0) {
    throw DomainError("linear_regime_check needs m >= 1 and alpha > 0");
  }
  const double n = std::ceil(std::max(alpha * m * m, m + 1.0));
  return gamma_ratio(m, n) >= std::exp(-0.25) * std::exp(-1.0 / alpha);
}

}  // namespace latboot
