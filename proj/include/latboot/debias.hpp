#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latboot/errors.hpp"
#include "latboot/moments.hpp"
#include "latboot/resampling.hpp"
#include "latboot/scalar.hpp"

namespace latboot {

/// Step sizes eta_1..eta_k for the scheduled iteration. Stored exactly; the
/// double path converts on use.
class StepSchedule {
 public:
  enum class Kind { standard, unit, custom };

  /// eta_i = N^i / falling(N, i). InfeasibleError when k > N.
  static StepSchedule default_schedule(std::uint64_t n, int k);
  static StepSchedule unit(std::uint64_t n, int k);
  static StepSchedule custom(std::uint64_t n, std::vector<Rational> etas);

  Kind kind() const { return kind_; }
  std::string name() const;
  std::uint64_t sample_size() const { return n_; }
  int length() const { return static_cast<int>(etas_.size()); }
  const std::vector<Rational>& etas() const { return etas_; }

  template <Scalar S>
  S eta(int i) const {
    if constexpr (is_exact_v<S>) {
      return etas_.at(static_cast<std::size_t>(i - 1));
    } else {
      return to_double(etas_.at(static_cast<std::size_t>(i - 1)));
    }
  }

 private:
  StepSchedule(Kind kind, std::uint64_t n, std::vector<Rational> etas)
      : kind_(kind), n_(n), etas_(std::move(etas)) {}

  Kind kind_;
  std::uint64_t n_;
  std::vector<Rational> etas_;
};

// The iterations below are written once over any coefficient container V with
// +, -, scalar * and an `apply` callable for S: moment polynomials through
// apply_S, lattice vectors through SamplingOperator::apply.

/// f^(j+1) = f^(j) + (f - S f^(j)), f^(0) = f.
template <class V, class Apply>
V richardson_iterate(const V& f, int k, Apply&& apply) {
  if (k < 0) {
    throw DomainError("iteration count must be >= 0");
  }
  V g = f;
  for (int j = 0; j < k; ++j) {
    g += f - apply(g);
  }
  return g;
}

/// sum_{i=0}^{k} (Id - S)^i f.
template <class V, class Apply>
V neumann_iterate(const V& f, int k, Apply&& apply) {
  if (k < 0) {
    throw DomainError("iteration count must be >= 0");
  }
  V term = f;
  V sum = f;
  for (int i = 1; i <= k; ++i) {
    term = term - apply(term);
    sum += term;
  }
  return sum;
}

/// G_j = G_{j-1} + eta_j (f - S G_{j-1}), G_0 = f.
template <Scalar S, class V, class Apply>
V scheduled_iterate(const V& f, const StepSchedule& schedule, Apply&& apply) {
  V g = f;
  for (int j = 1; j <= schedule.length(); ++j) {
    g += schedule.eta<S>(j) * (f - apply(g));
  }
  return g;
}

/// (Id - S)^(k+1) f.
template <class V, class Apply>
V residual_power(const V& f, int k, Apply&& apply) {
  V b = f;
  for (int i = 0; i <= k; ++i) {
    b = b - apply(b);
  }
  return b;
}

/// prod_i (Id - eta_i S) (S f - f), factors applied in schedule order.
template <Scalar S, class V, class Apply>
V scheduled_bias_product(const V& f, const StepSchedule& schedule, Apply&& apply) {
  V b = apply(f) - f;
  for (int j = 1; j <= schedule.length(); ++j) {
    b = b - schedule.eta<S>(j) * apply(b);
  }
  return b;
}

template <Scalar S>
MomentPolynomial<S> richardson_debias(const MomentPolynomial<S>& f, std::uint64_t n, int k) {
  return richardson_iterate(f, k, [n](const MomentPolynomial<S>& g) { return apply_S(g, n); });
}

template <Scalar S>
MomentPolynomial<S> neumann_debias(const MomentPolynomial<S>& f, std::uint64_t n, int k) {
  return neumann_iterate(f, k, [n](const MomentPolynomial<S>& g) { return apply_S(g, n); });
}

template <Scalar S>
MomentPolynomial<S> nonstationary_debias(const MomentPolynomial<S>& f, std::uint64_t n,
                                         const StepSchedule& schedule) {
  if (schedule.length() < 1) {
    throw DomainError("schedule needs at least one step");
  }
  if (schedule.sample_size() != n) {
    throw DomainError("schedule was built for N = " + std::to_string(schedule.sample_size()) + ", not N = " +
                      std::to_string(n));
  }
  return scheduled_iterate<S>(f, schedule, [n](const MomentPolynomial<S>& g) { return apply_S(g, n); });
}

enum class BiasMode { stationary, schedule };

template <Scalar S>
struct BiasRecord {
  int k = 0;
  MomentPolynomial<S> coefficients;  // f^(k) or G_k
  MomentPolynomial<S> bias_vector;   // S f^(k) - f
  S signed_bias{};
  S abs_bias{};
  S bound{};
};

template <Scalar S>
struct BiasReport {
  BiasMode mode = BiasMode::stationary;
  std::uint64_t n = 0;
  int order = 0;
  S mu_inf{};
  S f_one{};
  std::vector<BiasRecord<S>> records;
};

/// mu_inf * f_one * (2 (1 - falling(N, m) / N^m))^(k+1); the factor is 2 when m > N.
template <Scalar S>
S bias_bound(int m, std::uint64_t n, int k, const S& mu_inf, const S& f_one) {
  if (k < 0 || m < 0 || n == 0) {
    throw DomainError("bias_bound needs m >= 0, N >= 1, k >= 0");
  }
  if (mu_inf < S(0) || f_one < S(0)) {
    throw DomainError("bias_bound needs nonnegative mu_inf and f_one");
  }
  if (m == 0) {
    return S(0);
  }
  const S factor = one_norm_id_minus_S<S>(m, n);
  S out = mu_inf * f_one;
  for (int i = 0; i <= k; ++i) {
    out *= factor;
  }
  return out;
}

/// mu_inf * 2 (1 - falling(N, m) / N^m), without the f_one and k factors.
template <Scalar S>
S bias_bound_as_printed(int m, std::uint64_t n, const S& mu_inf) {
  return mu_inf * one_norm_id_minus_S<S>(m, n);
}

/// Exact bias trajectory against a population moment source. Stationary mode
/// covers k = 0..k_max; schedule mode covers k = 0..schedule length with k = 0
/// the plug-in. Stationary rows carry bias_bound; schedule rows carry
/// mu_inf * ||S G_k - f||_1.
template <Scalar S, class Source>
BiasReport<S> exact_bias(const MomentPolynomial<S>& f, std::uint64_t n, int k_max, const Source& population,
                         BiasMode mode, const std::optional<StepSchedule>& schedule = std::nullopt) {
  BiasReport<S> report;
  report.mode = mode;
  report.n = n;
  report.order = f.max_order();
  report.mu_inf = max_moment_product(f, population);
  report.f_one = f.one_norm();
  auto apply = [n](const MomentPolynomial<S>& g) { return apply_S(g, n); };

  auto record = [&](int k, MomentPolynomial<S> g) {
    BiasRecord<S> r;
    r.k = k;
    r.bias_vector = apply(g) - f;
    r.coefficients = std::move(g);
    r.signed_bias = evaluate(r.bias_vector, population);
    r.abs_bias = abs_value(r.signed_bias);
    if (mode == BiasMode::stationary) {
      r.bound = bias_bound<S>(report.order, n, k, report.mu_inf, report.f_one);
    } else {
      r.bound = report.mu_inf * r.bias_vector.one_norm();
    }
    report.records.push_back(std::move(r));
  };

  if (mode == BiasMode::stationary) {
    if (k_max < 0) {
      throw DomainError("k_max must be >= 0");
    }
    MomentPolynomial<S> g = f;
    for (int k = 0; k <= k_max; ++k) {
      if (k > 0) {
        g += f - apply(g);
      }
      record(k, g);
    }
    return report;
  }

  if (!schedule) {
    throw DomainError("schedule mode needs a step schedule");
  }
  MomentPolynomial<S> g = f;
  record(0, g);
  for (int j = 1; j <= schedule->length(); ++j) {
    g += schedule->eta<S>(j) * (f - apply(g));
    record(j, g);
  }
  return report;
}

/// Step count and bound for gamma sequences (tails of alpha_m beta_m).
struct GeneralBound {
  int cut = 0;     // ceil(sqrt(N / 8))
  long k_star = 0;
  double bound = 0;
  double log_bound = 0;
};

int bound_cut(std::uint64_t n);

/// gammas[j] = gamma_j for j = 0..M; needs M >= ceil(sqrt(N/8)), entries
/// positive and nonincreasing.
GeneralBound general_bound(std::span<const double> gammas, std::uint64_t n);

/// Same with natural-log gammas, for sequences that underflow.
GeneralBound general_bound_log(std::span<const double> log_gammas, std::uint64_t n);

/// gamma_0 / 2^(k+1) + 2^(k+1) gamma_cut.
double two_term_bound(std::span<const double> gammas, std::uint64_t n, long k);

struct StepBound {
  long k = 0;
  double bound = 0;
  double log_bound = 0;
};

/// Bandlimited functions of means of sub-Gaussian variables: needs
/// N >= 8 (8 d theta + 1)^2.
StepBound bandlimited_bound(int d, double theta, std::uint64_t n);

/// Trace of (Id + E[A])^-1 with spectrum in (0, sigma): k = floor(-sqrt(N/8) log sigma),
/// bound 4 / (1 - sigma) * sigma^sqrt(N/32).
StepBound neumann_trace_bound(double sigma, std::uint64_t n);

}  // namespace latboot
