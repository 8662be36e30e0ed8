#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "latboot/combinatorics.hpp"
#include "latboot/debias.hpp"
#include "latboot/errors.hpp"
#include "latboot/moments.hpp"
#include "latboot/scalar.hpp"

namespace latboot {

using Rng = std::mt19937_64;

/// Independent generator for `stream` under `seed`; replica i always gets
/// stream i, so changing the replica count never reshuffles earlier replicas.
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// N indices drawn uniformly with replacement from 0..N-1.
std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng);

template <Scalar S>
Dataset<S> resample(const Dataset<S>& data, Rng& rng) {
  const auto idx = resample_indices(data.rows(), rng);
  return data.select(idx);
}

/// Calls visit(indices) for all N^N index vectors, odometer order.
template <class Visit>
void for_each_resample(std::size_t n, Visit&& visit) {
  if (n == 0) {
    return;
  }
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    visit(std::span<const std::size_t>(idx));
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == n) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) {
      return;
    }
  }
}

/// Estimator sum_j a_j F(X^(j+1)) over a resampling chain.
template <Scalar S>
struct EstimatorCoefficients {
  std::vector<S> a;

  std::size_t depth() const { return a.size(); }
};

/// Expands G_k = G_{k-1} + eta_k (F - S G_{k-1}), G_0 = F, into sum_j a_j S^j F.
template <Scalar S>
EstimatorCoefficients<S> expansion_coefficients(const StepSchedule& schedule) {
  std::vector<S> a{S(1)};
  for (int k = 1; k <= schedule.length(); ++k) {
    const S eta = schedule.eta<S>(k);
    a.push_back(S(0));
    for (std::size_t j = a.size() - 1; j >= 1; --j) {
      a[j] -= eta * a[j - 1];
    }
    a[0] += eta;
  }
  return {std::move(a)};
}

/// k-times iterated bootstrap: a_j = (-1)^j binom(k+1, j+1).
template <Scalar S>
EstimatorCoefficients<S> stationary_coefficients(int k) {
  if (k < 0) {
    throw DomainError("iteration count must be >= 0");
  }
  std::vector<S> a;
  for (int j = 0; j <= k; ++j) {
    S c = from_bigint<S>(binomial(static_cast<unsigned long>(k + 1), static_cast<unsigned long>(j + 1)));
    a.push_back(j % 2 == 0 ? c : S(-c));
  }
  return {std::move(a)};
}

struct McReport {
  std::size_t replicas = 0;
  double estimate = 0;
  double standard_error = 0;
  std::optional<double> target;
  std::uint64_t seed = 0;

  /// |estimate - target| / standard_error; infinite when SE is zero and they differ.
  double z_score() const;
};

/// Sample mean and standard error (sample stdev / sqrt(count)) in replica order.
McReport summarize(std::span<const double> values, std::uint64_t seed, std::optional<double> target = std::nullopt);

using Functional = std::function<double(const Dataset<double>&)>;

struct McOptions {
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;          // 0: hardware concurrency
  bool resample_first = false;   // draw X^1 from the data instead of using it
};

/// Runs body(i) for i in [0, count) on worker threads; results land in
/// per-index slots so the outcome never depends on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Mean over replicas of sum_j a_j F(X^(j+1)), X^1 = data, X^(j+1) resampled from X^j.
McReport mc_estimate(const Functional& f, const Dataset<double>& data, const EstimatorCoefficients<double>& coeffs,
                     const McOptions& options);

/// Exact expectation of sum_j a_j F(X^(j+1)) by enumerating every chain.
/// Cost N^(N (depth-1)); meant for N <= 4.
template <Scalar S, class F>
S exhaustive_estimate(const F& functional, const Dataset<S>& data, const EstimatorCoefficients<S>& coeffs) {
  const std::size_t n = data.rows();
  const S weight = make_ratio<S>(BigInt(1), power(n, n));
  auto level = [&](auto&& self, const Dataset<S>& x, std::size_t j) -> S {
    S total = coeffs.a[j] * S(functional(x));
    if (j + 1 < coeffs.depth()) {
      S inner(0);
      for_each_resample(n, [&](std::span<const std::size_t> idx) { inner += self(self, x.select(idx), j + 1); });
      total += weight * inner;
    }
    return total;
  };
  if (coeffs.depth() == 0) {
    return S(0);
  }
  return level(level, data, 0);
}

/// A distribution to draw X^1 from, with its block moments.
class Population {
 public:
  /// Independent coordinates, x_i ~ Normal(mean_i, variance_i).
  static Population normal(std::vector<Rational> mean, std::vector<Rational> variance);
  /// The empirical distribution of `data`.
  static Population empirical(Dataset<Rational> data);
  /// Moments only; cannot be sampled.
  static Population table(MomentTable<Rational> moments);

  int dimension() const;
  bool can_sample() const;
  std::string kind() const;

  /// n rows from the population.
  Dataset<double> draw(std::size_t n, Rng& rng) const;

  /// Exact block moment E[prod x_l]; MissingMomentError if not available.
  Rational moment(std::span<const int> labels) const;

  /// Table holding every block reachable from `poly` by coarsening.
  template <Scalar S, Scalar T>
  MomentTable<S> moment_table(const MomentPolynomial<T>& poly) const {
    MomentTable<S> out(dimension());
    for (const auto& block : required_blocks(poly)) {
      if (block.empty()) {
        continue;
      }
      const Rational m = moment(block);
      if constexpr (is_exact_v<S>) {
        out.insert(block, m);
      } else {
        out.insert(block, to_double(m));
      }
    }
    return out;
  }

 private:
  struct Normal {
    std::vector<Rational> mean;
    std::vector<Rational> variance;
  };
  explicit Population(std::variant<Normal, Dataset<Rational>, MomentTable<Rational>> source)
      : source_(std::move(source)) {}

  std::variant<Normal, Dataset<Rational>, MomentTable<Rational>> source_;
  Dataset<double> data_double_;
};

/// E[x^p] for x ~ Normal(mean, variance).
Rational normal_raw_moment(const Rational& mean, const Rational& variance, int p);

struct BiasExperimentRow {
  int k = 0;
  McReport empirical;  // target = exact bias
  Rational exact_bias;
  double bound = 0;
};

/// Empirical bias of the k-step estimators, k = 0..k_max (stationary) or
/// k = 0..schedule length (schedule), against the population value of `f`.
/// One chain X^1..X^(K+1) per replica with X^1 drawn from the population;
/// every row reuses it.
std::vector<BiasExperimentRow> bias_experiment(const MomentPolynomial<Rational>& f, const Population& population,
                                               std::uint64_t n, int k_max, BiasMode mode,
                                               const std::optional<StepSchedule>& schedule, const McOptions& options);

}  // namespace latboot
