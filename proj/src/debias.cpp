#include "latboot/debias.hpp"

#include <cmath>
#include <limits>

namespace latboot {

StepSchedule StepSchedule::default_schedule(std::uint64_t n, int k) {
  if (k < 0) {
    throw DomainError("schedule length must be >= 0");
  }
  if (static_cast<std::uint64_t>(k) > n) {
    throw InfeasibleError("default step size eta_" + std::to_string(k) + " is undefined for N = " +
                          std::to_string(n) + " (needs N >= " + std::to_string(k) + ")");
  }
  std::vector<Rational> etas;
  for (int i = 1; i <= k; ++i) {
    etas.push_back(make_ratio<Rational>(power(n, static_cast<std::uint64_t>(i)),
                                        falling_factorial(n, static_cast<std::uint64_t>(i))));
  }
  return StepSchedule(Kind::standard, n, std::move(etas));
}

StepSchedule StepSchedule::unit(std::uint64_t n, int k) {
  if (k < 0) {
    throw DomainError("schedule length must be >= 0");
  }
  return StepSchedule(Kind::unit, n, std::vector<Rational>(static_cast<std::size_t>(k), Rational(1)));
}

StepSchedule StepSchedule::custom(std::uint64_t n, std::vector<Rational> etas) {
  return StepSchedule(Kind::custom, n, std::move(etas));
}

std::string StepSchedule::name() const {
  switch (kind_) {
    case Kind::standard:
      return "default";
    case Kind::unit:
      return "unit";
    case Kind::custom:
      return "custom";
  }
  return "custom";
}

int bound_cut(std::uint64_t n) {
  // Smallest c with 8 c^2 >= N, in integers.
  int c = 0;
  while (8ULL * static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(c) < n) {
    ++c;
  }
  return c;
}

GeneralBound general_bound_log(std::span<const double> log_gammas, std::uint64_t n) {
  if (n == 0) {
    throw DomainError("general_bound needs N >= 1");
  }
  GeneralBound out;
  out.cut = bound_cut(n);
  if (log_gammas.size() <= static_cast<std::size_t>(out.cut)) {
    throw DomainError("general_bound needs gamma_0..gamma_" + std::to_string(out.cut) + " for N = " +
                      std::to_string(n) + ", got " + std::to_string(log_gammas.size()) + " values");
  }
  for (std::size_t j = 0; j < log_gammas.size(); ++j) {
    if (std::isnan(log_gammas[j]) || log_gammas[j] == -std::numeric_limits<double>::infinity()) {
      throw DomainError("gamma_" + std::to_string(j) + " must be positive");
    }
    if (j > 0 && log_gammas[j] > log_gammas[j - 1]) {
      throw DomainError("gamma sequence must be nonincreasing (gamma_" + std::to_string(j) + " > gamma_" +
                        std::to_string(j - 1) + ")");
    }
  }
  const double g0 = log_gammas[0];
  const double gc = log_gammas[static_cast<std::size_t>(out.cut)];
  out.k_star = static_cast<long>(std::floor(0.5 * (g0 - gc) / std::log(2.0)));
  out.log_bound = 0.5 * (std::log(16.0) + g0 + gc);
  out.bound = std::exp(out.log_bound);
  return out;
}

GeneralBound general_bound(std::span<const double> gammas, std::uint64_t n) {
  std::vector<double> logs;
  logs.reserve(gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    if (!(gammas[j] > 0) || !std::isfinite(gammas[j])) {
      throw DomainError("gamma_" + std::to_string(j) + " must be positive and finite");
    }
    logs.push_back(std::log(gammas[j]));
  }
  return general_bound_log(logs, n);
}

double two_term_bound(std::span<const double> gammas, std::uint64_t n, long k) {
  const int cut = bound_cut(n);
  if (gammas.size() <= static_cast<std::size_t>(cut)) {
    throw DomainError("two_term_bound needs gamma_0..gamma_" + std::to_string(cut));
  }
  if (k < 0) {
    throw DomainError("two_term_bound needs k >= 0");
  }
  const double scale = std::exp2(static_cast<double>(k + 1));
  return gammas[0] / scale + scale * gammas[static_cast<std::size_t>(cut)];
}

StepBound bandlimited_bound(int d, double theta, std::uint64_t n) {
  if (d < 1 || !(theta > 0) || !std::isfinite(theta)) {
    throw DomainError("bandlimited_bound needs d >= 1 and theta > 0");
  }
  const double dt = d * theta;
  const double need = 8.0 * (8.0 * dt + 1.0) * (8.0 * dt + 1.0);
  if (static_cast<double>(n) < need) {
    throw DomainError("bandlimited_bound needs N >= 8 (8 d theta + 1)^2 = " + to_string(need) + ", got N = " +
                      std::to_string(n));
  }
  // log(1 + 8 d theta sqrt(4 d theta)^(8 d theta)) as a softplus of the log term.
  const double log_term = std::log(8.0 * dt) + 8.0 * dt * 0.5 * std::log(4.0 * dt);
  const double log_g0 = log_term > 0 ? log_term + std::log1p(std::exp(-log_term)) : std::log1p(std::exp(log_term));
  const double root8 = std::sqrt(static_cast<double>(n) / 8.0);
  const double root32 = std::sqrt(static_cast<double>(n) / 32.0);
  const double log_ratio = std::log(4.0 * dt / root8);
  StepBound out;
  out.k = static_cast<long>(std::floor(0.5 * (log_g0 - root8 * log_ratio)));
  out.log_bound = std::log(4.0) + log_g0 + root32 * log_ratio;
  out.bound = std::exp(out.log_bound);
  return out;
}

StepBound neumann_trace_bound(double sigma, std::uint64_t n) {
  if (!(sigma > 0 && sigma < 1)) {
    throw DomainError("neumann_trace_bound needs sigma in (0, 1), got " + to_string(sigma));
  }
  if (n == 0) {
    throw DomainError("neumann_trace_bound needs N >= 1");
  }
  const double root8 = std::sqrt(static_cast<double>(n) / 8.0);
  const double root32 = std::sqrt(static_cast<double>(n) / 32.0);
  StepBound out;
  out.k = static_cast<long>(std::floor(-root8 * std::log(sigma)));
  out.log_bound = std::log(4.0) - std::log1p(-sigma) + root32 * std::log(sigma);
  out.bound = std::exp(out.log_bound);
  return out;
}

}  // namespace latboot
