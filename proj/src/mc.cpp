#include "latboot/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace latboot {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ stream;
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng) {
  if (n == 0) {
    throw DimensionError("cannot resample an empty dataset");
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) {
    i = pick(rng);
  }
  return idx;
}

double McReport::z_score() const {
  if (!target) {
    return 0;
  }
  const double diff = std::fabs(estimate - *target);
  if (standard_error == 0) {
    return diff == 0 ? 0 : std::numeric_limits<double>::infinity();
  }
  return diff / standard_error;
}

McReport summarize(std::span<const double> values, std::uint64_t seed, std::optional<double> target) {
  McReport out;
  out.replicas = values.size();
  out.seed = seed;
  out.target = target;
  if (values.empty()) {
    return out;
  }
  double mean = 0;
  for (double v : values) {
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  out.estimate = mean;
  if (values.size() > 1) {
    out.standard_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return out;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) {
          return;
        }
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          // Lowest failing index wins.
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

namespace {

double run_functional(const Functional& f, const Dataset<double>& x, std::size_t replica) {
  try {
    return f(x);
  } catch (const std::exception& e) {
    throw Error("functional failed in replica " + std::to_string(replica) + ": " + e.what());
  }
}

}  // namespace

McReport mc_estimate(const Functional& f, const Dataset<double>& data, const EstimatorCoefficients<double>& coeffs,
                     const McOptions& options) {
  if (options.replicas == 0) {
    throw DomainError("mc_estimate needs at least one replica");
  }
  if (coeffs.depth() == 0) {
    throw DomainError("mc_estimate needs at least one coefficient");
  }
  std::vector<double> values(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t r) {
    Rng rng = substream(options.seed, r);
    Dataset<double> x = options.resample_first ? resample(data, rng) : data;
    double total = coeffs.a[0] * run_functional(f, x, r);
    for (std::size_t j = 1; j < coeffs.depth(); ++j) {
      x = resample(x, rng);
      total += coeffs.a[j] * run_functional(f, x, r);
    }
    values[r] = total;
  });
  return summarize(values, options.seed);
}

Rational normal_raw_moment(const Rational& mean, const Rational& variance, int p) {
  if (p < 0) {
    throw DomainError("moment order must be >= 0");
  }
  // sum over even j of binom(p, j) mean^(p-j) variance^(j/2) (j-1)!!
  Rational total(0);
  BigInt double_factorial = 1;
  for (int j = 0; j <= p; j += 2) {
    if (j >= 2) {
      double_factorial *= j - 1;
    }
    Rational term(binomial(static_cast<unsigned long>(p), static_cast<unsigned long>(j)));
    Rational mp(1);
    for (int i = 0; i < p - j; ++i) {
      mp *= mean;
    }
    Rational vp(1);
    for (int i = 0; i < j / 2; ++i) {
      vp *= variance;
    }
    total += term * mp * vp * Rational(double_factorial);
  }
  return total;
}

Population Population::normal(std::vector<Rational> mean, std::vector<Rational> variance) {
  if (mean.empty() || mean.size() != variance.size()) {
    throw DimensionError("normal population needs matching, nonempty mean and variance vectors");
  }
  for (const auto& v : variance) {
    if (sgn(v) < 0) {
      throw DomainError("normal population variance must be >= 0");
    }
  }
  return Population(Normal{std::move(mean), std::move(variance)});
}

Population Population::empirical(Dataset<Rational> data) {
  std::vector<double> values;
  values.reserve(data.values().size());
  for (const auto& v : data.values()) {
    values.push_back(to_double(v));
  }
  Dataset<double> as_double(data.rows(), data.cols(), std::move(values));
  Population out(std::move(data));
  out.data_double_ = std::move(as_double);
  return out;
}

Population Population::table(MomentTable<Rational> moments) {
  if (moments.dimension() < 1) {
    throw DimensionError("moment table population needs d >= 1");
  }
  return Population(std::move(moments));
}

int Population::dimension() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return static_cast<int>(s.mean.size());
        } else if constexpr (std::is_same_v<T, Dataset<Rational>>) {
          return static_cast<int>(s.cols());
        } else {
          return s.dimension();
        }
      },
      source_);
}

bool Population::can_sample() const { return !std::holds_alternative<MomentTable<Rational>>(source_); }

std::string Population::kind() const {
  switch (source_.index()) {
    case 0:
      return "normal";
    case 1:
      return "dataset";
    default:
      return "table";
  }
}

Dataset<double> Population::draw(std::size_t n, Rng& rng) const {
  if (n == 0) {
    throw DimensionError("cannot draw zero rows");
  }
  if (const auto* normal = std::get_if<Normal>(&source_)) {
    const std::size_t d = normal->mean.size();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values(n * d);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        values[r * d + c] = to_double(normal->mean[c]) + std::sqrt(to_double(normal->variance[c])) * gauss(rng);
      }
    }
    return Dataset<double>(n, d, std::move(values));
  }
  if (std::holds_alternative<Dataset<Rational>>(source_)) {
    std::uniform_int_distribution<std::size_t> pick(0, data_double_.rows() - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) {
      i = pick(rng);
    }
    return data_double_.select(idx);
  }
  throw DomainError("a moment-table population cannot be sampled; supply a normal or dataset population");
}

Rational Population::moment(std::span<const int> labels) const {
  for (int l : labels) {
    if (l < 0 || l >= dimension()) {
      throw DimensionError("moment label " + std::to_string(l) + " out of range for d = " +
                           std::to_string(dimension()));
    }
  }
  if (const auto* normal = std::get_if<Normal>(&source_)) {
    std::vector<int> counts(normal->mean.size(), 0);
    for (int l : labels) {
      ++counts[static_cast<std::size_t>(l)];
    }
    Rational out(1);
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] > 0) {
        out *= normal_raw_moment(normal->mean[c], normal->variance[c], counts[c]);
      }
    }
    return out;
  }
  if (const auto* data = std::get_if<Dataset<Rational>>(&source_)) {
    return empirical_moment(*data, labels);
  }
  return std::get<MomentTable<Rational>>(source_).moment(labels);
}

std::vector<BiasExperimentRow> bias_experiment(const MomentPolynomial<Rational>& f, const Population& population,
                                               std::uint64_t n, int k_max, BiasMode mode,
                                               const std::optional<StepSchedule>& schedule, const McOptions& options) {
  if (!population.can_sample()) {
    throw DomainError("bias_experiment needs a population that can be sampled (normal or dataset)");
  }
  if (options.replicas == 0) {
    throw DomainError("bias_experiment needs at least one replica");
  }
  if (mode == BiasMode::schedule && !schedule) {
    throw DomainError("schedule mode needs a step schedule");
  }
  const int rows = mode == BiasMode::stationary ? k_max : schedule->length();
  if (rows < 0) {
    throw DomainError("k_max must be >= 0");
  }

  const auto table = population.moment_table<Rational>(f);
  const auto exact = exact_bias(f, n, rows, table, mode, schedule);
  const Rational truth_exact = evaluate(f, table);
  const double truth = to_double(truth_exact);

  // Coefficients of every row, exact then converted.
  std::vector<EstimatorCoefficients<double>> coeffs;
  for (int k = 0; k <= rows; ++k) {
    EstimatorCoefficients<Rational> c;
    if (mode == BiasMode::stationary) {
      c = stationary_coefficients<Rational>(k);
    } else {
      std::vector<Rational> prefix(schedule->etas().begin(), schedule->etas().begin() + k);
      c = expansion_coefficients<Rational>(StepSchedule::custom(n, std::move(prefix)));
    }
    EstimatorCoefficients<double> d;
    for (const auto& v : c.a) {
      d.a.push_back(to_double(v));
    }
    coeffs.push_back(std::move(d));
  }

  MomentPolynomial<double> f_double(f.dimension());
  for (const auto& [term, c] : f.terms()) {
    f_double.add(term, to_double(c));
  }

  const std::size_t depth = static_cast<std::size_t>(rows) + 1;
  const std::size_t samples = options.replicas;
  // values[r * depth + j] = F(X^(j+1)) for replica r.
  std::vector<double> values(samples * depth);
  parallel_for(samples, options.threads, [&](std::size_t r) {
    Rng rng = substream(options.seed, r);
    Dataset<double> x = population.draw(static_cast<std::size_t>(n), rng);
    for (std::size_t j = 0; j < depth; ++j) {
      if (j > 0) {
        x = resample(x, rng);
      }
      values[r * depth + j] = evaluate(f_double, x);
    }
  });

  std::vector<BiasExperimentRow> out;
  std::vector<double> bias(samples);
  for (int k = 0; k <= rows; ++k) {
    const auto& a = coeffs[static_cast<std::size_t>(k)].a;
    for (std::size_t r = 0; r < samples; ++r) {
      double total = 0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        total += a[j] * values[r * depth + j];
      }
      bias[r] = total - truth;
    }
    BiasExperimentRow row;
    row.k = k;
    row.exact_bias = exact.records[static_cast<std::size_t>(k)].signed_bias;
    row.bound = to_double(exact.records[static_cast<std::size_t>(k)].bound);
    row.empirical = summarize(bias, options.seed, to_double(row.exact_bias));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace latboot
