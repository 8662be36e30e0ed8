#include "latboot/selftest.hpp"

#include <random>
#include <sstream>

#include "latboot/combinatorics.hpp"
#include "latboot/debias.hpp"
#include "latboot/lattice.hpp"
#include "latboot/mc.hpp"
#include "latboot/moments.hpp"
#include "latboot/resampling.hpp"

namespace latboot {

namespace {

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 9);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

LatticeVector<Rational> random_vector(std::size_t n, std::mt19937_64& rng) {
  LatticeVector<Rational> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = random_rational(rng);
  }
  return v;
}

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

std::string check_enumeration() {
  for (int m = 1; m <= 8; ++m) {
    LatticeIndex index(m);
    if (BigInt(static_cast<unsigned long>(index.size())) != bell(static_cast<unsigned>(m))) {
      return "|Pi(" + std::to_string(m) + ")| != Bell(" + std::to_string(m) + ")";
    }
    for (std::size_t i = 1; i < index.size(); ++i) {
      if (index[i - 1].block_count() < index[i].block_count()) {
        return "canonical order not decreasing in block count at m = " + std::to_string(m);
      }
    }
  }
  return {};
}

std::string check_mobius() {
  for (int m = 1; m <= 5; ++m) {
    LatticeIndex index(m);
    const auto zeta = zeta_matrix(index);
    const auto mobius = mobius_matrix(index);
    const std::size_t n = index.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::int64_t sum = 0;
        for (std::size_t k = 0; k < n; ++k) {
          sum += zeta(i, k) * mobius(k, j);
        }
        if (sum != (i == j ? 1 : 0)) {
          return "zeta * mobius != Id at m = " + std::to_string(m);
        }
      }
    }
  }
  return {};
}

std::string check_column_sums() {
  for (int m = 1; m <= 5; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 6; ++n) {
      const auto s = sampling_matrix<Rational>(SamplingOperator(tables, n)).entries;
      for (std::size_t c = 0; c < s.cols(); ++c) {
        if (s.column_sum(c) != 1) {
          return "column " + tables->index[c].to_string() + " of S(m=" + std::to_string(m) +
                 ", N=" + std::to_string(n) + ") sums to " + to_string(s.column_sum(c));
        }
      }
    }
  }
  return {};
}

std::string check_opbound() {
  for (int m = 1; m <= 5; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 7; ++n) {
      const auto direct = one_norm_direct<Rational>(SamplingOperator(tables, n));
      const auto closed = one_norm_id_minus_S<Rational>(m, n);
      if (direct != closed) {
        return "||Id - S||_1 at m = " + std::to_string(m) + ", N = " + std::to_string(n) + ": direct " +
               to_string(direct) + ", closed form " + to_string(closed);
      }
    }
  }
  return {};
}

std::string check_factorization() {
  for (int m = 1; m <= 4; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 5; ++n) {
      if (!factorization(SamplingOperator(tables, n)).r_zeta_cinv) {
        return "S != R zeta C^-1 at m = " + std::to_string(m) + ", N = " + std::to_string(n);
      }
    }
  }
  return {};
}

std::string check_reduced(std::mt19937_64& rng) {
  for (int m = 1; m <= 5; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 6; ++n) {
      SamplingOperator op(tables, n);
      const auto reduced = reduced_matrix<Rational>(m, n);
      for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_vector(op.size(), rng);
        const auto lhs = level_sums(op.index(), op.apply(f));
        const auto levels = level_sums(op.index(), f);
        const auto rhs = multiply<Rational>(reduced, levels);
        if (lhs != rhs) {
          return "level sums of S f differ from reduced matrix at m = " + std::to_string(m) + ", N = " +
                 std::to_string(n);
        }
      }
    }
  }
  return {};
}

std::string check_richardson(std::mt19937_64& rng) {
  for (int m = 1; m <= 4; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = static_cast<std::uint64_t>(m); n <= 6; ++n) {
      SamplingOperator op(tables, n);
      auto apply = [&op](const LatticeVector<Rational>& v) { return op.apply(v); };
      const auto f = random_vector(op.size(), rng);
      for (int k = 0; k <= 4; ++k) {
        const auto rec = richardson_iterate(f, k, apply);
        if (rec != neumann_iterate(f, k, apply)) {
          return "recursion and Neumann forms differ at m = " + std::to_string(m) + ", k = " + std::to_string(k);
        }
        const auto bias = op.apply(rec) - f;
        if (bias != Rational(-1) * residual_power(f, k, apply)) {
          return "S f^(k) - f != -(Id - S)^(k+1) f at m = " + std::to_string(m) + ", k = " + std::to_string(k);
        }
      }
    }
  }
  return {};
}

std::string check_annihilation() {
  for (int m = 1; m <= 5; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = static_cast<std::uint64_t>(m); n <= static_cast<std::uint64_t>(m) + 2; ++n) {
      SamplingOperator op(tables, n);
      const auto schedule = StepSchedule::default_schedule(n, m);
      auto apply = [&op](const LatticeVector<Rational>& v) { return op.apply(v); };
      for (std::size_t i = 0; i < op.size(); ++i) {
        const auto e = LatticeVector<Rational>::basis(op.size(), i);
        if (!scheduled_bias_product<Rational>(e, schedule, apply).is_zero_vector()) {
          return "default schedule leaves bias on basis vector " + op.index()[i].to_string() + " at m = " +
                 std::to_string(m) + ", N = " + std::to_string(n);
        }
        if (op.apply(scheduled_iterate<Rational>(e, schedule, apply)) != e) {
          return "S G_m != f on basis vector " + op.index()[i].to_string();
        }
      }
    }
  }
  return {};
}

MomentPolynomial<Rational> random_functional(int d, int max_order, std::mt19937_64& rng) {
  MomentPolynomial<Rational> f(d);
  std::uniform_int_distribution<int> label(0, d - 1);
  std::uniform_int_distribution<int> order(1, max_order);
  for (int t = 0; t < 4; ++t) {
    const int m = order(rng);
    const auto parts = all_partitions_lex(m);
    std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (auto& l : labels) {
      l = label(rng);
    }
    f.add(LabeledTerm(parts[pick(rng)], labels), random_rational(rng));
  }
  return f;
}

Dataset<Rational> random_dataset(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::vector<Rational> values;
  for (std::size_t i = 0; i < n * d; ++i) {
    values.push_back(random_rational(rng));
  }
  return Dataset<Rational>(n, d, std::move(values));
}

std::string check_exhaustive(std::mt19937_64& rng) {
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto f = random_functional(2, 3, rng);
      const auto data = random_dataset(n, 2, rng);
      auto plug_in = [&f](const Dataset<Rational>& x) { return evaluate(f, x); };
      // One resampling round.
      const EstimatorCoefficients<Rational> one{{Rational(0), Rational(1)}};
      if (exhaustive_estimate(plug_in, data, one) != evaluate(apply_S(f, n), data)) {
        return "average over all resamples differs from apply_S at N = " + std::to_string(n);
      }
      // Chain started at the data: expectation f^(1)(data).
      const auto g = richardson_debias(f, n, 1);
      const auto coeffs = stationary_coefficients<Rational>(1);
      if (exhaustive_estimate(plug_in, data, coeffs) != evaluate(g, data)) {
        return "chain average differs from f^(1) at N = " + std::to_string(n);
      }
      // Chain started at a resample of the data: expectation (S f^(1))(data).
      const EstimatorCoefficients<Rational> shifted{{Rational(0), coeffs.a[0], coeffs.a[1]}};
      if (exhaustive_estimate(plug_in, data, shifted) != evaluate(apply_S(g, n), data)) {
        return "chain average differs from S f^(1) at N = " + std::to_string(n);
      }
    }
  }
  return {};
}

std::string check_expansion() {
  for (int k = 0; k <= 6; ++k) {
    const auto a = expansion_coefficients<Rational>(StepSchedule::unit(10, k)).a;
    const auto b = stationary_coefficients<Rational>(k).a;
    if (a != b) {
      return "unit schedule coefficients differ from signed binomials at k = " + std::to_string(k);
    }
  }
  return {};
}

}  // namespace

std::vector<CheckResult> run_selftest(bool stop_on_failure, const std::function<void(const CheckResult&)>& progress) {
  std::mt19937_64 rng(20240611);
  const std::vector<Check> checks = {
      {"lattice enumeration sizes and order", check_enumeration},
      {"zeta * mobius = Id", check_mobius},
      {"S columns sum to 1", check_column_sums},
      {"||Id - S||_1 closed form", check_opbound},
      {"S = R zeta C^-1", check_factorization},
      {"reduced matrix on level sums", [&] { return check_reduced(rng); }},
      {"Richardson recursion, Neumann form, bias identity", [&] { return check_richardson(rng); }},
      {"default schedule annihilates bias in m steps", check_annihilation},
      {"exhaustive resampling oracle", [&] { return check_exhaustive(rng); }},
      {"unit schedule expansion = signed binomials", check_expansion},
  };
  std::vector<CheckResult> results;
  for (const auto& check : checks) {
    CheckResult r{check.name, false, {}};
    try {
      r.detail = check.run();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    if (progress) {
      progress(r);
    }
    results.push_back(r);
    if (!r.passed && stop_on_failure) {
      break;
    }
  }
  return results;
}

}  // namespace latboot
