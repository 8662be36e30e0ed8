// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latboot/debias.hpp"
#include "latboot/io.hpp"
#include "latboot/lattice.hpp"
#include "latboot/mc.hpp"
#include "latboot/resampling.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace latboot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  std::string title;
  std::string tolerance;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

Outcome result(bool pass, std::string detail) {
  Outcome out;
  out.pass = pass;
  out.detail = std::move(detail);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Outcome zeta_mobius_m3() {
  const std::vector<std::vector<std::int64_t>> zeta{
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 0, 1, 0, 0}, {1, 0, 0, 1, 0}, {1, 1, 1, 1, 1}};
  const std::vector<std::vector<std::int64_t>> mobius{
      {1, 0, 0, 0, 0}, {-1, 1, 0, 0, 0}, {-1, 0, 1, 0, 0}, {-1, 0, 0, 1, 0}, {2, -1, -1, -1, 1}};
  const std::vector<std::string> order{"1|2|3", "12|3", "13|2", "1|23", "123"};
  LatticeIndex index(3);
  const auto z = zeta_matrix(index);
  const auto mu = mobius_matrix(index);
  int mismatches = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    if (index[i].to_string() != order[i]) {
      ++mismatches;
    }
    for (std::size_t j = 0; j < 5; ++j) {
      mismatches += z(i, j) != zeta[i][j];
      mismatches += mu(i, j) != mobius[i][j];
    }
  }
  return result(mismatches == 0, std::to_string(mismatches) + " mismatched entries of 50, row order " +
                                     index[0].to_string() + ".." + index[4].to_string());
}

Outcome column_sums() {
  long sum_cols = 0;
  long sum_ok = 0;
  long zero_cols = 0;
  long zero_ok = 0;
  std::string example;
  for (int m = 1; m <= 6; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 8; ++n) {
      const auto s = sampling_matrix<Rational>(SamplingOperator(tables, n)).entries;
      for (std::size_t c = 0; c < s.cols(); ++c) {
        const auto k = static_cast<std::uint64_t>(tables->index[c].block_count());
        if (k <= n) {
          ++sum_cols;
          sum_ok += s.column_sum(c) == 1;
        } else {
          ++zero_cols;
          bool zero = true;
          for (std::size_t r = 0; r < s.rows(); ++r) {
            zero = zero && s(r, c) == 0;
          }
          zero_ok += zero;
          if (!zero && example.empty()) {
            example = "m=" + std::to_string(m) + " N=" + std::to_string(n) + " column " +
                      tables->index[c].to_string() + " sums to " + to_string(s.column_sum(c));
          }
        }
      }
    }
  }
  Outcome out;
  out.pass = sum_ok == sum_cols && zero_ok == zero_cols;
  out.detail = "sum = 1 for #sigma <= N: " + std::to_string(sum_ok) + "/" + std::to_string(sum_cols) +
               "; zero for #sigma > N: " + std::to_string(zero_ok) + "/" + std::to_string(zero_cols);
  if (!example.empty()) {
    out.notes.push_back("first nonzero column with #sigma > N: " + example);
  }
  return out;
}

Outcome opbound() {
  int checked = 0;
  int ok = 0;
  for (int m = 1; m <= 6; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 10; ++n) {
      const Rational direct = one_norm_direct<Rational>(SamplingOperator(tables, n));
      Rational closed = 2;
      if (static_cast<std::uint64_t>(m) <= n) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), n, static_cast<unsigned long>(m));
        Rational ratio(oracle::falling(static_cast<long>(n), m), p);
        ratio.canonicalize();
        closed = 2 * (1 - ratio);
      }
      ++checked;
      ok += direct == closed;
    }
  }
  return result(ok == checked, std::to_string(ok) + "/" + std::to_string(checked) + " (m, N) pairs agree");
}

Outcome factorization_stated() {
  int checked = 0;
  int stated = 0;
  int holds = 0;
  for (int m = 1; m <= 6; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 8; ++n) {
      const auto f = factorization(SamplingOperator(tables, n));
      ++checked;
      stated += f.cinv_zeta_r;
      holds += f.r_zeta_cinv;
    }
  }
  Outcome out;
  out.pass = stated == checked;
  out.detail = "S = C^-1 zeta R on " + std::to_string(stated) + "/" + std::to_string(checked) + " (m, N) pairs";
  out.notes.push_back("S = R zeta C^-1 on " + std::to_string(holds) + "/" + std::to_string(checked) + " (m, N) pairs");
  return out;
}

Outcome reduced_levels() {
  std::mt19937_64 rng(5);
  long checked = 0;
  long ok = 0;
  for (int m = 1; m <= 8; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = 1; n <= 10; ++n) {
      SamplingOperator op(tables, n);
      const auto reduced = reduced_matrix<Rational>(m, n);
      for (int trial = 0; trial < 100; ++trial) {
        const auto f = support::random_vector(op.size(), rng);
        const auto lhs = level_sums(op.index(), op.apply(f));
        const auto rhs = multiply<Rational>(reduced, level_sums(op.index(), f));
        ++checked;
        ok += lhs == rhs;
      }
    }
  }
  return result(ok == checked,
                std::to_string(ok) + "/" + std::to_string(checked) + " random vectors, m <= 8, N <= 10");
}

Outcome exhaustive_oracle() {
  std::mt19937_64 rng(6);
  int checked = 0;
  int ok = 0;
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto f = support::random_functional(2, 3, 4, rng);
      const auto rows = support::random_rows(n, 2, rng);
      const auto data = Dataset<Rational>::from_rows(rows);
      ++checked;
      ok += evaluate(apply_S(f, n), data) == support::oracle_resample_average(f, rows);
    }
  }
  return result(ok == checked, std::to_string(ok) + "/" + std::to_string(checked) + " random functionals");
}

Outcome annihilation() {
  long checked = 0;
  long ok = 0;
  for (int m = 1; m <= 6; ++m) {
    auto tables = make_lattice_tables(m);
    for (std::uint64_t n = static_cast<std::uint64_t>(m); n <= static_cast<std::uint64_t>(m) + 3; ++n) {
      SamplingOperator op(tables, n);
      auto apply = [&op](const LatticeVector<Rational>& v) { return op.apply(v); };
      const auto schedule = StepSchedule::default_schedule(n, m);
      for (std::size_t i = 0; i < op.size(); ++i) {
        ++checked;
        ok += scheduled_bias_product<Rational>(LatticeVector<Rational>::basis(op.size(), i), schedule, apply)
                  .is_zero_vector();
      }
    }
  }
  return result(ok == checked, std::to_string(ok) + "/" + std::to_string(checked) + " basis vectors annihilated");
}

Outcome linear_regime() {
  double worst = 1;
  int worst_m = 0;
  for (int m = 1; m <= 50; ++m) {
    const double n = std::max(8.0 * m * m, m + 1.0);
    const double r = gamma_ratio(m, n);
    if (r < worst) {
      worst = r;
      worst_m = m;
    }
  }
  const double threshold = std::exp(-0.25) * 0.75;
  int below = 0;
  double largest = 0;
  for (int m = 10; m <= 50; ++m) {
    const double n = std::ceil(m * m / 4.0);
    const double r = gamma_ratio(m, n);
    below += r < threshold;
    largest = std::max(largest, r);
  }
  Outcome out;
  out.pass = worst >= 0.75 && below == 41;
  out.detail = "min over m<=50 at N=max(8m^2,m+1): " + fmt(worst) + " (m=" + std::to_string(worst_m) +
               "); N=ceil(m^2/4), m=10..50: " + std::to_string(below) + "/41 below " + fmt(threshold) +
               " (max " + fmt(largest) + ")";
  return out;
}

Outcome spectral() {
  int ok = 0;
  std::string ks;
  for (int m = 1; m <= 5; ++m) {
    const auto n = static_cast<std::uint64_t>(m);
    const auto s = sampling_matrix<double>(SamplingOperator(m, n)).entries;
    const auto a = DenseMatrix<double>::identity(s.rows()) - s;
    auto power = a;
    int found = 0;
    for (int k = 1; k <= 10000; ++k) {
      if (power.max_abs() < 1e-6) {
        found = k;
        break;
      }
      power = power * a;
    }
    ok += found > 0;
    ks += (ks.empty() ? "" : ", ") + std::string("m=") + std::to_string(m) + ":k=" +
          (found ? std::to_string(found) : std::string("none"));
  }
  return result(ok == 5, "first k with max|(Id-S)^k| < 1e-6: " + ks);
}

Outcome monte_carlo() {
  const auto pop = Population::normal({0}, {1});
  MomentTable<Rational> table(1);
  table.insert({0}, 0);
  table.insert({0, 0}, 1);
  const auto f = variance_functional<Rational>();
  McOptions options;
  options.replicas = 100000;
  options.seed = 20240611;
  const auto plug = bias_experiment(f, pop, 10, 0, BiasMode::stationary, std::nullopt, options);
  const auto sched =
      bias_experiment(f, pop, 10, 0, BiasMode::schedule, StepSchedule::default_schedule(10, 2), options);
  const auto exact_plug = exact_bias(f, 10, 0, table, BiasMode::stationary).records[0].signed_bias;
  const auto& k0 = plug[0].empirical;
  const auto& k2 = sched[2].empirical;
  const double z0 = std::fabs(k0.estimate + 0.1) / k0.standard_error;
  const double z2 = std::fabs(k2.estimate) / k2.standard_error;
  Outcome out;
  out.pass = exact_plug == Rational(-1, 10) && sched[2].exact_bias == 0 && z0 <= 3 && z2 <= 3;
  out.detail = "k=0: " + fmt(k0.estimate) + " +- " + fmt(k0.standard_error) + " vs -0.1 (z=" + fmt(z0) +
               "); default 2-step: " + fmt(k2.estimate) + " +- " + fmt(k2.standard_error) + " vs 0 (z=" + fmt(z2) +
               ")";
  return out;
}

Outcome bound_calculators() {
  const auto t = neumann_trace_bound(0.5, 32);
  const bool example = t.k == 1 && std::fabs(t.bound / 4.0 - 1) <= 1e-12;
  double worst = 0;
  int cells = 0;
  for (int si = 1; si <= 9; ++si) {
    const double sigma = si / 10.0;
    for (int j = 2; j <= 8; ++j) {
      const auto n = static_cast<std::uint64_t>(8 * j * j);
      std::vector<double> log_gammas;
      for (int i = 0; i <= j; ++i) {
        log_gammas.push_back(i * std::log(sigma) - std::log1p(-sigma));
      }
      const auto g = general_bound_log(log_gammas, n);
      const double formula = std::log(4.0) - std::log1p(-sigma) + std::sqrt(n / 32.0) * std::log(sigma);
      worst = std::max(worst, std::fabs(g.log_bound - formula));
      worst = std::max(worst, std::fabs(neumann_trace_bound(sigma, n).log_bound - formula));
      ++cells;
    }
  }
  Outcome out;
  out.pass = example && worst <= 1e-12;
  out.detail = "sigma=1/2 N=32: k=" + std::to_string(t.k) + " bound=" + fmt(t.bound) + "; max |log ratio| over " +
               std::to_string(cells) + " grid cells (N=8j^2, j=2..8): " + fmt(worst);
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "zeta and Mobius matrices for m=3", "exact", 0.001, zeta_mobius_m3},
      {2, "S column sums: 1 for #sigma <= N, zero column for #sigma > N (m<=6, N<=8)", "exact", 10, column_sums},
      {3, "||Id - S||_1 equals closed form (m<=6, N<=10)", "exact", 0, opbound},
      {4, "S = C^-1 zeta R (m<=6, N<=8)", "exact", 0, factorization_stated},
      {5, "level sums: sums(S f) = reduced * sums(f)", "exact", 0, reduced_levels},
      {6, "apply_S equals average over all N^N resamples (N in {2,3}, m<=3)", "exact", 30, exhaustive_oracle},
      {7, "default schedule annihilates bias on every basis vector (m<=6, N in m..m+3)", "exact", 0, annihilation},
      {8, "falling(N,m)/N^m >= 3/4 at N=max(8m^2,m+1); drops below exp(-1/4)*3/4 at N=m^2/4", "log domain", 0,
       linear_regime},
      {9, "max entry of (Id - S)^k below 1e-6 for some k <= 1e4 (m<=5, N=m)", "1e-6 absolute", 0, spectral},
      {10, "Monte Carlo variance bias, N=10, 1e5 replicas", "3 standard errors", 60, monte_carlo},
      {11, "trace bound example and general bound on sigma^j/(1-sigma)", "1e-12 relative", 0, bound_calculators},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(secs) + "s";
    if (c.time_limit > 0) {
      timing += " (limit " + fmt(c.time_limit) + "s)";
      if (secs > c.time_limit) {
        o.pass = false;
        o.detail += "; time limit exceeded";
      }
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  C" << c.id << "  " << c.title << "  [tol: " << c.tolerance
              << "]  " << o.detail << "  " << timing << "\n";
    for (const auto& note : o.notes) {
      std::cout << "      note: " << note << "\n";
    }
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
