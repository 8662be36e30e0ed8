// latboot: command-line front end.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latboot/combinatorics.hpp"
#include "latboot/debias.hpp"
#include "latboot/errors.hpp"
#include "latboot/io.hpp"
#include "latboot/lattice.hpp"
#include "latboot/mc.hpp"
#include "latboot/moments.hpp"
#include "latboot/resampling.hpp"
#include "latboot/selftest.hpp"

using namespace latboot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSelftest = 4;

struct Output {
  std::string path = "-";
  std::string format;
};

struct Context {
  std::string command_line;
  Output out;
};

Artifact start_artifact(const Context& ctx, const std::string& command, std::optional<std::uint64_t> seed) {
  Artifact a;
  a.provenance = {{"latboot", LATBOOT_VERSION},
                  {"command", command},
                  {"argv", ctx.command_line},
                  {"seed", seed ? std::to_string(*seed) : "none"},
                  {"timestamp", utc_timestamp()}};
  return a;
}

void emit(const Context& ctx, const Artifact& a) {
  std::optional<Format> f;
  if (!ctx.out.format.empty()) {
    f = parse_format(ctx.out.format);
  }
  write_artifact(a, ctx.out.path, f);
}

std::string decimal(const Rational& q) { return to_string(to_double(q)); }

std::vector<Rational> parse_etas(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    out.push_back(parse_rational(field));
  }
  if (out.empty()) {
    throw ParseError("--etas needs a comma-separated list of step sizes");
  }
  return out;
}

/// "stationary" selects the Richardson iteration; the rest build a schedule of length k.
std::optional<StepSchedule> make_schedule(const std::string& kind, std::uint64_t n, int k, const std::string& etas) {
  if (kind == "stationary") {
    return std::nullopt;
  }
  if (kind == "default") {
    return StepSchedule::default_schedule(n, k);
  }
  if (kind == "unit") {
    return StepSchedule::unit(n, k);
  }
  if (kind == "custom") {
    return StepSchedule::custom(n, parse_etas(etas));
  }
  throw ParseError("unknown schedule \"" + kind + "\" (expected stationary, default, unit or custom)");
}

// lattice ---------------------------------------------------------------------

struct LatticeArgs {
  int m = 3;
};

void add_incidence(Artifact& a, const std::string& name, const LatticeIndex& index, const IncidenceMatrix& mat) {
  std::vector<std::string> cols{"row"};
  for (const auto& p : index) {
    cols.push_back(p.to_string());
  }
  auto& t = a.add_table(name, cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    std::vector<Cell> row{index[r].to_string()};
    for (std::size_t c = 0; c < index.size(); ++c) {
      row.emplace_back(static_cast<std::int64_t>(mat(r, c)));
    }
    t.add_row(std::move(row));
  }
}

int cmd_lattice(const Context& ctx, const LatticeArgs& args) {
  LatticeIndex index(args.m);
  Artifact a = start_artifact(ctx, "lattice", std::nullopt);
  auto& parts = a.add_table("partitions", {"ordinal", "partition", "blocks", "rgs"});
  for (std::size_t i = 0; i < index.size(); ++i) {
    std::string rgs;
    for (auto v : index[i].rgs()) {
      rgs += (rgs.empty() ? "" : " ") + std::to_string(v);
    }
    parts.add_row({static_cast<std::int64_t>(i), index[i].to_string(), std::int64_t{index[i].block_count()}, rgs});
  }
  auto& hasse = a.add_table("hasse", {"finer", "coarser"});
  for (const auto& [lo, hi] : hasse_edges(index)) {
    hasse.add_row({index[lo].to_string(), index[hi].to_string()});
  }
  if (args.m <= kDefaultDenseMaxOrder) {
    add_incidence(a, "zeta", index, zeta_matrix(index));
    add_incidence(a, "mobius", index, mobius_matrix(index));
  }
  emit(ctx, a);
  return kExitOk;
}

// smatrix ---------------------------------------------------------------------

struct SmatrixArgs {
  int m = 3;
  std::uint64_t n = 3;
  bool reduced = false;
};

int cmd_smatrix(const Context& ctx, const SmatrixArgs& args) {
  Artifact a = start_artifact(ctx, args.reduced ? "smatrix --reduced" : "smatrix", std::nullopt);
  if (args.reduced) {
    const auto r = reduced_matrix<Rational>(args.m, args.n);
    std::vector<std::string> cols{"level"};
    for (int j = 1; j <= args.m; ++j) {
      cols.push_back(std::to_string(j));
    }
    auto& t = a.add_table("reduced", cols);
    for (std::size_t i = 0; i < r.rows(); ++i) {
      std::vector<Cell> row{static_cast<std::int64_t>(i + 1)};
      for (std::size_t j = 0; j < r.cols(); ++j) {
        row.emplace_back(to_string(r(i, j)));
      }
      t.add_row(std::move(row));
    }
    emit(ctx, a);
    return kExitOk;
  }
  check_order(args.m, kDefaultDenseMaxOrder, "smatrix");
  SamplingOperator op(args.m, args.n);
  const auto s = sampling_matrix<Rational>(op).entries;
  std::vector<std::string> cols{"row"};
  for (const auto& p : op.index()) {
    cols.push_back(p.to_string());
  }
  auto& t = a.add_table("s", cols);
  for (std::size_t r = 0; r < op.size(); ++r) {
    std::vector<Cell> row{op.index()[r].to_string()};
    for (std::size_t c = 0; c < op.size(); ++c) {
      row.emplace_back(to_string(s(r, c)));
    }
    t.add_row(std::move(row));
  }
  const auto fac = factorization(op);
  auto& diag = a.add_table("diagonals", {"partition", "R", "C"});
  for (std::size_t i = 0; i < op.size(); ++i) {
    diag.add_row({op.index()[i].to_string(), fac.r[i].get_str(), fac.c[i].get_str()});
  }
  auto& checks = a.add_table("factorization", {"identity", "holds"});
  checks.add_row({std::string("S = R zeta C^-1"), std::string(fac.r_zeta_cinv ? "true" : "false")});
  checks.add_row({std::string("S = C^-1 zeta R"), std::string(fac.cinv_zeta_r ? "true" : "false")});
  checks.add_row({std::string("S^T = C^-1 zeta^T R"), std::string(fac.transpose_cinv_zeta_r ? "true" : "false")});
  emit(ctx, a);
  return kExitOk;
}

// bias ------------------------------------------------------------------------

struct BiasArgs {
  std::string functional;
  std::string population;
  std::uint64_t n = 10;
  int k = 2;
  std::string schedule = "stationary";
  std::string etas;
};

int cmd_bias(const Context& ctx, const BiasArgs& args) {
  const auto f = read_functional<Rational>(args.functional);
  const auto pop = read_population(args.population);
  const auto schedule = make_schedule(args.schedule, args.n, args.k, args.etas);
  const auto table = pop.moment_table<Rational>(f);
  const auto mode = schedule ? BiasMode::schedule : BiasMode::stationary;
  const auto report = exact_bias(f, args.n, args.k, table, mode, schedule);

  Artifact a = start_artifact(ctx, "bias", std::nullopt);
  auto& summary = a.add_table("summary", {"key", "value"});
  summary.add_row({std::string("schedule"), schedule ? schedule->name() : std::string("stationary")});
  summary.add_row({std::string("N"), static_cast<std::int64_t>(args.n)});
  summary.add_row({std::string("order"), std::int64_t{report.order}});
  summary.add_row({std::string("population_value"), to_string(evaluate(f, table))});
  summary.add_row({std::string("mu_inf"), to_string(report.mu_inf)});
  summary.add_row({std::string("f_one"), to_string(report.f_one)});
  summary.add_row({std::string("bound_as_printed"), to_string(bias_bound_as_printed<Rational>(report.order, args.n,
                                                                                               report.mu_inf))});
  if (schedule) {
    std::string etas;
    for (const auto& e : schedule->etas()) {
      etas += (etas.empty() ? "" : " ") + to_string(e);
    }
    summary.add_row({std::string("etas"), etas});
  }
  auto& t = a.add_table("bias", {"k", "signed_bias", "abs_bias", "bound", "signed_bias_decimal", "bound_decimal"});
  for (const auto& r : report.records) {
    t.add_row({std::int64_t{r.k}, to_string(r.signed_bias), to_string(r.abs_bias), to_string(r.bound),
               decimal(r.signed_bias), decimal(r.bound)});
  }
  emit(ctx, a);
  return kExitOk;
}

// debias ----------------------------------------------------------------------

struct DebiasArgs {
  std::string functional;
  std::uint64_t n = 10;
  int k = 1;
  std::string schedule = "stationary";
  std::string etas;
};

int cmd_debias(const Context& ctx, const DebiasArgs& args) {
  const auto f = read_functional<Rational>(args.functional);
  const auto schedule = make_schedule(args.schedule, args.n, args.k, args.etas);
  const auto g = schedule ? nonstationary_debias(f, args.n, *schedule) : richardson_debias(f, args.n, args.k);
  auto j = functional_to_json(g);
  std::ostringstream out;
  out << j.dump(2) << '\n';
  if (ctx.out.path.empty() || ctx.out.path == "-") {
    std::cout << out.str();
  } else {
    std::ofstream file(ctx.out.path);
    if (!file) {
      throw Error("cannot write " + ctx.out.path);
    }
    file << out.str();
  }
  return kExitOk;
}

// mc-run ----------------------------------------------------------------------

struct McArgs {
  std::string functional;
  std::string data;
  std::string population;
  std::uint64_t n = 10;
  int k = 1;
  std::string schedule = "stationary";
  std::string etas;
  std::size_t replicas = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool exhaustive = false;
  bool resample_first = false;
};

EstimatorCoefficients<Rational> coefficients_for(const std::optional<StepSchedule>& schedule, int k) {
  return schedule ? expansion_coefficients<Rational>(*schedule) : stationary_coefficients<Rational>(k);
}

int cmd_mc(const Context& ctx, const McArgs& args) {
  const auto f = read_functional<Rational>(args.functional);
  McOptions options;
  options.replicas = args.replicas;
  options.seed = args.seed;
  options.threads = args.threads;
  options.resample_first = args.resample_first;

  if (!args.population.empty()) {
    const auto pop = read_population(args.population);
    const auto schedule = make_schedule(args.schedule, args.n, args.k, args.etas);
    const auto mode = schedule ? BiasMode::schedule : BiasMode::stationary;
    const auto rows = bias_experiment(f, pop, args.n, args.k, mode, schedule, options);
    Artifact a = start_artifact(ctx, "mc-run", args.seed);
    auto& t = a.add_table("bias_experiment",
                          {"k", "empirical_bias", "standard_error", "exact_bias", "exact_bias_decimal", "z", "bound",
                           "replicas"});
    for (const auto& r : rows) {
      t.add_row({std::int64_t{r.k}, r.empirical.estimate, r.empirical.standard_error, to_string(r.exact_bias),
                 decimal(r.exact_bias), r.empirical.z_score(), r.bound, static_cast<std::int64_t>(r.empirical.replicas)});
    }
    emit(ctx, a);
    return kExitOk;
  }

  if (args.data.empty()) {
    throw ParseError("mc-run needs --data or --population");
  }
  const auto data = read_dataset<Rational>(args.data);
  const std::uint64_t n = data.rows();
  const auto schedule = make_schedule(args.schedule, n, args.k, args.etas);
  const auto coeffs = coefficients_for(schedule, args.k);
  const auto g = schedule ? nonstationary_debias(f, n, *schedule) : richardson_debias(f, n, args.k);
  // Expectation of the estimator: G_k(data) for X^1 = data, (S G_k)(data) when X^1 is resampled.
  const Rational target = args.resample_first ? evaluate(apply_S(g, n), data) : evaluate(g, data);

  Artifact a = start_artifact(ctx, args.exhaustive ? "mc-run --exhaustive" : "mc-run",
                              args.exhaustive ? std::nullopt : std::optional<std::uint64_t>(args.seed));
  auto& ct = a.add_table("coefficients", {"j", "a_j", "a_j_decimal"});
  for (std::size_t j = 0; j < coeffs.a.size(); ++j) {
    ct.add_row({static_cast<std::int64_t>(j), to_string(coeffs.a[j]), decimal(coeffs.a[j])});
  }
  if (args.exhaustive) {
    if (n > 4) {
      throw SizeError("--exhaustive enumerates N^N resamples per level and is limited to N <= 4, got N = " +
                      std::to_string(n));
    }
    auto plug_in = [&f](const Dataset<Rational>& x) { return evaluate(f, x); };
    auto chain = coeffs;
    if (args.resample_first) {
      chain.a.insert(chain.a.begin(), Rational(0));
    }
    const Rational value = exhaustive_estimate(plug_in, data, chain);
    auto& t = a.add_table("estimate", {"estimate", "estimate_decimal", "target", "target_decimal", "equal"});
    t.add_row({to_string(value), decimal(value), to_string(target), decimal(target),
               std::string(value == target ? "true" : "false")});
    emit(ctx, a);
    return kExitOk;
  }
  std::vector<double> values;
  for (const auto& v : data.values()) {
    values.push_back(to_double(v));
  }
  const Dataset<double> data_double(data.rows(), data.cols(), std::move(values));
  MomentPolynomial<double> f_double(f.dimension());
  for (const auto& [term, c] : f.terms()) {
    f_double.add(term, to_double(c));
  }
  EstimatorCoefficients<double> coeffs_double;
  for (const auto& v : coeffs.a) {
    coeffs_double.a.push_back(to_double(v));
  }
  auto report = mc_estimate([&f_double](const Dataset<double>& x) { return evaluate(f_double, x); }, data_double,
                            coeffs_double, options);
  report.target = to_double(target);
  auto& t = a.add_table("estimate", {"estimate", "standard_error", "target", "z", "replicas", "seed"});
  t.add_row({report.estimate, report.standard_error, report.target ? Cell(*report.target) : Cell(std::string("")),
             report.z_score(), static_cast<std::int64_t>(report.replicas), static_cast<std::int64_t>(report.seed)});
  emit(ctx, a);
  return kExitOk;
}

// bounds ----------------------------------------------------------------------

struct BoundsArgs {
  std::string kind = "trace";
  double sigma = 0.5;
  std::uint64_t n = 32;
  int d = 1;
  double theta = 0.1;
  std::string gammas;
  double alpha = 8;
  int m_max = 50;
  int m = 2;
  int k = 0;
  std::string mu_inf = "1";
  std::string f_one = "1";
};

int cmd_bounds(const Context& ctx, const BoundsArgs& args) {
  Artifact a = start_artifact(ctx, "bounds " + args.kind, std::nullopt);
  if (args.kind == "trace") {
    const auto b = neumann_trace_bound(args.sigma, args.n);
    auto& t = a.add_table("trace", {"sigma", "N", "k", "bound", "log_bound"});
    t.add_row({args.sigma, static_cast<std::int64_t>(args.n), std::int64_t{b.k}, b.bound, b.log_bound});
  } else if (args.kind == "bandlimited") {
    const auto b = bandlimited_bound(args.d, args.theta, args.n);
    auto& t = a.add_table("bandlimited", {"d", "theta", "N", "k", "bound", "log_bound"});
    t.add_row({std::int64_t{args.d}, args.theta, static_cast<std::int64_t>(args.n), std::int64_t{b.k}, b.bound,
               b.log_bound});
  } else if (args.kind == "general") {
    std::vector<double> gammas;
    std::stringstream in(args.gammas);
    std::string field;
    while (std::getline(in, field, ',')) {
      gammas.push_back(parse_double(field));
    }
    const auto b = general_bound(gammas, args.n);
    auto& t = a.add_table("general", {"N", "cut", "k_star", "bound", "two_term_at_k_star"});
    t.add_row({static_cast<std::int64_t>(args.n), std::int64_t{b.cut}, std::int64_t{b.k_star}, b.bound,
               two_term_bound(gammas, args.n, b.k_star)});
  } else if (args.kind == "linconv") {
    auto& t = a.add_table("linconv", {"m", "N", "gamma_ratio", "threshold", "holds"});
    const double threshold = std::exp(-0.25) * std::exp(-1.0 / args.alpha);
    for (int m = 1; m <= args.m_max; ++m) {
      const double n = std::ceil(std::max(args.alpha * m * m, m + 1.0));
      t.add_row({std::int64_t{m}, static_cast<std::int64_t>(n), gamma_ratio(m, n), threshold,
                 std::string(linear_regime_check(m, args.alpha) ? "true" : "false")});
    }
  } else if (args.kind == "opnorm") {
    auto& t = a.add_table("opnorm", {"m", "N", "closed_form", "direct"});
    const auto closed = one_norm_id_minus_S<Rational>(args.m, args.n);
    Cell direct = std::string("");
    if (args.m <= kDefaultMaxOrder) {
      direct = to_string(one_norm_direct<Rational>(SamplingOperator(args.m, args.n)));
    }
    t.add_row({std::int64_t{args.m}, static_cast<std::int64_t>(args.n), to_string(closed), direct});
  } else if (args.kind == "bias") {
    const Rational mu = parse_rational(args.mu_inf);
    const Rational fo = parse_rational(args.f_one);
    const auto b = bias_bound<Rational>(args.m, args.n, args.k, mu, fo);
    auto& t = a.add_table("bias_bound", {"m", "N", "k", "bound", "bound_decimal", "as_printed"});
    t.add_row({std::int64_t{args.m}, static_cast<std::int64_t>(args.n), std::int64_t{args.k}, to_string(b), decimal(b),
               to_string(bias_bound_as_printed<Rational>(args.m, args.n, mu))});
  } else {
    throw ParseError("unknown bounds kind \"" + args.kind + "\" (trace, bandlimited, general, linconv, opnorm, bias)");
  }
  emit(ctx, a);
  return kExitOk;
}

// selftest --------------------------------------------------------------------

int cmd_selftest() {
  const auto results = run_selftest(true, [](const CheckResult& r) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    if (!r.passed) {
      std::cout << ": " << r.detail;
    }
    std::cout << '\n';
  });
  for (const auto& r : results) {
    if (!r.passed) {
      std::cerr << "selftest failed: " << r.name << '\n';
      return kExitSelftest;
    }
  }
  std::cout << "selftest passed (" << results.size() << " checks)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated bootstrap bias correction on the partition lattice"};
  app.set_version_flag("--version", std::string(LATBOOT_VERSION));
  app.require_subcommand(1);

  Context ctx;
  for (int i = 0; i < argc; ++i) {
    ctx.command_line += (i ? " " : "") + std::string(argv[i]);
  }
  auto add_output = [&ctx](CLI::App* sub) {
    sub->add_option("-o,--out", ctx.out.path, "Output file ('-' for stdout)");
    sub->add_option("--format", ctx.out.format, "csv or json (default: from extension, else csv)")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  LatticeArgs lattice;
  auto* lattice_cmd = app.add_subcommand("lattice", "Partitions, Hasse edges, zeta and Mobius matrices");
  lattice_cmd->add_option("-m,--m", lattice.m, "Lattice order")->required();
  add_output(lattice_cmd);

  SmatrixArgs smatrix;
  auto* smatrix_cmd = app.add_subcommand("smatrix", "Sampling matrix S (or the reduced matrix) with R, C");
  smatrix_cmd->add_option("-m,--m", smatrix.m, "Lattice order")->required();
  smatrix_cmd->add_option("-n,--n", smatrix.n, "Sample size N")->required()->check(CLI::PositiveNumber);
  smatrix_cmd->add_flag("--reduced", smatrix.reduced, "Emit the m x m level-sum matrix instead");
  add_output(smatrix_cmd);

  BiasArgs bias;
  auto* bias_cmd = app.add_subcommand("bias", "Exact bias trajectory and bounds against a population");
  bias_cmd->add_option("--functional", bias.functional, "Functional JSON path, or 'variance'")->required();
  bias_cmd->add_option("--population", bias.population, "Population JSON path")->required();
  bias_cmd->add_option("-n,--n", bias.n, "Sample size N")->required()->check(CLI::PositiveNumber);
  bias_cmd->add_option("-k,--k", bias.k, "Iterations (k_max, or schedule length)");
  bias_cmd->add_option("--schedule", bias.schedule, "stationary, default, unit or custom");
  bias_cmd->add_option("--etas", bias.etas, "Custom step sizes, comma separated");
  add_output(bias_cmd);

  DebiasArgs debias;
  auto* debias_cmd = app.add_subcommand("debias", "Write the coefficients of the corrected functional as JSON");
  debias_cmd->add_option("--functional", debias.functional, "Functional JSON path, or 'variance'")->required();
  debias_cmd->add_option("-n,--n", debias.n, "Sample size N")->required()->check(CLI::PositiveNumber);
  debias_cmd->add_option("-k,--k", debias.k, "Iterations (or schedule length)");
  debias_cmd->add_option("--schedule", debias.schedule, "stationary, default, unit or custom");
  debias_cmd->add_option("--etas", debias.etas, "Custom step sizes, comma separated");
  debias_cmd->add_option("-o,--out", ctx.out.path, "Output file ('-' for stdout)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc-run", "Monte Carlo (or exhaustive) resampling estimates");
  mc_cmd->alias("mc");
  mc_cmd->add_option("--functional", mc.functional, "Functional JSON path, or 'variance'")->required();
  auto* data_opt = mc_cmd->add_option("--data", mc.data, "Dataset CSV (X^1)");
  auto* pop_opt = mc_cmd->add_option("--population", mc.population, "Population JSON (draws X^1)");
  data_opt->excludes(pop_opt);
  mc_cmd->add_option("-n,--n", mc.n, "Sample size N (population mode)")->check(CLI::PositiveNumber);
  mc_cmd->add_option("-k,--k", mc.k, "Iterations (or schedule length)");
  mc_cmd->add_option("--schedule", mc.schedule, "stationary, default, unit or custom");
  mc_cmd->add_option("--etas", mc.etas, "Custom step sizes, comma separated");
  mc_cmd->add_option("--replicas", mc.replicas, "Replica count")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", mc.seed, "RNG seed");
  mc_cmd->add_option("--threads", mc.threads, "Worker threads (0: all cores)");
  mc_cmd->add_flag("--exhaustive", mc.exhaustive, "Enumerate every chain exactly (N <= 4)");
  mc_cmd->add_flag("--resample-first", mc.resample_first, "Draw X^1 from the data instead of using it");
  add_output(mc_cmd);

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Step counts and bias bounds");
  bounds_cmd->add_option("--kind", bounds.kind, "trace, bandlimited, general, linconv, opnorm or bias")
      ->check(CLI::IsMember({"trace", "bandlimited", "general", "linconv", "opnorm", "bias"}));
  bounds_cmd->add_option("--sigma", bounds.sigma, "Spectral bound sigma (trace)");
  bounds_cmd->add_option("-n,--n", bounds.n, "Sample size N")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("-d,--d", bounds.d, "Dimension d (bandlimited)");
  bounds_cmd->add_option("--theta", bounds.theta, "Sub-Gaussian constant theta (bandlimited)");
  bounds_cmd->add_option("--gammas", bounds.gammas, "gamma_0..gamma_M, comma separated (general)");
  bounds_cmd->add_option("--alpha", bounds.alpha, "alpha (linconv)");
  bounds_cmd->add_option("--m-max", bounds.m_max, "Largest m in the sweep (linconv)");
  bounds_cmd->add_option("-m,--m", bounds.m, "Order m (opnorm, bias)");
  bounds_cmd->add_option("-k,--k", bounds.k, "Iterations k (bias)");
  bounds_cmd->add_option("--mu-inf", bounds.mu_inf, "max |mu_pi| (bias)");
  bounds_cmd->add_option("--f-one", bounds.f_one, "||f||_1 (bias)");
  add_output(bounds_cmd);

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the exact invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (lattice_cmd->parsed()) {
      return cmd_lattice(ctx, lattice);
    }
    if (smatrix_cmd->parsed()) {
      return cmd_smatrix(ctx, smatrix);
    }
    if (bias_cmd->parsed()) {
      return cmd_bias(ctx, bias);
    }
    if (debias_cmd->parsed()) {
      return cmd_debias(ctx, debias);
    }
    if (mc_cmd->parsed()) {
      return cmd_mc(ctx, mc);
    }
    if (bounds_cmd->parsed()) {
      return cmd_bounds(ctx, bounds);
    }
    if (selftest_cmd->parsed()) {
      return cmd_selftest();
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "latboot: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SizeError& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingMomentError& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "latboot: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitUsage;
}
