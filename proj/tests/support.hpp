#pragma once

#include <random>
#include <vector>

#include "latboot/lattice.hpp"
#include "latboot/moments.hpp"
#include "latboot/resampling.hpp"
#include "oracles.hpp"

namespace support {

inline oracle::Blocks to_blocks(const latboot::Partition& p) {
  oracle::Blocks out;
  for (const auto& b : p.blocks()) {
    out.insert(std::set<int>(b.begin(), b.end()));
  }
  return out;
}

inline latboot::Partition from_blocks(const oracle::Blocks& blocks, int m) {
  std::vector<int> label(static_cast<std::size_t>(m), -1);
  int b = 0;
  for (const auto& block : blocks) {
    for (int x : block) {
      label[static_cast<std::size_t>(x)] = b;
    }
    ++b;
  }
  return latboot::Partition::from_labels(label);
}

inline latboot::LatticeVector<latboot::Rational> random_vector(std::size_t n, std::mt19937_64& rng) {
  latboot::LatticeVector<latboot::Rational> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = oracle::random_rational(rng);
  }
  return v;
}

/// A few random labeled terms of order 1..max_order over d variables.
inline latboot::MomentPolynomial<latboot::Rational> random_functional(int d, int max_order, int terms,
                                                                      std::mt19937_64& rng) {
  latboot::MomentPolynomial<latboot::Rational> f(d);
  std::uniform_int_distribution<int> label(0, d - 1);
  std::uniform_int_distribution<int> order(1, max_order);
  for (int t = 0; t < terms; ++t) {
    const int m = order(rng);
    const auto parts = latboot::all_partitions_lex(m);
    std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (auto& l : labels) {
      l = label(rng);
    }
    f.add(latboot::LabeledTerm(parts[pick(rng)], labels), oracle::random_rational(rng));
  }
  return f;
}

inline std::vector<std::vector<latboot::Rational>> random_rows(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::vector<std::vector<latboot::Rational>> rows(n, std::vector<latboot::Rational>(d));
  for (auto& r : rows) {
    for (auto& v : r) {
      v = oracle::random_rational(rng, 5);
    }
  }
  return rows;
}

/// Plug-in value of a polynomial on explicit rows, computed term by term with
/// the oracle moment.
inline latboot::Rational oracle_evaluate(const latboot::MomentPolynomial<latboot::Rational>& f,
                                         const std::vector<std::vector<latboot::Rational>>& rows) {
  latboot::Rational total = 0;
  for (const auto& [term, c] : f.terms()) {
    latboot::Rational p = 1;
    for (const auto& block : term.blocks()) {
      p *= oracle::plug_in_moment(rows, block);
    }
    total += c * p;
  }
  return total;
}

/// Average of the plug-in value over all N^N resamples of the rows.
inline latboot::Rational oracle_resample_average(const latboot::MomentPolynomial<latboot::Rational>& f,
                                                 const std::vector<std::vector<latboot::Rational>>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> idx(n, 0);
  latboot::Rational total = 0;
  long count = 0;
  while (true) {
    std::vector<std::vector<latboot::Rational>> y;
    for (auto i : idx) {
      y.push_back(rows[i]);
    }
    total += oracle_evaluate(f, y);
    ++count;
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == n) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) {
      break;
    }
  }
  return total / count;
}

}  // namespace support
