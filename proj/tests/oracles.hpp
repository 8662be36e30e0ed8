#pragma once

// Brute-force reference implementations. Deliberately naive and independent
// of the library's data structures: set partitions are sets of sets, counts
// come from explicit enumeration.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Blocks = std::set<std::set<int>>;

inline std::vector<Blocks> set_partitions(int m) {
  std::vector<std::vector<std::set<int>>> acc{{}};
  for (int x = 0; x < m; ++x) {
    std::vector<std::vector<std::set<int>>> next;
    for (const auto& p : acc) {
      for (std::size_t b = 0; b < p.size(); ++b) {
        auto q = p;
        q[b].insert(x);
        next.push_back(q);
      }
      auto q = p;
      q.push_back({x});
      next.push_back(q);
    }
    acc = std::move(next);
  }
  std::vector<Blocks> out;
  for (const auto& p : acc) {
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

/// Every block of fine lies inside some block of coarse.
inline bool finer_or_equal(const Blocks& fine, const Blocks& coarse) {
  for (const auto& b : fine) {
    bool inside = false;
    for (const auto& c : coarse) {
      if (std::includes(c.begin(), c.end(), b.begin(), b.end())) {
        inside = true;
        break;
      }
    }
    if (!inside) {
      return false;
    }
  }
  return true;
}

inline mpz_class factorial(long n) {
  mpz_class f = 1;
  for (long i = 2; i <= n; ++i) {
    f *= i;
  }
  return f;
}

/// Mobius function of [fine, coarse]: prod over blocks of coarse of
/// (-1)^(k-1) (k-1)!, k = number of blocks of fine inside it.
inline mpz_class mobius(const Blocks& fine, const Blocks& coarse) {
  if (!finer_or_equal(fine, coarse)) {
    return 0;
  }
  mpz_class out = 1;
  for (const auto& c : coarse) {
    long k = 0;
    for (const auto& b : fine) {
      if (std::includes(c.begin(), c.end(), b.begin(), b.end())) {
        ++k;
      }
    }
    out *= factorial(k - 1);
    if ((k - 1) % 2 == 1) {
      out = -out;
    }
  }
  return out;
}

/// Bell numbers from the Bell triangle.
inline mpz_class bell(int m) {
  std::vector<mpz_class> row{1};
  for (int i = 0; i < m; ++i) {
    std::vector<mpz_class> next{row.back()};
    for (const auto& v : row) {
      next.push_back(next.back() + v);
    }
    row = std::move(next);
  }
  return row.front();
}

/// S(j, i) = (1/i!) sum_t (-1)^t binom(i, t) (i - t)^j.
inline mpz_class stirling2(int j, int i) {
  if (i < 0 || i > j) {
    return 0;
  }
  if (j == 0) {
    return i == 0 ? 1 : 0;
  }
  mpz_class total = 0;
  for (int t = 0; t <= i; ++t) {
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(i), static_cast<unsigned long>(t));
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(i - t), static_cast<unsigned long>(j));
    total += (t % 2 ? -1 : 1) * binom * p;
  }
  return total / factorial(i);
}

inline mpz_class falling(long n, long k) {
  mpz_class out = 1;
  for (long i = 0; i < k; ++i) {
    out *= (n - i);
  }
  return k > n ? mpz_class(0) : out;
}

/// Partition of positions obtained from sigma by merging blocks that are sent
/// to the same row by `rows` (rows[b] for block b in iteration order).
inline Blocks merge_by_rows(const Blocks& sigma, const std::vector<int>& rows) {
  std::map<int, std::set<int>> merged;
  std::size_t b = 0;
  for (const auto& block : sigma) {
    merged[rows[b++]].insert(block.begin(), block.end());
  }
  Blocks out;
  for (auto& [r, s] : merged) {
    out.insert(s);
  }
  return out;
}

/// S(pi, sigma) as the probability that a uniform map blocks(sigma) -> [N]
/// identifies exactly the blocks that pi merges; by enumerating all N^#sigma maps.
inline mpq_class sampling_entry(const Blocks& pi, const Blocks& sigma, int n) {
  const int k = static_cast<int>(sigma.size());
  std::vector<int> rows(static_cast<std::size_t>(k), 0);
  long hits = 0;
  long total = 0;
  while (true) {
    ++total;
    if (merge_by_rows(sigma, rows) == pi) {
      ++hits;
    }
    int pos = 0;
    while (pos < k && ++rows[static_cast<std::size_t>(pos)] == n) {
      rows[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == k) {
      break;
    }
  }
  mpq_class q(hits, total);
  q.canonicalize();
  return q;
}

inline mpq_class random_rational(std::mt19937_64& rng, long range = 9) {
  std::uniform_int_distribution<long> num(-range, range);
  std::uniform_int_distribution<long> den(1, range);
  mpq_class q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

/// Plug-in moment on explicit rows: (1/N) sum_r prod_{l in labels} x[r][l].
inline mpq_class plug_in_moment(const std::vector<std::vector<mpq_class>>& rows, const std::vector<int>& labels) {
  mpq_class total = 0;
  for (const auto& r : rows) {
    mpq_class p = 1;
    for (int l : labels) {
      p *= r[static_cast<std::size_t>(l)];
    }
    total += p;
  }
  return total / static_cast<long>(rows.size());
}

/// Unbiased symmetric statistic by enumerating all injective block -> row maps.
inline mpq_class injective_average(const std::vector<std::vector<mpq_class>>& rows,
                                   const std::vector<std::vector<int>>& blocks) {
  const int n = static_cast<int>(rows.size());
  const int k = static_cast<int>(blocks.size());
  std::vector<int> assign(static_cast<std::size_t>(k), 0);
  mpq_class total = 0;
  long count = 0;
  while (true) {
    std::set<int> distinct(assign.begin(), assign.end());
    if (static_cast<int>(distinct.size()) == k) {
      mpq_class p = 1;
      for (int b = 0; b < k; ++b) {
        for (int l : blocks[static_cast<std::size_t>(b)]) {
          p *= rows[static_cast<std::size_t>(assign[static_cast<std::size_t>(b)])][static_cast<std::size_t>(l)];
        }
      }
      total += p;
      ++count;
    }
    int pos = 0;
    while (pos < k && ++assign[static_cast<std::size_t>(pos)] == n) {
      assign[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == k) {
      break;
    }
  }
  return total / count;
}

}  // namespace oracle
