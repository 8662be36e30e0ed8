#include "latboot/combinatorics.hpp"

static_assert(sizeof(unsigned long) == 8, "GMP ui entry points are used for 64-bit counts");

namespace latboot {

std::vector<BigInt> stirling2_row(unsigned j) {
  std::vector<BigInt> row{1};
  for (unsigned n = 1; n <= j; ++n) {
    std::vector<BigInt> next(n + 1, 0);
    for (unsigned k = 1; k <= n; ++k) {
      next[k] = (k < row.size() ? BigInt(k * row[k]) : BigInt(0)) + row[k - 1];
    }
    row = std::move(next);
  }
  return row;
}

BigInt stirling2(unsigned j, unsigned i) {
  if (i > j) {
    return 0;
  }
  return stirling2_row(j)[i];
}

BigInt bell(unsigned m) {
  BigInt total = 0;
  for (const auto& s : stirling2_row(m)) {
    total += s;
  }
  return total;
}

BigInt falling_factorial(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    return 0;
  }
  BigInt result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result *= static_cast<unsigned long>(n - i);
  }
  return result;
}

BigInt power(std::uint64_t base, std::uint64_t exponent) {
  BigInt result;
  mpz_ui_pow_ui(result.get_mpz_t(), base, exponent);
  return result;
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  BigInt result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

}  // namespace latboot
