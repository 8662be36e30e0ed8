#pragma once

#include <cstdint>
#include <vector>

#include "latboot/scalar.hpp"

namespace latboot {

/// Number of set partitions of an m-element set.
BigInt bell(unsigned m);

/// Stirling number of the second kind: partitions of j objects into i nonempty blocks.
BigInt stirling2(unsigned j, unsigned i);

/// N (N-1) ... (N-k+1). Zero when k > N; one when k = 0.
BigInt falling_factorial(std::uint64_t n, std::uint64_t k);

BigInt power(std::uint64_t base, std::uint64_t exponent);

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Row j of the Stirling triangle: entries stirling2(j, 0..j).
std::vector<BigInt> stirling2_row(unsigned j);

}  // namespace latboot
