#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latboot/combinatorics.hpp"

namespace latboot {

/// Default cap on the lattice order m for enumeration (Bell(10) = 115975).
inline constexpr int kDefaultMaxOrder = 10;

/// Dense Bell(m) x Bell(m) matrices are only built up to this order; beyond it
/// the sparse coarsening tables in resampling.hpp are the only route.
inline constexpr int kDefaultDenseMaxOrder = 7;

/// A set partition of positions {0..m-1}, stored as its restricted-growth
/// string: position i carries the index of its block, blocks numbered by
/// first appearance. The empty partition (m = 0) is the constant term.
class Partition {
 public:
  Partition() = default;

  /// Validates that `rgs` is a restricted-growth string.
  static Partition from_rgs(std::vector<std::uint8_t> rgs);

  /// Canonicalizes an arbitrary block labelling of positions.
  static Partition from_labels(std::span<const int> block_of_position);

  static Partition finest(int m);
  static Partition coarsest(int m);

  /// Parses "13|2|4": blocks joined by '|', 1-based elements ascending inside
  /// a block, blocks sorted by least element. For m >= 10 elements inside a
  /// block are separated by ','.
  static Partition parse(std::string_view text);

  int size() const { return static_cast<int>(rgs_.size()); }
  int block_count() const { return blocks_; }
  std::span<const std::uint8_t> rgs() const { return rgs_; }
  int block_of(int position) const { return rgs_[static_cast<std::size_t>(position)]; }

  /// Blocks as sorted 0-based position lists, ordered by least element.
  std::vector<std::vector<int>> blocks() const;

  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.rgs_ <=> b.rgs_; }

 private:
  explicit Partition(std::vector<std::uint8_t> rgs);

  std::vector<std::uint8_t> rgs_;
  int blocks_ = 0;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const noexcept;
};

/// True iff every block of `sigma` lies inside a block of `pi` (sigma <= pi).
bool refines(const Partition& sigma, const Partition& pi);

/// All restricted-growth strings of length m, lexicographic.
std::vector<Partition> all_partitions_lex(int m);

/// All coarsenings of `pi` (pi itself included), obtained by merging its blocks
/// along every partition of the block set. Count is Bell(#pi).
std::vector<Partition> coarsenings(const Partition& pi);

/// Merges the blocks of `pi` according to `merge`, a partition of its block set.
Partition merge_blocks(const Partition& pi, const Partition& merge);

/// Pi(m) in canonical order: decreasing block count, ties broken
/// lexicographically on the restricted-growth string. Finest first, coarsest
/// last; a linear extension of refinement.
class LatticeIndex {
 public:
  LatticeIndex(int m, int max_order = kDefaultMaxOrder);

  int order() const { return m_; }
  std::size_t size() const { return elements_.size(); }
  const Partition& operator[](std::size_t i) const { return elements_[i]; }
  std::span<const Partition> elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  /// Ordinal of `p`; DimensionError if p is not over the same m.
  std::size_t position(const Partition& p) const;

  /// Half-open ordinal range holding the partitions with `blocks` blocks.
  std::pair<std::size_t, std::size_t> level_range(int blocks) const;

 private:
  int m_;
  std::vector<Partition> elements_;
  std::unordered_map<Partition, std::size_t, PartitionHash> lookup_;
  std::vector<std::size_t> level_start_;
};

LatticeIndex enumerate_partitions(int m, int max_order = kDefaultMaxOrder);

/// For each ordinal, the ordinals of its coarsenings (itself included), ascending.
std::vector<std::vector<std::uint32_t>> coarsening_table(const LatticeIndex& index);

/// Cover relations (finer, coarser) as ordinals: coarser merges exactly two
/// blocks of finer.
std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(const LatticeIndex& index);

enum class IncidenceKind { zeta, mobius };

/// Dense integer incidence matrix over a LatticeIndex. Zeta: entry(sigma, pi) = 1
/// iff pi <= sigma, so the coarsest row is all ones. Mobius: its exact inverse.
class IncidenceMatrix {
 public:
  IncidenceMatrix(IncidenceKind kind, int m, std::size_t n, std::vector<std::int64_t> entries);

  IncidenceKind kind() const { return kind_; }
  int order() const { return m_; }
  std::size_t size() const { return n_; }
  std::int64_t operator()(std::size_t row, std::size_t col) const { return entries_[row * n_ + col]; }
  std::span<const std::int64_t> row(std::size_t r) const {
    return std::span<const std::int64_t>(entries_).subspan(r * n_, n_);
  }

 private:
  IncidenceKind kind_;
  int m_;
  std::size_t n_;
  std::vector<std::int64_t> entries_;
};

IncidenceMatrix zeta_matrix(const LatticeIndex& index, int dense_max_order = kDefaultDenseMaxOrder);

/// Exact inverse of the zeta matrix by forward substitution in integers.
IncidenceMatrix mobius_matrix(const LatticeIndex& index, int dense_max_order = kDefaultDenseMaxOrder);

IncidenceMatrix zeta_matrix(int m);
IncidenceMatrix mobius_matrix(int m);

/// Throws SizeError naming Bell(m) when m is outside [1, cap].
void check_order(int m, int cap, std::string_view what);

}  // namespace latboot
