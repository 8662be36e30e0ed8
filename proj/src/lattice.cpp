#include "latboot/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "latboot/errors.hpp"

namespace latboot {

namespace {

// Renumber block labels by first appearance.
std::vector<std::uint8_t> canonical_rgs(std::span<const int> labels) {
  std::map<int, std::uint8_t> renumber;
  std::vector<std::uint8_t> rgs;
  rgs.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = renumber.try_emplace(label, static_cast<std::uint8_t>(renumber.size()));
    rgs.push_back(it->second);
  }
  return rgs;
}

void append_lex(std::vector<std::uint8_t>& prefix, int m, int max_used, std::vector<Partition>& out) {
  if (static_cast<int>(prefix.size()) == m) {
    out.push_back(Partition::from_rgs(prefix));
    return;
  }
  for (int v = 0; v <= max_used + 1; ++v) {
    prefix.push_back(static_cast<std::uint8_t>(v));
    append_lex(prefix, m, std::max(max_used, v), out);
    prefix.pop_back();
  }
}

std::optional<std::vector<std::vector<int>>> split_blocks(std::string_view text, bool whole_numbers) {
  std::vector<std::vector<int>> blocks;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t bar = text.find('|', start);
    std::string_view block = text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    if (block.empty()) {
      return std::nullopt;
    }
    std::vector<int> elements;
    if (whole_numbers || block.find(',') != std::string_view::npos) {
      std::size_t pos = 0;
      while (pos <= block.size()) {
        std::size_t comma = block.find(',', pos);
        std::string_view item = block.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        int value = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
          return std::nullopt;
        }
        elements.push_back(value);
        if (comma == std::string_view::npos) {
          break;
        }
        pos = comma + 1;
      }
    } else {
      for (char c : block) {
        if (c < '0' || c > '9') {
          return std::nullopt;
        }
        elements.push_back(c - '0');
      }
    }
    blocks.push_back(std::move(elements));
    if (bar == std::string_view::npos) {
      break;
    }
    start = bar + 1;
  }
  return blocks;
}

// Enforces the strict text format: ascending elements, blocks by least
// element, exact cover of 1..m.
std::optional<Partition> validate_blocks(const std::vector<std::vector<int>>& blocks) {
  int m = 0;
  for (const auto& b : blocks) {
    m += static_cast<int>(b.size());
  }
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  int previous_least = 0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    if (!std::is_sorted(b.begin(), b.end()) || std::adjacent_find(b.begin(), b.end()) != b.end()) {
      return std::nullopt;
    }
    if (b.front() <= previous_least) {
      return std::nullopt;
    }
    previous_least = b.front();
    for (int e : b) {
      if (e < 1 || e > m || owner[static_cast<std::size_t>(e - 1)] != -1) {
        return std::nullopt;
      }
      owner[static_cast<std::size_t>(e - 1)] = static_cast<int>(bi);
    }
  }
  return Partition::from_labels(owner);
}

}  // namespace

Partition::Partition(std::vector<std::uint8_t> rgs) : rgs_(std::move(rgs)) {
  for (auto v : rgs_) {
    blocks_ = std::max(blocks_, v + 1);
  }
}

Partition Partition::from_rgs(std::vector<std::uint8_t> rgs) {
  int next = 0;
  for (auto v : rgs) {
    if (v > next) {
      throw DomainError("not a restricted-growth string");
    }
    if (v == next) {
      ++next;
    }
  }
  return Partition(std::move(rgs));
}

Partition Partition::from_labels(std::span<const int> block_of_position) {
  return Partition(canonical_rgs(block_of_position));
}

Partition Partition::finest(int m) {
  std::vector<std::uint8_t> rgs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    rgs[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  }
  return Partition(std::move(rgs));
}

Partition Partition::coarsest(int m) { return Partition(std::vector<std::uint8_t>(static_cast<std::size_t>(m), 0)); }

Partition Partition::parse(std::string_view text) {
  if (text.empty()) {
    throw ParseError("empty partition text");
  }
  for (bool whole : {false, true}) {
    if (auto blocks = split_blocks(text, whole)) {
      if (auto p = validate_blocks(*blocks)) {
        return *p;
      }
    }
  }
  throw ParseError("malformed partition text '" + std::string(text) + "'");
}

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(blocks_));
  for (int i = 0; i < size(); ++i) {
    out[rgs_[static_cast<std::size_t>(i)]].push_back(i);
  }
  return out;
}

std::string Partition::to_string() const {
  const bool separated = size() >= 10;
  std::ostringstream os;
  bool first_block = true;
  for (const auto& block : blocks()) {
    if (!first_block) {
      os << '|';
    }
    first_block = false;
    bool first = true;
    for (int e : block) {
      if (separated && !first) {
        os << ',';
      }
      first = false;
      os << e + 1;
    }
  }
  return os.str();
}

std::size_t PartitionHash::operator()(const Partition& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto v : p.rgs()) {
    h = (h ^ v) * 1099511628211ull;
  }
  return h ^ static_cast<std::size_t>(p.size());
}

bool refines(const Partition& sigma, const Partition& pi) {
  if (sigma.size() != pi.size()) {
    throw DimensionError("refines: partitions over " + std::to_string(sigma.size()) + " and " +
                         std::to_string(pi.size()) + " positions");
  }
  std::vector<int> image(static_cast<std::size_t>(sigma.block_count()), -1);
  for (int i = 0; i < sigma.size(); ++i) {
    int& target = image[static_cast<std::size_t>(sigma.block_of(i))];
    if (target == -1) {
      target = pi.block_of(i);
    } else if (target != pi.block_of(i)) {
      return false;
    }
  }
  return true;
}

std::vector<Partition> all_partitions_lex(int m) {
  std::vector<Partition> out;
  if (m <= 0) {
    out.emplace_back();
    return out;
  }
  std::vector<std::uint8_t> prefix{0};
  append_lex(prefix, m, 0, out);
  return out;
}

Partition merge_blocks(const Partition& pi, const Partition& merge) {
  if (merge.size() != pi.block_count()) {
    throw DimensionError("merge_blocks: merge pattern must partition the block set");
  }
  std::vector<std::uint8_t> rgs(pi.rgs().begin(), pi.rgs().end());
  for (auto& v : rgs) {
    v = merge.rgs()[v];
  }
  // Blocks of pi are numbered by first appearance and `merge` is itself a
  // restricted-growth string, so the composition is already canonical.
  return Partition::from_rgs(std::move(rgs));
}

std::vector<Partition> coarsenings(const Partition& pi) {
  std::vector<Partition> out;
  for (const auto& merge : all_partitions_lex(pi.block_count())) {
    out.push_back(merge_blocks(pi, merge));
  }
  return out;
}

void check_order(int m, int cap, std::string_view what) {
  if (m >= 1 && m <= cap) {
    return;
  }
  std::ostringstream os;
  os << what << ": order m = " << m << " is outside [1, " << cap << "]";
  if (m >= 1 && m <= 64) {
    os << " (Bell(" << m << ") = " << bell(static_cast<unsigned>(m)).get_str() << " partitions)";
  }
  throw SizeError(os.str());
}

LatticeIndex::LatticeIndex(int m, int max_order) : m_(m) {
  check_order(m, max_order, "enumerate_partitions");
  elements_ = all_partitions_lex(m);
  std::stable_sort(elements_.begin(), elements_.end(),
                   [](const Partition& a, const Partition& b) { return a.block_count() > b.block_count(); });
  lookup_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    lookup_.emplace(elements_[i], i);
  }
  // level_start_[b] is the first ordinal with b blocks; level b ends where b+1 starts
  // in reverse, so store boundaries for b = m..1.
  level_start_.assign(static_cast<std::size_t>(m) + 2, elements_.size());
  for (std::size_t i = elements_.size(); i-- > 0;) {
    level_start_[static_cast<std::size_t>(elements_[i].block_count())] = i;
  }
}

std::size_t LatticeIndex::position(const Partition& p) const {
  if (p.size() != m_) {
    throw DimensionError("partition over " + std::to_string(p.size()) + " positions looked up in Pi(" +
                         std::to_string(m_) + ")");
  }
  return lookup_.at(p);
}

std::pair<std::size_t, std::size_t> LatticeIndex::level_range(int blocks) const {
  if (blocks < 1 || blocks > m_) {
    return {0, 0};
  }
  std::size_t begin = level_start_[static_cast<std::size_t>(blocks)];
  std::size_t end = blocks == 1 ? elements_.size() : level_start_[static_cast<std::size_t>(blocks - 1)];
  return {begin, end};
}

LatticeIndex enumerate_partitions(int m, int max_order) { return LatticeIndex(m, max_order); }

std::vector<std::vector<std::uint32_t>> coarsening_table(const LatticeIndex& index) {
  std::vector<std::vector<Partition>> merges(static_cast<std::size_t>(index.order()) + 1);
  for (int k = 1; k <= index.order(); ++k) {
    merges[static_cast<std::size_t>(k)] = all_partitions_lex(k);
  }
  std::vector<std::vector<std::uint32_t>> table(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Partition& pi = index[i];
    auto& row = table[i];
    const auto& patterns = merges[static_cast<std::size_t>(pi.block_count())];
    row.reserve(patterns.size());
    for (const auto& merge : patterns) {
      row.push_back(static_cast<std::uint32_t>(index.position(merge_blocks(pi, merge))));
    }
    std::sort(row.begin(), row.end());
  }
  return table;
}

std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(const LatticeIndex& index) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Partition& pi = index[i];
    const int k = pi.block_count();
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        std::vector<int> labels(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
          labels[static_cast<std::size_t>(c)] = c == b ? a : c;
        }
        edges.emplace_back(i, index.position(merge_blocks(pi, Partition::from_labels(labels))));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

IncidenceMatrix::IncidenceMatrix(IncidenceKind kind, int m, std::size_t n, std::vector<std::int64_t> entries)
    : kind_(kind), m_(m), n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) {
    throw DimensionError("incidence matrix entry count does not match its size");
  }
}

IncidenceMatrix zeta_matrix(const LatticeIndex& index, int dense_max_order) {
  check_order(index.order(), dense_max_order, "zeta_matrix (dense)");
  const std::size_t n = index.size();
  std::vector<std::int64_t> entries(n * n, 0);
  const auto table = coarsening_table(index);
  for (std::size_t pi = 0; pi < n; ++pi) {
    for (auto sigma : table[pi]) {
      entries[sigma * n + pi] = 1;
    }
  }
  return IncidenceMatrix(IncidenceKind::zeta, index.order(), n, std::move(entries));
}

IncidenceMatrix mobius_matrix(const LatticeIndex& index, int dense_max_order) {
  check_order(index.order(), dense_max_order, "mobius_matrix (dense)");
  const std::size_t n = index.size();
  const auto up = coarsening_table(index);
  // down[sigma] lists every rho <= sigma; zeta row sigma is the indicator of it.
  std::vector<std::vector<std::uint32_t>> down(n);
  for (std::size_t rho = 0; rho < n; ++rho) {
    for (auto sigma : up[rho]) {
      down[sigma].push_back(static_cast<std::uint32_t>(rho));
    }
  }
  // zeta * M = I, solved column by column; column tau is supported on the up-set of tau.
  std::vector<std::int64_t> entries(n * n, 0);
  for (std::size_t tau = 0; tau < n; ++tau) {
    for (auto sigma : up[tau]) {
      std::int64_t acc = sigma == tau ? 1 : 0;
      for (auto rho : down[sigma]) {
        if (rho != sigma) {
          acc -= entries[rho * n + tau];
        }
      }
      entries[sigma * n + tau] = acc;
    }
  }
  return IncidenceMatrix(IncidenceKind::mobius, index.order(), n, std::move(entries));
}

IncidenceMatrix zeta_matrix(int m) { return zeta_matrix(LatticeIndex(m)); }
IncidenceMatrix mobius_matrix(int m) { return mobius_matrix(LatticeIndex(m)); }

}  // namespace latboot
