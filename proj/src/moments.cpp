#include "latboot/moments.hpp"

#include <sstream>

namespace latboot {

namespace {

bool block_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    return a.size() < b.size();
  }
  return a < b;
}

}  // namespace

LabeledTerm::LabeledTerm(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  for (auto& block : blocks_) {
    if (block.empty()) {
      throw DomainError("moment product blocks must be nonempty");
    }
    for (int l : block) {
      if (l < 0) {
        throw DimensionError("negative variable index in moment product");
      }
    }
    std::sort(block.begin(), block.end());
    order_ += static_cast<int>(block.size());
  }
  std::sort(blocks_.begin(), blocks_.end(), block_less);
}

LabeledTerm::LabeledTerm(const Partition& positions, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != positions.size()) {
    throw DimensionError("labeled term needs one label per position");
  }
  std::vector<std::vector<int>> blocks;
  for (const auto& block : positions.blocks()) {
    std::vector<int> content;
    for (int p : block) {
      content.push_back(labels[static_cast<std::size_t>(p)]);
    }
    blocks.push_back(std::move(content));
  }
  *this = LabeledTerm(std::move(blocks));
}

int LabeledTerm::max_label() const {
  int best = -1;
  for (const auto& block : blocks_) {
    best = std::max(best, block.back());
  }
  return best;
}

Partition LabeledTerm::positions() const {
  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(order_));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    owner.insert(owner.end(), blocks_[b].size(), static_cast<int>(b));
  }
  return Partition::from_labels(owner);
}

std::vector<int> LabeledTerm::labels() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(order_));
  for (const auto& block : blocks_) {
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::string LabeledTerm::to_string() const {
  if (blocks_.empty()) {
    return "1";
  }
  std::ostringstream os;
  for (const auto& block : blocks_) {
    os << '(';
    for (std::size_t i = 0; i < block.size(); ++i) {
      os << (i ? " x" : "x") << block[i];
    }
    os << ')';
  }
  return os.str();
}

LabeledTerm lattice_term(const Partition& pi) { return LabeledTerm(pi.blocks()); }

Partition lattice_partition(const LabeledTerm& term) {
  std::vector<int> owner(static_cast<std::size_t>(term.order()), -1);
  for (std::size_t b = 0; b < term.blocks().size(); ++b) {
    for (int l : term.blocks()[b]) {
      if (l >= term.order() || owner[static_cast<std::size_t>(l)] != -1) {
        throw DimensionError("term " + term.to_string() + " is not a lattice term over distinct variables 0.." +
                             std::to_string(term.order() - 1));
      }
      owner[static_cast<std::size_t>(l)] = static_cast<int>(b);
    }
  }
  return Partition::from_labels(owner);
}

LabeledTerm merge_term(const LabeledTerm& term, const Partition& merge) {
  if (merge.size() != term.block_count()) {
    throw DimensionError("merge pattern must partition the block set of " + term.to_string());
  }
  std::vector<std::vector<int>> merged(static_cast<std::size_t>(merge.block_count()));
  for (int b = 0; b < term.block_count(); ++b) {
    auto& target = merged[static_cast<std::size_t>(merge.block_of(b))];
    const auto& block = term.blocks()[static_cast<std::size_t>(b)];
    target.insert(target.end(), block.begin(), block.end());
  }
  return LabeledTerm(std::move(merged));
}

}  // namespace latboot
