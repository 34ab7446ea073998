#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlb {

/// Ordered labeled tree in Penn bracket form. Leaves are nodes without
/// children; inside a bracket they are written as bare tokens.
struct ConstituencyTree {
  std::string label;
  std::vector<ConstituencyTree> children;

  bool is_leaf() const { return children.empty(); }
  std::size_t node_count() const;
  std::size_t leaf_count() const;
  std::vector<std::string> leaves() const;

  friend bool operator==(const ConstituencyTree&, const ConstituencyTree&) = default;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Token-level Rouge-L F1.
double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

/// Parses `(LABEL child ...)`; errors carry the character offset.
ConstituencyTree parse_bracketed_tree(std::string_view text);

std::string serialize_tree(const ConstituencyTree& tree);

/// Zhang-Shasha ordered tree edit distance with unit insert, delete and
/// relabel costs.
std::size_t tree_edit_distance(const ConstituencyTree& a, const ConstituencyTree& b);

}  // namespace vlb
