#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlbridge/augment.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/embed.hpp"

namespace vlb {

struct SignificanceReport {
  std::string anchor_id;
  std::optional<std::vector<double>> s1;  // absent for single-word anchors
  std::vector<double> s2;                 // one per positive variant
};

/// s1[i] = 1 - cos(embed(c, Q), embed(c, Q without q_i)); both sides render
/// the prompt with index i. Requires J >= 2.
std::vector<double> compute_s1(const Embedder& embedder, const PromptContext& context, const TextSample& sample);

/// s2[i] = sum_{j != i} cos(e_i, e_j) p_j / sum_{j != i} p_j, and [1.0] for a
/// single variant. Falls back to uniform weights when the others carry no
/// probability mass.
std::vector<double> compute_s2(std::span<const EmbeddingVector> embeddings, std::span<const double> probs);
std::vector<double> compute_s2(const Embedder& embedder, const VariantSet& set);

SignificanceReport compute_significance(const Embedder& embedder, const PromptContext& context,
                                        const VariantSet& set);

}  // namespace vlb
