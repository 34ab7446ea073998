#include "vlbridge/score.hpp"

#include <algorithm>

#include "vlbridge/error.hpp"
#include "vlbridge/metrics.hpp"

namespace vlb {

std::vector<double> compute_s1(const Embedder& embedder, const PromptContext& context, const TextSample& sample) {
  const auto& tokens = sample.tokens();
  if (tokens.size() < 2) fail(ErrorCode::kInvalidArgument, "S1 undefined for single-word text");
  std::vector<double> s1(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto full = embed_with_context(embedder, context, tokens, std::nullopt, i);
    const auto dropped = embed_with_context(embedder, context, tokens, i, i);
    s1[i] = std::clamp(1.0 - cosine_similarity(full.values(), dropped.values()), 0.0, 2.0);
  }
  return s1;
}

std::vector<double> compute_s2(std::span<const EmbeddingVector> embeddings, std::span<const double> probs) {
  const std::size_t n = embeddings.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "S2 needs at least one positive variant");
  if (probs.size() != n) fail(ErrorCode::kInvalidArgument, "S2: probability count does not match variants");
  if (n == 1) return {1.0};
  std::vector<double> s2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) mass += probs[j];
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = mass > 0.0 ? probs[j] / mass : 1.0 / static_cast<double>(n - 1);
      acc += w * cosine_similarity(embeddings[i].values(), embeddings[j].values());
    }
    s2[i] = std::clamp(acc, -1.0, 1.0);
  }
  return s2;
}

std::vector<double> compute_s2(const Embedder& embedder, const VariantSet& set) {
  std::vector<std::string> texts;
  for (const auto& v : set.positives) texts.push_back(v.text);
  const auto embeddings = embed_texts(embedder, texts);
  return compute_s2(embeddings, set.probs);
}

SignificanceReport compute_significance(const Embedder& embedder, const PromptContext& context,
                                        const VariantSet& set) {
  SignificanceReport r{set.anchor.id(), std::nullopt, compute_s2(embedder, set)};
  if (set.anchor.size() >= 2) r.s1 = compute_s1(embedder, context, set.anchor);
  return r;
}

}  // namespace vlb
