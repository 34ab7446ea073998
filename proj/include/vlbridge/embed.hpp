#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"

namespace vlb {

/// Unit-norm feature vector.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  /// Scales `values` to unit length; rejects zero and non-finite vectors.
  static EmbeddingVector normalize(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;

  EmbeddingVector embed_one(const std::string& text) const;
};

/// Character 3-grams of every token plus ordered token bigrams, feature
/// hashed with signed buckets. Features are counted by presence, so the
/// output depends only on the feature set of (text, dim).
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 256);
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  EmbeddingVector embed_text(std::string_view text) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

/// Client for `POST /embed {"texts": [...]}` -> `{"embeddings": [[...]]}`.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(EmbedderSpec spec, std::size_t parallelism);
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

 private:
  EmbedderSpec spec_;
  std::size_t parallelism_;
};

/// Per-run memoization keyed by exact text.
class MemoizingEmbedder final : public Embedder {
 public:
  explicit MemoizingEmbedder(std::shared_ptr<const Embedder> inner) : inner_(std::move(inner)) {}
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

 private:
  std::shared_ptr<const Embedder> inner_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec, std::size_t parallelism);

/// Validating front door: rejects an empty list and blank texts.
std::vector<EmbeddingVector> embed_texts(const Embedder& embedder, std::span<const std::string> texts);

/// Embeds `context.rendered(join(tokens without drop_index), prompt_index)`.
/// `prompt_index` fills the template's `{index}` placeholder.
EmbeddingVector embed_with_context(const Embedder& embedder, const PromptContext& context,
                                   std::span<const std::string> tokens,
                                   std::optional<std::size_t> drop_index,
                                   std::optional<std::size_t> prompt_index = std::nullopt);

}  // namespace vlb
