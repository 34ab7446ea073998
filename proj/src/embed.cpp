#include "vlbridge/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "vlbridge/error.hpp"
#include "vlbridge/parallel.hpp"
#include "vlbridge/remote.hpp"

namespace vlb {

EmbeddingVector EmbeddingVector::normalize(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "embedding: empty vector");
  double s = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) fail(ErrorCode::kInvalidArgument, "embedding: non-finite component");
    s += x * x;
  }
  if (s == 0.0) fail(ErrorCode::kInvalidArgument, "embedding: zero vector");
  const double n = std::sqrt(s);
  for (double& x : values) x /= n;
  return EmbeddingVector(std::move(values));
}

EmbeddingVector Embedder::embed_one(const std::string& text) const {
  auto out = embed(std::span<const std::string>(&text, 1));
  if (out.size() != 1) fail(ErrorCode::kRuntime, "embedder returned wrong number of vectors");
  return std::move(out.front());
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kSignBasis = 0x84222325cbf29ce4ULL;

std::vector<std::string> hash_features(std::string_view text) {
  std::vector<std::string> tokens = tokenize_lenient(text);
  if (tokens.empty()) {
    std::string raw;
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) raw += c;
    }
    tokens.push_back(raw);
  }
  std::vector<std::string> features;
  for (const auto& t : tokens) {
    const std::string padded = "^" + t + "$";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) features.push_back("c:" + padded.substr(i, 3));
  }
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) features.push_back("b:" + tokens[i] + " " + tokens[i + 1]);
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
  if (dim < 16) fail(ErrorCode::kConfig, "hash embedder dim must be >= 16");
}

EmbeddingVector HashEmbedder::embed_text(std::string_view text) const {
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) fail(ErrorCode::kInvalidArgument, "embed: empty text");
  std::vector<double> v(dim_, 0.0);
  for (const auto& f : hash_features(text)) {
    const std::uint64_t h = fnv1a64(f);
    const double sign = (fnv1a64(f, kSignBasis) & 1U) ? 1.0 : -1.0;
    v[h % dim_] += sign;
  }
  bool zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  if (zero) v[fnv1a64(text) % dim_] = 1.0;  // every feature cancelled
  return EmbeddingVector::normalize(std::move(v));
}

std::vector<EmbeddingVector> HashEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

// ---------------------------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(EmbedderSpec spec, std::size_t parallelism)
    : spec_(std::move(spec)), parallelism_(std::max<std::size_t>(1, parallelism)) {
  spec_.validate();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  const std::size_t batch = spec_.max_batch;
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<std::vector<EmbeddingVector>> results(n_batches);
  parallel_for(n_batches, parallelism_, [&](std::size_t b) {
    const std::size_t begin = b * batch, end = std::min(texts.size(), begin + batch);
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin() + begin, texts.begin() + end);
    nlohmann::json res = post_json(spec_.endpoint, "/embed", body, spec_.timeout_ms);
    auto it = res.find("embeddings");
    if (it == res.end() || !it->is_array()) fail(ErrorCode::kRemote, "/embed: response lacks 'embeddings'");
    if (it->size() != end - begin) {
      fail(ErrorCode::kRemote, "/embed: expected " + std::to_string(end - begin) + " embeddings, got " +
                                   std::to_string(it->size()));
    }
    for (const auto& row : *it) {
      std::vector<double> v;
      try {
        v = row.get<std::vector<double>>();
      } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::kRemote, "/embed: embeddings must be arrays of numbers");
      }
      results[b].push_back(EmbeddingVector::normalize(std::move(v)));
    }
  });
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results) {
    for (auto& v : r) out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<EmbeddingVector> MemoizingEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : texts) {
      if (!cache_.count(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_->embed(missing);
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(fresh[i]));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mu_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec, std::size_t parallelism) {
  spec.validate();
  std::shared_ptr<const Embedder> inner;
  if (spec.kind == EmbedderSpec::Kind::kHash) {
    inner = std::make_shared<HashEmbedder>(spec.dim);
  } else {
    inner = std::make_shared<RemoteEmbedder>(spec, parallelism);
  }
  return std::make_shared<MemoizingEmbedder>(std::move(inner));
}

std::vector<EmbeddingVector> embed_texts(const Embedder& embedder, std::span<const std::string> texts) {
  if (texts.empty()) fail(ErrorCode::kInvalidArgument, "embed_texts: empty text list");
  for (const auto& t : texts) {
    bool blank = true;
    for (char c : t) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (blank) fail(ErrorCode::kInvalidArgument, "embed_texts: empty text");
  }
  auto out = embedder.embed(texts);
  if (out.size() != texts.size()) fail(ErrorCode::kRuntime, "embedder returned wrong number of vectors");
  return out;
}

EmbeddingVector embed_with_context(const Embedder& embedder, const PromptContext& context,
                                   std::span<const std::string> tokens, std::optional<std::size_t> drop_index,
                                   std::optional<std::size_t> prompt_index) {
  if (tokens.empty()) fail(ErrorCode::kInvalidArgument, "embed_with_context: empty token list");
  std::vector<std::string> kept;
  if (drop_index) {
    if (*drop_index >= tokens.size()) {
      fail(ErrorCode::kInvalidArgument, "embed_with_context: drop index " + std::to_string(*drop_index) +
                                            " out of range for " + std::to_string(tokens.size()) + " tokens");
    }
    if (tokens.size() == 1) {
      fail(ErrorCode::kInvalidArgument, "embed_with_context: removing the only token empties the sentence");
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i != *drop_index) kept.push_back(tokens[i]);
    }
  } else {
    kept.assign(tokens.begin(), tokens.end());
  }
  const std::string rendered = context.rendered(join_tokens(kept), prompt_index);
  std::vector<std::string> one{rendered};
  return embed_texts(embedder, one).front();
}

}  // namespace vlb
