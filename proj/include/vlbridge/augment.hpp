#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/metrics.hpp"

namespace vlb {

enum class Polarity { kPositive, kNegative };
enum class RewriteLevel { kWord, kStructure, kAttribute };

std::string_view to_string(Polarity p);
std::string_view to_string(RewriteLevel l);

struct RewriteRequest {
  std::string text;
  RewriteLevel level = RewriteLevel::kWord;
  Polarity polarity = Polarity::kPositive;
  std::optional<std::size_t> target_index;
  std::optional<ComponentKind> component;
  std::size_t n = 1;
  std::size_t attempt = 0;  // retry counter; offline rewriters vary their choice with it
};

struct RewriteCandidate {
  std::string text;
  std::optional<double> logprob;
  std::optional<std::size_t> target_index;  // anchor word the change is anchored at
};

class Rewriter {
 public:
  virtual ~Rewriter() = default;
  /// An empty result means the rewriter found nothing to do.
  virtual std::vector<RewriteCandidate> rewrite(const RewriteRequest& request) const = 0;
};

/// Offline rewriter over the lexicon tables: synonym and contrast
/// substitution at word level, passive/active, fronting, cleft and
/// existential templates at structure level, and the noun -> attribute table.
class RuleRewriter final : public Rewriter {
 public:
  explicit RuleRewriter(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<RewriteCandidate> rewrite(const RewriteRequest& request) const override;

 private:
  std::uint64_t seed_;
};

/// Client for `POST /rewrite`.
class RemoteRewriter final : public Rewriter {
 public:
  explicit RemoteRewriter(RewriterSpec spec);
  std::vector<RewriteCandidate> rewrite(const RewriteRequest& request) const override;

 private:
  RewriterSpec spec_;
};

std::unique_ptr<Rewriter> make_rewriter(const RewriterSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shallow analysis

struct TokenSpan {
  std::size_t begin = 0, end = 0;
  bool empty() const { return begin == end; }
  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

struct Chunk {
  enum class Kind { kNounPhrase, kPrepPhrase, kWord };
  Kind kind;
  TokenSpan span;
};

/// Heuristic role analysis of a token sequence. Spans index into `tokens`.
struct SentenceFrame {
  std::vector<std::string> tokens;
  TokenSpan subject;
  TokenSpan verb_chain;  // empty when no verb was found
  std::optional<std::size_t> aux;
  std::optional<std::size_t> verb;
  std::optional<std::size_t> particle;
  bool passive = false;
  std::vector<Chunk> after;  // chunks following the verb chain (or the whole sentence without one)
  std::optional<std::size_t> object_chunk;
  std::optional<std::size_t> pp_chunk;
  std::optional<std::size_t> agent_chunk;  // passive "by NP"
};

SentenceFrame analyze_sentence(std::span<const std::string> tokens);

/// Last content token of an NP span (skipping determiners and adjectives).
std::size_t phrase_head(const SentenceFrame& frame, TokenSpan span);

/// Role of token i as one of the taxonomy components, if it belongs to one.
std::optional<ComponentKind> component_at(const SentenceFrame& frame, std::size_t i);

/// `(S (NP ..) (VP verb-chain (NP ..) (PP prep (NP ..)) ..))`; the leaf
/// sequence always equals `tokens`.
ConstituencyTree shallow_parse(std::span<const std::string> tokens);

// ---------------------------------------------------------------------------
// Variants

struct Variant {
  std::string text;
  Polarity polarity = Polarity::kPositive;
  RewriteLevel level = RewriteLevel::kWord;
  std::optional<std::size_t> word_index;  // anchor word targeted
  std::optional<ComponentKind> component;
  std::optional<double> logprob;

  friend bool operator==(const Variant&, const Variant&) = default;
};

struct ComponentFailure {
  ComponentKind component;
  std::string message;
  friend bool operator==(const ComponentFailure&, const ComponentFailure&) = default;
};

struct VariantSet {
  TextSample anchor;
  std::vector<Variant> positives;
  std::vector<Variant> negatives;
  std::vector<double> probs;  // one per positive, sums to 1
  std::vector<ComponentFailure> failures;

  friend bool operator==(const VariantSet&, const VariantSet&) = default;
};

inline constexpr std::size_t kRewriteAttempts = 3;

Variant word_level_rewrite(const Rewriter& rewriter, const TextSample& sample, std::size_t word_index,
                           Polarity polarity);

/// `first_attempt` offsets the attempt counter so callers can ask for a
/// different template per variant.
Variant structure_level_rewrite(const Rewriter& rewriter, std::string_view text, Polarity polarity,
                                std::size_t first_attempt = 0);

/// One negative changing only `component`.
Variant component_negative(const Rewriter& rewriter, const TextSample& sample, ComponentKind component);

/// Positives are chained word -> structure. Word indices are tried in
/// descending `s1` order when given (ties to the lower index), else in
/// sentence order with content words first.
VariantSet generate_variant_set(const Rewriter& rewriter, const TextSample& sample, const PipelineConfig& config,
                                std::optional<std::span<const double>> s1 = std::nullopt);

/// Softmax of logprobs when every entry has one, otherwise uniform.
std::vector<double> variant_probabilities(std::span<const Variant> positives);

}  // namespace vlb
