#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vlbridge/core.hpp"

namespace vlb {

struct EmbedderSpec {
  enum class Kind { kHash, kRemote };
  Kind kind = Kind::kHash;
  std::size_t dim = 256;
  std::string endpoint;
  int timeout_ms = 5000;
  std::size_t max_batch = 64;

  void validate() const;
};

struct RewriterSpec {
  enum class Kind { kRule, kRemote };
  Kind kind = Kind::kRule;
  std::string endpoint;
  int timeout_ms = 10000;
  std::size_t n_positives = 3;

  void validate() const;
};

struct NliSpec {
  enum class Kind { kHeuristic, kRemote };
  Kind kind = Kind::kHeuristic;
  std::string endpoint;
  int timeout_ms = 5000;

  void validate() const;
};

/// Critic thresholds. `gamma_dup` is the entailment level at which two pairs
/// count as duplicates in the diversity critic.
struct Thresholds {
  double gamma1 = 0.5;
  double gamma2 = 3.0;
  double gamma3 = 0.7;
  double gamma_dup = 0.5;

  void validate() const;
};

enum class LossVariant { kAsPrinted, kPositiveNumerator };
enum class Reduction { kSum, kMean };

/// Which significance scores enter the item weight.
enum class WeightMode { kFull, kS1Only, kS2Only, kNone };

struct LossConfig {
  double beta = 0.5;
  double tau = 0.1;
  LossVariant variant = LossVariant::kPositiveNumerator;
  Reduction reduction = Reduction::kMean;
  WeightMode weighting = WeightMode::kFull;
  bool normalize_per_anchor = true;

  void validate() const;
};

std::string_view to_string(LossVariant v);
std::string_view to_string(Reduction r);
std::string_view to_string(WeightMode w);

/// Premise for the semantic critic: the anchor text or its first positive variant.
enum class PremiseSource { kAnchor, kVariant };

struct PipelineConfig {
  std::uint64_t seed = 0;
  EmbedderSpec embedder;
  RewriterSpec rewriter;
  NliSpec nli;
  Thresholds thresholds;
  std::size_t n_c = 5;
  LossConfig loss;
  std::vector<ComponentKind> components = default_taxonomy();
  std::size_t parallelism = 1;
  std::string prompt = "Rewrite the text '{text}' concisely by changing the {index}-th word while keeping the meaning";
  std::size_t n_attributes = 8;
  PremiseSource premise = PremiseSource::kAnchor;

  void validate() const;

  /// Switches every backend to its offline implementation.
  void force_offline();

  /// Canonical JSON; key order is sorted so the hash is stable.
  std::string canonical_json() const;
  std::string hash() const;
};

PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit; used for config hashes and seeded per-request RNG streams.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace vlb
