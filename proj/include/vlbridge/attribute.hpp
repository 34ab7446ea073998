#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlbridge/augment.hpp"
#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/embed.hpp"
#include "vlbridge/metrics.hpp"

namespace vlb {

struct AttributeCandidate {
  std::string text;
  std::string source_id;
  EmbeddingVector embedding;
  std::optional<double> entailment;  // premise => text, set by the semantic critic
  std::optional<std::size_t> cluster;
  std::optional<double> video_sim;
  bool selected = false;  // most video-similar member of its cluster
};

enum class PoolStage { kRaw, kClustered, kRanked, kFiltered };
std::string_view to_string(PoolStage s);

struct AttributePool {
  std::vector<AttributeCandidate> candidates;
  PoolStage stage = PoolStage::kRaw;
};

class NliCritic {
 public:
  virtual ~NliCritic() = default;
  /// Entailment score of premise => hypothesis in [0, 1].
  virtual double entailment(const std::string& premise, const std::string& hypothesis) const = 0;
};

/// Lexical stand-in for an NLI model, not a substitute for one:
/// max(overlap, knowledge) where overlap is the mean of hypothesis-token
/// containment and token-set Jaccard, and knowledge is 0.8 when the
/// hypothesis is a tabled attribute of a noun in the premise.
class HeuristicNli final : public NliCritic {
 public:
  double entailment(const std::string& premise, const std::string& hypothesis) const override;
};

/// Client for `POST /nli`.
class RemoteNli final : public NliCritic {
 public:
  explicit RemoteNli(NliSpec spec);
  double entailment(const std::string& premise, const std::string& hypothesis) const override;

 private:
  NliSpec spec_;
};

std::unique_ptr<NliCritic> make_nli(const NliSpec& spec);

AttributePool generate_attributes(const Rewriter& rewriter, const Embedder& embedder, const TextSample& sample,
                                  std::size_t n);

/// k-means with k = min(n_c, |pool|): seeded first center, farthest-point
/// for the rest, Lloyd iterations (cap 100) and then single-point moves
/// until no move lowers the within-cluster sum of squares. Cluster ids are
/// renumbered in order of first appearance.
AttributePool cluster_attributes(AttributePool pool, std::size_t n_c, std::uint64_t seed);

/// Within-cluster sum of squared distances to cluster means.
double within_cluster_ss(std::span<const std::vector<double>> points, std::span<const std::size_t> assignment);

/// Orders the pool by video similarity (descending, ties by text) and marks
/// the first member of each cluster.
AttributePool rank_by_video(AttributePool pool, const VideoFeatures& video);

bool critic_semantic(const NliCritic& nli, const std::string& premise, const std::string& attribute, double gamma1,
                     double* score = nullptr);

struct FormatScores {
  std::size_t tree_distance = 0;
  double rouge = 0.0;
};

/// Missing trees fall back to `shallow_parse` of the tokens.
FormatScores format_scores(const std::optional<ConstituencyTree>& x_tree, const std::optional<ConstituencyTree>& y_tree,
                           std::span<const std::string> x_tokens, std::span<const std::string> y_tokens);

bool critic_format(const std::optional<ConstituencyTree>& x_tree, const std::optional<ConstituencyTree>& y_tree,
                   std::span<const std::string> x_tokens, std::span<const std::string> y_tokens, double gamma2,
                   double gamma3);

struct DiversityPair {
  std::string input;
  std::string output;
};

using ScoreMatrix = std::vector<std::vector<double>>;

/// Pure graph step of the diversity critic. `input_entail[a][b]` scores
/// input_a => input_b (likewise for outputs). Pairs a, b are linked when any
/// direction on either side reaches `gamma`; pairs with identical input
/// text are linked only through their outputs. Each connected component
/// keeps the member with the largest summed edge score to its neighbors,
/// ties to the smaller (output, input) text. Returns kept indices ascending.
std::vector<std::size_t> select_diverse(std::span<const DiversityPair> pairs, const ScoreMatrix& input_entail,
                                        const ScoreMatrix& output_entail, double gamma);

std::vector<std::size_t> critic_diversity(std::span<const DiversityPair> pairs, const NliCritic& nli, double gamma,
                                          std::size_t parallelism = 1);

struct CandidateVerdict {
  std::string text;
  double entailment = 0.0;
  bool o1 = false;
  FormatScores format;
  bool o2 = false;
  bool o3 = false;
  bool kept = false;
};

struct FilterResult {
  AttributePool pool;  // stage kFiltered
  std::vector<CandidateVerdict> verdicts;  // one per ranked candidate, in ranked order
};

/// Keeps exactly the candidates passing O1, O2 and O3 against `premise`.
/// `premise_tree` defaults to a shallow parse.
FilterResult filter_pool(const AttributePool& ranked, const std::string& premise,
                         const std::optional<ConstituencyTree>& premise_tree, const NliCritic& nli,
                         const PipelineConfig& config);

}  // namespace vlb
