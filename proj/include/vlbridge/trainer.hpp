#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlbridge/augment.hpp"
#include "vlbridge/bridge.hpp"
#include "vlbridge/config.hpp"
#include "vlbridge/core.hpp"
#include "vlbridge/embed.hpp"
#include "vlbridge/score.hpp"

namespace vlb {

/// An anchor with its video and, optionally, its augmentation.
struct TrainingExample {
  SampleRecord record;
  std::optional<VariantSet> variants;
  std::optional<SignificanceReport> scores;
};

struct RetrievalQuery {
  std::string text;
  std::string video_id;
};

struct RetrievalMetrics {
  double recall_at_1 = 0.0;
  double recall_at_5 = 0.0;
  std::size_t queries = 0;

  friend bool operator==(const RetrievalMetrics&, const RetrievalMetrics&) = default;
};

struct TrainOptions {
  std::size_t epochs = 150;
  double lr = 10.0;
  std::uint64_t seed = 0;
  bool use_augmented = true;
  std::size_t anchor_negatives = 5;  // other anchors drawn as negatives of the plain anchor item
  bool grad_check = false;
  std::size_t grad_check_items = 16;
};

struct TrainResult {
  Eigen::MatrixXd w_text;   // d_video x d_text
  Eigen::MatrixXd w_video;  // d_video x d_video
  RetrievalMetrics before, after;
  std::vector<double> loss_curve;  // total before each step, then after the last
  LossReport final_report;
  std::optional<double> grad_check_max_rel_err;
  std::size_t items = 0;
};

/// Held-out queries: rule paraphrases of each anchor (a synonym swap then a
/// structure template) drawn with a seed distinct from training rewrites.
std::vector<RetrievalQuery> make_paraphrase_queries(std::span<const TrainingExample> examples, std::uint64_t seed);

/// Builds bridge items for the current projections. Plain anchor items use
/// other anchors as negatives with unit weights. Each positive variant yields
/// two items, all sharing the anchor's normalization group: one against the
/// component negatives, weighted by S1 of the word each negative targets,
/// and one against the anchor's other-anchor negatives, weighted by the
/// anchor's summed S1. Both carry S2 of the positive.
std::vector<BridgeItem> build_bridge_items(std::span<const TrainingExample> examples, const Embedder& embedder,
                                           const TrainOptions& options);

/// Full-batch gradient descent on loss_weighted over text and video
/// projections initialized to the identity (text folded modulo the video width
/// when wider). Deterministic given the seed.
TrainResult train_toy_dual_encoder(std::span<const TrainingExample> examples, const Embedder& embedder,
                                   const PipelineConfig& config, const TrainOptions& options,
                                   std::span<const RetrievalQuery> queries);

RetrievalMetrics evaluate_retrieval(std::span<const TrainingExample> examples, const Embedder& embedder,
                                    const Eigen::MatrixXd& w_text, const Eigen::MatrixXd& w_video,
                                    std::span<const RetrievalQuery> queries);

}  // namespace vlb
