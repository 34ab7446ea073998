#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vlbridge/config.hpp"

namespace vlb {

/// One (video, positive, negatives) tuple. The loss treats vectors as free
/// parameters (cosines carry their norms), so off-sphere inputs are valid.
struct BridgeItem {
  std::string id;
  std::string anchor_id;  // weights are normalized over items sharing it
  std::vector<double> video;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;  // one per component
  std::vector<double> weight_s1;               // one per negative
  double weight_s2 = 1.0;
};

/// Checks C >= 1, matching dimensions and one s1 weight per negative.
void validate_item(const BridgeItem& item);

/// Contrastive term from the two cosines.
double loss_cl_from_cosines(double cos_pos, double cos_neg, const LossConfig& config);

double loss_cl(std::span<const double> video, std::span<const double> positive, std::span<const double> negative,
               const LossConfig& config);

struct ComponentMax {
  double value = 0.0;
  std::size_t argmax = 0;  // lowest index on ties
  std::vector<double> component_losses;
};

ComponentMax loss_component_max(const BridgeItem& item, const LossConfig& config);

struct ItemLoss {
  std::string id;
  std::vector<double> component_losses;
  std::size_t argmax = 0;
  double weight = 0.0;
  double value = 0.0;  // component max
};

struct LossReport {
  double total = 0.0;
  std::vector<ItemLoss> items;
  std::optional<double> grad_check_max_rel_err;

  /// Contribution of item i to `total`; contributions sum to it.
  double contribution(std::size_t i, const LossConfig& config) const;

  nlohmann::ordered_json to_json() const;
};

/// Weight of the argmax branch before per-anchor normalization, clamped at 0.
double raw_item_weight(const BridgeItem& item, std::size_t argmax, WeightMode mode);

LossReport loss_weighted(std::span<const BridgeItem> items, const LossConfig& config, std::size_t parallelism = 1);

struct ItemGradient {
  std::vector<double> video;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};

/// Gradients of `loss_weighted(...).total`; weights are held fixed at the
/// current argmax branches.
std::vector<ItemGradient> loss_gradient(std::span<const BridgeItem> items, const LossConfig& config,
                                        std::size_t parallelism = 1);

/// Both of the above from a single evaluation pass.
std::pair<LossReport, std::vector<ItemGradient>> loss_and_gradient(std::span<const BridgeItem> items,
                                                                   const LossConfig& config,
                                                                   std::size_t parallelism = 1);

/// Central-difference check over every coordinate; returns
/// |analytic - numeric| / (|analytic| + |numeric|), or 0 when both vanish.
double gradient_check(std::span<const BridgeItem> items, const LossConfig& config, double h = 1e-5);

/// Fixed-order pairwise summation; independent of thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace vlb
