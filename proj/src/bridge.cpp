#include "vlbridge/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vlbridge/error.hpp"
#include "vlbridge/parallel.hpp"

namespace vlb {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInvalidArgument, "loss: dimension mismatch");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kInvalidArgument, "loss: zero-norm vector");
  return dot(a, b) / (na * nb);
}

// d cos(x, y) / dx = y / (|x||y|) - cos * x / |x|^2, scaled by `g` and added.
void add_cosine_grad(std::span<const double> x, std::span<const double> y, double g, std::vector<double>& out) {
  const double nx = norm(x), ny = norm(y);
  const double c = dot(x, y) / (nx * ny);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += g * (y[i] / (nx * ny) - c * x[i] / (nx * nx));
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Logits {
  double a, b;  // positive and negative branch log-weights
};

Logits logits(double cos_pos, double cos_neg, const LossConfig& c) {
  return {std::log(1.0 - c.beta) + cos_pos / c.tau, std::log(c.beta) + cos_neg / c.tau};
}

// dL/dcos_pos and dL/dcos_neg.
std::pair<double, double> loss_partials(double cos_pos, double cos_neg, const LossConfig& c) {
  const auto [a, b] = logits(cos_pos, cos_neg, c);
  const double lse = log_add_exp(a, b);
  const double pa = std::exp(a - lse), pb = std::exp(b - lse);
  if (c.variant == LossVariant::kAsPrinted) return {pa / c.tau, -pa / c.tau};
  return {-pb / c.tau, pb / c.tau};
}

struct Evaluated {
  ComponentMax max;
  double raw_weight = 0.0;
};

std::vector<Evaluated> evaluate(std::span<const BridgeItem> items, const LossConfig& config,
                                std::size_t parallelism) {
  if (items.empty()) fail(ErrorCode::kInvalidArgument, "loss_weighted: empty item list");
  std::vector<Evaluated> ev(items.size());
  parallel_for(items.size(), parallelism, [&](std::size_t i) {
    ev[i].max = loss_component_max(items[i], config);
    ev[i].raw_weight = raw_item_weight(items[i], ev[i].max.argmax, config.weighting);
  });
  return ev;
}

std::vector<double> final_weights(std::span<const BridgeItem> items, const std::vector<Evaluated>& ev,
                                  const LossConfig& config) {
  std::vector<double> w(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) w[i] = ev[i].raw_weight;
  if (!config.normalize_per_anchor) return w;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[items[i].anchor_id].push_back(i);
  for (const auto& [_, idx] : groups) {
    std::vector<double> raw;
    for (auto i : idx) raw.push_back(w[i]);
    const double s = pairwise_sum(raw);
    for (auto i : idx) w[i] = s > 0.0 ? w[i] / s : 1.0 / static_cast<double>(idx.size());
  }
  return w;
}

// d total / d L_i factor for each item.
std::vector<double> item_scales(const std::vector<double>& w, const LossConfig& config) {
  std::vector<double> s = w;
  if (config.reduction == Reduction::kMean) {
    const double total_w = pairwise_sum(w);
    for (double& x : s) x = total_w > 0.0 ? x / total_w : 0.0;
  }
  return s;
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.subspan(0, mid)) + pairwise_sum(v.subspan(mid));
}

void validate_item(const BridgeItem& item) {
  const std::string who = "bridge item '" + item.id + "': ";
  if (item.negatives.empty()) fail(ErrorCode::kInvalidArgument, who + "needs at least one negative");
  if (item.weight_s1.size() != item.negatives.size()) {
    fail(ErrorCode::kInvalidArgument, who + "weight_s1 must have one entry per negative");
  }
  const std::size_t d = item.video.size();
  if (d == 0 || item.positive.size() != d) fail(ErrorCode::kInvalidArgument, who + "dimension mismatch");
  for (const auto& n : item.negatives) {
    if (n.size() != d) fail(ErrorCode::kInvalidArgument, who + "dimension mismatch");
  }
}

double loss_cl_from_cosines(double cos_pos, double cos_neg, const LossConfig& config) {
  const auto [a, b] = logits(cos_pos, cos_neg, config);
  const double lse = log_add_exp(a, b);
  return config.variant == LossVariant::kAsPrinted ? lse - b : lse - a;
}

double loss_cl(std::span<const double> video, std::span<const double> positive, std::span<const double> negative,
               const LossConfig& config) {
  return loss_cl_from_cosines(cosine(video, positive), cosine(video, negative), config);
}

ComponentMax loss_component_max(const BridgeItem& item, const LossConfig& config) {
  validate_item(item);
  ComponentMax out;
  const double cp = cosine(item.video, item.positive);
  for (std::size_t c = 0; c < item.negatives.size(); ++c) {
    const double l = loss_cl_from_cosines(cp, cosine(item.video, item.negatives[c]), config);
    out.component_losses.push_back(l);
    if (c == 0 || l > out.value) {
      out.value = l;
      out.argmax = c;
    }
  }
  return out;
}

double raw_item_weight(const BridgeItem& item, std::size_t argmax, WeightMode mode) {
  double w = 1.0;
  switch (mode) {
    case WeightMode::kFull: w = item.weight_s1.at(argmax) * item.weight_s2; break;
    case WeightMode::kS1Only: w = item.weight_s1.at(argmax); break;
    case WeightMode::kS2Only: w = item.weight_s2; break;
    case WeightMode::kNone: w = 1.0; break;
  }
  return std::max(w, 0.0);
}

namespace {

LossReport report_from(std::span<const BridgeItem> items, const std::vector<Evaluated>& ev,
                       const std::vector<double>& w, const LossConfig& config) {
  LossReport report;
  std::vector<double> terms(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    report.items.push_back({items[i].id, ev[i].max.component_losses, ev[i].max.argmax, w[i], ev[i].max.value});
    terms[i] = w[i] * ev[i].max.value;
  }
  const double sum = pairwise_sum(terms);
  if (config.reduction == Reduction::kSum) {
    report.total = sum;
  } else {
    const double total_w = pairwise_sum(w);
    report.total = total_w > 0.0 ? sum / total_w : 0.0;
  }
  return report;
}

}  // namespace

LossReport loss_weighted(std::span<const BridgeItem> items, const LossConfig& config, std::size_t parallelism) {
  const auto ev = evaluate(items, config, parallelism);
  return report_from(items, ev, final_weights(items, ev, config), config);
}

double LossReport::contribution(std::size_t i, const LossConfig& config) const {
  const ItemLoss& it = items.at(i);
  if (config.reduction == Reduction::kSum) return it.weight * it.value;
  std::vector<double> w;
  for (const auto& x : items) w.push_back(x.weight);
  const double total_w = pairwise_sum(w);
  return total_w > 0.0 ? it.weight * it.value / total_w : 0.0;
}

nlohmann::ordered_json LossReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& it : items) {
    j["items"].push_back({{"id", it.id},
                          {"component_losses", it.component_losses},
                          {"argmax", it.argmax},
                          {"weight", it.weight},
                          {"value", it.value}});
  }
  j["grad_check"] = nlohmann::ordered_json::object();
  if (grad_check_max_rel_err) j["grad_check"]["max_rel_err"] = *grad_check_max_rel_err;
  return j;
}

namespace {

std::vector<ItemGradient> gradients_from(std::span<const BridgeItem> items, const std::vector<Evaluated>& ev,
                                         const std::vector<double>& w, const LossConfig& config,
                                         std::size_t parallelism) {
  const auto scale = item_scales(w, config);
  std::vector<ItemGradient> grads(items.size());
  parallel_for(items.size(), parallelism, [&](std::size_t i) {
    const BridgeItem& it = items[i];
    const std::size_t d = it.video.size();
    ItemGradient& g = grads[i];
    g.video.assign(d, 0.0);
    g.positive.assign(d, 0.0);
    g.negatives.assign(it.negatives.size(), std::vector<double>(d, 0.0));
    if (scale[i] == 0.0) return;
    const std::size_t k = ev[i].max.argmax;
    const auto& neg = it.negatives[k];
    const auto [dp, dn] = loss_partials(cosine(it.video, it.positive), cosine(it.video, neg), config);
    add_cosine_grad(it.video, it.positive, scale[i] * dp, g.video);
    add_cosine_grad(it.video, neg, scale[i] * dn, g.video);
    add_cosine_grad(it.positive, it.video, scale[i] * dp, g.positive);
    add_cosine_grad(neg, it.video, scale[i] * dn, g.negatives[k]);
  });
  return grads;
}

}  // namespace

std::vector<ItemGradient> loss_gradient(std::span<const BridgeItem> items, const LossConfig& config,
                                        std::size_t parallelism) {
  const auto ev = evaluate(items, config, parallelism);
  return gradients_from(items, ev, final_weights(items, ev, config), config, parallelism);
}

std::pair<LossReport, std::vector<ItemGradient>> loss_and_gradient(std::span<const BridgeItem> items,
                                                                   const LossConfig& config,
                                                                   std::size_t parallelism) {
  const auto ev = evaluate(items, config, parallelism);
  const auto w = final_weights(items, ev, config);
  return {report_from(items, ev, w, config), gradients_from(items, ev, w, config, parallelism)};
}

double gradient_check(std::span<const BridgeItem> items, const LossConfig& config, double h) {
  const auto grads = loss_gradient(items, config);
  std::vector<BridgeItem> work(items.begin(), items.end());
  double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
  auto probe = [&](double& x, double analytic) {
    const double saved = x;
    x = saved + h;
    const double up = loss_weighted(work, config).total;
    x = saved - h;
    const double down = loss_weighted(work, config).total;
    x = saved;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (analytic - numeric) * (analytic - numeric);
    analytic2 += analytic * analytic;
    numeric2 += numeric * numeric;
  };
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (std::size_t j = 0; j < work[i].video.size(); ++j) probe(work[i].video[j], grads[i].video[j]);
    for (std::size_t j = 0; j < work[i].positive.size(); ++j) probe(work[i].positive[j], grads[i].positive[j]);
    for (std::size_t c = 0; c < work[i].negatives.size(); ++c) {
      for (std::size_t j = 0; j < work[i].negatives[c].size(); ++j) {
        probe(work[i].negatives[c][j], grads[i].negatives[c][j]);
      }
    }
  }
  const double denom = std::sqrt(analytic2) + std::sqrt(numeric2);
  return denom == 0.0 ? 0.0 : std::sqrt(diff2) / denom;
}

}  // namespace vlb
