#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vlbridge/bridge.hpp"
#include "vlbridge/error.hpp"

using namespace vlb;

namespace {

LossConfig make(LossVariant v, double beta = 0.5, double tau = 1.0) {
  LossConfig c;
  c.variant = v;
  c.beta = beta;
  c.tau = tau;
  return c;
}

// Direct scalar evaluation of the contrastive term.
double scalar_loss(double cp, double cn, const LossConfig& c) {
  const double pos = (1.0 - c.beta) * std::exp(cp / c.tau), neg = c.beta * std::exp(cn / c.tau);
  const double num = c.variant == LossVariant::kAsPrinted ? neg : pos;
  return -std::log(num / (pos + neg));
}

BridgeItem random_item(std::mt19937_64& rng, std::size_t d, std::size_t c, const std::string& id,
                       const std::string& anchor) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  BridgeItem it{id, anchor, oracle::random_unit(rng, d), oracle::random_unit(rng, d), {}, {}, u(rng) - 1.0};
  for (std::size_t k = 0; k < c; ++k) {
    it.negatives.push_back(oracle::random_unit(rng, d));
    it.weight_s1.push_back(u(rng));
  }
  return it;
}

// Re-summation from the definition: raw weight of the argmax branch, per-anchor
// normalization, then sum or weighted mean.
double oracle_total(const std::vector<BridgeItem>& items, const LossConfig& c) {
  std::vector<double> value(items.size()), raw(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < items[i].negatives.size(); ++k) {
      const double l = scalar_loss(oracle::cosine(items[i].video, items[i].positive),
                                   oracle::cosine(items[i].video, items[i].negatives[k]), c);
      if (l > best) best = l, arg = k;
    }
    value[i] = best;
    double w = 1.0;
    if (c.weighting == WeightMode::kFull) w = items[i].weight_s1[arg] * items[i].weight_s2;
    if (c.weighting == WeightMode::kS1Only) w = items[i].weight_s1[arg];
    if (c.weighting == WeightMode::kS2Only) w = items[i].weight_s2;
    raw[i] = std::max(0.0, w);
  }
  if (c.normalize_per_anchor) {
    std::map<std::string, std::pair<double, std::size_t>> group;
    for (std::size_t i = 0; i < items.size(); ++i) {
      group[items[i].anchor_id].first += raw[i];
      group[items[i].anchor_id].second += 1;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto [s, n] = group[items[i].anchor_id];
      raw[i] = s > 0.0 ? raw[i] / s : 1.0 / static_cast<double>(n);
    }
  }
  double sum = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) sum += raw[i] * value[i], wsum += raw[i];
  if (c.reduction == Reduction::kSum) return sum;
  return wsum > 0.0 ? sum / wsum : 0.0;
}

}  // namespace

TEST(LossCl, ClosedForms) {
  for (auto v : {LossVariant::kAsPrinted, LossVariant::kPositiveNumerator}) {
    for (double tau : {0.05, 1.0, 30.0}) {
      for (double c : {-1.0, 0.0, 0.4}) EXPECT_NEAR(loss_cl_from_cosines(c, c, make(v, 0.5, tau)), std::log(2.0), 1e-12);
    }
  }
  const double e = std::exp(1.0);
  EXPECT_NEAR(loss_cl_from_cosines(1, 0, make(LossVariant::kAsPrinted)), std::log(1 + e), 1e-12);
  EXPECT_NEAR(loss_cl_from_cosines(1, 0, make(LossVariant::kPositiveNumerator)), std::log(1 + e) - 1, 1e-12);
}

TEST(LossCl, MatchesScalarEvaluationAndIsPositive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const auto c = make(k % 2 ? LossVariant::kAsPrinted : LossVariant::kPositiveNumerator, 0.05 + 0.9 * (u(rng) + 1) / 2,
                        0.05 + 5 * (u(rng) + 1));
    const double cp = u(rng), cn = u(rng);
    const double l = loss_cl_from_cosines(cp, cn, c);
    EXPECT_NEAR(l, scalar_loss(cp, cn, c), 1e-12);
    EXPECT_GT(l, 0.0);
    EXPECT_TRUE(std::isfinite(l));
  }
}

TEST(LossCl, StableAtExtremeTemperatures) {
  const auto c = make(LossVariant::kPositiveNumerator, 0.5, 1e-4);
  EXPECT_TRUE(std::isfinite(loss_cl_from_cosines(-1, 1, c)));
  EXPECT_NEAR(loss_cl_from_cosines(-1, 1, c), 2.0 / 1e-4, 1e-6);
}

TEST(LossCl, MonotonicityPerVariant) {
  for (double b : {0.1, 0.5, 0.9}) {
    const auto pn = make(LossVariant::kPositiveNumerator, b, 0.5), ap = make(LossVariant::kAsPrinted, b, 0.5);
    for (double x = -0.9; x < 0.9; x += 0.1) {
      EXPECT_GT(loss_cl_from_cosines(x, 0.2, pn), loss_cl_from_cosines(x + 0.1, 0.2, pn));
      EXPECT_LT(loss_cl_from_cosines(0.2, x, pn), loss_cl_from_cosines(0.2, x + 0.1, pn));
      EXPECT_LT(loss_cl_from_cosines(x, 0.2, ap), loss_cl_from_cosines(x + 0.1, 0.2, ap));
      EXPECT_GT(loss_cl_from_cosines(0.2, x, ap), loss_cl_from_cosines(0.2, x + 0.1, ap));
    }
  }
}

TEST(LossCl, LargeTemperatureLimits) {
  for (double b : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(loss_cl_from_cosines(0.7, -0.3, make(LossVariant::kAsPrinted, b, 1e6)), -std::log(b), 1e-4);
    EXPECT_NEAR(loss_cl_from_cosines(0.7, -0.3, make(LossVariant::kPositiveNumerator, b, 1e6)), -std::log(1 - b), 1e-4);
  }
}

TEST(LossCl, VectorFormAndDimensionCheck) {
  const std::vector<double> v = {1, 0}, p = {1, 0}, n = {0, 1}, bad = {1, 0, 0};
  EXPECT_NEAR(loss_cl(v, p, n, make(LossVariant::kAsPrinted)), std::log(1 + std::exp(1.0)), 1e-12);
  EXPECT_THROW(loss_cl(v, p, bad, make(LossVariant::kAsPrinted)), Error);
}

TEST(LossConfig, Validation) {
  EXPECT_THROW(make(LossVariant::kAsPrinted, 1.0).validate(), Error);
  EXPECT_THROW(make(LossVariant::kAsPrinted, 0.0).validate(), Error);
  EXPECT_THROW(make(LossVariant::kAsPrinted, 0.5, 0.0).validate(), Error);
  EXPECT_NO_THROW(make(LossVariant::kAsPrinted, 0.5, 1.0).validate());
}

TEST(ComponentMax, DefinitionAndTies) {
  std::mt19937_64 rng(2);
  const auto c = make(LossVariant::kPositiveNumerator, 0.5, 0.2);
  for (int k = 0; k < 200; ++k) {
    const auto it = random_item(rng, 5, 4, "i", "a");
    const auto m = loss_component_max(it, c);
    ASSERT_EQ(m.component_losses.size(), 4U);
    for (std::size_t j = 0; j < 4; ++j) {
      const double l = loss_cl(it.video, it.positive, it.negatives[j], c);
      EXPECT_DOUBLE_EQ(m.component_losses[j], l);
      EXPECT_GE(m.value, l);
    }
    EXPECT_EQ(m.value, m.component_losses[m.argmax]);
  }
  auto single = random_item(rng, 3, 1, "i", "a");
  EXPECT_EQ(loss_component_max(single, c).value, loss_cl(single.video, single.positive, single.negatives[0], c));
  auto tied = single;
  tied.negatives = {single.negatives[0], single.negatives[0], single.negatives[0]};
  tied.weight_s1 = {1, 1, 1};
  EXPECT_EQ(loss_component_max(tied, c).argmax, 0U);
}

TEST(ValidateItem, RejectsMalformedItems) {
  std::mt19937_64 rng(3);
  auto it = random_item(rng, 3, 2, "i", "a");
  EXPECT_NO_THROW(validate_item(it));
  auto a = it;
  a.negatives.clear();
  a.weight_s1.clear();
  EXPECT_THROW(validate_item(a), Error);
  auto b = it;
  b.weight_s1.pop_back();
  EXPECT_THROW(validate_item(b), Error);
  auto c = it;
  c.positive.push_back(0.0);
  EXPECT_THROW(validate_item(c), Error);
}

TEST(Weighted, UnitWeightAndReductionIdentities) {
  std::mt19937_64 rng(4);
  auto c = make(LossVariant::kPositiveNumerator, 0.5, 0.3);
  auto it = random_item(rng, 4, 3, "i", "a");
  it.weight_s1 = {1, 1, 1};
  it.weight_s2 = 1.0;
  const double single = loss_component_max(it, c).value;
  EXPECT_NEAR(loss_weighted(std::vector<BridgeItem>{it}, c).total, single, 1e-15);
  auto twin = it;
  twin.id = "j";
  for (bool norm : {true, false}) {
    c.normalize_per_anchor = norm;
    c.reduction = Reduction::kMean;
    EXPECT_NEAR(loss_weighted(std::vector<BridgeItem>{it, twin}, c).total, single, 1e-15);
  }
  EXPECT_THROW(loss_weighted(std::vector<BridgeItem>{}, c), Error);
}

TEST(Weighted, MatchesResummationOracle) {
  std::mt19937_64 rng(5);
  const WeightMode modes[] = {WeightMode::kFull, WeightMode::kS1Only, WeightMode::kS2Only, WeightMode::kNone};
  for (int k = 0; k < 400; ++k) {
    auto c = make(k % 2 ? LossVariant::kAsPrinted : LossVariant::kPositiveNumerator, 0.3, 0.5);
    c.weighting = modes[k % 4];
    c.reduction = (k / 4) % 2 ? Reduction::kSum : Reduction::kMean;
    c.normalize_per_anchor = (k / 8) % 2;
    std::vector<BridgeItem> items;
    for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i) {
      items.push_back(random_item(rng, 4, 1 + rng() % 4, "i" + std::to_string(i), "a" + std::to_string(rng() % 3)));
    }
    const auto r = loss_weighted(items, c);
    EXPECT_NEAR(r.total, oracle_total(items, c), 1e-12);
    double re = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) re += r.contribution(i, c);
    EXPECT_NEAR(re, r.total, 1e-12);
    EXPECT_EQ(loss_weighted(items, c, 3).total, r.total);  // thread count does not change the bits
  }
}

TEST(Weighted, LinearInWeightsWithoutNormalization) {
  std::mt19937_64 rng(6);
  auto c = make(LossVariant::kPositiveNumerator);
  c.normalize_per_anchor = false;
  c.reduction = Reduction::kSum;
  std::vector<BridgeItem> items;
  for (int i = 0; i < 5; ++i) items.push_back(random_item(rng, 4, 2, "i" + std::to_string(i), "a"));
  for (auto& it : items) it.weight_s2 = std::abs(it.weight_s2);
  const double base = loss_weighted(items, c).total;
  for (auto& it : items) it.weight_s2 *= 2.0;
  EXPECT_NEAR(loss_weighted(items, c).total, 2.0 * base, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    auto c = make(k % 2 ? LossVariant::kAsPrinted : LossVariant::kPositiveNumerator, 0.1 + 0.4 * (k % 3), 0.05 + k % 4);
    c.reduction = k % 3 ? Reduction::kMean : Reduction::kSum;
    std::vector<BridgeItem> items;
    for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) {
      items.push_back(random_item(rng, 3 + rng() % 4, 1 + rng() % 5, "i" + std::to_string(i), "a" + std::to_string(i % 2)));
    }
    EXPECT_LE(gradient_check(items, c), 1e-5);
  }
}

TEST(Gradient, NonzeroAlongPositiveMinusNegativeAtSymmetricPoint) {
  const auto c = make(LossVariant::kPositiveNumerator, 0.5, 1.0);
  // cos(v,p) = cos(v,n) with p != n.
  BridgeItem it{"i", "a", {1, 0, 0}, {0.6, 0.8, 0}, {{0.6, -0.8, 0}}, {1.0}, 1.0};
  const auto g = loss_gradient(std::vector<BridgeItem>{it}, c);
  double along = 0.0;
  for (int d = 0; d < 3; ++d) along += g[0].video[d] * (it.positive[d] - it.negatives[0][d]);
  EXPECT_LT(along, -1e-3);  // moving the video toward the positive lowers the loss
  // The analytic value agrees with a central difference.
  const double h = 1e-6;
  auto plus = it, minus = it;
  for (int d = 0; d < 3; ++d) {
    plus.video[d] += h * (it.positive[d] - it.negatives[0][d]);
    minus.video[d] -= h * (it.positive[d] - it.negatives[0][d]);
  }
  const double fd = (loss_weighted(std::vector<BridgeItem>{plus}, c).total -
                     loss_weighted(std::vector<BridgeItem>{minus}, c).total) / (2 * h);
  EXPECT_NEAR(along, fd, 1e-6);
}

TEST(Gradient, ZeroForZeroWeightItems) {
  std::mt19937_64 rng(8);
  auto c = make(LossVariant::kPositiveNumerator);
  c.normalize_per_anchor = false;
  auto a = random_item(rng, 4, 2, "a", "x"), b = random_item(rng, 4, 2, "b", "y");
  a.weight_s2 = 1.0;
  b.weight_s2 = 0.0;
  const auto g = loss_gradient(std::vector<BridgeItem>{a, b}, c);
  for (double x : g[1].video) EXPECT_EQ(x, 0.0);
  for (double x : g[1].positive) EXPECT_EQ(x, 0.0);
  for (const auto& n : g[1].negatives) {
    for (double x : n) EXPECT_EQ(x, 0.0);
  }
  double mass = 0.0;
  for (double x : g[0].video) mass += std::abs(x);
  EXPECT_GT(mass, 0.0);
}

TEST(Gradient, CombinedEvaluationMatchesSeparateCalls) {
  std::mt19937_64 rng(9);
  const auto c = make(LossVariant::kPositiveNumerator, 0.4, 0.2);
  std::vector<BridgeItem> items;
  for (int i = 0; i < 6; ++i) items.push_back(random_item(rng, 5, 3, "i" + std::to_string(i), "a" + std::to_string(i % 2)));
  const auto [report, grads] = loss_and_gradient(items, c, 2);
  EXPECT_EQ(report.total, loss_weighted(items, c).total);
  const auto sep = loss_gradient(items, c);
  for (std::size_t i = 0; i < items.size(); ++i) EXPECT_EQ(grads[i].video, sep[i].video);
}

TEST(Report, JsonShape) {
  std::mt19937_64 rng(10);
  const auto c = make(LossVariant::kPositiveNumerator);
  auto r = loss_weighted(std::vector<BridgeItem>{random_item(rng, 3, 2, "only", "a")}, c);
  r.grad_check_max_rel_err = 1e-9;
  const auto j = r.to_json();
  EXPECT_EQ(j.at("total"), r.total);
  ASSERT_EQ(j.at("items").size(), 1U);
  EXPECT_EQ(j.at("items")[0].at("id"), "only");
  EXPECT_EQ(j.at("items")[0].at("component_losses").size(), 2U);
  EXPECT_TRUE(j.at("items")[0].contains("argmax"));
  EXPECT_TRUE(j.at("items")[0].contains("weight"));
  EXPECT_EQ(j.at("grad_check").at("max_rel_err"), 1e-9);
}

TEST(PairwiseSum, FixedOrderAndExactOnIntegers) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 999.0 * 1000.0 / 2.0);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}
