#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vlbridge/attribute.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/toybench.hpp"
// After Eigen: <resolv.h> from httplib defines a `_res` macro.
#include "stub_server.hpp"

using namespace vlb;

namespace {

AttributeCandidate candidate(const std::string& text, std::vector<double> v) {
  AttributeCandidate c;
  c.text = text;
  c.source_id = "s";
  c.embedding = EmbeddingVector::normalize(std::move(v));
  return c;
}

std::vector<std::string> texts(const AttributePool& p) {
  std::vector<std::string> out;
  for (const auto& c : p.candidates) out.push_back(c.text);
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct TableNli final : NliCritic {
  std::map<std::pair<std::string, std::string>, double> t;
  double entailment(const std::string& p, const std::string& h) const override {
    auto it = t.find({p, h});
    return it == t.end() ? 0.0 : it->second;
  }
};

}  // namespace

TEST(Generate, OfflineTableExamples) {
  const RuleRewriter r;
  const HashEmbedder h;
  const auto car = texts(generate_attributes(r, h, TextSample::create("a", "v", "a red car on the road"), 8));
  EXPECT_TRUE(contains(car, "four wheels"));
  EXPECT_TRUE(contains(car, "a steering wheel"));
  const auto person = texts(generate_attributes(r, h, TextSample::create("b", "v", "a person walks"), 8));
  EXPECT_TRUE(contains(person, "two arms"));
  EXPECT_THROW(generate_attributes(r, h, TextSample::create("c", "v", "a person walks"), 0), Error);
}

TEST(Generate, EmbedsEveryCandidateWithSource) {
  const RuleRewriter r;
  const HashEmbedder h(32);
  const auto pool = generate_attributes(r, h, TextSample::create("id7", "v", "a car"), 3);
  EXPECT_EQ(pool.stage, PoolStage::kRaw);
  EXPECT_LE(pool.candidates.size(), 3U);
  for (const auto& c : pool.candidates) {
    EXPECT_EQ(c.source_id, "id7");
    EXPECT_EQ(c.embedding, h.embed_text(c.text));
  }
}

TEST(Cluster, SingletonAndTwoGroups) {
  AttributePool one{{candidate("x", {1, 0})}, PoolStage::kRaw};
  const auto c1 = cluster_attributes(one, 5, 0);
  EXPECT_EQ(c1.candidates[0].cluster, 0U);
  EXPECT_EQ(c1.stage, PoolStage::kClustered);

  AttributePool two{{candidate("a", {1, 0}), candidate("b", {0, 1}), candidate("c", {1, 0}), candidate("d", {0, 1})},
                    PoolStage::kRaw};
  const auto c2 = cluster_attributes(two, 2, 3);
  EXPECT_EQ(c2.candidates[0].cluster, c2.candidates[2].cluster);
  EXPECT_EQ(c2.candidates[1].cluster, c2.candidates[3].cluster);
  EXPECT_NE(c2.candidates[0].cluster, c2.candidates[1].cluster);
}

TEST(Cluster, KEqualsPoolSizeGivesSingletons) {
  std::mt19937_64 rng(1);
  AttributePool p;
  for (int i = 0; i < 6; ++i) p.candidates.push_back(candidate("t" + std::to_string(i), oracle::random_unit(rng, 3)));
  const auto c = cluster_attributes(p, 6, 0);
  std::set<std::size_t> ids;
  for (const auto& x : c.candidates) ids.insert(*x.cluster);
  EXPECT_EQ(ids.size(), 6U);
}

TEST(Cluster, GlobalOrLocallyStableOptimum) {
  std::mt19937_64 rng(2);
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t n = 2 + rng() % 7;
    AttributePool p;
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(oracle::random_unit(rng, 3));
      p.candidates.push_back(candidate("t" + std::to_string(i), pts.back()));
    }
    const auto c = cluster_attributes(p, 2, draw);
    std::vector<std::size_t> assign;
    for (const auto& x : c.candidates) assign.push_back(*x.cluster);
    const double got = within_cluster_ss(pts, assign);

    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (1U << n); ++mask) {
      std::vector<std::size_t> a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = (mask >> i) & 1U;
      best = std::min(best, within_cluster_ss(pts, a));
    }
    bool stable = true;
    for (std::size_t i = 0; i < n; ++i) {
      auto moved = assign;
      moved[i] = 1 - moved[i];
      if (std::count(moved.begin(), moved.end(), moved[i]) == static_cast<long>(n)) continue;
      if (within_cluster_ss(pts, moved) < got - 1e-12) stable = false;
    }
    EXPECT_TRUE(got <= best * (1 + 1e-9) || stable) << "draw " << draw;
    EXPECT_TRUE(stable) << "draw " << draw;
  }
}

TEST(Rank, OrdersByVideoSimilarityAndMarksClusterHeads) {
  AttributePool p{{candidate("low", {0.1, 1}), candidate("high", {1, 0.1}), candidate("b", {1, 1}),
                   candidate("a", {1, 1})},
                  PoolStage::kClustered};
  for (auto& c : p.candidates) c.cluster = 0;
  p.candidates[3].cluster = 1;
  p.candidates[2].cluster = 1;
  const VideoFeatures video("v", {{1.0, 0.0}});
  const auto r = rank_by_video(p, video);
  EXPECT_EQ(r.stage, PoolStage::kRanked);
  std::map<std::string, bool> sel;
  for (const auto& c : r.candidates) sel[c.text] = c.selected;
  EXPECT_TRUE(sel["high"]);
  EXPECT_FALSE(sel["low"]);
  EXPECT_TRUE(sel["a"]);  // tie on similarity goes to the smaller text
  EXPECT_FALSE(sel["b"]);
  for (std::size_t i = 1; i < r.candidates.size(); ++i) EXPECT_GE(*r.candidates[i - 1].video_sim, *r.candidates[i].video_sim);
}

TEST(Semantic, ThresholdsAndJaccardExample) {
  const HeuristicNli nli;
  double score = -1;
  EXPECT_TRUE(critic_semantic(nli, "a red car on the road", "red car", 0.5, &score));
  // containment 1, Jaccard 2/6; the mean is 2/3.
  EXPECT_NEAR(score, (1.0 + 2.0 / 6.0) / 2.0, 1e-12);
  EXPECT_TRUE(critic_semantic(nli, "anything", "unrelated words", 0.0));
  EXPECT_NEAR(nli.entailment("a red car", "four wheels"), 0.8, 1e-12);
}

TEST(Format, VacuousIdenticalAndPassiveCases) {
  const auto x = tokenize("person opens the door"), y = tokenize("the door is opened by person");
  EXPECT_TRUE(critic_format(std::nullopt, std::nullopt, x, x, 0.0, 1.0));
  EXPECT_FALSE(critic_format(std::nullopt, std::nullopt, x, x, 0.5, 1.0));
  EXPECT_FALSE(critic_format(std::nullopt, std::nullopt, x, x, 0.0, 0.99));
  const auto f = format_scores(std::nullopt, std::nullopt, x, y);
  EXPECT_EQ(f.tree_distance, oracle::tree_distance(shallow_parse(x), shallow_parse(y)));
  EXPECT_NEAR(f.rouge, 2.0 * 2 / 4 * 2 / 6 / (2.0 / 4 + 2.0 / 6), 1e-12);
  EXPECT_NEAR(f.rouge, 0.4, 1e-12);
  EXPECT_GE(f.tree_distance, 3U);
  EXPECT_TRUE(critic_format(std::nullopt, std::nullopt, x, y, 3.0, 0.7));
}

TEST(Diversity, NoEdgesAndCompleteGraph) {
  TableNli none;
  const std::vector<DiversityPair> pairs = {{"p", "u"}, {"q", "v"}, {"r", "w"}};
  EXPECT_EQ(critic_diversity(pairs, none, 0.5), (std::vector<std::size_t>{0, 1, 2}));
  TableNli all;
  for (const auto* a : {"p", "q", "r", "u", "v", "w"}) {
    for (const auto* b : {"p", "q", "r", "u", "v", "w"}) all.t[{a, b}] = 1.0;
  }
  EXPECT_EQ(critic_diversity(pairs, all, 0.5).size(), 1U);
}

TEST(Diversity, MatchesOracleAndKeepsNoLinkedPair) {
  std::mt19937_64 rng(4);
  const std::vector<std::string> side = {"a", "b", "c", "d"};
  for (int draw = 0; draw < 200; ++draw) {
    TableNli nli;
    for (const auto& x : side) {
      for (const auto& y : side) nli.t[{x, y}] = (rng() % 4) / 4.0;
    }
    std::vector<DiversityPair> pairs;
    std::vector<oracle::Pair> op;
    for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) {
      pairs.push_back({side[rng() % 4], side[rng() % 4]});
      op.push_back({pairs.back().input, pairs.back().output});
    }
    const auto kept = critic_diversity(pairs, nli, 0.5, 2);
    EXPECT_EQ(kept, oracle::diverse(op, [&](auto& p, auto& h) { return nli.entailment(p, h); }, 0.5));
    for (auto a : kept) {
      for (auto b : kept) {
        if (a == b) continue;
        EXPECT_LT(std::max(nli.entailment(pairs[a].output, pairs[b].output), nli.entailment(pairs[b].output, pairs[a].output)), 0.5);
      }
    }
  }
}

TEST(Filter, VacuousKeepsRankedAndCeilingEmpties) {
  ToyCorpusOptions co;
  co.videos = 20;
  const auto recs = make_toy_corpus(co);
  PipelineConfig c;
  const RuleRewriter r;
  const HashEmbedder h(co.dim);
  const HeuristicNli nli;
  for (const auto& rec : recs) {
    auto ranked = rank_by_video(cluster_attributes(generate_attributes(r, h, rec.sample, 8), 5, 0), *rec.video);
    PipelineConfig vac = c;
    vac.thresholds = {0.0, 0.0, 1.0, 1.0};  // distinct texts never score 1 under the heuristic
    const auto all = filter_pool(ranked, rec.sample.text(), rec.sample.tree(), nli, vac);
    EXPECT_EQ(texts(all.pool), texts(ranked));
    EXPECT_EQ(all.pool.stage, PoolStage::kFiltered);
    EXPECT_EQ(all.verdicts.size(), ranked.candidates.size());
    PipelineConfig tight = c;
    tight.thresholds.gamma1 = 1.0;
    const auto none = filter_pool(ranked, rec.sample.text(), rec.sample.tree(), nli, tight);
    EXPECT_TRUE(none.pool.candidates.empty());
    // Kept candidates are exactly those passing all three critics.
    const auto mid = filter_pool(ranked, rec.sample.text(), rec.sample.tree(), nli, c);
    std::vector<std::string> want;
    for (const auto& v : mid.verdicts) {
      EXPECT_EQ(v.kept, v.o1 && v.o2 && v.o3);
      if (v.kept) want.push_back(v.text);
    }
    EXPECT_EQ(texts(mid.pool), want);
  }
}

TEST(RemoteNli, SpeaksTheNliProtocol) {
  StubServer stub;
  stub.on("/nli", [](const nlohmann::json& body) {
    return nlohmann::json{{"entailment", body.at("premise") == body.at("hypothesis") ? 1.0 : 0.25}};
  });
  stub.on("/bad/nli", [](const nlohmann::json&) { return nlohmann::json{{"entailment", 3.0}}; });
  stub.start();
  NliSpec spec;
  spec.kind = NliSpec::Kind::kRemote;
  spec.endpoint = stub.endpoint();
  const RemoteNli nli(spec);
  EXPECT_DOUBLE_EQ(nli.entailment("x", "x"), 1.0);
  EXPECT_DOUBLE_EQ(nli.entailment("x", "y"), 0.25);
  spec.endpoint = stub.endpoint() + "/bad";
  EXPECT_THROW(RemoteNli(spec).entailment("x", "y"), Error);
}
