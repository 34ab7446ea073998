#include <gtest/gtest.h>

#include "vlbridge/error.hpp"
#include "vlbridge/toybench.hpp"
#include "vlbridge/trainer.hpp"

using namespace vlb;

namespace {

struct Fixture {
  PipelineConfig config;
  HashEmbedder embedder{64};
  std::vector<TrainingExample> examples;
  std::vector<RetrievalQuery> queries;

  explicit Fixture(std::size_t videos = 40) {
    ToyCorpusOptions co;
    co.videos = videos;
    co.seed = 21;
    const RuleRewriter rewriter(3);
    examples = augment_examples(make_toy_corpus(co), rewriter, embedder, config);
    queries = make_paraphrase_queries(examples, 99);
  }
};

TrainOptions quick(std::size_t epochs, double lr) {
  TrainOptions o;
  o.epochs = epochs;
  o.lr = lr;
  return o;
}

}  // namespace

TEST(Queries, ParaphraseEveryAnchor) {
  const Fixture f;
  ASSERT_EQ(f.queries.size(), f.examples.size());
  for (std::size_t i = 0; i < f.queries.size(); ++i) {
    EXPECT_EQ(f.queries[i].video_id, f.examples[i].record.sample.video_id());
    EXPECT_NE(f.queries[i].text, f.examples[i].record.sample.text());
  }
  EXPECT_EQ(make_paraphrase_queries(f.examples, 99).front().text, f.queries.front().text);
}

TEST(Items, PlanCoversAnchorsAndPositives) {
  const Fixture f(10);
  const auto o = quick(1, 1.0);
  const auto items = build_bridge_items(f.examples, f.embedder, o);
  std::size_t expected = 0;
  for (const auto& ex : f.examples) expected += 1 + 2 * ex.variants->positives.size();
  EXPECT_EQ(items.size(), expected);
  for (const auto& it : items) {
    EXPECT_NO_THROW(validate_item(it));
    EXPECT_EQ(it.weight_s1.size(), it.negatives.size());
    for (double w : it.weight_s1) EXPECT_GE(w, 0.0);
  }
  auto plain = o;
  plain.use_augmented = false;
  EXPECT_EQ(build_bridge_items(f.examples, f.embedder, plain).size(), f.examples.size());
}

TEST(Train, ZeroLearningRateAndZeroEpochsChangeNothing) {
  const Fixture f;
  const auto zero_lr = train_toy_dual_encoder(f.examples, f.embedder, f.config, quick(5, 0.0), f.queries);
  EXPECT_EQ(zero_lr.before, zero_lr.after);
  const auto zero_epochs = train_toy_dual_encoder(f.examples, f.embedder, f.config, quick(0, 10.0), f.queries);
  EXPECT_EQ(zero_epochs.before, zero_epochs.after);
  ASSERT_EQ(zero_epochs.loss_curve.size(), 1U);
  EXPECT_EQ(zero_epochs.w_text, zero_lr.w_text);
}

TEST(Train, ImprovesRecallAndLowersLoss) {
  const Fixture f(60);
  const auto r = train_toy_dual_encoder(f.examples, f.embedder, f.config, quick(60, 10.0), f.queries);
  EXPECT_GE(r.after.recall_at_1, r.before.recall_at_1);
  EXPECT_GE(r.after.recall_at_5, r.after.recall_at_1);
  EXPECT_LT(r.loss_curve.back(), r.loss_curve.front());
  EXPECT_EQ(r.loss_curve.size(), 61U);
  EXPECT_EQ(r.final_report.items.size(), r.items);
}

TEST(Train, DeterministicGivenSeed) {
  const Fixture f(20);
  const auto a = train_toy_dual_encoder(f.examples, f.embedder, f.config, quick(10, 5.0), f.queries);
  const auto b = train_toy_dual_encoder(f.examples, f.embedder, f.config, quick(10, 5.0), f.queries);
  EXPECT_EQ(a.w_text, b.w_text);
  EXPECT_EQ(a.w_video, b.w_video);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
}

TEST(Train, GradientCheckPasses) {
  const Fixture f(10);
  auto o = quick(2, 1.0);
  o.grad_check = true;
  const auto r = train_toy_dual_encoder(f.examples, f.embedder, f.config, o, f.queries);
  ASSERT_TRUE(r.grad_check_max_rel_err);
  EXPECT_LE(*r.grad_check_max_rel_err, 1e-5);
}

TEST(Train, RejectsEmptyAndVideoLessData) {
  const Fixture f(5);
  const std::vector<TrainingExample> none;
  EXPECT_THROW(train_toy_dual_encoder(none, f.embedder, f.config, quick(1, 1.0), f.queries), Error);
  auto broken = f.examples;
  broken[2].record.video.reset();
  try {
    train_toy_dual_encoder(broken, f.embedder, f.config, quick(1, 1.0), f.queries);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(broken[2].record.sample.id()), std::string::npos) << e.what();
  }
}

TEST(Evaluate, IdentityProjectionOnExactTextsIsPerfectWhenTextsAreVideos) {
  // Videos equal to the text embeddings: untrained retrieval of the anchor
  // texts themselves must be perfect.
  const HashEmbedder h(32);
  std::vector<TrainingExample> ex;
  std::vector<RetrievalQuery> q;
  for (const char* t : {"a red ball", "the old door", "three green cups", "dog runs home"}) {
    const auto e = h.embed_text(t);
    const std::string id = std::string("v_") + t;
    ex.push_back({{TextSample::create(std::string("s_") + t, id, t),
                   VideoFeatures(id, {std::vector<double>(e.values().begin(), e.values().end())})},
                  std::nullopt,
                  std::nullopt});
    q.push_back({t, id});
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(32, 32);
  const auto m = evaluate_retrieval(ex, h, I, I, q);
  EXPECT_EQ(m.queries, 4U);
  EXPECT_DOUBLE_EQ(m.recall_at_1, 1.0);
  EXPECT_DOUBLE_EQ(m.recall_at_5, 1.0);
}
