#include "vlbridge/trainer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "vlbridge/error.hpp"
#include "vlbridge/lexicon.hpp"

namespace vlb {

namespace {

// Item in terms of column indices into the text and video feature matrices.
struct ItemPlan {
  std::string id;
  std::string anchor_id;
  std::size_t video = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
  std::vector<double> weight_s1;
  double weight_s2 = 1.0;
};

struct Plan {
  std::vector<std::string> texts;  // unique, in first-use order
  std::vector<ItemPlan> items;
  Eigen::MatrixXd text_features;   // d_text x U
  Eigen::MatrixXd video_features;  // d_video x M
};

std::size_t intern(std::vector<std::string>& texts, std::map<std::string, std::size_t>& index, const std::string& t) {
  auto [it, inserted] = index.emplace(t, texts.size());
  if (inserted) texts.push_back(t);
  return it->second;
}

Eigen::MatrixXd as_columns(const std::vector<EmbeddingVector>& vs) {
  Eigen::MatrixXd m(vs.empty() ? 0 : vs[0].dim(), vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    for (std::size_t i = 0; i < vs[j].dim(); ++i) m(i, j) = vs[j][i];
  }
  return m;
}

void require_videos(std::span<const TrainingExample> examples) {
  if (examples.empty()) fail(ErrorCode::kInvalidArgument, "train: empty dataset");
  std::string missing;
  for (const auto& ex : examples) {
    if (!ex.record.video) missing += (missing.empty() ? "" : ", ") + ex.record.sample.id();
  }
  if (!missing.empty()) fail(ErrorCode::kInvalidArgument, "train: samples without video features: " + missing);
  const std::size_t d = examples[0].record.video->dim();
  for (const auto& ex : examples) {
    if (ex.record.video->dim() != d) fail(ErrorCode::kInvalidArgument, "train: video dimensions differ");
  }
}

Plan make_plan(std::span<const TrainingExample> examples, const Embedder& embedder, const TrainOptions& options) {
  require_videos(examples);
  Plan plan;
  std::map<std::string, std::size_t> index;
  std::mt19937_64 rng(options.seed);
  const std::size_t m = examples.size();
  std::vector<EmbeddingVector> videos;
  for (const auto& ex : examples) {
    videos.push_back(EmbeddingVector::normalize({ex.record.video->pooled().begin(), ex.record.video->pooled().end()}));
  }

  for (std::size_t a = 0; a < m; ++a) {
    const auto& ex = examples[a];
    const std::string& id = ex.record.sample.id();
    const std::size_t anchor_text = intern(plan.texts, index, ex.record.sample.text());

    // Another anchor differs in every word, so as a negative of a variant its
    // significance is the anchor's summed S1 (1 when S1 is unavailable).
    double sentence_s1 = 1.0;
    if (options.use_augmented && ex.scores && ex.scores->s1) {
      sentence_s1 = std::accumulate(ex.scores->s1->begin(), ex.scores->s1->end(), 0.0);
    }
    const std::size_t c = std::min(options.anchor_negatives, m - 1);
    std::vector<std::size_t> batch_negatives;
    if (c > 0) {
      std::vector<std::size_t> others;
      for (std::size_t b = 0; b < m; ++b) {
        if (b != a) others.push_back(b);
      }
      // Partial Fisher-Yates with an explicit draw so results do not depend
      // on the standard library's shuffle.
      for (std::size_t k = 0; k < c; ++k) std::swap(others[k], others[k + rng() % (others.size() - k)]);
      for (std::size_t k = 0; k < c; ++k) {
        batch_negatives.push_back(intern(plan.texts, index, examples[others[k]].record.sample.text()));
      }
      plan.items.push_back({id, id, a, anchor_text, batch_negatives, std::vector<double>(c, 1.0), 1.0});
    }

    if (!options.use_augmented || !ex.variants || ex.variants->negatives.empty()) continue;
    const auto& set = *ex.variants;
    std::vector<std::size_t> negs;
    std::vector<double> s1;
    for (const auto& n : set.negatives) {
      negs.push_back(intern(plan.texts, index, n.text));
      double w = 1.0;
      if (ex.scores && ex.scores->s1 && n.word_index && *n.word_index < ex.scores->s1->size()) {
        w = (*ex.scores->s1)[*n.word_index];
      }
      s1.push_back(w);
    }
    for (std::size_t j = 0; j < set.positives.size(); ++j) {
      const double s2 = ex.scores && j < ex.scores->s2.size() ? ex.scores->s2[j] : 1.0;
      const std::size_t pos = intern(plan.texts, index, set.positives[j].text);
      const std::string jid = id + "/p" + std::to_string(j);
      plan.items.push_back({jid, id, a, pos, negs, s1, s2});
      if (!batch_negatives.empty()) {
        plan.items.push_back({jid + "/batch", id, a, pos, batch_negatives,
                              std::vector<double>(batch_negatives.size(), sentence_s1), s2});
      }
    }
  }
  if (plan.items.empty()) fail(ErrorCode::kInvalidArgument, "train: no bridge items could be built");
  plan.text_features = as_columns(embed_texts(embedder, plan.texts));
  plan.video_features = as_columns(videos);
  return plan;
}

std::vector<double> column(const Eigen::MatrixXd& m, std::size_t j) {
  return std::vector<double>(m.col(static_cast<Eigen::Index>(j)).data(),
                             m.col(static_cast<Eigen::Index>(j)).data() + m.rows());
}

std::vector<BridgeItem> materialize(const Plan& plan, const Eigen::MatrixXd& g, const Eigen::MatrixXd& f) {
  std::vector<BridgeItem> items;
  items.reserve(plan.items.size());
  for (const auto& p : plan.items) {
    BridgeItem it{p.id, p.anchor_id, column(f, p.video), column(g, p.positive), {}, p.weight_s1, p.weight_s2};
    for (auto n : p.negatives) it.negatives.push_back(column(g, n));
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace

std::vector<RetrievalQuery> make_paraphrase_queries(std::span<const TrainingExample> examples, std::uint64_t seed) {
  const RuleRewriter rewriter(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<RetrievalQuery> queries;
  for (const auto& ex : examples) {
    const TextSample& s = ex.record.sample;
    std::string text = s.text();
    const auto salt = fnv1a64(std::to_string(seed) + "/" + s.id());
    const std::size_t j = s.size();
    for (std::size_t k = 0; k < j; ++k) {
      const std::size_t i = (salt + k) % j;
      if (lexicon::is_stopword(s.tokens()[i])) continue;
      try {
        text = word_level_rewrite(rewriter, s, i, Polarity::kPositive).text;
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerate) throw;
      }
    }
    try {
      text = structure_level_rewrite(rewriter, text, Polarity::kPositive, salt % 4).text;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
    }
    queries.push_back({text, s.video_id()});
  }
  return queries;
}

std::vector<BridgeItem> build_bridge_items(std::span<const TrainingExample> examples, const Embedder& embedder,
                                           const TrainOptions& options) {
  const Plan plan = make_plan(examples, embedder, options);
  return materialize(plan, plan.text_features, plan.video_features);
}

RetrievalMetrics evaluate_retrieval(std::span<const TrainingExample> examples, const Embedder& embedder,
                                    const Eigen::MatrixXd& w_text, const Eigen::MatrixXd& w_video,
                                    std::span<const RetrievalQuery> queries) {
  require_videos(examples);
  RetrievalMetrics out;
  if (queries.empty()) return out;
  std::vector<std::string> video_ids;
  std::vector<EmbeddingVector> videos;
  for (const auto& ex : examples) {
    const std::string& vid = ex.record.sample.video_id();
    if (std::find(video_ids.begin(), video_ids.end(), vid) != video_ids.end()) continue;
    video_ids.push_back(vid);
    videos.push_back(EmbeddingVector::normalize({ex.record.video->pooled().begin(), ex.record.video->pooled().end()}));
  }
  Eigen::MatrixXd f = w_video * as_columns(videos);
  f.colwise().normalize();
  std::vector<std::string> texts;
  for (const auto& q : queries) texts.push_back(q.text);
  Eigen::MatrixXd g = w_text * as_columns(embed_texts(embedder, texts));
  g.colwise().normalize();
  const Eigen::MatrixXd scores = g.transpose() * f;  // queries x videos

  std::size_t hit1 = 0, hit5 = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    auto it = std::find(video_ids.begin(), video_ids.end(), queries[q].video_id);
    if (it == video_ids.end()) fail(ErrorCode::kInvalidArgument, "query refers to unknown video " + queries[q].video_id);
    const auto truth = static_cast<Eigen::Index>(it - video_ids.begin());
    const auto row = static_cast<Eigen::Index>(q);
    std::size_t rank = 0;
    for (Eigen::Index v = 0; v < scores.cols(); ++v) {
      const double s = scores(row, v), t = scores(row, truth);
      if (s > t || (s == t && v < truth)) ++rank;
    }
    hit1 += rank < 1;
    hit5 += rank < 5;
  }
  out.queries = queries.size();
  out.recall_at_1 = static_cast<double>(hit1) / static_cast<double>(queries.size());
  out.recall_at_5 = static_cast<double>(hit5) / static_cast<double>(queries.size());
  return out;
}

TrainResult train_toy_dual_encoder(std::span<const TrainingExample> examples, const Embedder& embedder,
                                   const PipelineConfig& config, const TrainOptions& options,
                                   std::span<const RetrievalQuery> queries) {
  if (!(options.lr >= 0.0)) fail(ErrorCode::kInvalidArgument, "train: lr must be >= 0");
  const Plan plan = make_plan(examples, embedder, options);
  const auto dv = plan.video_features.rows(), dt = plan.text_features.rows();

  TrainResult r;
  r.items = plan.items.size();
  r.w_video = Eigen::MatrixXd::Identity(dv, dv);
  // Text coordinates fold onto video coordinates modulo dv; equal widths give
  // the identity, and a narrower video space keeps every text coordinate.
  r.w_text = Eigen::MatrixXd::Zero(dv, dt);
  for (Eigen::Index j = 0; j < dt; ++j) r.w_text(j % dv, j) = 1.0;
  r.before = evaluate_retrieval(examples, embedder, r.w_text, r.w_video, queries);

  const LossConfig& loss = config.loss;
  for (std::size_t epoch = 0;; ++epoch) {
    const Eigen::MatrixXd g = r.w_text * plan.text_features;
    const Eigen::MatrixXd f = r.w_video * plan.video_features;
    const auto items = materialize(plan, g, f);
    auto [report, grads] = loss_and_gradient(items, loss, config.parallelism);
    r.final_report = std::move(report);
    r.loss_curve.push_back(r.final_report.total);
    if (epoch == 0 && options.grad_check) {
      const std::size_t n = std::min(options.grad_check_items, items.size());
      r.grad_check_max_rel_err = gradient_check(std::span(items).first(n), loss);
      r.final_report.grad_check_max_rel_err = r.grad_check_max_rel_err;
    }
    if (epoch == options.epochs) break;

    Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    Eigen::MatrixXd df = Eigen::MatrixXd::Zero(f.rows(), f.cols());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& p = plan.items[i];
      const auto& gr = grads[i];
      df.col(static_cast<Eigen::Index>(p.video)) += Eigen::Map<const Eigen::VectorXd>(gr.video.data(), dv);
      dg.col(static_cast<Eigen::Index>(p.positive)) += Eigen::Map<const Eigen::VectorXd>(gr.positive.data(), dv);
      for (std::size_t c = 0; c < p.negatives.size(); ++c) {
        dg.col(static_cast<Eigen::Index>(p.negatives[c])) +=
            Eigen::Map<const Eigen::VectorXd>(gr.negatives[c].data(), dv);
      }
    }
    r.w_text -= options.lr * (dg * plan.text_features.transpose());
    r.w_video -= options.lr * (df * plan.video_features.transpose());
  }
  if (r.grad_check_max_rel_err) r.final_report.grad_check_max_rel_err = r.grad_check_max_rel_err;
  r.after = evaluate_retrieval(examples, embedder, r.w_text, r.w_video, queries);
  return r;
}

}  // namespace vlb
