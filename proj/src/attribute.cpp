#include "vlbridge/attribute.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "vlbridge/error.hpp"
#include "vlbridge/lexicon.hpp"
#include "vlbridge/parallel.hpp"
#include "vlbridge/remote.hpp"

namespace vlb {

std::string_view to_string(PoolStage s) {
  switch (s) {
    case PoolStage::kRaw: return "raw";
    case PoolStage::kClustered: return "clustered";
    case PoolStage::kRanked: return "ranked";
    case PoolStage::kFiltered: return "filtered";
  }
  return "raw";
}

// ---------------------------------------------------------------------------
// NLI critics

double HeuristicNli::entailment(const std::string& premise, const std::string& hypothesis) const {
  const auto p_tokens = tokenize_lenient(premise);
  const auto h_tokens = tokenize_lenient(hypothesis);
  if (h_tokens.empty() || p_tokens.empty()) return 0.0;
  const std::set<std::string> p(p_tokens.begin(), p_tokens.end());
  const std::set<std::string> h(h_tokens.begin(), h_tokens.end());
  std::size_t common = 0;
  for (const auto& w : h) common += p.count(w);
  const double containment = static_cast<double>(common) / static_cast<double>(h.size());
  const double jaccard = static_cast<double>(common) / static_cast<double>(p.size() + h.size() - common);
  double score = 0.5 * (containment + jaccard);

  const std::string normalized = join_tokens(h_tokens);
  for (const auto& w : p) {
    if (!lexicon::is_noun(w)) continue;
    const auto attrs = lexicon::attributes_of(w);
    if (std::find(attrs.begin(), attrs.end(), normalized) != attrs.end()) score = std::max(score, 0.8);
  }
  return std::clamp(score, 0.0, 1.0);
}

RemoteNli::RemoteNli(NliSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double RemoteNli::entailment(const std::string& premise, const std::string& hypothesis) const {
  const nlohmann::json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  const nlohmann::json res = post_json(spec_.endpoint, "/nli", body, spec_.timeout_ms);
  auto it = res.find("entailment");
  if (it == res.end() || !it->is_number()) fail(ErrorCode::kRemote, "/nli: response lacks numeric 'entailment'");
  const double e = it->get<double>();
  if (!(e >= 0.0 && e <= 1.0)) fail(ErrorCode::kRemote, "/nli: entailment outside [0, 1]");
  return e;
}

std::unique_ptr<NliCritic> make_nli(const NliSpec& spec) {
  spec.validate();
  if (spec.kind == NliSpec::Kind::kHeuristic) return std::make_unique<HeuristicNli>();
  return std::make_unique<RemoteNli>(spec);
}

// ---------------------------------------------------------------------------
// Generation, clustering, ranking

AttributePool generate_attributes(const Rewriter& rewriter, const Embedder& embedder, const TextSample& sample,
                                  std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "generate_attributes: n must be >= 1");
  RewriteRequest req{sample.text(), RewriteLevel::kAttribute, Polarity::kPositive, std::nullopt, std::nullopt, n, 0};
  std::vector<std::string> texts;
  for (const auto& c : rewriter.rewrite(req)) {
    const auto tokens = tokenize_lenient(c.text);
    if (tokens.empty()) continue;
    std::string t = join_tokens(tokens);
    if (std::find(texts.begin(), texts.end(), t) == texts.end()) texts.push_back(std::move(t));
    if (texts.size() == n) break;
  }
  if (texts.empty()) fail(ErrorCode::kDegenerate, "no attributes generated for '" + sample.id() + "'");
  const auto embeddings = embed_texts(embedder, texts);
  AttributePool pool;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    pool.candidates.push_back({texts[i], sample.id(), embeddings[i], std::nullopt, std::nullopt, std::nullopt, false});
  }
  return pool;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<double> mean_of(std::span<const std::vector<double>> points, std::span<const std::size_t> assignment,
                            std::size_t cluster, std::size_t dim) {
  std::vector<double> m(dim, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (assignment[i] != cluster) continue;
    ++count;
    for (std::size_t d = 0; d < dim; ++d) m[d] += points[i][d];
  }
  if (count > 0) {
    for (double& x : m) x /= static_cast<double>(count);
  }
  return m;
}

}  // namespace

double within_cluster_ss(std::span<const std::vector<double>> points, std::span<const std::size_t> assignment) {
  if (points.empty()) return 0.0;
  const std::size_t dim = points[0].size();
  const std::size_t k = *std::max_element(assignment.begin(), assignment.end()) + 1;
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto m = mean_of(points, assignment, c, dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (assignment[i] == c) total += sq_dist(points[i], m);
    }
  }
  return total;
}

AttributePool cluster_attributes(AttributePool pool, std::size_t n_c, std::uint64_t seed) {
  const std::size_t n = pool.candidates.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "cluster_attributes: empty pool");
  if (n_c == 0) fail(ErrorCode::kInvalidArgument, "cluster_attributes: n_c must be >= 1");
  const std::size_t k = std::min(n_c, n);
  std::vector<std::vector<double>> x;
  for (const auto& c : pool.candidates) x.emplace_back(c.embedding.values().begin(), c.embedding.values().end());
  const std::size_t dim = x[0].size();

  std::vector<std::vector<double>> centers{x[fnv1a64("kmeans:" + std::to_string(seed)) % n]};
  while (centers.size() < k) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) d = std::min(d, sq_dist(x[i], c));
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    centers.push_back(x[best]);
  }

  std::vector<std::size_t> asg(n, k);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(x[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist(x[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (asg[i] != best) {
        asg[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (std::size_t c = 0; c < k; ++c) {
      if (std::find(asg.begin(), asg.end(), c) != asg.end()) centers[c] = mean_of(x, asg, c, dim);
    }
  }

  // Single-point moves (Hartigan): moving x from a to b changes the cost by
  // n_b/(n_b+1)|x-m_b|^2 - n_a/(n_a-1)|x-m_a|^2.
  std::vector<std::size_t> count(k, 0);
  for (auto a : asg) ++count[a];
  for (std::size_t c = 0; c < k; ++c) centers[c] = mean_of(x, asg, c, dim);
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = asg[i];
      if (count[a] <= 1) continue;
      const double na = static_cast<double>(count[a]);
      const double remove_gain = na / (na - 1.0) * sq_dist(x[i], centers[a]);
      std::size_t best = a;
      double best_delta = -1e-12;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(count[b]);
        const double delta = (count[b] == 0 ? 0.0 : nb / (nb + 1.0) * sq_dist(x[i], centers[b])) - remove_gain;
        if (delta < best_delta) {
          best_delta = delta;
          best = b;
        }
      }
      if (best != a) {
        asg[i] = best;
        --count[a];
        ++count[best];
        centers[a] = mean_of(x, asg, a, dim);
        centers[best] = mean_of(x, asg, best, dim);
        moved = true;
      }
    }
    if (!moved) break;
  }

  std::vector<std::size_t> relabel(k, k);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relabel[asg[i]] == k) relabel[asg[i]] = next++;
    pool.candidates[i].cluster = relabel[asg[i]];
  }
  pool.stage = PoolStage::kClustered;
  return pool;
}

AttributePool rank_by_video(AttributePool pool, const VideoFeatures& video) {
  for (auto& c : pool.candidates) {
    if (!c.cluster) fail(ErrorCode::kInvalidArgument, "rank_by_video: pool is not clustered");
    c.video_sim = cosine_similarity(c.embedding.values(), video.pooled());
    c.selected = false;
  }
  std::stable_sort(pool.candidates.begin(), pool.candidates.end(),
                   [](const AttributeCandidate& a, const AttributeCandidate& b) {
                     if (*a.video_sim != *b.video_sim) return *a.video_sim > *b.video_sim;
                     return a.text < b.text;
                   });
  std::set<std::size_t> seen;
  for (auto& c : pool.candidates) c.selected = seen.insert(*c.cluster).second;
  pool.stage = PoolStage::kRanked;
  return pool;
}

// ---------------------------------------------------------------------------
// Critics

bool critic_semantic(const NliCritic& nli, const std::string& premise, const std::string& attribute, double gamma1,
                     double* score) {
  const double s = nli.entailment(premise, attribute);
  if (score) *score = s;
  return s >= gamma1;
}

FormatScores format_scores(const std::optional<ConstituencyTree>& x_tree, const std::optional<ConstituencyTree>& y_tree,
                           std::span<const std::string> x_tokens, std::span<const std::string> y_tokens) {
  if (x_tokens.empty() || y_tokens.empty()) fail(ErrorCode::kInvalidArgument, "format critic: empty token list");
  const ConstituencyTree tx = x_tree ? *x_tree : shallow_parse(x_tokens);
  const ConstituencyTree ty = y_tree ? *y_tree : shallow_parse(y_tokens);
  return {tree_edit_distance(tx, ty), rouge_l(x_tokens, y_tokens)};
}

bool critic_format(const std::optional<ConstituencyTree>& x_tree, const std::optional<ConstituencyTree>& y_tree,
                   std::span<const std::string> x_tokens, std::span<const std::string> y_tokens, double gamma2,
                   double gamma3) {
  const FormatScores s = format_scores(x_tree, y_tree, x_tokens, y_tokens);
  return static_cast<double>(s.tree_distance) >= gamma2 && s.rouge <= gamma3;
}

std::vector<std::size_t> select_diverse(std::span<const DiversityPair> pairs, const ScoreMatrix& input_entail,
                                        const ScoreMatrix& output_entail, double gamma) {
  const std::size_t n = pairs.size();
  if (input_entail.size() != n || output_entail.size() != n) {
    fail(ErrorCode::kInvalidArgument, "select_diverse: matrix size does not match pair count");
  }
  ScoreMatrix w(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double s = std::max(output_entail[a][b], output_entail[b][a]);
      if (pairs[a].input != pairs[b].input) s = std::max({s, input_entail[a][b], input_entail[b][a]});
      w[a][b] = w[b][a] = s;
      edge[a][b] = edge[b][a] = s >= gamma;
    }
  }
  std::vector<std::size_t> kept;
  std::vector<bool> visited(n, false);
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::vector<std::size_t> component;
    std::deque<std::size_t> queue{start};
    visited[start] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      component.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (edge[u][v] && !visited[v]) {
          visited[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::size_t best = component[0];
    double best_sum = -1.0;
    for (std::size_t u : component) {
      double sum = 0.0;
      for (std::size_t v : component) {
        if (edge[u][v]) sum += w[u][v];
      }
      const bool better =
          sum > best_sum ||
          (sum == best_sum && std::tie(pairs[u].output, pairs[u].input, u) <
                                  std::tie(pairs[best].output, pairs[best].input, best));
      if (better) {
        best_sum = sum;
        best = u;
      }
    }
    kept.push_back(best);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::size_t> critic_diversity(std::span<const DiversityPair> pairs, const NliCritic& nli, double gamma,
                                          std::size_t parallelism) {
  const std::size_t n = pairs.size();
  ScoreMatrix in(n, std::vector<double>(n, 0.0)), out(n, std::vector<double>(n, 0.0));
  parallel_for(n * n, parallelism, [&](std::size_t k) {
    const std::size_t a = k / n, b = k % n;
    if (a == b) return;
    out[a][b] = nli.entailment(pairs[a].output, pairs[b].output);
    if (pairs[a].input != pairs[b].input) in[a][b] = nli.entailment(pairs[a].input, pairs[b].input);
  });
  return select_diverse(pairs, in, out, gamma);
}

FilterResult filter_pool(const AttributePool& ranked, const std::string& premise,
                         const std::optional<ConstituencyTree>& premise_tree, const NliCritic& nli,
                         const PipelineConfig& config) {
  if (ranked.stage != PoolStage::kRanked) fail(ErrorCode::kInvalidArgument, "filter_pool: pool is not ranked");
  const auto& th = config.thresholds;
  const auto premise_tokens = tokenize(premise);
  const std::size_t n = ranked.candidates.size();

  FilterResult result;
  result.verdicts.resize(n);
  parallel_for(n, config.parallelism, [&](std::size_t i) {
    const auto& cand = ranked.candidates[i];
    CandidateVerdict& v = result.verdicts[i];
    v.text = cand.text;
    v.o1 = critic_semantic(nli, premise, cand.text, th.gamma1, &v.entailment);
    v.format = format_scores(premise_tree, std::nullopt, premise_tokens, tokenize(cand.text));
    v.o2 = static_cast<double>(v.format.tree_distance) >= th.gamma2 && v.format.rouge <= th.gamma3;
  });

  std::vector<DiversityPair> pairs;
  for (const auto& c : ranked.candidates) pairs.push_back({premise, c.text});
  for (std::size_t i : critic_diversity(pairs, nli, th.gamma_dup, config.parallelism)) result.verdicts[i].o3 = true;

  result.pool.stage = PoolStage::kFiltered;
  for (std::size_t i = 0; i < n; ++i) {
    CandidateVerdict& v = result.verdicts[i];
    v.kept = v.o1 && v.o2 && v.o3;
    if (!v.kept) continue;
    AttributeCandidate c = ranked.candidates[i];
    c.entailment = v.entailment;
    result.pool.candidates.push_back(std::move(c));
  }
  return result;
}

}  // namespace vlb
