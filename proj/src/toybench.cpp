#include "vlbridge/toybench.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "vlbridge/augment.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/lexicon.hpp"
#include "vlbridge/score.hpp"

namespace vlb {

namespace {

const std::vector<std::string> kSubjects = {"person", "man", "woman", "boy", "girl",
                                            "child", "dog", "cat", "baby", "player"};
const std::vector<std::string> kVerbs = {"open", "close", "hold", "carry", "throw", "push", "pull", "grab", "wash",
                                         "clean", "cut", "kick", "lift", "drop", "move", "fix", "watch", "read"};
const std::vector<std::string> kObjects = {"box", "ball", "cup", "book", "bag", "bottle", "phone",
                                           "laptop", "plate", "towel", "shirt", "hat", "shoe", "jacket",
                                           "blanket", "pillow", "chair", "table", "car", "door"};
const std::vector<std::string> kAdjectives = {"red", "blue", "green", "yellow", "black", "white",
                                              "brown", "pink", "small", "big", "old", "new"};

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on raw 53-bit draws keeps the stream portable across
  // standard library implementations.
  auto u = [&] { return (static_cast<double>(rng() >> 11) + 0.5) / 9007199254740992.0; };
  return std::sqrt(-2.0 * std::log(u())) * std::cos(2.0 * M_PI * u());
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t d) {
  std::vector<double> v(d);
  double s = 0.0;
  for (double& x : v) {
    x = gaussian(rng);
    s += x * x;
  }
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

}  // namespace

std::vector<SampleRecord> make_toy_corpus(const ToyCorpusOptions& o) {
  if (o.dim < 2) fail(ErrorCode::kInvalidArgument, "toy corpus: dim must be >= 2");
  std::mt19937_64 rng(o.seed);
  std::map<std::string, std::vector<double>> concepts;
  auto concept_of = [&](const std::string& w) -> const std::vector<double>& {
    auto it = concepts.find(w);
    if (it == concepts.end()) it = concepts.emplace(w, random_unit(rng, o.dim)).first;
    return it->second;
  };
  const auto pps = lexicon::prepositional_phrases();

  std::vector<SampleRecord> out;
  std::set<std::string> seen;
  char id[32];
  while (out.size() < o.videos) {
    const std::string subj = kSubjects[draw(rng, kSubjects.size())];
    const std::string verb = kVerbs[draw(rng, kVerbs.size())];
    const std::string adj = kAdjectives[draw(rng, kAdjectives.size())];
    const std::string obj = kObjects[draw(rng, kObjects.size())];
    const std::string pp = std::string(pps[draw(rng, pps.size())]);
    const auto v = lexicon::find_verb(verb);
    const std::string text =
        "the " + subj + " " + lexicon::inflect(*v->entry, lexicon::VerbForm::kThird) + " the " + adj + " " + obj + " " + pp;
    if (!seen.insert(text).second) continue;

    std::vector<double> video(o.dim, 0.0);
    for (const std::string& w : {subj, verb, adj, obj, tokenize(pp).back()}) {
      const auto& c = concept_of(w);
      for (std::size_t i = 0; i < o.dim; ++i) video[i] += c[i];
    }
    const auto noise = random_unit(rng, o.dim);
    double s = 0.0;
    for (std::size_t i = 0; i < o.dim; ++i) {
      video[i] += o.noise * std::sqrt(5.0) * noise[i];
      s += video[i] * video[i];
    }
    for (double& x : video) x /= std::sqrt(s);

    std::snprintf(id, sizeof id, "%04zu", out.size());
    out.push_back({TextSample::create(std::string("s") + id, std::string("v") + id, text),
                   VideoFeatures::normalized(std::string("v") + id, {video})});
  }
  return out;
}

std::vector<TrainingExample> augment_examples(const std::vector<SampleRecord>& records, const Rewriter& rewriter,
                                              const Embedder& embedder, const PipelineConfig& config) {
  const PromptContext ctx(config.prompt);
  std::vector<TrainingExample> out;
  for (const auto& r : records) {
    TrainingExample ex{r, std::nullopt, std::nullopt};
    std::optional<std::vector<double>> s1;
    if (r.sample.size() >= 2) s1 = compute_s1(embedder, ctx, r.sample);
    ex.variants = generate_variant_set(rewriter, r.sample, config,
                                       s1 ? std::optional<std::span<const double>>(*s1) : std::nullopt);
    ex.scores = compute_significance(embedder, ctx, *ex.variants);
    out.push_back(std::move(ex));
  }
  return out;
}

double ToyArm::mean_recall_at_1() const {
  if (recall_at_1.empty()) return 0.0;
  double s = 0.0;
  for (double x : recall_at_1) s += x;
  return s / static_cast<double>(recall_at_1.size());
}

const ToyArm& ToyBenchmarkResult::arm(const std::string& name) const {
  for (const auto& a : arms) {
    if (a.name == name) return a;
  }
  fail(ErrorCode::kInvalidArgument, "no benchmark arm named " + name);
}

ToyBenchmarkResult run_toy_benchmark(const ToyBenchmarkOptions& options) {
  struct ArmSpec {
    std::string name;
    bool augmented;
    WeightMode weighting;
  };
  const std::vector<ArmSpec> specs = {{"anchors-unweighted", false, WeightMode::kNone},
                                      {"full", true, WeightMode::kFull},
                                      {"s1-only", true, WeightMode::kS1Only},
                                      {"s2-only", true, WeightMode::kS2Only},
                                      {"augmented-unweighted", true, WeightMode::kNone}};
  ToyBenchmarkResult result;
  for (const auto& s : specs) result.arms.push_back({s.name, {}, {}});

  for (std::uint64_t seed : options.seeds) {
    ToyCorpusOptions co = options.corpus;
    co.seed = seed;
    const auto records = make_toy_corpus(co);
    PipelineConfig config;
    config.seed = seed;
    config.embedder.dim = options.text_dim;
    config.loss.variant = LossVariant::kPositiveNumerator;
    const HashEmbedder embedder(options.text_dim);
    const RuleRewriter rewriter(seed);
    const auto examples = augment_examples(records, rewriter, embedder, config);
    const auto queries = make_paraphrase_queries(examples, seed + 7919);
    for (std::size_t a = 0; a < specs.size(); ++a) {
      PipelineConfig arm_config = config;
      arm_config.loss.weighting = specs[a].weighting;
      TrainOptions to;
      to.epochs = options.epochs;
      to.lr = options.lr;
      to.seed = seed;
      to.use_augmented = specs[a].augmented;
      const auto r = train_toy_dual_encoder(examples, embedder, arm_config, to, queries);
      result.arms[a].recall_at_1.push_back(r.after.recall_at_1);
      result.arms[a].recall_at_5.push_back(r.after.recall_at_5);
    }
  }
  return result;
}

}  // namespace vlb
