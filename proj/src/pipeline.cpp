#include "vlbridge/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "vlbridge/attribute.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/parallel.hpp"

namespace vlb {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Removes every registered file unless the command reached commit().
class OutputGuard {
 public:
  explicit OutputGuard(std::vector<fs::path> files) : files_(std::move(files)) {}
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
  }
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> files_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_paths(const fs::path& input, const fs::path& output) {
  if (output.empty()) fail(ErrorCode::kInvalidArgument, "output path is empty");
  std::error_code ec;
  if (fs::exists(output, ec) && fs::equivalent(input, output, ec)) {
    fail(ErrorCode::kInvalidArgument, "output path must differ from the input path");
  }
}

std::string jsonl(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

RunManifest start_manifest(std::string command, const PipelineConfig& config, const fs::path& input,
                           const fs::path& output) {
  RunManifest m;
  m.command = std::move(command);
  m.config_hash = config.hash();
  m.seed = config.seed;
  m.input = input.string();
  m.output = output.string();
  return m;
}

void write_manifest(const RunManifest& m, const fs::path& artifact) {
  write_text(manifest_path(artifact), m.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Augmented-record serialization

Polarity polarity_from(std::string_view s, std::size_t line) {
  if (s == "positive") return Polarity::kPositive;
  if (s == "negative") return Polarity::kNegative;
  fail(ErrorCode::kParse, fmt::format("line {}: unknown polarity '{}'", line, s));
}

RewriteLevel level_from(std::string_view s, std::size_t line) {
  if (s == "word") return RewriteLevel::kWord;
  if (s == "structure") return RewriteLevel::kStructure;
  if (s == "attribute") return RewriteLevel::kAttribute;
  fail(ErrorCode::kParse, fmt::format("line {}: unknown rewrite level '{}'", line, s));
}

ComponentKind component_from(std::string_view s, std::size_t line) {
  try {
    return component_from_string(s);
  } catch (const Error&) {
    fail(ErrorCode::kParse, fmt::format("line {}: unknown component '{}'", line, s));
  }
}

ordered_json variant_json(const Variant& v) {
  ordered_json j;
  j["text"] = v.text;
  j["polarity"] = to_string(v.polarity);
  j["level"] = to_string(v.level);
  if (v.word_index) j["word_index"] = *v.word_index;
  if (v.component) j["component"] = to_string(*v.component);
  if (v.logprob) j["logprob"] = *v.logprob;
  return j;
}

Variant variant_from(const json& j, std::size_t line) {
  Variant v;
  v.text = j.at("text").get<std::string>();
  v.polarity = polarity_from(j.at("polarity").get<std::string>(), line);
  v.level = level_from(j.at("level").get<std::string>(), line);
  if (j.contains("word_index")) v.word_index = j["word_index"].get<std::size_t>();
  if (j.contains("component")) v.component = component_from(j["component"].get<std::string>(), line);
  if (j.contains("logprob")) v.logprob = j["logprob"].get<double>();
  return v;
}

// ---------------------------------------------------------------------------
// Threshold sweep for the attribute critics

const std::vector<double> kSweepGamma1 = {0.0, 0.25, 0.5, 0.75, 1.0};
const std::vector<double> kSweepGamma2 = {0.0, 1.5, 3.0, 4.5, 6.0};
const std::vector<double> kSweepGamma3 = {0.0, 0.25, 0.5, 0.75, 1.0};

// O3 does not depend on gamma1..gamma3, so each grid point is a re-threshold
// of the stored verdicts.
bool kept_at(const CandidateVerdict& v, double g1, double g2, double g3) {
  return v.entailment >= g1 && static_cast<double>(v.format.tree_distance) >= g2 && v.format.rouge <= g3 && v.o3;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------

ordered_json RunManifest::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["input"] = input;
  j["output"] = output;
  j["timings_ms"] = ordered_json::object();
  for (const auto& [k, v] : timings_ms) j["timings_ms"][k] = v;
  j["counts"] = ordered_json::array();
  for (const auto& [k, v] : counts) j["counts"].push_back({{"stage", k}, {"count", v}});
  j["warnings"] = warnings;
  return j;
}

RunManifest RunManifest::from_json(const ordered_json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.input = j.at("input").get<std::string>();
  m.output = j.at("output").get<std::string>();
  for (const auto& [k, v] : j.at("timings_ms").items()) m.timings_ms.emplace_back(k, v.get<double>());
  for (const auto& c : j.at("counts")) {
    m.counts.emplace_back(c.at("stage").get<std::string>(), c.at("count").get<std::size_t>());
  }
  m.warnings = j.at("warnings").get<std::vector<std::string>>();
  return m;
}

fs::path manifest_path(const fs::path& artifact) { return fs::path(artifact.string() + ".manifest.json"); }
fs::path sweep_path(const fs::path& artifact) { return fs::path(artifact.string() + ".sweep.json"); }
fs::path csv_path(const fs::path& report) { return fs::path(report.string() + ".csv"); }

std::string serialize_augmented_record(const AugmentedRecord& r) {
  ordered_json j = ordered_json::parse(serialize_sample_record(r.record));
  if (r.variants) {
    ordered_json v;
    v["positives"] = ordered_json::array();
    for (const auto& p : r.variants->positives) v["positives"].push_back(variant_json(p));
    v["negatives"] = ordered_json::array();
    for (const auto& n : r.variants->negatives) v["negatives"].push_back(variant_json(n));
    v["probs"] = r.variants->probs;
    v["failures"] = ordered_json::array();
    for (const auto& f : r.variants->failures) {
      v["failures"].push_back({{"component", to_string(f.component)}, {"message", f.message}});
    }
    j["variants"] = std::move(v);
  } else {
    j["variants"] = nullptr;
  }
  if (r.scores) {
    ordered_json s;
    s["s1"] = r.scores->s1 ? ordered_json(*r.scores->s1) : ordered_json(nullptr);
    s["s2"] = r.scores->s2;
    j["scores"] = std::move(s);
  } else {
    j["scores"] = nullptr;
  }
  if (r.error) j["error"] = *r.error;
  return j.dump();
}

AugmentedRecord parse_augmented_record(std::string_view json_line, std::size_t line) {
  AugmentedRecord r{parse_sample_record(json_line, line), std::nullopt, std::nullopt, std::nullopt};
  const json j = json::parse(json_line);
  try {
    if (auto it = j.find("variants"); it != j.end() && !it->is_null()) {
      VariantSet set{r.record.sample, {}, {}, {}, {}};
      for (const auto& p : it->at("positives")) set.positives.push_back(variant_from(p, line));
      for (const auto& n : it->at("negatives")) set.negatives.push_back(variant_from(n, line));
      set.probs = it->at("probs").get<std::vector<double>>();
      for (const auto& f : it->at("failures")) {
        set.failures.push_back({component_from(f.at("component").get<std::string>(), line),
                                f.at("message").get<std::string>()});
      }
      if (set.probs.size() != set.positives.size()) {
        fail(ErrorCode::kParse, fmt::format("line {}: one prob per positive expected", line));
      }
      r.variants = std::move(set);
    }
    if (auto it = j.find("scores"); it != j.end() && !it->is_null()) {
      SignificanceReport s{r.record.sample.id(), std::nullopt, it->at("s2").get<std::vector<double>>()};
      if (const auto& s1 = it->at("s1"); !s1.is_null()) s.s1 = s1.get<std::vector<double>>();
      r.scores = std::move(s);
    }
    if (auto it = j.find("error"); it != j.end() && it->is_string()) r.error = it->get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, fmt::format("line {}: malformed augmentation: {}", line, e.what()));
  }
  return r;
}

namespace {

std::vector<AugmentedRecord> load_augmented(const fs::path& input) {
  std::vector<AugmentedRecord> out;
  std::set<std::string> ids;
  for (const auto& [line, text] : read_jsonl_lines(input)) {
    out.push_back(parse_augmented_record(text, line));
    if (!ids.insert(out.back().record.sample.id()).second) {
      fail(ErrorCode::kParse, fmt::format("line {}: duplicate id '{}'", line, out.back().record.sample.id()));
    }
  }
  return out;
}

AugmentedRecord augment_one(const SampleRecord& rec, const Rewriter& rewriter, const Embedder& embedder,
                            const PipelineConfig& config, const PromptContext& ctx) {
  AugmentedRecord out{rec, std::nullopt, std::nullopt, std::nullopt};
  try {
    std::optional<std::vector<double>> s1;
    if (rec.sample.size() >= 2) s1 = compute_s1(embedder, ctx, rec.sample);
    auto set = generate_variant_set(rewriter, rec.sample, config,
                                    s1 ? std::optional<std::span<const double>>(*s1) : std::nullopt);
    out.scores = compute_significance(embedder, ctx, set);
    out.variants = std::move(set);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
    out.error = e.what();
  }
  return out;
}

std::string require_videos_message(const std::vector<AugmentedRecord>& records, std::string_view who) {
  std::string missing;
  for (const auto& r : records) {
    if (!r.record.video) missing += (missing.empty() ? "" : ", ") + r.record.sample.id();
  }
  return missing.empty() ? "" : std::string(who) + ": samples without video features: " + missing;
}

}  // namespace

RunManifest cmd_augment(const PipelineConfig& config, const fs::path& input, const fs::path& output) {
  config.validate();
  check_paths(input, output);
  Stopwatch clock;
  RunManifest m = start_manifest("augment", config, input, output);
  OutputGuard guard({output, manifest_path(output)});

  const auto records = load_dataset(input);
  m.timings_ms.emplace_back("load", clock.lap_ms());
  if (records.empty()) m.warnings.push_back("input is empty");

  const auto embedder = make_embedder(config.embedder, config.parallelism);
  const auto rewriter = make_rewriter(config.rewriter, config.seed);
  const PromptContext ctx(config.prompt);
  std::vector<std::optional<AugmentedRecord>> out(records.size());
  parallel_for(records.size(), config.parallelism,
               [&](std::size_t i) { out[i] = augment_one(records[i], *rewriter, *embedder, config, ctx); });
  m.timings_ms.emplace_back("augment", clock.lap_ms());

  std::size_t augmented = 0, positives = 0, negatives = 0, failures = 0;
  std::vector<std::string> lines;
  for (const auto& slot : out) {
    const AugmentedRecord& r = *slot;
    if (r.variants) {
      ++augmented;
      positives += r.variants->positives.size();
      negatives += r.variants->negatives.size();
      failures += r.variants->failures.size();
      for (const auto& f : r.variants->failures) {
        m.warnings.push_back(fmt::format("sample {}: no {} negative: {}", r.record.sample.id(),
                                         to_string(f.component), f.message));
      }
    } else {
      m.warnings.push_back(fmt::format("sample {}: augmentation skipped: {}", r.record.sample.id(), *r.error));
    }
    lines.push_back(serialize_augmented_record(r));
  }
  write_text(output, jsonl(lines));
  m.timings_ms.emplace_back("write", clock.lap_ms());
  m.counts = {{"samples", records.size()},
              {"augmented", augmented},
              {"positives", positives},
              {"negatives", negatives},
              {"negative_failures", failures}};
  write_manifest(m, output);
  guard.commit();
  return m;
}

RunManifest cmd_attributes(const PipelineConfig& config, const fs::path& input, const fs::path& output) {
  config.validate();
  check_paths(input, output);
  Stopwatch clock;
  RunManifest m = start_manifest("attributes", config, input, output);
  OutputGuard guard({output, manifest_path(output), sweep_path(output)});

  const auto records = load_augmented(input);
  m.timings_ms.emplace_back("load", clock.lap_ms());
  if (records.empty()) m.warnings.push_back("input is empty");
  if (auto msg = require_videos_message(records, "attributes"); !msg.empty()) {
    fail(ErrorCode::kInvalidArgument, msg);
  }
  // Ranking compares text and video vectors directly, so their widths must agree.
  if (config.embedder.kind == EmbedderSpec::Kind::kHash) {
    for (const auto& r : records) {
      if (r.record.video->dim() != config.embedder.dim) {
        fail(ErrorCode::kInvalidArgument,
             fmt::format("attributes: sample {} has {}-dim video features but embedder.dim is {}",
                         r.record.sample.id(), r.record.video->dim(), config.embedder.dim));
      }
    }
  }

  const auto embedder = make_embedder(config.embedder, config.parallelism);
  const auto rewriter = make_rewriter(config.rewriter, config.seed);
  const auto nli = make_nli(config.nli);

  struct Outcome {
    std::string premise;
    std::optional<std::string> warning;
    AttributePool ranked;
    FilterResult filtered;
  };
  std::vector<Outcome> outcomes(records.size());
  // Samples run one at a time here; the critics parallelize within a pool.
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const TextSample& s = r.record.sample;
    Outcome& o = outcomes[i];
    o.premise = s.text();
    std::optional<ConstituencyTree> premise_tree = s.tree();
    if (config.premise == PremiseSource::kVariant) {
      std::optional<std::string> variant;
      if (r.variants && !r.variants->positives.empty()) {
        variant = r.variants->positives.front().text;
      } else {
        try {
          const auto set = generate_variant_set(*rewriter, s, config);
          if (!set.positives.empty()) variant = set.positives.front().text;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerate) throw;
        }
      }
      if (variant) {
        o.premise = *variant;
        premise_tree.reset();
      } else {
        o.warning = fmt::format("sample {}: no positive variant, anchor used as premise", s.id());
      }
    }
    AttributePool pool = generate_attributes(*rewriter, *embedder, s, config.n_attributes);
    pool = cluster_attributes(std::move(pool), config.n_c, config.seed);
    o.ranked = rank_by_video(std::move(pool), *r.record.video);
    o.filtered = filter_pool(o.ranked, o.premise, premise_tree, *nli, config);
  }
  m.timings_ms.emplace_back("filter", clock.lap_ms());

  std::size_t raw = 0, pass1 = 0, pass12 = 0, kept = 0;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& s = records[i].record.sample;
    const Outcome& o = outcomes[i];
    if (o.warning) m.warnings.push_back(*o.warning);
    ordered_json j;
    j["id"] = s.id();
    j["video_id"] = s.video_id();
    j["premise"] = o.premise;
    j["candidates"] = ordered_json::array();
    std::size_t sample_kept = 0;
    for (std::size_t k = 0; k < o.ranked.candidates.size(); ++k) {
      const auto& c = o.ranked.candidates[k];
      const auto& v = o.filtered.verdicts[k];
      raw += 1;
      pass1 += v.o1;
      pass12 += v.o1 && v.o2;
      sample_kept += v.kept;
      ordered_json cj;
      cj["text"] = c.text;
      cj["cluster"] = c.cluster ? ordered_json(*c.cluster) : ordered_json(nullptr);
      cj["video_sim"] = c.video_sim ? ordered_json(*c.video_sim) : ordered_json(nullptr);
      cj["selected"] = c.selected;
      cj["entailment"] = v.entailment;
      cj["o1"] = v.o1;
      cj["tree_distance"] = v.format.tree_distance;
      cj["rouge"] = v.format.rouge;
      cj["o2"] = v.o2;
      cj["o3"] = v.o3;
      cj["kept"] = v.kept;
      j["candidates"].push_back(std::move(cj));
    }
    kept += sample_kept;
    j["kept"] = ordered_json::array();
    for (const auto& c : o.filtered.pool.candidates) j["kept"].push_back(c.text);
    if (sample_kept == 0) m.warnings.push_back(fmt::format("sample {}: filtered pool is empty", s.id()));
    lines.push_back(j.dump());
  }
  write_text(output, jsonl(lines));

  ordered_json sweep;
  sweep["artifact"] = "sweep";
  sweep["config_hash"] = m.config_hash;
  sweep["raw"] = raw;
  sweep["grid"] = ordered_json::array();
  for (double g1 : kSweepGamma1) {
    for (double g2 : kSweepGamma2) {
      for (double g3 : kSweepGamma3) {
        std::size_t n = 0;
        for (const auto& o : outcomes) {
          for (const auto& v : o.filtered.verdicts) n += kept_at(v, g1, g2, g3);
        }
        sweep["grid"].push_back({{"gamma1", g1}, {"gamma2", g2}, {"gamma3", g3}, {"kept", n}});
      }
    }
  }
  write_text(sweep_path(output), sweep.dump(2) + "\n");
  m.timings_ms.emplace_back("write", clock.lap_ms());
  m.counts = {{"raw", raw}, {"semantic", pass1}, {"format", pass12}, {"kept", kept}};
  write_manifest(m, output);
  guard.commit();
  return m;
}

RunManifest cmd_train(const PipelineConfig& config, const fs::path& input, const fs::path& output,
                      const TrainOverrides& overrides) {
  config.validate();
  check_paths(input, output);
  Stopwatch clock;
  RunManifest m = start_manifest("train", config, input, output);
  OutputGuard guard({output, manifest_path(output)});

  const auto records = load_augmented(input);
  m.timings_ms.emplace_back("load", clock.lap_ms());
  if (records.empty()) fail(ErrorCode::kInvalidArgument, "train: empty dataset");
  if (auto msg = require_videos_message(records, "train"); !msg.empty()) fail(ErrorCode::kInvalidArgument, msg);

  std::vector<TrainingExample> examples;
  std::size_t augmented = 0;
  for (const auto& r : records) {
    examples.push_back({r.record, r.variants, r.scores});
    augmented += r.variants.has_value();
  }
  if (augmented == 0) m.warnings.push_back("no augmented samples; training on anchor texts only");

  TrainOptions to;
  to.seed = config.seed;
  if (overrides.epochs) to.epochs = *overrides.epochs;
  if (overrides.lr) to.lr = *overrides.lr;
  to.grad_check = overrides.grad_check;
  const auto embedder = make_embedder(config.embedder, config.parallelism);
  const auto queries = make_paraphrase_queries(examples, config.seed + 7919);
  m.timings_ms.emplace_back("queries", clock.lap_ms());
  const TrainResult r = train_toy_dual_encoder(examples, *embedder, config, to, queries);
  m.timings_ms.emplace_back("train", clock.lap_ms());

  auto metrics = [](const RetrievalMetrics& x) {
    return ordered_json{{"recall_at_1", x.recall_at_1}, {"recall_at_5", x.recall_at_5}, {"queries", x.queries}};
  };
  ordered_json j;
  j["artifact"] = "train";
  j["config_hash"] = m.config_hash;
  j["seed"] = config.seed;
  j["epochs"] = to.epochs;
  j["lr"] = to.lr;
  j["variant"] = to_string(config.loss.variant);
  j["weighting"] = to_string(config.loss.weighting);
  j["reduction"] = to_string(config.loss.reduction);
  j["items"] = r.items;
  j["metrics"] = {{"before", metrics(r.before)}, {"after", metrics(r.after)}};
  j["loss_curve"] = r.loss_curve;
  j["loss"] = r.final_report.to_json();
  write_text(output, j.dump(2) + "\n");
  m.timings_ms.emplace_back("write", clock.lap_ms());
  m.counts = {{"samples", records.size()}, {"augmented", augmented}, {"items", r.items}};

  const bool check_failed = r.grad_check_max_rel_err && *r.grad_check_max_rel_err > kGradCheckTolerance;
  if (check_failed) {
    m.warnings.push_back(fmt::format("gradient check failed: max_rel_err {:.3e}", *r.grad_check_max_rel_err));
  }
  write_manifest(m, output);
  guard.commit();
  // The artifacts stay on disk so the failing check can be inspected.
  if (check_failed) {
    fail(ErrorCode::kCheckFailed,
         fmt::format("gradient check failed: max_rel_err {:.3e} > {:.0e}", *r.grad_check_max_rel_err,
                     kGradCheckTolerance));
  }
  return m;
}

namespace {

struct Artifact {
  fs::path path;
  RunManifest manifest;
};

Artifact open_artifact(const fs::path& path) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::kIo, "missing artifact: " + path.string());
  const fs::path mp = manifest_path(path);
  static const std::set<std::string> kRunCommands = {"augment", "attributes", "train"};
  try {
    if (fs::is_regular_file(mp)) {
      Artifact a{path, RunManifest::from_json(ordered_json::parse(read_text(mp)))};
      if (kRunCommands.contains(a.manifest.command)) return a;
    }
  } catch (const json::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "not a run artifact: " + path.string());
}

std::string counts_line(const RunManifest& m) {
  std::string s;
  for (const auto& [k, v] : m.counts) s += fmt::format("{}{} {}", s.empty() ? "" : ", ", k, v);
  return s;
}

}  // namespace

RunManifest cmd_report(std::span<const fs::path> inputs, const fs::path& output) {
  if (inputs.empty()) fail(ErrorCode::kInvalidArgument, "report: no input artifacts");
  for (const auto& in : inputs) check_paths(in, output);
  Stopwatch clock;
  RunManifest m;
  m.command = "report";
  for (const auto& in : inputs) m.input += (m.input.empty() ? "" : ",") + in.string();
  m.output = output.string();
  OutputGuard guard({output, csv_path(output), manifest_path(output)});

  std::vector<Artifact> artifacts;
  for (const auto& in : inputs) artifacts.push_back(open_artifact(in));

  std::string text;
  std::string csv = "run,item,argmax,weight,value,contribution,component_losses\n";
  std::size_t rows = 0;
  for (const auto& a : artifacts) {
    const RunManifest& am = a.manifest;
    text += fmt::format("== {} ({})\n", a.path.string(), am.command);
    text += fmt::format("config {}, seed {}\n", am.config_hash, am.seed);
    text += "counts: " + counts_line(am) + "\n";
    if (!am.warnings.empty()) text += fmt::format("warnings: {}\n", am.warnings.size());

    if (am.command == "train") {
      const json j = json::parse(read_text(a.path));
      if (j.value("artifact", "") != "train") fail(ErrorCode::kInvalidArgument, "not a run artifact: " + a.path.string());
      LossConfig cfg;
      cfg.reduction = j.at("reduction").get<std::string>() == "sum" ? Reduction::kSum : Reduction::kMean;
      LossReport rep;
      rep.total = j.at("loss").at("total").get<double>();
      for (const auto& it : j.at("loss").at("items")) {
        rep.items.push_back({it.at("id").get<std::string>(), it.at("component_losses").get<std::vector<double>>(),
                             it.at("argmax").get<std::size_t>(), it.at("weight").get<double>(),
                             it.at("value").get<double>()});
      }
      const auto& before = j.at("metrics").at("before");
      const auto& after = j.at("metrics").at("after");
      text += fmt::format("loss total {:.6f} over {} items ({}, {} weighting, {}); epochs {}, lr {}\n", rep.total,
                          rep.items.size(), j.at("variant").get<std::string>(),
                          j.at("weighting").get<std::string>(), j.at("reduction").get<std::string>(),
                          j.at("epochs").get<std::size_t>(), j.at("lr").get<double>());
      text += fmt::format("recall@1 {:.4f} -> {:.4f}, recall@5 {:.4f} -> {:.4f} ({} queries)\n",
                          before.at("recall_at_1").get<double>(), after.at("recall_at_1").get<double>(),
                          before.at("recall_at_5").get<double>(), after.at("recall_at_5").get<double>(),
                          after.at("queries").get<std::size_t>());
      if (const auto& gc = j.at("loss").at("grad_check"); gc.contains("max_rel_err")) {
        text += fmt::format("gradient check max_rel_err {:.3e}\n", gc.at("max_rel_err").get<double>());
      }
      for (std::size_t i = 0; i < rep.items.size(); ++i) {
        const auto& it = rep.items[i];
        std::string losses;
        for (double l : it.component_losses) losses += (losses.empty() ? "" : ";") + num(l);
        csv += fmt::format("{},{},{},{},{},{},{}\n", csv_field(a.path.string()), csv_field(it.id), it.argmax,
                           num(it.weight), num(it.value), num(rep.contribution(i, cfg)), losses);
        ++rows;
      }
    }

    if (am.command == "attributes" && fs::is_regular_file(sweep_path(a.path))) {
      const json sweep = json::parse(read_text(sweep_path(a.path)));
      text += fmt::format("threshold sweep (kept of {} raw candidates)\n", sweep.at("raw").get<std::size_t>());
      text += "  gamma1  gamma2  gamma3    kept\n";
      for (const auto& g : sweep.at("grid")) {
        text += fmt::format("  {:6.2f}  {:6.2f}  {:6.2f}  {:6}\n", g.at("gamma1").get<double>(),
                            g.at("gamma2").get<double>(), g.at("gamma3").get<double>(),
                            g.at("kept").get<std::size_t>());
      }
    }
    text += "\n";
  }
  write_text(output, text);
  write_text(csv_path(output), csv);
  m.timings_ms.emplace_back("report", clock.lap_ms());
  m.counts = {{"artifacts", artifacts.size()}, {"csv_rows", rows}};
  write_manifest(m, output);
  guard.commit();
  return m;
}

}  // namespace vlb
