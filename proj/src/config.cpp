#include "vlbridge/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlbridge/error.hpp"

namespace vlb {

using json = nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorCode::kConfig, "config field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) config_error(where.empty() ? key : where + "." + key, "unknown key");
  }
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) config_error(path, "must be a number");
  return v->get<double>();
}

std::uint64_t get_unsigned(const json& obj, const char* key, const std::string& path, std::uint64_t fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0)) {
    config_error(path, "must be a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) config_error(path, "must be a string");
  return v->get<std::string>();
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) config_error(path, "must be an object");
  return v;
}

}  // namespace

void EmbedderSpec::validate() const {
  if (kind == Kind::kHash && dim < 16) config_error("embedder.dim", "must be >= 16 for the hash embedder");
  if (kind == Kind::kRemote && endpoint.empty()) config_error("embedder.endpoint", "must be non-empty");
  if (timeout_ms <= 0) config_error("embedder.timeout_ms", "must be positive");
  if (max_batch == 0) config_error("embedder.max_batch", "must be positive");
}

void RewriterSpec::validate() const {
  if (kind == Kind::kRemote && endpoint.empty()) config_error("rewriter.endpoint", "must be non-empty");
  if (timeout_ms <= 0) config_error("rewriter.timeout_ms", "must be positive");
  if (n_positives == 0) config_error("rewriter.n_positives", "must be positive");
}

void NliSpec::validate() const {
  if (kind == Kind::kRemote && endpoint.empty()) config_error("nli.endpoint", "must be non-empty");
  if (timeout_ms <= 0) config_error("nli.timeout_ms", "must be positive");
}

void Thresholds::validate() const {
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0)) config_error("thresholds.gamma1", "must be in [0, 1]");
  if (!(gamma2 >= 0.0)) config_error("thresholds.gamma2", "must be >= 0");
  if (!(gamma3 >= 0.0 && gamma3 <= 1.0)) config_error("thresholds.gamma3", "must be in [0, 1]");
  if (!(gamma_dup >= 0.0 && gamma_dup <= 1.0)) config_error("thresholds.gamma_dup", "must be in [0, 1]");
}

void LossConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) config_error("loss.beta", "must be in (0, 1)");
  if (!(tau > 0.0) || !std::isfinite(tau)) config_error("loss.tau", "must be > 0");
}

std::string_view to_string(LossVariant v) {
  return v == LossVariant::kAsPrinted ? "as-printed" : "positive-numerator";
}

std::string_view to_string(Reduction r) { return r == Reduction::kSum ? "sum" : "mean"; }

std::string_view to_string(WeightMode w) {
  switch (w) {
    case WeightMode::kFull: return "full";
    case WeightMode::kS1Only: return "s1";
    case WeightMode::kS2Only: return "s2";
    case WeightMode::kNone: return "none";
  }
  return "full";
}

void PipelineConfig::validate() const {
  embedder.validate();
  rewriter.validate();
  nli.validate();
  thresholds.validate();
  loss.validate();
  if (n_c < 1) config_error("clustering.n_c", "must be >= 1");
  if (components.empty()) config_error("components", "must be non-empty");
  std::set<ComponentKind> seen(components.begin(), components.end());
  if (seen.size() != components.size()) config_error("components", "must not contain duplicates");
  if (parallelism < 1) config_error("parallelism", "must be >= 1");
  if (n_attributes < 1) config_error("attributes.n", "must be >= 1");
  PromptContext check(prompt);
  (void)check;
}

void PipelineConfig::force_offline() {
  embedder.kind = EmbedderSpec::Kind::kHash;
  rewriter.kind = RewriterSpec::Kind::kRule;
  nli.kind = NliSpec::Kind::kHeuristic;
}

std::string PipelineConfig::canonical_json() const {
  json j;
  j["seed"] = seed;
  j["embedder"] = {{"kind", embedder.kind == EmbedderSpec::Kind::kHash ? "hash" : "remote"},
                   {"dim", embedder.dim},
                   {"endpoint", embedder.endpoint},
                   {"timeout_ms", embedder.timeout_ms},
                   {"max_batch", embedder.max_batch}};
  j["rewriter"] = {{"kind", rewriter.kind == RewriterSpec::Kind::kRule ? "rule" : "remote"},
                   {"endpoint", rewriter.endpoint},
                   {"timeout_ms", rewriter.timeout_ms},
                   {"n_positives", rewriter.n_positives}};
  j["nli"] = {{"kind", nli.kind == NliSpec::Kind::kHeuristic ? "heuristic" : "remote"},
              {"endpoint", nli.endpoint},
              {"timeout_ms", nli.timeout_ms}};
  j["thresholds"] = {{"gamma1", thresholds.gamma1},
                     {"gamma2", thresholds.gamma2},
                     {"gamma3", thresholds.gamma3},
                     {"gamma_dup", thresholds.gamma_dup}};
  j["clustering"] = {{"n_c", n_c}};
  j["loss"] = {{"beta", loss.beta},
               {"tau", loss.tau},
               {"variant", std::string(to_string(loss.variant))},
               {"reduction", std::string(to_string(loss.reduction))},
               {"weighting", std::string(to_string(loss.weighting))},
               {"normalize_per_anchor", loss.normalize_per_anchor}};
  json comps = json::array();
  for (auto c : components) comps.push_back(std::string(to_string(c)));
  j["components"] = comps;
  j["parallelism"] = parallelism;
  j["prompt"] = prompt;
  j["attributes"] = {{"n", n_attributes}, {"premise", premise == PremiseSource::kAnchor ? "anchor" : "variant"}};
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string PipelineConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json())));
  return buf;
}

PipelineConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "<root>");
  check_keys(root, "", {"seed", "embedder", "rewriter", "nli", "thresholds", "clustering", "loss",
                        "components", "parallelism", "prompt", "attributes"});

  PipelineConfig cfg;
  cfg.seed = get_unsigned(root, "seed", "seed", cfg.seed);

  if (const json* e = member(root, "embedder")) {
    require_object(*e, "embedder");
    check_keys(*e, "embedder", {"kind", "dim", "endpoint", "timeout_ms", "max_batch"});
    const std::string kind = get_string(*e, "kind", "embedder.kind", "hash");
    if (kind == "hash") cfg.embedder.kind = EmbedderSpec::Kind::kHash;
    else if (kind == "remote") cfg.embedder.kind = EmbedderSpec::Kind::kRemote;
    else config_error("embedder.kind", "must be 'hash' or 'remote'");
    cfg.embedder.dim = get_unsigned(*e, "dim", "embedder.dim", cfg.embedder.dim);
    cfg.embedder.endpoint = get_string(*e, "endpoint", "embedder.endpoint", "");
    cfg.embedder.timeout_ms = static_cast<int>(get_unsigned(*e, "timeout_ms", "embedder.timeout_ms", cfg.embedder.timeout_ms));
    cfg.embedder.max_batch = get_unsigned(*e, "max_batch", "embedder.max_batch", cfg.embedder.max_batch);
  }
  if (const json* r = member(root, "rewriter")) {
    require_object(*r, "rewriter");
    check_keys(*r, "rewriter", {"kind", "endpoint", "timeout_ms", "n_positives"});
    const std::string kind = get_string(*r, "kind", "rewriter.kind", "rule");
    if (kind == "rule") cfg.rewriter.kind = RewriterSpec::Kind::kRule;
    else if (kind == "remote") cfg.rewriter.kind = RewriterSpec::Kind::kRemote;
    else config_error("rewriter.kind", "must be 'rule' or 'remote'");
    cfg.rewriter.endpoint = get_string(*r, "endpoint", "rewriter.endpoint", "");
    cfg.rewriter.timeout_ms = static_cast<int>(get_unsigned(*r, "timeout_ms", "rewriter.timeout_ms", cfg.rewriter.timeout_ms));
    cfg.rewriter.n_positives = get_unsigned(*r, "n_positives", "rewriter.n_positives", cfg.rewriter.n_positives);
  }
  if (const json* n = member(root, "nli")) {
    require_object(*n, "nli");
    check_keys(*n, "nli", {"kind", "endpoint", "timeout_ms"});
    const std::string kind = get_string(*n, "kind", "nli.kind", "heuristic");
    if (kind == "heuristic") cfg.nli.kind = NliSpec::Kind::kHeuristic;
    else if (kind == "remote") cfg.nli.kind = NliSpec::Kind::kRemote;
    else config_error("nli.kind", "must be 'heuristic' or 'remote'");
    cfg.nli.endpoint = get_string(*n, "endpoint", "nli.endpoint", "");
    cfg.nli.timeout_ms = static_cast<int>(get_unsigned(*n, "timeout_ms", "nli.timeout_ms", cfg.nli.timeout_ms));
  }
  if (const json* t = member(root, "thresholds")) {
    require_object(*t, "thresholds");
    check_keys(*t, "thresholds", {"gamma1", "gamma2", "gamma3", "gamma_dup"});
    cfg.thresholds.gamma1 = get_number(*t, "gamma1", "thresholds.gamma1", cfg.thresholds.gamma1);
    cfg.thresholds.gamma2 = get_number(*t, "gamma2", "thresholds.gamma2", cfg.thresholds.gamma2);
    cfg.thresholds.gamma3 = get_number(*t, "gamma3", "thresholds.gamma3", cfg.thresholds.gamma3);
    // Duplicate detection follows gamma1 unless set explicitly.
    cfg.thresholds.gamma_dup = get_number(*t, "gamma_dup", "thresholds.gamma_dup", cfg.thresholds.gamma1);
  }
  if (const json* c = member(root, "clustering")) {
    require_object(*c, "clustering");
    check_keys(*c, "clustering", {"n_c"});
    cfg.n_c = get_unsigned(*c, "n_c", "clustering.n_c", cfg.n_c);
  }
  if (const json* l = member(root, "loss")) {
    require_object(*l, "loss");
    check_keys(*l, "loss", {"beta", "tau", "variant", "reduction", "weighting", "normalize_per_anchor"});
    cfg.loss.beta = get_number(*l, "beta", "loss.beta", cfg.loss.beta);
    cfg.loss.tau = get_number(*l, "tau", "loss.tau", cfg.loss.tau);
    const std::string variant = get_string(*l, "variant", "loss.variant", "positive-numerator");
    if (variant == "positive-numerator") cfg.loss.variant = LossVariant::kPositiveNumerator;
    else if (variant == "as-printed") cfg.loss.variant = LossVariant::kAsPrinted;
    else config_error("loss.variant", "must be 'positive-numerator' or 'as-printed'");
    const std::string reduction = get_string(*l, "reduction", "loss.reduction", "mean");
    if (reduction == "mean") cfg.loss.reduction = Reduction::kMean;
    else if (reduction == "sum") cfg.loss.reduction = Reduction::kSum;
    else config_error("loss.reduction", "must be 'mean' or 'sum'");
    const std::string weighting = get_string(*l, "weighting", "loss.weighting", "full");
    if (weighting == "full") cfg.loss.weighting = WeightMode::kFull;
    else if (weighting == "s1") cfg.loss.weighting = WeightMode::kS1Only;
    else if (weighting == "s2") cfg.loss.weighting = WeightMode::kS2Only;
    else if (weighting == "none") cfg.loss.weighting = WeightMode::kNone;
    else config_error("loss.weighting", "must be one of full, s1, s2, none");
    if (const json* norm = member(*l, "normalize_per_anchor")) {
      if (!norm->is_boolean()) config_error("loss.normalize_per_anchor", "must be a boolean");
      cfg.loss.normalize_per_anchor = norm->get<bool>();
    }
  }
  if (const json* comps = member(root, "components")) {
    if (!comps->is_array()) config_error("components", "must be an array of strings");
    cfg.components.clear();
    for (const auto& c : *comps) {
      if (!c.is_string()) config_error("components", "must be an array of strings");
      try {
        cfg.components.push_back(component_from_string(c.get<std::string>()));
      } catch (const Error&) {
        config_error("components", "unknown component '" + c.get<std::string>() + "'");
      }
    }
  }
  cfg.parallelism = get_unsigned(root, "parallelism", "parallelism", cfg.parallelism);
  cfg.prompt = get_string(root, "prompt", "prompt", cfg.prompt);
  if (const json* a = member(root, "attributes")) {
    require_object(*a, "attributes");
    check_keys(*a, "attributes", {"n", "premise"});
    cfg.n_attributes = get_unsigned(*a, "n", "attributes.n", cfg.n_attributes);
    const std::string premise = get_string(*a, "premise", "attributes.premise", "anchor");
    if (premise == "anchor") cfg.premise = PremiseSource::kAnchor;
    else if (premise == "variant") cfg.premise = PremiseSource::kVariant;
    else config_error("attributes.premise", "must be 'anchor' or 'variant'");
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    fail(ErrorCode::kConfig, e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfig, "cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vlb
