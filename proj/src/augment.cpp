#include "vlbridge/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vlbridge/error.hpp"
#include "vlbridge/lexicon.hpp"

namespace vlb {

namespace {

std::optional<RewriteCandidate> first_changed(const std::vector<RewriteCandidate>& candidates,
                                              const std::vector<std::string>& original) {
  for (const auto& c : candidates) {
    const auto tokens = tokenize_lenient(c.text);
    if (!tokens.empty() && tokens != original) return c;
  }
  return std::nullopt;
}

std::size_t first_difference(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return std::min(i, a.size() - 1);
}

ComponentKind role_or_side(const SentenceFrame& frame, std::size_t i) {
  if (auto c = component_at(frame, i)) return *c;
  const bool before_verb = !frame.verb_chain.empty() && i < frame.verb_chain.begin;
  return before_verb ? ComponentKind::kSubject : ComponentKind::kObject;
}

}  // namespace

Variant word_level_rewrite(const Rewriter& rewriter, const TextSample& sample, std::size_t word_index,
                           Polarity polarity) {
  if (word_index >= sample.size()) {
    fail(ErrorCode::kInvalidArgument, "word index " + std::to_string(word_index) + " out of range for " +
                                          std::to_string(sample.size()) + " tokens");
  }
  for (std::size_t attempt = 0; attempt < kRewriteAttempts; ++attempt) {
    RewriteRequest req{sample.text(), RewriteLevel::kWord, polarity, word_index, std::nullopt, 1, attempt};
    if (auto c = first_changed(rewriter.rewrite(req), sample.tokens())) {
      Variant v{c->text, polarity, RewriteLevel::kWord, word_index, std::nullopt, c->logprob};
      if (polarity == Polarity::kNegative) {
        v.component = role_or_side(analyze_sentence(sample.tokens()), word_index);
      }
      return v;
    }
  }
  fail(ErrorCode::kDegenerate, "degenerate rewrite: word " + std::to_string(word_index) + " of '" + sample.text() +
                                   "' unchanged after " + std::to_string(kRewriteAttempts) + " attempts");
}

Variant structure_level_rewrite(const Rewriter& rewriter, std::string_view text, Polarity polarity,
                                std::size_t first_attempt) {
  const auto tokens = tokenize(text);
  if (tokens.size() < 2) fail(ErrorCode::kDegenerate, "structure rewrite impossible: single-token text");
  for (std::size_t k = 0; k < kRewriteAttempts; ++k) {
    RewriteRequest req{std::string(text), RewriteLevel::kStructure, polarity, std::nullopt, std::nullopt, 1,
                       first_attempt + k};
    if (auto c = first_changed(rewriter.rewrite(req), tokens)) {
      Variant v{c->text, polarity, RewriteLevel::kStructure, c->target_index, std::nullopt, c->logprob};
      if (polarity == Polarity::kNegative) v.component = ComponentKind::kSubject;
      return v;
    }
  }
  fail(ErrorCode::kDegenerate, "degenerate rewrite: structure of '" + std::string(text) + "' unchanged after " +
                                   std::to_string(kRewriteAttempts) + " attempts");
}

Variant component_negative(const Rewriter& rewriter, const TextSample& sample, ComponentKind component) {
  for (std::size_t attempt = 0; attempt < kRewriteAttempts; ++attempt) {
    RewriteRequest req{sample.text(), RewriteLevel::kWord, Polarity::kNegative, std::nullopt, component, 1, attempt};
    if (auto c = first_changed(rewriter.rewrite(req), sample.tokens())) {
      std::size_t target = c->target_index.value_or(first_difference(sample.tokens(), tokenize_lenient(c->text)));
      target = std::min(target, sample.size() - 1);
      return Variant{c->text, Polarity::kNegative, RewriteLevel::kWord, target, component, c->logprob};
    }
  }
  fail(ErrorCode::kDegenerate, "degenerate rewrite: no " + std::string(to_string(component)) + " negative for '" +
                                   sample.text() + "' after " + std::to_string(kRewriteAttempts) + " attempts");
}

std::vector<double> variant_probabilities(std::span<const Variant> positives) {
  const std::size_t n = positives.size();
  if (n == 0) return {};
  const bool all = std::all_of(positives.begin(), positives.end(), [](const Variant& v) { return v.logprob.has_value(); });
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  if (!all) return p;
  double mx = -INFINITY;
  for (const auto& v : positives) mx = std::max(mx, *v.logprob);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) z += p[i] = std::exp(*positives[i].logprob - mx);
  for (double& x : p) x /= z;
  return p;
}

VariantSet generate_variant_set(const Rewriter& rewriter, const TextSample& sample, const PipelineConfig& config,
                                std::optional<std::span<const double>> s1) {
  const std::size_t J = sample.size();
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), 0);
  if (s1) {
    if (s1->size() != J) fail(ErrorCode::kInvalidArgument, "s1 length does not match token count");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return (*s1)[a] > (*s1)[b]; });
  } else {
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t i) { return !lexicon::is_stopword(sample.tokens()[i]); });
  }

  VariantSet set{sample, {}, {}, {}, {}};
  auto is_new = [&](const std::string& text) {
    if (tokenize_lenient(text) == sample.tokens()) return false;
    return std::none_of(set.positives.begin(), set.positives.end(), [&](const Variant& v) { return v.text == text; });
  };

  for (std::size_t i : order) {
    if (set.positives.size() >= config.rewriter.n_positives) break;
    Variant word;
    try {
      word = word_level_rewrite(rewriter, sample, i, Polarity::kPositive);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      continue;
    }
    Variant chosen = word;
    try {
      Variant s = structure_level_rewrite(rewriter, word.text, Polarity::kPositive, set.positives.size());
      s.word_index = word.word_index;
      s.logprob = (word.logprob && s.logprob) ? std::optional<double>(*word.logprob + *s.logprob) : std::nullopt;
      chosen = std::move(s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
    }
    if (is_new(chosen.text)) set.positives.push_back(std::move(chosen));
  }
  if (set.positives.empty()) {
    try {
      set.positives.push_back(structure_level_rewrite(rewriter, sample.text(), Polarity::kPositive));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      fail(ErrorCode::kDegenerate, "no positive variant could be generated for '" + sample.id() + "'");
    }
  }

  for (ComponentKind c : config.components) {
    try {
      set.negatives.push_back(component_negative(rewriter, sample, c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      set.failures.push_back({c, e.what()});
    }
  }
  if (set.negatives.empty()) {
    fail(ErrorCode::kDegenerate, "every component negative failed for '" + sample.id() + "'");
  }
  set.probs = variant_probabilities(set.positives);
  return set;
}

}  // namespace vlb
