#include <algorithm>
#include <cmath>

#include "vlbridge/augment.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/lexicon.hpp"
#include "vlbridge/remote.hpp"

namespace vlb {

namespace lx = lexicon;

std::string_view to_string(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }

std::string_view to_string(RewriteLevel l) {
  switch (l) {
    case RewriteLevel::kWord: return "word";
    case RewriteLevel::kStructure: return "structure";
    case RewriteLevel::kAttribute: return "attribute";
  }
  return "word";
}

// ---------------------------------------------------------------------------
// Shallow analysis

namespace {

using Tokens = std::vector<std::string>;

bool noun_context(std::span<const std::string> t, std::size_t i) {
  if (!lx::is_noun(t[i])) return false;
  if (i > 0 && (lx::is_determiner(t[i - 1]) || lx::is_adjective(t[i - 1]))) return true;
  if (i == 0 && i + 1 < t.size() && (lx::find_verb(t[i + 1]) || lx::is_be(t[i + 1]))) return true;
  return false;
}

bool breaks_phrase(std::string_view w) {
  return lx::is_preposition(w) || lx::is_conjunction(w) || lx::is_adverb(w);
}

std::vector<Chunk> chunk_from(std::span<const std::string> t, std::size_t k) {
  std::vector<Chunk> out;
  while (k < t.size()) {
    const std::size_t s = k;
    if (lx::is_preposition(t[k])) {
      ++k;
      while (k < t.size() && !breaks_phrase(t[k])) ++k;
      out.push_back({Chunk::Kind::kPrepPhrase, {s, k}});
    } else if (lx::is_conjunction(t[k]) || lx::is_adverb(t[k])) {
      out.push_back({Chunk::Kind::kWord, {s, ++k}});
    } else {
      while (k < t.size() && !breaks_phrase(t[k])) ++k;
      out.push_back({Chunk::Kind::kNounPhrase, {s, k}});
    }
  }
  return out;
}

}  // namespace

SentenceFrame analyze_sentence(std::span<const std::string> tokens) {
  SentenceFrame f;
  f.tokens.assign(tokens.begin(), tokens.end());
  const auto& t = f.tokens;
  const std::size_t n = t.size();

  std::optional<std::size_t> vi;
  for (std::size_t i = 0; i < n; ++i) {
    if (lx::is_preposition(t[i]) && !lx::find_verb(t[i])) continue;
    if (lx::is_be(t[i]) || (lx::find_verb(t[i]) && !noun_context(t, i))) {
      vi = i;
      break;
    }
  }

  if (!vi) {
    std::size_t end = 0;
    while (end < n && !lx::is_preposition(t[end])) ++end;
    f.subject = {0, end};
    f.after = chunk_from(t, end);
    for (std::size_t c = 0; c < f.after.size(); ++c) {
      if (f.after[c].kind == Chunk::Kind::kPrepPhrase) {
        f.pp_chunk = c;
        break;
      }
    }
    return f;
  }

  std::size_t chain_begin = *vi;
  while (chain_begin > 0 && lx::is_adverb(t[chain_begin - 1])) --chain_begin;
  f.subject = {0, chain_begin};

  std::size_t j = *vi;
  if (lx::is_be(t[j])) {
    f.aux = j++;
    while (j < n && lx::is_adverb(t[j])) ++j;
    if (j < n) {
      if (auto m = lx::find_verb(t[j])) {
        const bool participle = t[j] == m->entry->participle;
        const bool gerund = t[j] == m->entry->gerund;
        if (participle || gerund) {
          f.verb = j++;
          f.passive = participle && !gerund;
        }
      }
    }
  } else {
    f.verb = j++;
  }
  if (f.verb) {
    while (j < n && lx::is_adverb(t[j])) ++j;
    if (j < n && lx::is_particle(t[j])) f.particle = j++;
  }
  f.verb_chain = {chain_begin, j};

  f.after = chunk_from(t, j);
  for (std::size_t c = 0; c < f.after.size(); ++c) {
    const Chunk& ch = f.after[c];
    if (c == 0 && f.verb && ch.kind == Chunk::Kind::kNounPhrase) f.object_chunk = c;
    if (ch.kind != Chunk::Kind::kPrepPhrase) continue;
    if (f.passive && !f.agent_chunk && t[ch.span.begin] == "by") {
      f.agent_chunk = c;
    } else if (!f.pp_chunk) {
      f.pp_chunk = c;
    }
  }
  return f;
}

std::size_t phrase_head(const SentenceFrame& frame, TokenSpan span) {
  for (std::size_t i = span.end; i-- > span.begin;) {
    const auto& w = frame.tokens[i];
    if (!lx::is_determiner(w) && !lx::is_adjective(w) && !lx::is_adverb(w) && !lx::is_preposition(w) &&
        !lx::is_conjunction(w)) {
      return i;
    }
  }
  return span.end - 1;
}

std::optional<ComponentKind> component_at(const SentenceFrame& frame, std::size_t i) {
  if (i >= frame.tokens.size()) return std::nullopt;
  if (frame.verb_chain.contains(i)) return ComponentKind::kVerb;
  const bool adjective = lx::is_adjective(frame.tokens[i]);
  if (frame.subject.contains(i)) return adjective ? ComponentKind::kAdjective : ComponentKind::kSubject;
  for (std::size_t c = 0; c < frame.after.size(); ++c) {
    const Chunk& ch = frame.after[c];
    if (!ch.span.contains(i)) continue;
    if (adjective) return ComponentKind::kAdjective;
    if (frame.object_chunk == c || frame.agent_chunk == c) return ComponentKind::kObject;
    if (ch.kind == Chunk::Kind::kPrepPhrase) return ComponentKind::kPrepositional;
    return std::nullopt;
  }
  return std::nullopt;
}

ConstituencyTree shallow_parse(std::span<const std::string> tokens) {
  if (tokens.empty()) fail(ErrorCode::kInvalidArgument, "shallow_parse: empty token list");
  const SentenceFrame f = analyze_sentence(tokens);
  auto leaf = [&](std::size_t i) { return ConstituencyTree{f.tokens[i], {}}; };
  auto phrase = [&](const std::string& label, TokenSpan s) {
    ConstituencyTree node{label, {}};
    for (std::size_t i = s.begin; i < s.end; ++i) node.children.push_back(leaf(i));
    return node;
  };
  auto chunk_node = [&](const Chunk& ch) {
    switch (ch.kind) {
      case Chunk::Kind::kNounPhrase: return phrase("NP", ch.span);
      case Chunk::Kind::kWord: return leaf(ch.span.begin);
      case Chunk::Kind::kPrepPhrase: {
        ConstituencyTree pp{"PP", {leaf(ch.span.begin)}};
        if (ch.span.size() > 1) pp.children.push_back(phrase("NP", {ch.span.begin + 1, ch.span.end}));
        return pp;
      }
    }
    return leaf(ch.span.begin);
  };

  ConstituencyTree root{"S", {}};
  if (!f.subject.empty()) root.children.push_back(phrase("NP", f.subject));
  if (!f.verb_chain.empty()) {
    ConstituencyTree vp = phrase("VP", f.verb_chain);
    for (const auto& ch : f.after) vp.children.push_back(chunk_node(ch));
    root.children.push_back(std::move(vp));
  } else {
    for (const auto& ch : f.after) root.children.push_back(chunk_node(ch));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Rule rewriter

namespace {

Tokens slice(const Tokens& t, TokenSpan s) { return Tokens(t.begin() + s.begin, t.begin() + s.end); }

void append(Tokens& out, const Tokens& more) { out.insert(out.end(), more.begin(), more.end()); }

bool plural_phrase(const SentenceFrame& f, TokenSpan s) {
  if (s.empty()) return false;
  const std::string& head = f.tokens[phrase_head(f, s)];
  if (head == "they" || head == "them" || head == "we" || head == "us" || head == "you") return true;
  for (std::size_t i = s.begin; i < s.end; ++i) {
    if (f.tokens[i] == "and") return true;
  }
  return lx::is_plural_noun(head);
}

Tokens as_accusative(Tokens np) {
  if (np.size() == 1 && (np[0] == "he" || np[0] == "she" || np[0] == "they" || np[0] == "i" || np[0] == "we")) {
    np[0] = lx::swap_pronoun_case(np[0]);
  }
  return np;
}

Tokens as_nominative(Tokens np) {
  if (np.size() == 1 && (np[0] == "him" || np[0] == "her" || np[0] == "them" || np[0] == "me" || np[0] == "us")) {
    np[0] = lx::swap_pronoun_case(np[0]);
  }
  return np;
}

std::string be_form(bool plural, bool past) {
  if (past) return plural ? "were" : "was";
  return plural ? "are" : "is";
}

bool past_tense(const SentenceFrame& f) {
  if (f.aux) return f.tokens[*f.aux] == "was" || f.tokens[*f.aux] == "were";
  if (f.verb) {
    auto m = lx::find_verb(f.tokens[*f.verb]);
    return m && m->form == lx::VerbForm::kPast;
  }
  return false;
}

Tokens chain_adverbs(const SentenceFrame& f) {
  Tokens out;
  for (std::size_t i = f.verb_chain.begin; i < f.verb_chain.end; ++i) {
    if (lx::is_adverb(f.tokens[i])) out.push_back(f.tokens[i]);
  }
  return out;
}

Tokens chunks_except(const SentenceFrame& f, std::initializer_list<std::optional<std::size_t>> skip) {
  Tokens out;
  for (std::size_t c = 0; c < f.after.size(); ++c) {
    bool skipped = false;
    for (const auto& s : skip) skipped = skipped || s == c;
    if (!skipped) append(out, slice(f.tokens, f.after[c].span));
  }
  return out;
}

TokenSpan agent_np(const SentenceFrame& f) {
  const TokenSpan s = f.after[*f.agent_chunk].span;
  return {s.begin + 1, s.end};
}

std::optional<Tokens> to_passive(const SentenceFrame& f) {
  if (f.passive || !f.verb || !f.object_chunk || f.subject.empty()) return std::nullopt;
  auto m = lx::find_verb(f.tokens[*f.verb]);
  if (!m || !m->entry->transitive) return std::nullopt;
  const bool progressive = f.aux.has_value();
  if (progressive && m->form != lx::VerbForm::kGerund) return std::nullopt;
  const TokenSpan obj = f.after[*f.object_chunk].span;
  Tokens out = as_nominative(slice(f.tokens, obj));
  out.push_back(be_form(plural_phrase(f, obj), past_tense(f)));
  if (progressive) out.push_back("being");
  append(out, chain_adverbs(f));
  out.push_back(m->entry->participle);
  if (f.particle) out.push_back(f.tokens[*f.particle]);
  out.push_back("by");
  append(out, as_accusative(slice(f.tokens, f.subject)));
  append(out, chunks_except(f, {f.object_chunk}));
  return out;
}

std::optional<Tokens> to_active(const SentenceFrame& f) {
  if (!f.passive || !f.agent_chunk || !f.verb || f.subject.empty()) return std::nullopt;
  const TokenSpan agent = agent_np(f);
  if (agent.empty()) return std::nullopt;
  auto m = lx::find_verb(f.tokens[*f.verb]);
  if (!m) return std::nullopt;
  lx::VerbForm form = lx::VerbForm::kThird;
  if (past_tense(f)) {
    form = lx::VerbForm::kPast;
  } else if (plural_phrase(f, agent)) {
    form = lx::VerbForm::kBase;
  }
  Tokens out = as_nominative(slice(f.tokens, agent));
  append(out, chain_adverbs(f));
  out.push_back(lx::inflect(*m->entry, form));
  if (f.particle) out.push_back(f.tokens[*f.particle]);
  append(out, as_accusative(slice(f.tokens, f.subject)));
  append(out, chunks_except(f, {f.agent_chunk}));
  return out;
}

std::optional<Tokens> front_pp(const SentenceFrame& f) {
  if (!f.pp_chunk) return std::nullopt;
  const TokenSpan pp = f.after[*f.pp_chunk].span;
  if (pp.begin == 0) return std::nullopt;
  Tokens out = slice(f.tokens, pp);
  for (std::size_t i = 0; i < f.tokens.size(); ++i) {
    if (!pp.contains(i)) out.push_back(f.tokens[i]);
  }
  return out;
}

std::optional<Tokens> cleft(const SentenceFrame& f) {
  if (f.subject.empty() || f.verb_chain.empty() || f.tokens[0] == "it") return std::nullopt;
  Tokens out{"it", "is"};
  append(out, slice(f.tokens, f.subject));
  out.push_back(lx::is_animate(f.tokens[phrase_head(f, f.subject)]) ? "who" : "that");
  append(out, slice(f.tokens, {f.verb_chain.begin, f.tokens.size()}));
  return out;
}

std::optional<Tokens> existential(const SentenceFrame& f) {
  if (f.subject.empty() || !f.verb || f.aux || f.tokens[0] == "there") return std::nullopt;
  auto m = lx::find_verb(f.tokens[*f.verb]);
  if (!m) return std::nullopt;
  Tokens out{"there", be_form(plural_phrase(f, f.subject), past_tense(f))};
  append(out, slice(f.tokens, f.subject));
  out.push_back(m->entry->gerund);
  if (f.particle) out.push_back(f.tokens[*f.particle]);
  append(out, chain_adverbs(f));
  append(out, chunks_except(f, {}));
  return out;
}

// Meaning-changing reorderings: the participants trade places.
std::optional<Tokens> swap_roles(const SentenceFrame& f) {
  if (f.subject.empty() || !f.verb) return std::nullopt;
  auto m = lx::find_verb(f.tokens[*f.verb]);
  if (!m) return std::nullopt;
  if (f.passive) {
    if (!f.agent_chunk || agent_np(f).empty()) return std::nullopt;
    const TokenSpan agent = agent_np(f);
    Tokens out = as_nominative(slice(f.tokens, agent));
    out.push_back(be_form(plural_phrase(f, agent), past_tense(f)));
    append(out, chain_adverbs(f));
    out.push_back(f.tokens[*f.verb]);
    if (f.particle) out.push_back(f.tokens[*f.particle]);
    out.push_back("by");
    append(out, as_accusative(slice(f.tokens, f.subject)));
    append(out, chunks_except(f, {f.agent_chunk}));
    return out;
  }
  if (!f.object_chunk) return std::nullopt;
  const TokenSpan obj = f.after[*f.object_chunk].span;
  const bool plural = plural_phrase(f, obj);
  Tokens out = as_nominative(slice(f.tokens, obj));
  for (std::size_t i = f.verb_chain.begin; i < f.verb_chain.end; ++i) {
    std::string w = f.tokens[i];
    if (f.aux == i && !past_tense(f)) w = be_form(plural, false);
    if (f.aux == i && past_tense(f)) w = be_form(plural, true);
    if (f.verb == i && (m->form == lx::VerbForm::kThird || m->form == lx::VerbForm::kBase) && !f.aux) {
      w = lx::present_for(*m->entry, plural);
    }
    out.push_back(w);
  }
  append(out, as_accusative(slice(f.tokens, f.subject)));
  append(out, chunks_except(f, {f.object_chunk}));
  return out;
}

std::uint64_t request_hash(std::uint64_t seed, const RewriteRequest& r, std::string_view key) {
  std::string s = std::to_string(seed);
  s += '\x1f';
  s += r.text;
  s += '\x1f';
  s += to_string(r.level);
  s += '/';
  s += to_string(r.polarity);
  s += '/';
  s += key;
  return fnv1a64(s);
}

template <typename Pool>
const std::string& pick(const Pool& pool, std::uint64_t h, std::size_t attempt) {
  return pool[(h + attempt) % pool.size()];
}

Tokens replace_at(const Tokens& t, std::size_t i, const std::string& phrase) {
  Tokens out(t.begin(), t.begin() + i);
  append(out, tokenize_lenient(phrase));
  out.insert(out.end(), t.begin() + i + 1, t.end());
  return out;
}

Tokens insert_at(const Tokens& t, std::size_t i, const std::string& phrase) {
  Tokens out(t.begin(), t.begin() + i);
  append(out, tokenize_lenient(phrase));
  out.insert(out.end(), t.begin() + i, t.end());
  return out;
}

bool content_word(std::string_view w) {
  return !lx::is_stopword(w) && !lx::find_verb(w) && !lx::is_adjective(w) && !lx::is_adverb(w);
}

std::vector<std::string> contrasts_or_fallback(std::string_view w) {
  auto c = lx::contrasts_for(w);
  if (c.empty() && content_word(w)) {
    for (const auto& n : lx::fallback_nouns()) {
      if (n != w) c.push_back(n);
    }
  }
  return c;
}

// Substitutions can leave "a" before a vowel; the article follows the first
// letter of the next token.
void agree_articles(Tokens& t) {
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] != "a" && t[i] != "an") continue;
    const bool vowel = std::string_view("aeiou").find(t[i + 1].front()) != std::string_view::npos;
    t[i] = vowel ? "an" : "a";
  }
}

std::vector<RewriteCandidate> single(Tokens tokens, double n_options, std::optional<std::size_t> target) {
  agree_articles(tokens);
  return {RewriteCandidate{join_tokens(tokens), -std::log(n_options), target}};
}

std::vector<RewriteCandidate> word_rewrite(const SentenceFrame& f, const RewriteRequest& r, std::uint64_t h) {
  const std::size_t i = *r.target_index;
  const auto options =
      r.polarity == Polarity::kPositive ? lx::synonyms_for(f.tokens[i]) : contrasts_or_fallback(f.tokens[i]);
  if (options.empty()) return {};
  return single(replace_at(f.tokens, i, pick(options, h, r.attempt)), static_cast<double>(options.size()), i);
}

std::optional<TokenSpan> np_of_component(const SentenceFrame& f, ComponentKind c) {
  if (c == ComponentKind::kSubject && !f.subject.empty()) return f.subject;
  if (c == ComponentKind::kObject) {
    if (f.object_chunk) return f.after[*f.object_chunk].span;
    if (f.agent_chunk && !agent_np(f).empty()) return agent_np(f);
  }
  return std::nullopt;
}

std::vector<RewriteCandidate> component_rewrite(const SentenceFrame& f, const RewriteRequest& r, std::uint64_t h) {
  const Tokens& t = f.tokens;
  auto replace = [&](std::size_t i) -> std::vector<RewriteCandidate> {
    const auto options = contrasts_or_fallback(t[i]);
    if (options.empty()) return {};
    return single(replace_at(t, i, pick(options, h, r.attempt)), static_cast<double>(options.size()), i);
  };
  switch (*r.component) {
    case ComponentKind::kSubject:
    case ComponentKind::kObject: {
      auto np = np_of_component(f, *r.component);
      if (!np) return {};
      return replace(phrase_head(f, *np));
    }
    case ComponentKind::kVerb: {
      if (!f.verb) return {};
      return replace(*f.verb);
    }
    case ComponentKind::kAdjective: {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (lx::is_adjective(t[i]) && component_at(f, i) == ComponentKind::kAdjective) return replace(i);
      }
      // No adjective to alter: qualify the object (else subject, else PP) head.
      std::optional<TokenSpan> np = np_of_component(f, ComponentKind::kObject);
      if (!np) np = np_of_component(f, ComponentKind::kSubject);
      if (!np && f.pp_chunk && f.after[*f.pp_chunk].span.size() > 1) {
        const TokenSpan pp = f.after[*f.pp_chunk].span;
        np = TokenSpan{pp.begin + 1, pp.end};
      }
      if (!np) return {};
      const std::size_t head = phrase_head(f, *np);
      if (lx::is_pronoun(t[head])) return {};
      auto pool = lx::contrasts_for("red");
      pool.insert(pool.begin(), "red");
      return single(insert_at(t, head, pick(pool, h, r.attempt)), static_cast<double>(pool.size()), head);
    }
    case ComponentKind::kPrepositional: {
      if (f.pp_chunk) return replace(f.after[*f.pp_chunk].span.begin);
      const auto pps = lx::prepositional_phrases();
      const std::size_t anchor = f.verb ? *f.verb : t.size() - 1;
      return single(insert_at(t, t.size(), pick(pps, h, r.attempt)), static_cast<double>(pps.size()), anchor);
    }
  }
  return {};
}

std::vector<RewriteCandidate> structure_rewrite(const SentenceFrame& f, const RewriteRequest& r) {
  std::vector<Tokens> applicable;
  if (r.polarity == Polarity::kPositive) {
    for (auto tmpl : {to_passive, to_active, front_pp, cleft, existential}) {
      if (auto out = tmpl(f); out && *out != f.tokens) applicable.push_back(std::move(*out));
    }
  } else if (auto out = swap_roles(f); out && *out != f.tokens) {
    applicable.push_back(std::move(*out));
  }
  if (applicable.empty()) return {};
  const std::size_t k = r.attempt % applicable.size();
  std::optional<std::size_t> target;
  if (r.polarity == Polarity::kNegative) target = phrase_head(f, f.subject);
  return single(std::move(applicable[k]), static_cast<double>(applicable.size()), target);
}

std::vector<RewriteCandidate> attribute_rewrite(const SentenceFrame& f, const RewriteRequest& r) {
  std::vector<std::string> heads;
  auto add_head = [&](const std::string& w) {
    const std::string s = lx::is_noun(w) ? lx::singular(w) : w;
    if (std::find(heads.begin(), heads.end(), s) == heads.end()) heads.push_back(s);
  };
  for (const auto& w : f.tokens) {
    if (lx::is_noun(w)) add_head(w);
  }
  // Unknown content heads get generic visual aspects.
  std::vector<TokenSpan> nps;
  if (!f.subject.empty()) nps.push_back(f.subject);
  for (const auto& ch : f.after) {
    if (ch.kind == Chunk::Kind::kNounPhrase) nps.push_back(ch.span);
    if (ch.kind == Chunk::Kind::kPrepPhrase && ch.span.size() > 1) nps.push_back({ch.span.begin + 1, ch.span.end});
  }
  for (const auto& np : nps) {
    const std::string& w = f.tokens[phrase_head(f, np)];
    if (!lx::is_stopword(w) && !lx::is_pronoun(w)) add_head(w);
  }
  std::vector<RewriteCandidate> out;
  auto push = [&](std::string text) {
    for (const auto& c : out) {
      if (c.text == text) return;
    }
    out.push_back({std::move(text), std::nullopt, std::nullopt});
  };
  for (const auto& h : heads) {
    auto attrs = lx::attributes_of(h);
    if (attrs.empty()) attrs = {"the " + h + " color", "the " + h + " shape", "the " + h + " size"};
    for (auto& a : attrs) push(std::move(a));
  }
  if (out.size() > r.n) out.resize(r.n);
  return out;
}

}  // namespace

std::vector<RewriteCandidate> RuleRewriter::rewrite(const RewriteRequest& request) const {
  const Tokens tokens = tokenize_lenient(request.text);
  if (tokens.empty()) return {};
  const SentenceFrame frame = analyze_sentence(tokens);
  switch (request.level) {
    case RewriteLevel::kWord: {
      if (request.component) {
        return component_rewrite(frame, request,
                                 request_hash(seed_, request, std::string(to_string(*request.component))));
      }
      if (!request.target_index || *request.target_index >= tokens.size()) return {};
      return word_rewrite(frame, request, request_hash(seed_, request, std::to_string(*request.target_index)));
    }
    case RewriteLevel::kStructure: return structure_rewrite(frame, request);
    case RewriteLevel::kAttribute: return attribute_rewrite(frame, request);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Remote rewriter

RemoteRewriter::RemoteRewriter(RewriterSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::vector<RewriteCandidate> RemoteRewriter::rewrite(const RewriteRequest& request) const {
  nlohmann::json body;
  body["text"] = request.text;
  body["level"] = std::string(to_string(request.level));
  body["polarity"] = std::string(to_string(request.polarity));
  if (request.target_index) body["target_index"] = *request.target_index;
  if (request.component) body["component"] = std::string(to_string(*request.component));
  body["n"] = request.n;
  const nlohmann::json res = post_json(spec_.endpoint, "/rewrite", body, spec_.timeout_ms);
  auto it = res.find("candidates");
  if (it == res.end() || !it->is_array()) fail(ErrorCode::kRemote, "/rewrite: response lacks 'candidates'");
  std::vector<RewriteCandidate> out;
  for (const auto& c : *it) {
    if (!c.is_object() || !c.contains("text") || !c["text"].is_string()) {
      fail(ErrorCode::kRemote, "/rewrite: candidate without string 'text'");
    }
    RewriteCandidate cand{c["text"].get<std::string>(), std::nullopt, std::nullopt};
    if (c.contains("logprob") && !c["logprob"].is_null()) {
      if (!c["logprob"].is_number()) fail(ErrorCode::kRemote, "/rewrite: 'logprob' must be a number");
      const double lp = c["logprob"].get<double>();
      if (!(lp <= 0.0)) fail(ErrorCode::kRemote, "/rewrite: 'logprob' must be <= 0");
      cand.logprob = lp;
    }
    if (c.contains("target_index") && c["target_index"].is_number_unsigned()) {
      cand.target_index = c["target_index"].get<std::size_t>();
    }
    out.push_back(std::move(cand));
  }
  return out;
}

std::unique_ptr<Rewriter> make_rewriter(const RewriterSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.kind == RewriterSpec::Kind::kRule) return std::make_unique<RuleRewriter>(seed);
  return std::make_unique<RemoteRewriter>(spec);
}

}  // namespace vlb
