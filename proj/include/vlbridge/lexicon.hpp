#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Closed-class word lists and small open-class tables backing the offline
// rewriter, the shallow chunker and the heuristic entailment critic. The
// tables are deliberately small; words outside them fall back to heuristics.
namespace vlb::lexicon {

enum class VerbForm { kBase, kThird, kPast, kParticiple, kGerund };

struct VerbEntry {
  std::string base, third, past, participle, gerund;
  bool transitive = true;
  std::vector<std::string> synonyms;  // base-form phrases, e.g. "push open"
};

struct VerbMatch {
  const VerbEntry* entry = nullptr;
  VerbForm form = VerbForm::kBase;
};

std::optional<VerbMatch> find_verb(std::string_view token);
std::string inflect(const VerbEntry& entry, VerbForm form);

/// Inflects the first word of a base-form phrase ("push open" -> "pushed open").
std::string inflect_phrase(std::string_view base_phrase, VerbForm form);

/// Third person singular of a base-form verb ("agree" with a plural subject
/// uses the base form instead).
std::string present_for(const VerbEntry& entry, bool plural_subject);

bool is_determiner(std::string_view w);
bool is_preposition(std::string_view w);
bool is_particle(std::string_view w);
bool is_auxiliary(std::string_view w);
bool is_be(std::string_view w);
bool is_pronoun(std::string_view w);
bool is_conjunction(std::string_view w);
bool is_adjective(std::string_view w);
bool is_adverb(std::string_view w);
bool is_color(std::string_view w);

/// Noun lookup accepts singular and regular plural forms.
bool is_noun(std::string_view w);
bool is_animate(std::string_view noun);
bool is_plural_noun(std::string_view w);
std::string singular(std::string_view noun);
std::string pluralize(std::string_view noun);

/// Nominative <-> accusative pronoun case ("he" <-> "him").
std::string swap_pronoun_case(std::string_view w);

/// Meaning-preserving alternatives for a single token, already inflected to
/// the token's form. Empty when the token has no table entry.
std::vector<std::string> synonyms_for(std::string_view token);

/// Same-class replacements that change meaning (nouns of the same
/// animacy, verbs of the same transitivity, same-kind adjectives,
/// spatial prepositions). Excludes the token and its synonyms.
std::vector<std::string> contrasts_for(std::string_view token);

std::span<const std::string> adjectives();

/// Replacement pool for content words the tables do not know.
std::span<const std::string> fallback_nouns();
std::span<const std::string> prepositional_phrases();

/// Visual part/property descriptions for a noun (singular or plural).
std::vector<std::string> attributes_of(std::string_view noun);

/// Every attribute phrase in the table, in table order.
std::vector<std::string> all_attributes();

/// Words with little content for overlap scoring.
bool is_stopword(std::string_view w);

}  // namespace vlb::lexicon
