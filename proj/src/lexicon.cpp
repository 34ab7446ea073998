#include "vlbridge/lexicon.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace vlb::lexicon {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string regular_third(std::string_view base) {
  std::string b(base);
  if (ends_with(b, "s") || ends_with(b, "x") || ends_with(b, "z") || ends_with(b, "ch") || ends_with(b, "sh") ||
      ends_with(b, "o")) {
    return b + "es";
  }
  if (b.size() >= 2 && b.back() == 'y' && !is_vowel(b[b.size() - 2])) return b.substr(0, b.size() - 1) + "ies";
  return b + "s";
}

std::string regular_past(std::string_view base) {
  std::string b(base);
  if (ends_with(b, "e")) return b + "d";
  if (b.size() >= 2 && b.back() == 'y' && !is_vowel(b[b.size() - 2])) return b.substr(0, b.size() - 1) + "ied";
  return b + "ed";
}

std::string regular_gerund(std::string_view base) {
  std::string b(base);
  if (ends_with(b, "ie")) return b.substr(0, b.size() - 2) + "ying";
  if (ends_with(b, "e") && !ends_with(b, "ee")) return b.substr(0, b.size() - 1) + "ing";
  return b + "ing";
}

struct VerbRow {
  const char* base;
  const char* past;        // "" -> regular
  const char* participle;  // "" -> same as past
  const char* gerund;      // "" -> regular
  bool transitive;
  std::vector<std::string> synonyms;
};

struct NounRow {
  const char* noun;
  bool animate;
  std::vector<std::string> synonyms;
  const char* attribute_group;  // key into the attribute table, "" for none
};

struct WordRow {
  const char* word;
  const char* group;
  std::vector<std::string> synonyms;
};

const std::vector<VerbRow>& verb_rows() {
  static const std::vector<VerbRow> rows = {
      // transitive
      {"open", "", "", "", true, {"push open"}},
      {"close", "", "", "", true, {"shut", "push shut"}},
      {"shut", "shut", "shut", "shutting", true, {"close"}},
      {"hold", "held", "held", "", true, {"grip", "clutch"}},
      {"grip", "gripped", "gripped", "gripping", true, {"hold"}},
      {"clutch", "", "", "", true, {"grip"}},
      {"carry", "", "", "", true, {"haul", "lug"}},
      {"haul", "", "", "", true, {"carry"}},
      {"lug", "lugged", "lugged", "lugging", true, {"carry"}},
      {"throw", "threw", "thrown", "", true, {"toss", "fling"}},
      {"toss", "", "", "", true, {"throw"}},
      {"fling", "flung", "flung", "", true, {"throw"}},
      {"catch", "caught", "caught", "", true, {"snag"}},
      {"snag", "snagged", "snagged", "snagging", true, {"catch"}},
      {"push", "", "", "", true, {"shove", "press"}},
      {"shove", "", "", "", true, {"push"}},
      {"press", "", "", "", true, {"push"}},
      {"pull", "", "", "", true, {"tug", "drag"}},
      {"tug", "tugged", "tugged", "tugging", true, {"pull"}},
      {"drag", "dragged", "dragged", "dragging", true, {"pull"}},
      {"grab", "grabbed", "grabbed", "grabbing", true, {"seize", "snatch"}},
      {"seize", "", "", "", true, {"grab"}},
      {"snatch", "", "", "", true, {"grab"}},
      {"eat", "ate", "eaten", "", true, {"consume", "devour"}},
      {"consume", "", "", "", true, {"eat"}},
      {"devour", "", "", "", true, {"eat"}},
      {"drink", "drank", "drunk", "", true, {"sip", "gulp"}},
      {"sip", "sipped", "sipped", "sipping", true, {"drink"}},
      {"gulp", "", "", "", true, {"drink"}},
      {"read", "read", "read", "", true, {"peruse", "scan"}},
      {"peruse", "", "", "", true, {"read"}},
      {"scan", "scanned", "scanned", "scanning", true, {"read"}},
      {"watch", "", "", "", true, {"observe", "view"}},
      {"observe", "", "", "", true, {"watch"}},
      {"view", "", "", "", true, {"watch"}},
      {"wash", "", "", "", true, {"rinse", "scrub"}},
      {"rinse", "", "", "", true, {"wash"}},
      {"scrub", "scrubbed", "scrubbed", "scrubbing", true, {"wash"}},
      {"clean", "", "", "", true, {"wipe", "tidy"}},
      {"wipe", "", "", "", true, {"clean"}},
      {"tidy", "", "", "", true, {"clean"}},
      {"cut", "cut", "cut", "cutting", true, {"slice", "chop"}},
      {"slice", "", "", "", true, {"cut"}},
      {"chop", "chopped", "chopped", "chopping", true, {"cut"}},
      {"kick", "", "", "", true, {"boot"}},
      {"boot", "", "", "", true, {"kick"}},
      {"lift", "", "", "", true, {"raise", "hoist"}},
      {"raise", "", "", "", true, {"lift"}},
      {"hoist", "", "", "", true, {"lift"}},
      {"drop", "dropped", "dropped", "dropping", true, {"release"}},
      {"release", "", "", "", true, {"drop"}},
      {"move", "", "", "", true, {"shift"}},
      {"shift", "", "", "", true, {"move"}},
      {"fix", "", "", "", true, {"repair", "mend"}},
      {"repair", "", "", "", true, {"fix"}},
      {"mend", "", "", "", true, {"fix"}},
      {"take", "took", "taken", "", true, {"grab"}},
      {"pick", "", "", "", true, {}},
      {"use", "", "", "", true, {"utilize", "employ"}},
      {"utilize", "", "", "", true, {"use"}},
      {"employ", "", "", "", true, {"use"}},
      {"drive", "drove", "driven", "", true, {"steer"}},
      {"steer", "", "", "", true, {"drive"}},
      {"ride", "rode", "ridden", "", true, {}},
      {"fold", "", "", "", true, {"crease"}},
      {"crease", "", "", "", true, {"fold"}},
      {"hug", "hugged", "hugged", "hugging", true, {"embrace"}},
      {"embrace", "", "", "", true, {"hug"}},
      {"feed", "fed", "fed", "", true, {"nourish"}},
      {"nourish", "", "", "", true, {"feed"}},
      {"pet", "petted", "petted", "petting", true, {"stroke"}},
      {"stroke", "", "", "", true, {"pet"}},
      {"touch", "", "", "", true, {"tap"}},
      {"tap", "tapped", "tapped", "tapping", true, {"touch"}},
      {"drain", "", "", "", true, {}},
      {"cook", "", "", "", true, {"prepare"}},
      {"prepare", "", "", "", true, {"cook"}},
      {"paint", "", "", "", true, {}},
      {"play", "", "", "", true, {}},
      // intransitive
      {"run", "ran", "run", "running", false, {"sprint", "jog"}},
      {"sprint", "", "", "", false, {"run"}},
      {"jog", "jogged", "jogged", "jogging", false, {"run"}},
      {"walk", "", "", "", false, {"stroll", "wander"}},
      {"stroll", "", "", "", false, {"walk"}},
      {"wander", "", "", "", false, {"walk"}},
      {"sit", "sat", "sat", "sitting", false, {"perch"}},
      {"perch", "", "", "", false, {"sit"}},
      {"stand", "stood", "stood", "", false, {}},
      {"jump", "", "", "", false, {"leap", "hop"}},
      {"leap", "leapt", "leapt", "", false, {"jump"}},
      {"hop", "hopped", "hopped", "hopping", false, {"jump"}},
      {"laugh", "", "", "", false, {"chuckle", "giggle"}},
      {"chuckle", "", "", "", false, {"laugh"}},
      {"giggle", "", "", "", false, {"laugh"}},
      {"smile", "", "", "", false, {"grin", "beam"}},
      {"grin", "grinned", "grinned", "grinning", false, {"smile"}},
      {"beam", "", "", "", false, {"smile"}},
      {"sleep", "slept", "slept", "", false, {"doze", "nap"}},
      {"doze", "", "", "", false, {"sleep"}},
      {"nap", "napped", "napped", "napping", false, {"sleep"}},
      {"dance", "", "", "", false, {"sway"}},
      {"sway", "", "", "", false, {"dance"}},
      {"talk", "", "", "", false, {"speak", "chat"}},
      {"speak", "spoke", "spoken", "", false, {"talk"}},
      {"chat", "chatted", "chatted", "chatting", false, {"talk"}},
      {"swim", "swam", "swum", "swimming", false, {"paddle"}},
      {"paddle", "", "", "", false, {"swim"}},
      {"wait", "", "", "", false, {"linger"}},
      {"linger", "", "", "", false, {"wait"}},
      {"sing", "sang", "sung", "", false, {"chant"}},
      {"chant", "", "", "", false, {"sing"}},
      {"cry", "", "", "", false, {"weep", "sob"}},
      {"weep", "wept", "wept", "", false, {"cry"}},
      {"sob", "sobbed", "sobbed", "sobbing", false, {"cry"}},
  };
  return rows;
}

// Verbs used as meaning-changing replacements; one per synonym group.
const std::vector<std::string>& contrast_verbs(bool transitive) {
  static const std::vector<std::string> trans = {
      "open", "close", "hold", "carry", "throw", "catch", "push", "pull", "grab", "eat", "drink", "read",
      "watch", "wash", "clean", "cut", "kick", "lift", "drop", "move", "fix", "use", "drive", "fold",
      "hug", "feed", "touch", "cook", "paint"};
  static const std::vector<std::string> intrans = {"run", "walk", "sit", "stand", "jump", "laugh", "smile",
                                                   "sleep", "dance", "talk", "swim", "wait", "sing", "cry"};
  return transitive ? trans : intrans;
}

const std::vector<NounRow>& noun_rows() {
  static const std::vector<NounRow> rows = {
      {"person", true, {"individual"}, "person"},
      {"individual", true, {"person"}, "person"},
      {"man", true, {"guy"}, "person"},
      {"guy", true, {"man"}, "person"},
      {"woman", true, {"lady"}, "person"},
      {"lady", true, {"woman"}, "person"},
      {"boy", true, {"lad"}, "person"},
      {"lad", true, {"boy"}, "person"},
      {"girl", true, {"lass"}, "person"},
      {"lass", true, {"girl"}, "person"},
      {"child", true, {"kid"}, "person"},
      {"kid", true, {"child"}, "person"},
      {"baby", true, {"infant"}, "person"},
      {"infant", true, {"baby"}, "person"},
      {"player", true, {"athlete"}, "person"},
      {"athlete", true, {"player"}, "person"},
      {"chef", true, {}, "person"},
      {"dog", true, {"hound"}, "dog"},
      {"hound", true, {"dog"}, "dog"},
      {"cat", true, {"feline"}, "cat"},
      {"feline", true, {"cat"}, "cat"},
      {"car", false, {"vehicle", "automobile"}, "car"},
      {"vehicle", false, {"car"}, "car"},
      {"automobile", false, {"car"}, "car"},
      {"door", false, {"doorway"}, "door"},
      {"doorway", false, {"door"}, "door"},
      {"box", false, {"container", "crate"}, "box"},
      {"container", false, {"box"}, "box"},
      {"crate", false, {"box"}, "box"},
      {"ball", false, {"sphere"}, "ball"},
      {"sphere", false, {"ball"}, "ball"},
      {"cup", false, {"mug"}, "cup"},
      {"mug", false, {"cup"}, "cup"},
      {"book", false, {"novel"}, "book"},
      {"novel", false, {"book"}, "book"},
      {"bag", false, {"sack"}, "bag"},
      {"sack", false, {"bag"}, "bag"},
      {"window", false, {"windowpane"}, "window"},
      {"windowpane", false, {"window"}, "window"},
      {"table", false, {"desk"}, "table"},
      {"desk", false, {"table"}, "table"},
      {"chair", false, {"seat"}, "chair"},
      {"seat", false, {"chair"}, "chair"},
      {"phone", false, {"cellphone"}, "phone"},
      {"cellphone", false, {"phone"}, "phone"},
      {"bottle", false, {"flask"}, "bottle"},
      {"flask", false, {"bottle"}, "bottle"},
      {"bike", false, {"bicycle"}, "bike"},
      {"bicycle", false, {"bike"}, "bike"},
      {"laptop", false, {"computer"}, "laptop"},
      {"computer", false, {"laptop"}, "laptop"},
      {"plate", false, {"dish"}, "plate"},
      {"dish", false, {"plate"}, "plate"},
      {"knife", false, {}, "knife"},
      {"towel", false, {"cloth"}, "towel"},
      {"cloth", false, {"towel"}, "towel"},
      {"shirt", false, {"top"}, "shirt"},
      {"apple", false, {}, "apple"},
      {"sandwich", false, {}, "sandwich"},
      {"guitar", false, {}, "guitar"},
      {"refrigerator", false, {"fridge"}, "refrigerator"},
      {"fridge", false, {"refrigerator"}, "refrigerator"},
      {"sofa", false, {"couch"}, "sofa"},
      {"couch", false, {"sofa"}, "sofa"},
      {"bed", false, {}, "bed"},
      {"hat", false, {"cap"}, "hat"},
      {"cap", false, {"hat"}, "hat"},
      {"shoe", false, {"sneaker"}, "shoe"},
      {"sneaker", false, {"shoe"}, "shoe"},
      {"jacket", false, {"coat"}, "jacket"},
      {"coat", false, {"jacket"}, "jacket"},
      {"lamp", false, {}, "lamp"},
      {"blanket", false, {"quilt"}, "blanket"},
      {"quilt", false, {"blanket"}, "blanket"},
      {"pillow", false, {"cushion"}, "pillow"},
      {"cushion", false, {"pillow"}, "pillow"},
      {"picture", false, {"photo"}, "picture"},
      {"photo", false, {"picture"}, "picture"},
      {"cabinet", false, {"cupboard"}, "cabinet"},
      {"cupboard", false, {"cabinet"}, "cabinet"},
      {"kitchen", false, {}, ""},
      {"room", false, {"chamber"}, ""},
      {"chamber", false, {"room"}, ""},
      {"floor", false, {"ground"}, ""},
      {"ground", false, {"floor"}, ""},
      {"street", false, {"road"}, ""},
      {"road", false, {"street"}, ""},
      {"park", false, {}, ""},
      {"yard", false, {"garden"}, ""},
      {"garden", false, {"yard"}, ""},
      {"stairs", false, {"steps"}, ""},
      {"steps", false, {"stairs"}, ""},
      {"hallway", false, {"corridor"}, ""},
      {"corridor", false, {"hallway"}, ""},
      {"house", false, {"home"}, ""},
      {"home", false, {"house"}, ""},
      {"beach", false, {"shore"}, ""},
      {"shore", false, {"beach"}, ""},
  };
  return rows;
}

const std::vector<std::string>& contrast_nouns(bool animate) {
  static const std::vector<std::string> living = {"person", "man", "woman", "boy", "girl", "child", "baby",
                                                  "player", "chef", "dog", "cat"};
  static const std::vector<std::string> things = {
      "car", "door", "box", "ball", "cup", "book", "bag", "window", "table", "chair", "phone", "bottle",
      "bike", "laptop", "plate", "knife", "towel", "shirt", "apple", "sandwich", "guitar", "refrigerator",
      "sofa", "bed", "hat", "shoe", "jacket", "lamp", "blanket", "pillow", "picture", "cabinet"};
  return animate ? living : things;
}

const std::map<std::string, std::vector<std::string>>& attribute_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"person", {"a head", "two eyes", "two arms", "two legs", "a face"}},
      {"dog", {"four legs", "a tail", "fur", "floppy ears"}},
      {"cat", {"whiskers", "a tail", "fur", "pointed ears"}},
      {"car", {"four wheels", "a steering wheel", "headlights", "a windshield"}},
      {"door", {"a handle", "hinges", "a frame", "a lock"}},
      {"box", {"a lid", "flat sides", "corners"}},
      {"ball", {"a round shape", "a smooth surface"}},
      {"cup", {"a handle", "a rim"}},
      {"book", {"pages", "a cover", "a spine"}},
      {"bag", {"a strap", "a zipper"}},
      {"window", {"glass panes", "a frame", "a sill"}},
      {"table", {"four legs", "a flat top"}},
      {"chair", {"a seat", "a backrest", "legs"}},
      {"phone", {"a screen", "buttons"}},
      {"bottle", {"a cap", "a neck"}},
      {"bike", {"two wheels", "pedals", "handlebars"}},
      {"laptop", {"a keyboard", "a screen"}},
      {"plate", {"a flat surface", "a rim"}},
      {"knife", {"a blade", "a handle"}},
      {"towel", {"soft fabric"}},
      {"shirt", {"sleeves", "a collar", "buttons"}},
      {"apple", {"a stem", "smooth skin"}},
      {"sandwich", {"bread slices", "a filling"}},
      {"guitar", {"strings", "a neck", "a sound hole"}},
      {"refrigerator", {"a door", "shelves"}},
      {"sofa", {"cushions", "armrests"}},
      {"bed", {"a mattress", "pillows"}},
      {"hat", {"a brim"}},
      {"shoe", {"laces", "a sole"}},
      {"jacket", {"sleeves", "a zipper"}},
      {"lamp", {"a bulb", "a shade"}},
      {"blanket", {"soft fabric", "a pattern"}},
      {"pillow", {"soft fabric", "a pillowcase"}},
      {"picture", {"a frame", "an image"}},
      {"cabinet", {"doors", "shelves", "handles"}},
  };
  return table;
}

const std::vector<WordRow>& adjective_rows() {
  static const std::vector<WordRow> rows = {
      {"red", "color", {"crimson", "scarlet"}},
      {"crimson", "color", {"red"}},
      {"scarlet", "color", {"red"}},
      {"blue", "color", {"azure"}},
      {"azure", "color", {"blue"}},
      {"green", "color", {"emerald"}},
      {"emerald", "color", {"green"}},
      {"yellow", "color", {"golden"}},
      {"golden", "color", {"yellow"}},
      {"black", "color", {"dark"}},
      {"dark", "color", {"black"}},
      {"white", "color", {"pale"}},
      {"pale", "color", {"white"}},
      {"brown", "color", {"tan"}},
      {"tan", "color", {"brown"}},
      {"pink", "color", {"rosy"}},
      {"rosy", "color", {"pink"}},
      {"orange", "color", {}},
      {"gray", "color", {"grey"}},
      {"grey", "color", {"gray"}},
      {"small", "property", {"little", "tiny"}},
      {"little", "property", {"small"}},
      {"tiny", "property", {"small"}},
      {"big", "property", {"large", "huge"}},
      {"large", "property", {"big"}},
      {"huge", "property", {"big"}},
      {"tall", "property", {"high"}},
      {"high", "property", {"tall"}},
      {"short", "property", {}},
      {"old", "property", {"aged", "worn"}},
      {"aged", "property", {"old"}},
      {"worn", "property", {"old"}},
      {"new", "property", {"brand-new"}},
      {"brand-new", "property", {"new"}},
      {"young", "property", {"youthful"}},
      {"youthful", "property", {"young"}},
      {"wooden", "property", {"timber"}},
      {"timber", "property", {"wooden"}},
      {"metal", "property", {"metallic"}},
      {"metallic", "property", {"metal"}},
      {"plastic", "property", {}},
      {"heavy", "property", {"weighty"}},
      {"weighty", "property", {"heavy"}},
      {"dirty", "property", {"filthy"}},
      {"filthy", "property", {"dirty"}},
      {"wet", "property", {"damp"}},
      {"damp", "property", {"wet"}},
      {"happy", "mood", {"cheerful", "joyful"}},
      {"cheerful", "mood", {"happy"}},
      {"joyful", "mood", {"happy"}},
      {"sad", "mood", {"unhappy"}},
      {"unhappy", "mood", {"sad"}},
      {"angry", "mood", {"furious"}},
      {"furious", "mood", {"angry"}},
      {"tired", "mood", {"weary"}},
      {"weary", "mood", {"tired"}},
  };
  return rows;
}

const std::vector<std::string>& contrast_adjectives(const std::string& group) {
  static const std::vector<std::string> colors = {"red", "blue", "green", "yellow", "black", "white",
                                                  "brown", "pink", "orange", "gray"};
  static const std::vector<std::string> props = {"small", "big", "tall", "short", "old", "new", "young",
                                                 "wooden", "metal", "plastic", "heavy", "dirty", "wet"};
  static const std::vector<std::string> moods = {"happy", "sad", "angry", "tired"};
  if (group == "color") return colors;
  if (group == "mood") return moods;
  return props;
}

const std::vector<WordRow>& adverb_rows() {
  static const std::vector<WordRow> rows = {
      {"quickly", "manner", {"rapidly", "swiftly"}},
      {"rapidly", "manner", {"quickly"}},
      {"swiftly", "manner", {"quickly"}},
      {"slowly", "manner", {"gradually"}},
      {"gradually", "manner", {"slowly"}},
      {"carefully", "manner", {"cautiously"}},
      {"cautiously", "manner", {"carefully"}},
      {"gently", "manner", {"softly"}},
      {"softly", "manner", {"gently"}},
      {"happily", "manner", {"cheerfully"}},
      {"cheerfully", "manner", {"happily"}},
      {"quietly", "manner", {"silently"}},
      {"silently", "manner", {"quietly"}},
      {"loudly", "manner", {"noisily"}},
      {"noisily", "manner", {"loudly"}},
  };
  return rows;
}

const std::vector<std::string>& contrast_adverbs() {
  static const std::vector<std::string> pool = {"quickly", "slowly", "carefully", "gently", "happily",
                                                "quietly", "loudly"};
  return pool;
}

const std::set<std::string, std::less<>>& set_of(std::initializer_list<const char*> words,
                                                 std::set<std::string, std::less<>>& storage) {
  for (const char* w : words) storage.insert(w);
  return storage;
}

const std::set<std::string, std::less<>>& determiners() {
  static std::set<std::string, std::less<>> s;
  static const auto& r = set_of({"the", "a", "an", "this", "that", "these", "those", "his", "her", "their",
                                 "its", "my", "your", "our", "some", "another", "every", "each", "two", "three"},
                                s);
  return r;
}

const std::set<std::string, std::less<>>& prepositions_set() {
  static std::set<std::string, std::less<>> s;
  static const auto& r =
      set_of({"in", "on", "at", "with", "from", "to", "into", "onto", "by", "under", "over", "through", "near",
              "behind", "across", "along", "around", "beside", "inside", "of", "for", "toward", "towards",
              "against", "above", "below", "past", "outside", "beneath"},
             s);
  return r;
}

const std::vector<std::string>& contrast_prepositions() {
  static const std::vector<std::string> pool = {"in", "on", "under", "near", "behind", "beside", "inside",
                                                "above", "outside"};
  return pool;
}

struct Index {
  std::unordered_map<std::string, VerbMatch> verb_forms;
  std::vector<VerbEntry> verbs;
  std::unordered_map<std::string, const NounRow*> nouns;
  std::unordered_map<std::string, const WordRow*> adjectives;
  std::unordered_map<std::string, const WordRow*> adverbs;
  std::vector<std::string> adjective_list;

  Index() {
    verbs.reserve(verb_rows().size());
    for (const auto& row : verb_rows()) {
      VerbEntry e;
      e.base = row.base;
      e.third = regular_third(row.base);
      e.past = *row.past ? row.past : regular_past(row.base);
      e.participle = *row.participle ? row.participle : e.past;
      e.gerund = *row.gerund ? row.gerund : regular_gerund(row.base);
      e.transitive = row.transitive;
      e.synonyms = row.synonyms;
      verbs.push_back(std::move(e));
    }
    // Earlier forms win: base beats past for "read"/"cut", past beats
    // participle when they coincide.
    for (const auto& e : verbs) {
      const std::pair<const std::string*, VerbForm> forms[] = {{&e.base, VerbForm::kBase},
                                                               {&e.third, VerbForm::kThird},
                                                               {&e.past, VerbForm::kPast},
                                                               {&e.participle, VerbForm::kParticiple},
                                                               {&e.gerund, VerbForm::kGerund}};
      for (const auto& [form_text, form] : forms) verb_forms.emplace(*form_text, VerbMatch{&e, form});
    }
    for (const auto& row : noun_rows()) nouns.emplace(row.noun, &row);
    for (const auto& row : adjective_rows()) {
      adjectives.emplace(row.word, &row);
      adjective_list.push_back(row.word);
    }
    for (const auto& row : adverb_rows()) adverbs.emplace(row.word, &row);
  }
};

const Index& index() {
  static const Index idx;
  return idx;
}

const NounRow* find_noun(std::string_view w) {
  const auto& nouns = index().nouns;
  if (auto it = nouns.find(std::string(w)); it != nouns.end()) return it->second;
  const std::string s = singular(w);
  if (s != w) {
    if (auto it = nouns.find(s); it != nouns.end()) return it->second;
  }
  return nullptr;
}

std::vector<std::string> synonym_closure(const std::vector<std::string>& direct, std::string_view self) {
  std::vector<std::string> out(direct);
  out.emplace_back(self);
  return out;
}

bool contains(const std::vector<std::string>& v, std::string_view w) {
  return std::find(v.begin(), v.end(), w) != v.end();
}

}  // namespace

std::optional<VerbMatch> find_verb(std::string_view token) {
  const auto& forms = index().verb_forms;
  auto it = forms.find(std::string(token));
  if (it == forms.end()) return std::nullopt;
  return it->second;
}

std::string inflect(const VerbEntry& e, VerbForm form) {
  switch (form) {
    case VerbForm::kBase: return e.base;
    case VerbForm::kThird: return e.third;
    case VerbForm::kPast: return e.past;
    case VerbForm::kParticiple: return e.participle;
    case VerbForm::kGerund: return e.gerund;
  }
  return e.base;
}

std::string inflect_phrase(std::string_view base_phrase, VerbForm form) {
  const auto space = base_phrase.find(' ');
  const std::string head(base_phrase.substr(0, space));
  const std::string tail = space == std::string_view::npos ? "" : std::string(base_phrase.substr(space));
  if (auto m = find_verb(head)) return inflect(*m->entry, form) + tail;
  switch (form) {
    case VerbForm::kBase: return head + tail;
    case VerbForm::kThird: return regular_third(head) + tail;
    case VerbForm::kPast:
    case VerbForm::kParticiple: return regular_past(head) + tail;
    case VerbForm::kGerund: return regular_gerund(head) + tail;
  }
  return head + tail;
}

std::string present_for(const VerbEntry& entry, bool plural_subject) {
  return plural_subject ? entry.base : entry.third;
}

bool is_determiner(std::string_view w) { return determiners().count(w) > 0; }
bool is_preposition(std::string_view w) { return prepositions_set().count(w) > 0; }

bool is_particle(std::string_view w) {
  return w == "up" || w == "down" || w == "out" || w == "off" || w == "away" || w == "open" || w == "back" ||
         w == "shut";
}

bool is_be(std::string_view w) {
  return w == "is" || w == "are" || w == "was" || w == "were" || w == "be" || w == "been" || w == "being" ||
         w == "am";
}

bool is_auxiliary(std::string_view w) { return is_be(w); }

bool is_pronoun(std::string_view w) {
  return w == "he" || w == "she" || w == "they" || w == "it" || w == "someone" || w == "somebody" || w == "i" ||
         w == "we" || w == "you" || w == "him" || w == "them" || w == "me" || w == "us" || w == "her";
}

bool is_conjunction(std::string_view w) {
  return w == "and" || w == "or" || w == "but" || w == "then" || w == "while" || w == "as" || w == "who" ||
         w == "which" || w == "before" || w == "after";
}

bool is_adjective(std::string_view w) { return index().adjectives.count(std::string(w)) > 0; }
bool is_adverb(std::string_view w) { return index().adverbs.count(std::string(w)) > 0; }

bool is_color(std::string_view w) {
  auto it = index().adjectives.find(std::string(w));
  return it != index().adjectives.end() && std::string_view(it->second->group) == "color";
}

bool is_noun(std::string_view w) { return find_noun(w) != nullptr; }

bool is_animate(std::string_view noun) {
  const NounRow* row = find_noun(noun);
  return row && row->animate;
}

bool is_plural_noun(std::string_view w) {
  if (w == "stairs" || w == "steps") return true;
  if (index().nouns.count(std::string(w))) return false;
  return singular(w) != w && index().nouns.count(singular(w)) > 0;
}

std::string singular(std::string_view noun) {
  std::string n(noun);
  if (n == "children") return "child";
  if (n == "men") return "man";
  if (n == "women") return "woman";
  if (n == "people") return "person";
  if (n == "knives") return "knife";
  if (ends_with(n, "ies") && n.size() > 4) return n.substr(0, n.size() - 3) + "y";
  if (ends_with(n, "xes") || ends_with(n, "ches") || ends_with(n, "shes")) return n.substr(0, n.size() - 2);
  if (ends_with(n, "s") && !ends_with(n, "ss") && n.size() > 2) return n.substr(0, n.size() - 1);
  return n;
}

std::string pluralize(std::string_view noun) {
  std::string n(noun);
  if (n == "child") return "children";
  if (n == "man") return "men";
  if (n == "woman") return "women";
  if (n == "person") return "people";
  if (n == "knife") return "knives";
  if (n == "stairs" || n == "steps") return n;
  if (n.size() >= 2 && n.back() == 'y' && !is_vowel(n[n.size() - 2])) return n.substr(0, n.size() - 1) + "ies";
  if (ends_with(n, "x") || ends_with(n, "ch") || ends_with(n, "sh") || ends_with(n, "s")) return n + "es";
  return n + "s";
}

std::string swap_pronoun_case(std::string_view w) {
  static const std::map<std::string, std::string, std::less<>> m = {
      {"he", "him"}, {"him", "he"}, {"she", "her"}, {"her", "she"}, {"they", "them"},
      {"them", "they"}, {"i", "me"},  {"me", "i"},   {"we", "us"},   {"us", "we"}};
  if (auto it = m.find(w); it != m.end()) return it->second;
  return std::string(w);
}

std::vector<std::string> synonyms_for(std::string_view token) {
  if (auto v = find_verb(token)) {
    std::vector<std::string> out;
    for (const auto& s : v->entry->synonyms) out.push_back(inflect_phrase(s, v->form));
    return out;
  }
  const auto& idx = index();
  if (auto it = idx.adjectives.find(std::string(token)); it != idx.adjectives.end()) return it->second->synonyms;
  if (auto it = idx.adverbs.find(std::string(token)); it != idx.adverbs.end()) return it->second->synonyms;
  if (const NounRow* row = find_noun(token)) {
    const bool plural = is_plural_noun(token);
    std::vector<std::string> out;
    for (const auto& s : row->synonyms) out.push_back(plural ? pluralize(s) : s);
    return out;
  }
  return {};
}

std::vector<std::string> contrasts_for(std::string_view token) {
  std::vector<std::string> out;
  if (auto v = find_verb(token)) {
    const auto closure = synonym_closure(v->entry->synonyms, v->entry->base);
    for (const auto& base : contrast_verbs(v->entry->transitive)) {
      if (contains(closure, base)) continue;
      // Skip candidates that list this verb as a synonym.
      auto m = find_verb(base);
      if (m && contains(m->entry->synonyms, v->entry->base)) continue;
      out.push_back(inflect_phrase(base, v->form));
    }
    return out;
  }
  const auto& idx = index();
  if (auto it = idx.adjectives.find(std::string(token)); it != idx.adjectives.end()) {
    const auto closure = synonym_closure(it->second->synonyms, token);
    for (const auto& a : contrast_adjectives(it->second->group)) {
      if (!contains(closure, a)) out.push_back(a);
    }
    return out;
  }
  if (auto it = idx.adverbs.find(std::string(token)); it != idx.adverbs.end()) {
    const auto closure = synonym_closure(it->second->synonyms, token);
    for (const auto& a : contrast_adverbs()) {
      if (!contains(closure, a)) out.push_back(a);
    }
    return out;
  }
  if (is_preposition(token)) {
    for (const auto& p : contrast_prepositions()) {
      if (p != token) out.push_back(p);
    }
    return out;
  }
  if (const NounRow* row = find_noun(token)) {
    const bool plural = is_plural_noun(token);
    const auto closure = synonym_closure(row->synonyms, row->noun);
    for (const auto& n : contrast_nouns(row->animate)) {
      if (contains(closure, n)) continue;
      const NounRow* other = find_noun(n);
      if (other && contains(other->synonyms, row->noun)) continue;
      out.push_back(plural ? pluralize(n) : n);
    }
    return out;
  }
  return out;
}

std::span<const std::string> adjectives() { return index().adjective_list; }

std::span<const std::string> fallback_nouns() { return contrast_nouns(false); }

std::span<const std::string> prepositional_phrases() {
  static const std::vector<std::string> pps = {"in the kitchen", "on the table", "near the window",
                                               "in the room",    "on the floor", "in the park"};
  return pps;
}

std::vector<std::string> attributes_of(std::string_view noun) {
  const NounRow* row = find_noun(noun);
  if (!row || !*row->attribute_group) return {};
  auto it = attribute_table().find(row->attribute_group);
  return it == attribute_table().end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> all_attributes() {
  std::vector<std::string> out;
  for (const auto& [_, attrs] : attribute_table()) {
    for (const auto& a : attrs) {
      if (!contains(out, a)) out.push_back(a);
    }
  }
  return out;
}

bool is_stopword(std::string_view w) {
  return is_determiner(w) || is_preposition(w) || is_be(w) || is_pronoun(w) || is_conjunction(w) ||
         is_particle(w);
}

}  // namespace vlb::lexicon
