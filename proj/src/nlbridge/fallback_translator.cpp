// Offline query translator: a small keyword grammar over English search
// queries, used when no LLM endpoint is available. It understands entity
// conjunctions ("a guitar and a microphone"), spatial phrases ("to the left
// of", "next to", "inside"), negated entities ("no people", "but not the
// groom"), universal statements ("every person is next to a cat", "everyone is
// smiling"), face attributes and emotions. Unrecognized verbs ("holding") are
// emitted as unknown binary predicates so the parser turns them into holes.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "photoscout/nlbridge.hpp"

namespace photoscout::nlbridge {


namespace {

struct Word {
  std::string text;  // lower-cased
  bool proper = false;
};

std::vector<std::string> split_first_sentence(std::string_view text) {
  // Only the first sentence carries the request; later ones tend to be
  // clarifications ("An image contains a person if ...").
  std::string sentence;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '?' || c == '!') && (i + 1 == text.size() || text[i + 1] == ' ')) {
      if (!sentence.empty()) break;
      continue;
    }
    sentence += c;
  }
  std::vector<std::string> raw;
  std::string cur;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const char c = sentence[i];
    if (c == '\'') {
      // "alice's" -> "alice", "doesn't" -> "doesnt"
      if (i + 1 < sentence.size() && (sentence[i + 1] == 's' || sentence[i + 1] == 'S') &&
          (i + 2 == sentence.size() || !std::isalnum(static_cast<unsigned char>(sentence[i + 2])))) {
        ++i;
      }
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else {
      if (!cur.empty()) raw.push_back(cur);
      cur.clear();
      if (c == ',') raw.emplace_back(",");
    }
  }
  if (!cur.empty()) raw.push_back(cur);
  return raw;
}

std::vector<Word> tokenize(std::string_view text) {
  std::vector<Word> out;
  const auto raw = split_first_sentence(text);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Word w;
    w.proper = i > 0 && std::isupper(static_cast<unsigned char>(raw[i][0]));
    w.text = dsl::canonicalize(raw[i]);
    out.push_back(std::move(w));
  }
  // Drop "in the image"-style locatives; they never constrain the program.
  static const std::array<const char*, 6> kMedia = {"image", "photo", "picture", "images", "photos", "pictures"};
  std::vector<Word> filtered;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if ((out[i].text == "in" || out[i].text == "of") && i + 2 < out.size() &&
        (out[i + 1].text == "the" || out[i + 1].text == "this" || out[i + 1].text == "an" ||
         out[i + 1].text == "a") &&
        std::find(kMedia.begin(), kMedia.end(), out[i + 2].text) != kMedia.end()) {
      i += 2;
      continue;
    }
    filtered.push_back(out[i]);
  }
  return filtered;
}

std::string singularize(const std::string& w) {
  static const std::map<std::string, std::string> kIrregular = {
      {"people", "person"}, {"men", "man"},       {"women", "woman"}, {"children", "child"},
      {"mice", "mouse"},    {"geese", "goose"},   {"teeth", "tooth"}, {"feet", "foot"},
      {"knives", "knife"},  {"leaves", "leaf"},   {"wolves", "wolf"}, {"shelves", "shelf"},
  };
  static const std::array<const char*, 10> kInvariant = {"glasses", "sunglasses", "eyeglasses", "pants", "jeans",
                                                          "shorts",  "scissors",   "species",    "series", "news"};
  if (auto it = kIrregular.find(w); it != kIrregular.end()) return it->second;
  if (std::find(kInvariant.begin(), kInvariant.end(), w) != kInvariant.end()) return w;
  auto ends = [&](std::string_view suffix) {
    return w.size() > suffix.size() + 1 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends("ches") || ends("shes") || ends("xes") || ends("sses") || ends("zes")) return w.substr(0, w.size() - 2);
  if (ends("ss") || ends("us") || ends("is")) return w;
  if (ends("s")) return w.substr(0, w.size() - 1);
  return w;
}

std::string constant_text(const std::string& canonical) {
  std::string out;
  bool upper = true;
  bool simple = true;
  for (char c : canonical) {
    if (c == ' ') {
      simple = false;
      upper = true;
      continue;
    }
    out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    upper = false;
  }
  if (simple) return out;
  return "\"" + canonical + "\"";
}

struct PropertyWord {
  const char* words;  // space separated
  const char* relation;
  const char* constant;
};

// Longest phrases first.
constexpr PropertyWord kProperties[] = {
    {"eyes open", "HasProperty", "EyesOpen"},     {"open eyes", "HasProperty", "EyesOpen"},
    {"mouth open", "HasProperty", "MouthOpen"},   {"open mouth", "HasProperty", "MouthOpen"},
    {"smiling", "HasProperty", "Smiling"},        {"smile", "HasProperty", "Smiling"},
    {"sunglasses", "HasProperty", "Sunglasses"},  {"eyeglasses", "HasProperty", "Eyeglasses"},
    {"glasses", "HasProperty", "Eyeglasses"},     {"beard", "HasProperty", "Beard"},
    {"bearded", "HasProperty", "Beard"},          {"mustache", "HasProperty", "Mustache"},
    {"moustache", "HasProperty", "Mustache"},     {"happy", "HasEmotion", "Happy"},
    {"sad", "HasEmotion", "Sad"},                 {"angry", "HasEmotion", "Angry"},
    {"calm", "HasEmotion", "Calm"},               {"surprised", "HasEmotion", "Surprised"},
    {"confused", "HasEmotion", "Confused"},       {"disgusted", "HasEmotion", "Disgusted"},
    {"scared", "HasEmotion", "Fear"},             {"afraid", "HasEmotion", "Fear"},
    {"fearful", "HasEmotion", "Fear"},
};

struct RelationWord {
  const char* words;
  const char* constant;
};

constexpr RelationWord kRelations[] = {
    {"to the left of", "Left"},  {"on the left of", "Left"},   {"to the right of", "Right"},
    {"on the right of", "Right"}, {"adjacent to", "NextTo"},   {"next to", "NextTo"},
    {"on top of", "Above"},      {"inside of", "Inside"},      {"left of", "Left"},
    {"right of", "Right"},       {"beside", "NextTo"},         {"near", "NextTo"},
    {"alongside", "NextTo"},     {"above", "Above"},           {"over", "Above"},
    {"on", "Above"},             {"below", "Below"},           {"under", "Below"},
    {"underneath", "Below"},     {"beneath", "Below"},         {"inside", "Inside"},
    {"within", "Inside"},        {"in", "Inside"},
};

const std::array<const char*, 47> kFunctionWords = {
    "a",    "an",    "the",  "some",  "any",     "and",   "or",       "but",      "not",    "no",
    "is",   "are",   "was",  "were",  "be",      "that",  "who",      "which",    "where",  "with",
    "without", "of", "to",   "has",   "have",    "their", "his",      "her",      "its",    "every",
    "all",  "each",  "everyone", "everybody", "there", "contains", "contain", "containing", "do", "does",
    "doesnt", "dont", "also", "both", "while",   ",",     "find"};

bool is_function_word(const std::string& w) {
  return std::find(kFunctionWords.begin(), kFunctionWords.end(), w) != kFunctionWords.end();
}

struct Atom {
  std::string text;
  bool unknown_verb = false;
};

class Translator {
 public:
  explicit Translator(std::vector<Word> words) : words_(std::move(words)) {}

  std::vector<std::string> run() {
    strip_leading_filler();
    while (!done()) {
      const std::size_t before = pos_;
      skip_connectors();
      if (done()) break;
      if (at_any({"every", "each", "everyone", "everybody"}) ||
          (at("all") && !at_offset(1, "of"))) {
        parse_universal();
      } else if (at_any({"no", "without", "not", "nobody"})) {
        parse_negated();
      } else {
        parse_clause();
      }
      if (pos_ == before) ++pos_;
    }
    return assemble();
  }

 private:
  // --------------------------------------------------------------------------
  // Cursor helpers
  // --------------------------------------------------------------------------

  bool done() const { return pos_ >= words_.size(); }
  const std::string& cur() const { return words_[pos_].text; }
  bool at(std::string_view w) const { return !done() && cur() == w; }
  bool at_offset(std::size_t k, std::string_view w) const {
    return pos_ + k < words_.size() && words_[pos_ + k].text == w;
  }
  bool at_any(std::initializer_list<std::string_view> ws) const {
    return std::any_of(ws.begin(), ws.end(), [&](std::string_view w) { return at(w); });
  }

  // Match a space-separated phrase at the cursor; consume it on success.
  bool match_phrase(std::string_view phrase) {
    std::size_t k = 0;
    std::size_t start = 0;
    while (start <= phrase.size()) {
      std::size_t end = phrase.find(' ', start);
      if (end == std::string_view::npos) end = phrase.size();
      if (!at_offset(k, phrase.substr(start, end - start))) return false;
      ++k;
      start = end + 1;
    }
    pos_ += k;
    return true;
  }

  void skip_articles() {
    while (at_any({"a", "an", "the", "some", "any", "one"})) ++pos_;
  }

  void skip_connectors() {
    while (at_any({"and", "but", ",", "also", "while", "or"})) {
      if (at("but") && at_offset(1, "not")) return;
      ++pos_;
    }
  }

  void strip_leading_filler() {
    static const std::array<const char*, 22> kFiller = {
        "find",     "show",   "me",     "get",     "search",   "for",    "images", "image",
        "photos",   "photo",  "pictures", "picture", "pics",   "that",   "where",  "which",
        "contain",  "contains", "containing", "there", "of",   "with"};
    while (!done()) {
      if (std::find(kFiller.begin(), kFiller.end(), cur()) != kFiller.end()) {
        ++pos_;
      } else if (at("all") && (at_offset(1, "images") || at_offset(1, "photos") || at_offset(1, "pictures") ||
                                at_offset(1, "the"))) {
        ++pos_;
      } else if (at_any({"is", "are"}) && pos_ > 0) {
        ++pos_;
      } else if (at("the") && (at_offset(1, "image") || at_offset(1, "photo") || at_offset(1, "picture"))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // --------------------------------------------------------------------------
  // Vocabulary
  // --------------------------------------------------------------------------

  std::string fresh_var() {
    static const std::array<const char*, 6> kNames = {"x", "y", "z", "w", "v", "u"};
    const std::size_t n = next_var_++;
    if (n < kNames.size()) return kNames[n];
    return "x" + std::to_string(n - kNames.size() + 1);
  }

  bool is_relation_start() const {
    for (const auto& r : kRelations) {
      const std::string_view phrase = r.words;
      if (at(phrase.substr(0, phrase.find(' ')))) return true;
    }
    return false;
  }

  bool is_property_start() const {
    for (const auto& p : kProperties) {
      const std::string_view phrase = p.words;
      if (at(phrase.substr(0, phrase.find(' ')))) return true;
    }
    return false;
  }

  std::optional<std::string> read_relation() {
    for (const auto& r : kRelations) {
      if (match_phrase(r.words)) return std::string(r.constant);
    }
    return std::nullopt;
  }

  // Noun phrase head: one or two consecutive content words.
  std::optional<std::string> read_noun() {
    skip_articles();
    std::vector<std::string> parts;
    bool proper = false;
    while (!done() && parts.size() < 2 && !is_function_word(cur()) && !is_relation_start() &&
           !is_property_start() && !(parts.size() == 1 && cur().size() > 4 && cur().ends_with("ing"))) {
      proper = proper || words_[pos_].proper;
      parts.push_back(cur());
      ++pos_;
    }
    if (parts.empty()) return std::nullopt;
    std::string last = proper ? parts.back() : singularize(parts.back());
    if (parts.size() == 1) return last;
    return parts.front() + " " + last;
  }

  // Face attribute or emotion, possibly negated, attached to `var`.
  bool try_property(const std::string& var, std::vector<Atom>& sink) {
    const std::size_t saved = pos_;
    bool negated = false;
    for (bool progressed = true; progressed && !done();) {
      progressed = false;
      if (at_any({"is", "are", "that", "who", "has", "have", "their", "his", "her", "with", "wearing", "a"})) {
        ++pos_;
        progressed = true;
      } else if (at_any({"not", "no", "without", "doesnt", "dont"})) {
        negated = true;
        ++pos_;
        progressed = true;
      } else if (at_any({"do", "does"}) && at_offset(1, "not")) {
        negated = true;
        pos_ += 2;
        progressed = true;
      }
    }
    for (const auto& p : kProperties) {
      if (match_phrase(p.words)) {
        std::string atom = std::string(p.relation) + "(" + var + ", " + p.constant + ")";
        sink.push_back({negated ? "!" + atom : atom, false});
        return true;
      }
    }
    pos_ = saved;
    return false;
  }

  // --------------------------------------------------------------------------
  // Productions
  // --------------------------------------------------------------------------

  std::string declare_entity(const std::string& noun) {
    const std::string var = fresh_var();
    exists_vars_.push_back(var);
    type_atoms_.push_back("HasType(" + var + ", " + constant_text(noun) + ")");
    return var;
  }

  // Predicates attached to `subject` until the clause ends. Relation targets
  // become new existential entities (or, inside a universal, nested ones).
  void parse_predicates(const std::string& subject, std::vector<Atom>& sink,
                        std::vector<std::pair<std::string, std::string>>* nested_targets) {
    while (!done()) {
      if (try_property(subject, sink)) continue;
      if (at("and") || at(",")) {
        const std::size_t saved = pos_;
        ++pos_;
        if (at("and")) ++pos_;
        if (try_property(subject, sink)) continue;
        if (at_any({"is", "are"})) ++pos_;
        if (!done() && (is_relation_start() || (cur().size() > 4 && cur().ends_with("ing") && !is_function_word(cur())))) {
          continue;
        }
        pos_ = saved;
        break;
      }
      if (at_any({"is", "are", "that", "who", "which"})) {
        ++pos_;
        continue;
      }
      if (at("with") && !at_offset(1, "no")) {
        ++pos_;
        const auto noun = read_noun();
        if (!noun) break;
        target(*noun, nested_targets);
        continue;
      }
      if (auto rel = read_relation()) {
        const auto noun = read_noun();
        if (!noun) break;
        const std::string t = target(*noun, nested_targets);
        sink.push_back({"HasRelation(" + subject + ", " + t + ", " + *rel + ")", false});
        continue;
      }
      if (cur().size() > 4 && cur().ends_with("ing") && !is_function_word(cur())) {
        std::string verb = cur();
        verb[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(verb[0])));
        ++pos_;
        // Particles belong to the verb: "singing into", "looking at".
        if (at_any({"into", "onto", "at", "from", "for", "toward", "towards", "through"})) ++pos_;
        const auto noun = read_noun();
        if (!noun) break;
        const std::string t = target(*noun, nested_targets);
        sink.push_back({verb + "(" + subject + ", " + t + ")", true});
        continue;
      }
      break;
    }
  }

  std::string target(const std::string& noun, std::vector<std::pair<std::string, std::string>>* nested) {
    if (!nested) return declare_entity(noun);
    const std::string var = fresh_var();
    nested->emplace_back(var, noun);
    return var;
  }

  void parse_clause() {
    const auto noun = read_noun();
    if (!noun) return;
    const std::string subject = declare_entity(*noun);
    parse_predicates(subject, atoms_, nullptr);
  }

  void parse_negated() {
    const bool nobody = at("nobody");
    ++pos_;
    std::string noun;
    if (nobody) {
      noun = "person";
    } else if (auto n = read_noun()) {
      noun = *n;
    } else {
      return;
    }
    negated_.push_back({fresh_var(), noun});
  }

  void parse_universal() {
    std::string noun;
    if (at_any({"everyone", "everybody"})) {
      ++pos_;
      noun = "face";
    } else {
      ++pos_;
      auto n = read_noun();
      if (!n) return;
      noun = *n;
    }
    const std::string var = fresh_var();
    std::vector<Atom> body;
    std::vector<std::pair<std::string, std::string>> nested;
    parse_predicates(var, body, &nested);

    std::vector<std::string> parts;
    for (const auto& a : body) {
      if (a.text.find("HasRelation") == std::string::npos && !a.unknown_verb) parts.push_back(a.text);
    }
    std::string consequent;
    for (const auto& p : parts) consequent += (consequent.empty() ? "" : " && ") + p;
    if (!nested.empty()) {
      std::string inner;
      for (const auto& [v, n] : nested) inner += "exists " + v + ". ";
      std::string conj;
      for (const auto& [v, n] : nested) conj += (conj.empty() ? "" : " && ") + ("HasType(" + v + ", " + constant_text(n) + ")");
      for (const auto& a : body) {
        if (a.text.find("HasRelation") != std::string::npos || a.unknown_verb) conj += " && " + a.text;
      }
      consequent += (consequent.empty() ? "" : " && ") + inner + conj;
    }
    if (consequent.empty()) return;
    universals_.push_back("forall " + var + ". HasType(" + var + ", " + constant_text(noun) + ") -> " + consequent);
  }

  // --------------------------------------------------------------------------
  // Output
  // --------------------------------------------------------------------------

  std::string build(bool keep_unknown_verbs, bool person_as_face) const {
    std::vector<std::string> parts = type_atoms_;
    for (const auto& a : atoms_) {
      if (a.unknown_verb && !keep_unknown_verbs) continue;
      parts.push_back(a.text);
    }
    for (const auto& [var, noun] : negated_) {
      const std::string n = person_as_face && noun == "person" ? "face" : noun;
      parts.push_back("!(exists " + var + ". HasType(" + var + ", " + constant_text(n) + "))");
    }
    for (std::size_t i = 0; i < universals_.size(); ++i) {
      const bool last = i + 1 == universals_.size();
      parts.push_back(last ? universals_[i] : "(" + universals_[i] + ")");
    }
    if (parts.empty()) return {};
    std::string out;
    for (const auto& v : exists_vars_) out += "exists " + v + ". ";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " && " : "") + parts[i];
    return out;
  }

  std::vector<std::string> assemble() const {
    std::vector<std::string> out;
    auto add = [&](std::string s) {
      if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end() && out.size() < 3) out.push_back(std::move(s));
    };
    add(build(true, false));
    const bool has_unknown = std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.unknown_verb; });
    if (has_unknown) add(build(false, false));
    const bool negated_person =
        std::any_of(negated_.begin(), negated_.end(), [](const auto& p) { return p.second == "person"; });
    if (negated_person) add(build(true, true));
    return out;
  }

  std::vector<Word> words_;
  std::size_t pos_ = 0;
  std::size_t next_var_ = 0;
  std::vector<std::string> exists_vars_;
  std::vector<std::string> type_atoms_;
  std::vector<Atom> atoms_;
  std::vector<std::pair<std::string, std::string>> negated_;
  std::vector<std::string> universals_;
};

std::string normalized(std::string_view text) {
  std::string out;
  for (const auto& w : tokenize(text)) {
    if (w.text == ",") continue;
    out += (out.empty() ? "" : " ") + w.text;
  }
  return out;
}

}  // namespace

std::vector<std::string> template_candidates(std::string_view query) {
  auto out = Translator(tokenize(query)).run();
  if (!out.empty()) return out;
  // Nothing structured: treat every content word as an object that must appear.
  std::vector<std::string> nouns;
  for (const auto& w : tokenize(query)) {
    if (!is_function_word(w.text) && w.text != "image" && w.text != "images" && w.text != "photo" &&
        w.text != "photos") {
      nouns.push_back(w.proper ? w.text : singularize(w.text));
    }
  }
  if (nouns.empty()) return {};
  std::string prefix;
  std::string body;
  for (std::size_t i = 0; i < nouns.size() && i < 6; ++i) {
    const std::string var = i < 3 ? std::string(1, "xyz"[i]) : "x" + std::to_string(i - 2);
    prefix += "exists " + var + ". ";
    body += (i ? " && " : "") + ("HasType(" + var + ", " + constant_text(nouns[i]) + ")");
  }
  return {prefix + body};
}

std::vector<std::string> fallback_candidates(std::string_view query) {
  const std::string key = normalized(query);
  for (const auto& pair : prompt_corpus()) {
    if (normalized(pair.nl) == key) return {pair.dsl};
  }
  return template_candidates(query);
}

}  // namespace photoscout::nlbridge
