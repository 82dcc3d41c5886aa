#include "photoscout/dsl.hpp"

#include <algorithm>

namespace photoscout::dsl {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string canonicalize(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && is_space(token[begin])) ++begin;
  while (end > begin && is_space(token[end - 1])) --end;
  std::string out(token.substr(begin, end - begin));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

const std::vector<std::string>& builtin_properties() {
  static const std::vector<std::string> kProperties = {
      "beard", "eyeglasses", "eyesopen", "mouthopen", "mustache", "smiling", "sunglasses"};
  return kProperties;
}

const std::vector<std::string>& builtin_emotions() {
  static const std::vector<std::string> kEmotions = {
      "angry", "calm", "confused", "disgusted", "fear", "happy", "sad", "surprised"};
  return kEmotions;
}

const std::vector<std::string>& builtin_relations() {
  static const std::vector<std::string> kRelations = {
      "above", "below", "contains", "inside", "left", "nextto", "right"};
  return kRelations;
}

Vocabulary Vocabulary::builtin() {
  Vocabulary v;
  v.types = {"face"};
  v.properties = {builtin_properties().begin(), builtin_properties().end()};
  v.emotions = {builtin_emotions().begin(), builtin_emotions().end()};
  v.relations = {builtin_relations().begin(), builtin_relations().end()};
  return v;
}

const std::set<std::string>& Vocabulary::for_slot(Slot slot) const {
  switch (slot) {
    case Slot::TypeConst:
      return types;
    case Slot::PropertyConst:
      return properties;
    case Slot::EmotionConst:
      return emotions;
    case Slot::RelationConst:
      return relations;
  }
  return types;
}

bool Vocabulary::knows(Slot slot, std::string_view canonical) const {
  const auto& set = for_slot(slot);
  return set.find(std::string(canonical)) != set.end();
}

}  // namespace photoscout::dsl
