#include <sstream>

#include "photoscout/nlbridge.hpp"

namespace photoscout::nlbridge {

const std::vector<PromptPair>& prompt_corpus() {
  static const std::vector<PromptPair> kCorpus = {
      {"There is a tree in the image.", "exists x. HasType(x, Tree)"},
      {"The image contains a chair and a table.", "exists x. exists y. HasType(x, Chair) && HasType(y, Table)"},
      {"The image contains a chair to the left of a table.",
       "exists x. exists y. HasType(x, Chair) && HasType(y, Table) && HasRelation(x, y, Left)"},
      {"All faces do not have eyes open.", "forall x. HasType(x, Face) -> !HasProperty(x, EyesOpen)"},
      {"The image contains a cat inside a box.",
       "exists x. exists y. HasType(x, Cat) && HasType(y, Box) && HasRelation(x, y, Inside)"},
      {"Jane is in the image and everyone is smiling.",
       "exists x. HasType(x, Jane) && forall y. HasType(y, face) -> HasProperty(y, Smiling)"},
      {"The image contains a face that is smiling, and has their eyes open.",
       "exists x. HasProperty(x, Smiling) && HasProperty(x, EyesOpen)"},
      {"Every person is next to a cat.",
       "forall x. HasType(x, Person) -> exists y. HasType(y, Cat) && HasRelation(x, y, NextTo)"},
  };
  return kCorpus;
}

std::string build_prompt(std::string_view query) {
  std::ostringstream out;
  out << "Translate each image search query into a program in the image search language. "
         "A program is a first-order formula over the objects detected in one image, built from the "
         "predicates HasType, HasProperty, HasEmotion and HasRelation, the connectives &&, ||, ! and ->, "
         "and the quantifiers exists and forall. Answer with the program only.\n\n";
  for (const auto& pair : prompt_corpus()) {
    out << "Input: " << pair.nl << "\n"
        << "Output: " << pair.dsl << "\n\n";
  }
  out << "Input: " << query << "\n"
      << "Output:";
  return out.str();
}

std::string build_explanation_prompt(std::string_view program_text) {
  static const std::pair<const char*, const char*> kExamples[] = {
      {"exists x. HasType(x, Tree)", "I found all images that contain a tree."},
      {"exists x. exists y. HasType(x, Chair) && HasType(y, Table) && HasRelation(x, y, Left)",
       "I found all images with a chair that is to the left of a table."},
      {"forall x. HasType(x, Face) -> HasProperty(x, Smiling)",
       "I found all images in which every face is smiling."},
  };
  std::ostringstream out;
  out << "Describe in one English sentence which images the image search program matches.\n\n";
  for (const auto& [program, description] : kExamples) {
    out << "Program: " << program << "\n"
        << "Description: " << description << "\n\n";
  }
  out << "Program: " << program_text << "\n"
      << "Description:";
  return out.str();
}

std::string clean_candidate(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string line;
  while (std::getline(in, line)) {
    std::string t = line;
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    strip(t);
    if (t.rfind("```", 0) == 0) continue;
    if (t.rfind("Output:", 0) == 0) t = t.substr(7);
    strip(t);
    while (!t.empty() && t.front() == '`') t.erase(t.begin());
    while (!t.empty() && t.back() == '`') t.pop_back();
    strip(t);
    if (!t.empty()) return t;
  }
  return {};
}

}  // namespace photoscout::nlbridge
