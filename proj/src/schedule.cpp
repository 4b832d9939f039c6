#include "pairscale/schedule.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <utility>

#include "pairscale/errors.hpp"
#include "pairscale/rng.hpp"
#include "pairscale/text.hpp"

namespace pairscale {

namespace {

int count_occurrences(const std::string& text, const std::string& token) {
  int count = 0;
  for (std::size_t pos = text.find(token); pos != std::string::npos;
       pos = text.find(token, pos + token.size())) {
    ++count;
  }
  return count;
}

void check_stage(const std::string& stage, const char* which) {
  if (count_occurrences(stage, "{A}") != 1 ||
      count_occurrences(stage, "{B}") != 1) {
    throw ValidationError(std::string("template ") + which +
                          " must contain {A} and {B} exactly once");
  }
}

constexpr const char* kIdeologyStage1 =
    "Which agency is perceived to be more liberal: {A} or {B}?";

constexpr const char* kIdeologyStage2 =
    "Using just your answer above, which agency is perceived to be more "
    "liberal: the '{A}' or the '{B}'? Only return the full name of the "
    "agency, with no other words. If neither agencies are more liberal or "
    "more conservative, return \"Tie\" with no other words or punctuation.";

constexpr const char* kKnowledgeStage1 =
    "Knowledge institutions create, distribute, and/or legitimize knowledge. "
    "Which agency is more likely to be perceived to be producing knowledge, "
    "distributing knowledge, and/or supporting knowledge institutions such "
    "as academic and educational institutions, the media, and civil society "
    "organizations: {A} or {B}?";

constexpr const char* kKnowledgeStage2 =
    "Using just your answer above, which agency is more likely to be "
    "perceived to be producing knowledge, distributing knowledge, and/or "
    "supporting knowledge institutions such as academic and educational "
    "institutions, the media, and civil society organizations: the '{A}' or "
    "the '{B}'? Only return the full name of the agency, with no other "
    "words. If neither agencies are more or less likely to be perceived to "
    "be producing knowledge, distributing knowledge, and/or supporting "
    "knowledge institutions, return \"Tie\" with no other words or "
    "punctuation.";

// Strips one layer of matching quotation marks (straight or typographic).
std::string strip_quotes(const std::string& s) {
  static const std::pair<const char*, const char*> kPairs[] = {
      {"\"", "\""},           {"'", "'"},
      {"\xe2\x80\x9c", "\xe2\x80\x9d"},  // U+201C / U+201D
      {"\xe2\x80\x98", "\xe2\x80\x99"},  // U+2018 / U+2019
  };
  for (const auto& [open, close] : kPairs) {
    std::string_view o(open), c(close);
    if (s.size() >= o.size() + c.size() && s.compare(0, o.size(), o) == 0 &&
        s.compare(s.size() - c.size(), c.size(), c) == 0) {
      return s.substr(o.size(), s.size() - o.size() - c.size());
    }
  }
  return s;
}

}  // namespace

PromptTemplate make_template(std::string attribute, std::string stage1,
                             std::string stage2) {
  if (trim(attribute).empty()) {
    throw ValidationError("template attribute key must be non-empty");
  }
  check_stage(stage1, "stage1");
  check_stage(stage2, "stage2");
  return PromptTemplate{std::move(attribute), std::move(stage1),
                        std::move(stage2)};
}

bool is_builtin_attribute(const std::string& attribute) {
  return attribute == "ideology-liberal" || attribute == "knowledge-institution";
}

PromptTemplate builtin_template(const std::string& attribute) {
  if (attribute == "ideology-liberal") {
    return make_template(attribute, kIdeologyStage1, kIdeologyStage2);
  }
  if (attribute == "knowledge-institution") {
    return make_template(attribute, kKnowledgeStage1, kKnowledgeStage2);
  }
  throw ValidationError("unknown built-in attribute '" + attribute +
                        "' (built-ins: ideology-liberal, knowledge-institution)");
}

PromptTemplate load_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open template file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("template file " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("attribute") || !doc.contains("stage1") ||
      !doc.contains("stage2")) {
    throw ValidationError("template file " + path +
                          " must be an object with attribute, stage1, stage2");
  }
  return make_template(doc.at("attribute").get<std::string>(),
                       doc.at("stage1").get<std::string>(),
                       doc.at("stage2").get<std::string>());
}

std::string render_prompt(const std::string& text, const std::string& left,
                          const std::string& right) {
  std::string out = text;
  auto replace_once = [&out](const std::string& token, const std::string& value) {
    std::size_t pos = out.find(token);
    if (pos != std::string::npos) out.replace(pos, token.size(), value);
  };
  replace_once("{A}", left);
  replace_once("{B}", right);
  return out;
}

std::string template_hash(const PromptTemplate& tpl) {
  std::uint64_t h = fnv1a64(tpl.stage1);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(tpl.stage2, h);
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::vector<PairTask> schedule_pairs_ids(const std::vector<std::string>& ids,
                                         int repeats,
                                         const std::string& attribute,
                                         std::uint64_t seed) {
  if (ids.size() < 2) {
    throw TooFewEntitiesError("scheduling needs at least two entities");
  }
  if (repeats < 1) throw ValidationError("repeats must be >= 1");

  SplitMix64 rng(fnv1a64_u64(seed, fnv1a64(attribute)));
  std::vector<PairTask> tasks;
  tasks.reserve(ids.size() * (ids.size() - 1) / 2 * static_cast<std::size_t>(repeats));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      for (int r = 0; r < repeats; ++r) {
        PairTask task;
        if (rng.next_coin()) {
          task.left = ids[i];
          task.right = ids[j];
        } else {
          task.left = ids[j];
          task.right = ids[i];
        }
        task.attribute = attribute;
        task.repeat_index = r;
        tasks.push_back(std::move(task));
      }
    }
  }
  // Fisher-Yates with the same stream keeps the whole schedule a pure
  // function of (ids, repeats, attribute, seed).
  for (std::size_t k = tasks.size(); k > 1; --k) {
    std::size_t pick = static_cast<std::size_t>(rng.next_below(k));
    std::swap(tasks[k - 1], tasks[pick]);
  }
  return tasks;
}

std::vector<PairTask> schedule_pairs(const std::vector<Entity>& entities,
                                     int repeats, const std::string& attribute,
                                     std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(entities.size());
  for (const auto& entity : entities) ids.push_back(entity.id);
  return schedule_pairs_ids(ids, repeats, attribute, seed);
}

Outcome parse_extraction(const std::string& reply, const std::string& left_name,
                         const std::string& right_name) {
  std::string s = trim(reply);
  if (!s.empty() && s.back() == '.') s.pop_back();  // period outside quotes
  s = trim(strip_quotes(trim(s)));
  if (!s.empty() && s.back() == '.') s.pop_back();  // period inside quotes
  s = trim(s);

  const std::string key = match_key(s);
  const std::string left_key = match_key(left_name);
  const std::string right_key = match_key(right_name);
  if (!left_key.empty() && key == left_key) return Outcome::kWinLeft;
  if (!right_key.empty() && key == right_key) return Outcome::kWinRight;
  if (key == "tie") return Outcome::kTie;

  bool has_left = !left_key.empty() && contains(key, left_key);
  bool has_right = !right_key.empty() && contains(key, right_key);
  if (has_left && !has_right) return Outcome::kWinLeft;
  if (has_right && !has_left) return Outcome::kWinRight;
  return Outcome::kUnusable;
}

}  // namespace pairscale
