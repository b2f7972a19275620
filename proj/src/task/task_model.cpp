#include "crowdgen/task_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "crowdgen/error.hpp"

namespace crowdgen {

namespace {

// Fixed 50-word English stop list, sorted for binary search.
constexpr std::array<std::string_view, 50> kStopWords = {
    "a",    "about", "after", "all",  "also", "an",   "and",   "any",  "are",  "as",
    "at",   "be",    "been",  "both", "but",  "by",   "can",   "do",   "each", "for",
    "from", "has",   "have",  "how",  "if",   "in",   "into",  "is",   "it",   "its",
    "more", "most",  "not",   "of",   "on",   "one",  "or",    "so",   "than", "that",
    "the",  "their", "then",  "these", "this", "to",  "was",   "what", "with", "you",
};

struct KeywordRule {
  std::string_view word;
  TagSet tags;
};

using enum CapabilityTag;

constexpr std::array<KeywordRule, 21> kKeywordTable = {{
    {"exposure", {kContinuous, kDiscrete}},
    {"lightness", {kContinuous, kDiscrete}},
    {"brightness", {kContinuous, kDiscrete}},
    {"saturation", {kContinuous, kDiscrete}},
    {"temperature", {kContinuous, kDiscrete}},
    {"tint", {kContinuous, kDiscrete, kColor}},
    {"hue", {kContinuous, kDiscrete, kColor}},
    {"contrast", {kContinuous, kDiscrete}},
    {"color", {kColor}},
    {"tone", {kColor}},
    {"spring", {kColor}},
    {"fall", {kColor}},
    {"autumn", {kColor}},
    {"position", {kPosition, kDiscrete}},
    {"place", {kPosition, kDiscrete}},
    {"align", {kPosition, kDiscrete}},
    {"watermark", {kPosition, kDiscrete}},
    {"logo", {kPosition, kDiscrete}},
    {"margin", {kPosition, kDiscrete}},
    {"vignette", {kPosition, kDiscrete}},
    {"text", {kPosition, kDiscrete}},
}};

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<Aspect> normalize_aspects(std::vector<Aspect> aspects) {
  std::sort(aspects.begin(), aspects.end());
  aspects.erase(std::unique(aspects.begin(), aspects.end()), aspects.end());
  return aspects;
}

}  // namespace

bool is_stop_word(std::string_view word) {
  return std::binary_search(kStopWords.begin(), kStopWords.end(), word);
}

std::size_t stop_word_count() { return kStopWords.size(); }

std::set<std::string> content_words(std::string_view text) {
  std::set<std::string> out;
  for (auto& tok : tokenize(text))
    if (tok.size() > 1 && !is_stop_word(tok)) out.insert(std::move(tok));
  return out;
}

TagSet derive_tags(std::string_view description) {
  TagSet tags;
  for (const auto& tok : tokenize(description))
    for (const auto& rule : kKeywordTable)
      if (rule.word == tok) tags |= rule.tags;
  return tags;
}

TaskContext make_task_context(std::string name, std::string description,
                              std::vector<Aspect> aspects, std::optional<TagSet> tags) {
  if (description.empty() || std::all_of(description.begin(), description.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c));
      }))
    fail(ErrorKind::kValidation, "task description must be non-empty");
  if (aspects.empty()) fail(ErrorKind::kValidation, "task must request at least one aspect");
  TaskContext ctx;
  ctx.name = std::move(name);
  ctx.tags = tags ? *tags : derive_tags(description);
  ctx.description = std::move(description);
  ctx.aspects = normalize_aspects(std::move(aspects));
  return ctx;
}

TaskContext task_context_from_json(const nlohmann::json& doc) {
  std::vector<std::string> problems;
  if (!doc.is_object()) throw Error(ErrorKind::kValidation, "task context must be an object");
  auto str = [&](const char* key) -> std::string {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
      problems.push_back(std::string(key) + ": missing or not a string");
      return {};
    }
    return it->get<std::string>();
  };
  std::string name = str("name");
  std::string description = str("description");

  std::vector<Aspect> aspects;
  if (auto it = doc.find("aspects"); it == doc.end()) {
    aspects.assign(kAllAspects.begin(), kAllAspects.end());
  } else if (!it->is_array()) {
    problems.push_back("aspects: expected array");
  } else {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& a = (*it)[i];
      auto parsed = a.is_string() ? aspect_from_id(a.get<std::string>()) : std::nullopt;
      if (!parsed)
        problems.push_back("aspects[" + std::to_string(i) + "]: unknown aspect " + a.dump());
      else
        aspects.push_back(*parsed);
    }
    if (it->empty()) problems.push_back("aspects: must not be empty");
  }

  std::optional<TagSet> tags;
  if (auto it = doc.find("tags"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) {
      problems.push_back("tags: expected array");
    } else {
      TagSet set;
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& t = (*it)[i];
        auto parsed = t.is_string() ? tag_from_id(t.get<std::string>()) : std::nullopt;
        if (!parsed)
          problems.push_back("tags[" + std::to_string(i) + "]: unknown tag " + t.dump());
        else
          set.insert(*parsed);
      }
      if (!it->empty()) tags = set;
    }
  }
  if (!problems.empty())
    throw Error(ErrorKind::kValidation, "invalid task context", std::move(problems));

  TaskContext ctx = make_task_context(std::move(name), std::move(description), std::move(aspects), tags);
  if (auto it = doc.find("image_ref"); it != doc.end() && it->is_string())
    ctx.image_ref = it->get<std::string>();
  return ctx;
}

nlohmann::json to_json(const TaskContext& ctx) {
  nlohmann::json aspects = nlohmann::json::array();
  for (auto a : ctx.aspects) aspects.push_back(std::string(to_string(a)));
  nlohmann::json tags = nlohmann::json::array();
  for (auto t : ctx.tags.to_vector()) tags.push_back(std::string(to_string(t)));
  nlohmann::json out = {{"name", ctx.name},
                        {"description", ctx.description},
                        {"aspects", aspects},
                        {"tags", tags}};
  if (ctx.image_ref) out["image_ref"] = *ctx.image_ref;
  return out;
}

RelevanceScore score_task(const TaskContext& ctx, const TaskRecord& task) {
  RelevanceScore s;
  s.tag_overlap = (ctx.tags & task.tags).size();
  const auto mine = content_words(ctx.description);
  const auto theirs = content_words(task.description);
  for (const auto& w : mine) s.word_overlap += theirs.count(w) ? 1 : 0;
  return s;
}

RelevanceResult relevance(const TaskContext& ctx, const PreferenceLibrary& lib, std::size_t top_k) {
  RelevanceResult result;
  for (const auto& task : lib.tasks) {
    RelevanceScore s = score_task(ctx, task);
    if (s.tenths() == 0) {
      result.threshold_applied = true;
      continue;
    }
    result.ranked.push_back({task.name, s});
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const RankedTask& a, const RankedTask& b) {
                     return a.score.tenths() > b.score.tenths();
                   });
  if (top_k > 0 && result.ranked.size() > top_k) {
    result.ranked.resize(top_k);
    result.threshold_applied = true;
  }
  return result;
}

}  // namespace crowdgen
