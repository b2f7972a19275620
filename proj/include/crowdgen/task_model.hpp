#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdgen/aspect.hpp"
#include "crowdgen/preference_library.hpp"
#include "crowdgen/widget_catalog.hpp"

namespace crowdgen {

struct TaskContext {
  std::string name;
  std::string description;
  std::vector<Aspect> aspects;  // non-empty, no duplicates, canonical order
  TagSet tags;
  std::optional<std::string> image_ref;
};

/// Parses {"name","description","aspects":[...],"tags":[...],"image_ref"}.
/// Missing "aspects" means all three; missing "tags" means derive_tags().
TaskContext task_context_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TaskContext& ctx);

/// Builds a context from its parts, normalizing the aspect list and deriving
/// tags when none are given.
TaskContext make_task_context(std::string name, std::string description,
                              std::vector<Aspect> aspects, std::optional<TagSet> tags = {});

/// Keyword-table tagging of a free-text description.
TagSet derive_tags(std::string_view description);

/// Lowercased alphanumeric tokens with stop-words removed.
std::set<std::string> content_words(std::string_view text);

/// True for members of the shipped stop-word list.
bool is_stop_word(std::string_view word);
std::size_t stop_word_count();

/// Relevance is tag overlap plus 0.1 per shared content word; kept as an
/// integer number of tenths so comparisons are exact.
struct RelevanceScore {
  int tag_overlap = 0;
  int word_overlap = 0;

  int tenths() const { return 10 * tag_overlap + word_overlap; }
  double value() const { return tenths() / 10.0; }
};

struct RankedTask {
  std::string task_name;
  RelevanceScore score;
};

struct RelevanceResult {
  std::vector<RankedTask> ranked;  // non-increasing score, library order on ties
  bool threshold_applied = false;
};

/// `top_k` = 0 keeps every task with a non-zero score.
RelevanceResult relevance(const TaskContext& ctx, const PreferenceLibrary& lib,
                          std::size_t top_k = 0);

RelevanceScore score_task(const TaskContext& ctx, const TaskRecord& task);

}  // namespace crowdgen
