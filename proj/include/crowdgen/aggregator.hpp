#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdgen/reasoning.hpp"

namespace crowdgen {

/// Widget frequencies over k reasoning passes for one aspect. Scores are
/// occurrence counts and sum to k.
struct AggregatedRecommendation {
  std::string task_name;
  Aspect aspect = Aspect::kPredictability;
  int k = 0;
  std::map<WidgetKind, int> scores;
  std::map<WidgetKind, std::vector<std::string>> rationales;  // exact duplicates removed
  LibraryMode library_mode = LibraryMode::withoutlib();

  /// Scored widgets, highest score first, then by identifier.
  std::vector<WidgetKind> ranking() const;
  int score(WidgetKind w) const;
};

/// Runs `k` passes and counts the widget chosen per aspect. Oracle passes use
/// seeds config.seed + i; LLM passes are independent calls issued
/// concurrently. Any failing pass aborts the whole aggregate.
std::map<Aspect, AggregatedRecommendation> aggregate(const TaskContext& ctx,
                                                     const PreferenceLibrary& lib,
                                                     const ReasonerConfig& config, int k,
                                                     ChatBackend* backend = nullptr);

/// Folds finished passes into per-aspect recommendations. Order of `passes`
/// does not matter.
std::map<Aspect, AggregatedRecommendation> fold_passes(const TaskContext& ctx,
                                                       const std::vector<ReasonedWidgetSet>& passes,
                                                       LibraryMode mode);

/// Scores rescaled to sum to `target` (exact rationals as doubles).
std::map<WidgetKind, double> normalize_scores(const AggregatedRecommendation& rec, int target = 10);

/// Integer scores summing to `target` by largest-remainder apportionment.
/// Remainder ties go to the higher raw score, then catalog order.
std::map<WidgetKind, int> normalize_scores_integer(const AggregatedRecommendation& rec,
                                                   int target = 10);

/// {"task","aspect","widgets":[{"kind","score","normalized_score","reasons"}],"k","library_mode"}
nlohmann::json to_json(const AggregatedRecommendation& rec);

}  // namespace crowdgen
