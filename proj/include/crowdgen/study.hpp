#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdgen/aspect.hpp"
#include "crowdgen/preference_library.hpp"

namespace crowdgen {

/// Two library modes shown side by side. Canonical pairs put the larger
/// library on the left.
struct ComparisonPair {
  LibraryMode left = LibraryMode::withlib(10);
  LibraryMode right = LibraryMode::withoutlib();

  bool operator==(const ComparisonPair&) const = default;
};

/// The six canonical pairs over {withlib10, withlib25, withlib30, withoutlib}.
const std::vector<ComparisonPair>& enumerate_pairs();
std::optional<std::size_t> canonical_pair_index(const ComparisonPair& pair);

enum class Side { kLeft, kRight };

/// Evaluation tasks of a task set (1 or 2), in table order.
const std::array<std::string, 3>& task_set(int set);

/// Aspect given to the i-th task of a set under Latin-square row `row`.
Aspect latin_square_aspect(int row, int task_index);

struct Presentation {
  std::string task;
  Aspect aspect;
  ComparisonPair pair;
};

struct Assignment {
  std::string participant_id;
  int task_set = 1;
  int permutation = 0;                // index into the 6 task orders
  int aspect_row = 0;                 // Latin-square row
  std::array<std::string, 3> task_order;
  std::array<Aspect, 3> aspects{};    // aspect of task_order[i]
  std::vector<Presentation> presentations;  // 18: 3 tasks x 6 shuffled pairs
};

struct StudyPlan {
  std::uint64_t seed = 0;
  std::vector<Assignment> participants;

  const Assignment* find(std::string_view participant_id) const;
};

/// Participants alternate task sets. Within a set the k-th participant gets
/// Latin-square row k % 3 and task order (k / 3) % 6, so every block of 36
/// participants covers each (set, order, row) cell once. Pair order inside
/// each task is shuffled with the seed.
StudyPlan plan_study(int n_participants, std::uint64_t seed);

nlohmann::json to_json(const StudyPlan& plan);

struct ComparisonRecord {
  std::string participant_id;
  std::string task;
  Aspect aspect = Aspect::kPredictability;
  ComparisonPair pair;
  Side selection = Side::kLeft;
  std::optional<std::string> reason;
};

nlohmann::json to_json(const ComparisonRecord& r);
/// Throws Error(kValidation) on malformed records and Error(kConflict) for
/// pairs outside the canonical set.
ComparisonRecord comparison_record_from_json(const nlohmann::json& doc);

std::vector<ComparisonRecord> read_records_jsonl(std::istream& in);
void write_records_jsonl(std::ostream& out, const std::vector<ComparisonRecord>& records);

struct ChiSquaredResult {
  long long a = 0, b = 0;
  double statistic = 0;  // (a - b)^2 / (a + b)
  double p = 1;
  int stars = 0;
};

/// Two-category goodness-of-fit against equal expected counts (df = 1).
ChiSquaredResult chi_squared(long long a, long long b);

/// Regularized upper incomplete gamma Q(s, x).
double gamma_q(double s, double x);

/// Upper tail of the chi-squared distribution with one degree of freedom.
double chi2_sf_df1(double statistic);

int significance_stars(double p);

enum class Grouping { kTaskAspectPair, kAspectPair };
Grouping grouping_from_string(std::string_view s);  // "task-aspect-pair" | "aspect-pair"
std::string_view to_string(Grouping g);

struct AnalysisRow {
  std::optional<std::string> task;  // absent when pooled across tasks
  Aspect aspect;
  ComparisonPair pair;
  ChiSquaredResult result;
};

/// Counts selections per group and tests each group. Rows are ordered by
/// task (evaluation table order), aspect, then canonical pair order.
std::vector<AnalysisRow> analyze(const std::vector<ComparisonRecord>& records, Grouping grouping);

std::string analysis_csv(const std::vector<AnalysisRow>& rows, Grouping grouping);
nlohmann::json analysis_json(const std::vector<AnalysisRow>& rows, Grouping grouping);

/// Probability that a rater picks the side with the larger library.
struct SimulatedRaterModel {
  std::function<double(const std::string& task, Aspect aspect, const ComparisonPair& pair)> prefer_larger;
  std::uint64_t seed = 0;

  static SimulatedRaterModel constant(double p, std::uint64_t seed);
};

std::vector<ComparisonRecord> simulate_raters(const StudyPlan& plan, const SimulatedRaterModel& model);

}  // namespace crowdgen
