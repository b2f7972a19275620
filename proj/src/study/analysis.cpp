#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "crowdgen/error.hpp"
#include "crowdgen/study.hpp"

namespace crowdgen {

using nlohmann::json;

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-15;

// Lower regularized gamma by its power series; converges fast for x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s, sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper regularized gamma by continued fraction (modified Lentz).
double gamma_q_fraction(double s, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double gamma_q(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0)) throw Error(ErrorKind::kValidation, "gamma_q requires s > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_fraction(s, x);
}

double chi2_sf_df1(double statistic) { return gamma_q(0.5, statistic / 2.0); }

int significance_stars(double p) {
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

ChiSquaredResult chi_squared(long long a, long long b) {
  if (a < 0 || b < 0) throw Error(ErrorKind::kValidation, "counts must be non-negative");
  if (a + b == 0) throw Error(ErrorKind::kValidation, "chi-squared needs at least one observation");
  ChiSquaredResult r;
  r.a = a;
  r.b = b;
  const long long diff = a - b;
  r.statistic = static_cast<double>(diff * diff) / static_cast<double>(a + b);
  r.p = chi2_sf_df1(r.statistic);
  r.stars = significance_stars(r.p);
  return r;
}

Grouping grouping_from_string(std::string_view s) {
  if (s == "task-aspect-pair") return Grouping::kTaskAspectPair;
  if (s == "aspect-pair") return Grouping::kAspectPair;
  throw Error(ErrorKind::kValidation, "group_by must be task-aspect-pair or aspect-pair");
}

std::string_view to_string(Grouping g) {
  return g == Grouping::kTaskAspectPair ? "task-aspect-pair" : "aspect-pair";
}

namespace {

int task_rank(const std::string& task) {
  for (int set = 1; set <= 2; ++set) {
    const auto& tasks = task_set(set);
    for (int i = 0; i < 3; ++i)
      if (tasks[static_cast<std::size_t>(i)] == task) return (set - 1) * 3 + i;
  }
  return 6;
}

using GroupKey = std::tuple<int, std::string, int, std::size_t>;

}  // namespace

std::vector<AnalysisRow> analyze(const std::vector<ComparisonRecord>& records, Grouping grouping) {
  if (records.empty()) throw Error(ErrorKind::kValidation, "no comparison records to analyze");
  std::map<GroupKey, std::pair<long long, long long>> counts;
  for (const auto& r : records) {
    auto pair_index = canonical_pair_index(r.pair);
    if (!pair_index) throw Error(ErrorKind::kConflict, "record pair is not canonical");
    GroupKey key = grouping == Grouping::kTaskAspectPair
                       ? GroupKey{task_rank(r.task), r.task, static_cast<int>(r.aspect), *pair_index}
                       : GroupKey{0, std::string(), static_cast<int>(r.aspect), *pair_index};
    auto& c = counts[key];
    (r.selection == Side::kLeft ? c.first : c.second) += 1;
  }
  std::vector<AnalysisRow> rows;
  for (const auto& [key, c] : counts) {
    AnalysisRow row;
    if (grouping == Grouping::kTaskAspectPair) row.task = std::get<1>(key);
    row.aspect = static_cast<Aspect>(std::get<2>(key));
    row.pair = enumerate_pairs()[std::get<3>(key)];
    row.result = chi_squared(c.first, c.second);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string analysis_csv(const std::vector<AnalysisRow>& rows, Grouping grouping) {
  std::ostringstream out;
  out.precision(10);
  if (grouping == Grouping::kTaskAspectPair) out << "task,";
  out << "aspect,left,right,count_left,count_right,chi2,p,stars\n";
  for (const auto& r : rows) {
    if (grouping == Grouping::kTaskAspectPair) out << r.task.value_or("") << ',';
    out << to_string(r.aspect) << ',' << r.pair.left.to_string() << ',' << r.pair.right.to_string() << ','
        << r.result.a << ',' << r.result.b << ',' << r.result.statistic << ',' << r.result.p << ','
        << r.result.stars << '\n';
  }
  return out.str();
}

json analysis_json(const std::vector<AnalysisRow>& rows, Grouping grouping) {
  json table = json::array();
  for (const auto& r : rows) {
    json row = json::object();
    if (grouping == Grouping::kTaskAspectPair) row["task"] = r.task.value_or("");
    row["aspect"] = to_string(r.aspect);
    row["left"] = r.pair.left.to_string();
    row["right"] = r.pair.right.to_string();
    row["count_left"] = r.result.a;
    row["count_right"] = r.result.b;
    row["chi2"] = r.result.statistic;
    row["p"] = r.result.p;
    row["stars"] = r.result.stars;
    table.push_back(std::move(row));
  }
  return {{"group_by", to_string(grouping)}, {"rows", table}};
}

}  // namespace crowdgen
