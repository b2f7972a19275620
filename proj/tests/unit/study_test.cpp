#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "crowdgen/error.hpp"
#include "crowdgen/study.hpp"

using namespace crowdgen;
using nlohmann::json;

TEST_SUITE("study") {

TEST_CASE("six canonical pairs over the four library modes") {
  const auto& pairs = enumerate_pairs();
  REQUIRE(pairs.size() == 6);
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    seen.insert({p.left.to_string(), p.right.to_string()});
    CHECK(p.left != p.right);
    CHECK(p.left.uses_library());
    CHECK(canonical_pair_index(p) == i);
  }
  CHECK(seen.size() == 6);
  CHECK_FALSE(canonical_pair_index({LibraryMode::withoutlib(), LibraryMode::withlib(30)}));
}

TEST_CASE("each participant sees 18 presentations") {
  for (int n : {1, 2, 5, 36, 37, 78}) {
    const auto plan = plan_study(n, 3);
    REQUIRE(plan.participants.size() == static_cast<std::size_t>(n));
    for (const auto& a : plan.participants) {
      CHECK(a.presentations.size() == 18);
      std::map<std::string, std::set<std::size_t>> pairs_per_task;
      for (const auto& p : a.presentations) pairs_per_task[p.task].insert(*canonical_pair_index(p.pair));
      CHECK(pairs_per_task.size() == 3);
      for (const auto& [task, idx] : pairs_per_task) CHECK(idx.size() == 6);
      std::set<Aspect> aspects(a.aspects.begin(), a.aspects.end());
      CHECK(aspects.size() == 3);
    }
  }
  CHECK_THROWS_AS(plan_study(0, 1), Error);
}

TEST_CASE("Latin-square cells are balanced") {
  auto cells = [](int n) {
    std::map<std::tuple<int, int, int>, int> counts;
    for (const auto& a : plan_study(n, 1).participants) ++counts[{a.task_set, a.permutation, a.aspect_row}];
    return counts;
  };
  const auto c36 = cells(36);
  CHECK(c36.size() == 36);
  for (const auto& [cell, n] : c36) CHECK(n == 1);

  std::map<std::pair<int, int>, int> per_order_row;
  for (const auto& [cell, n] : c36) per_order_row[{std::get<1>(cell), std::get<2>(cell)}] += n;
  CHECK(per_order_row.size() == 18);
  for (const auto& [cell, n] : per_order_row) CHECK(n == 2);

  const auto c72 = cells(72);
  CHECK(c72.size() == 36);
  for (const auto& [cell, n] : c72) CHECK(n == 2);
}

TEST_CASE("the full design covers 108 comparisons") {
  std::set<std::tuple<std::string, Aspect, std::size_t>> triples;
  for (const auto& a : plan_study(36, 9).participants)
    for (const auto& p : a.presentations) triples.insert({p.task, p.aspect, *canonical_pair_index(p.pair)});
  CHECK(triples.size() == 108);
}

TEST_CASE("plans are deterministic under the seed") {
  CHECK(to_json(plan_study(12, 5)) == to_json(plan_study(12, 5)));
  CHECK(to_json(plan_study(12, 5)) != to_json(plan_study(12, 6)));
  const auto plan = plan_study(12, 5);
  CHECK(plan.find("p012") != nullptr);
  CHECK(plan.find("p013") == nullptr);
}

TEST_CASE("chi-squared statistic on integer counts") {
  for (long long a = 0; a <= 40; a += 3)
    for (long long b = 0; b <= 40; b += 5) {
      if (a + b == 0) continue;
      const auto r = chi_squared(a, b);
      const double ea = (a + b) / 2.0;
      CHECK(r.statistic == doctest::Approx(((a - ea) * (a - ea) + (b - ea) * (b - ea)) / ea).epsilon(1e-12));
    }
  CHECK_THROWS_AS(chi_squared(0, 0), Error);
  CHECK_THROWS_AS(chi_squared(-1, 3), Error);
}

TEST_CASE("df=1 tail agrees with the complementary error function") {
  for (double x : {0.0, 0.01, 0.5, 1.0, 2.7, 3.841, 6.635, 10.828, 20.0, 50.0})
    CHECK(chi2_sf_df1(x) == doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-10));
  CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(gamma_q(3.0, 0.5) == doctest::Approx(std::exp(-0.5) * (1 + 0.5 + 0.125)).epsilon(1e-12));
}

TEST_CASE("critical values and worked examples") {
  CHECK(std::abs(chi2_sf_df1(3.841) - 0.05) < 5e-4);
  CHECK(std::abs(chi2_sf_df1(6.635) - 0.01) < 5e-4);
  CHECK(std::abs(chi2_sf_df1(10.828) - 0.001) < 5e-4);

  const auto even = chi_squared(39, 39);
  CHECK(even.statistic == 0);
  CHECK(even.p == 1);
  CHECK(even.stars == 0);
  CHECK(chi_squared(48, 30).stars == 1);
  CHECK(chi_squared(48, 30).statistic == doctest::Approx(324.0 / 78));
  CHECK(chi_squared(60, 18).stars == 3);
  CHECK(significance_stars(0.05) == 0);
  CHECK(significance_stars(0.0099) == 2);
}

TEST_CASE("analysis groups and output formats") {
  const ComparisonPair pair{LibraryMode::withlib(30), LibraryMode::withoutlib()};
  std::vector<ComparisonRecord> records;
  for (int i = 0; i < 60; ++i)
    records.push_back({"p" + std::to_string(i), "image_adjust_tint", Aspect::kEfficiency, pair,
                       i < 48 ? Side::kLeft : Side::kRight, std::nullopt});
  for (int i = 0; i < 18; ++i)
    records.push_back({"q" + std::to_string(i), "image_adjust_exposure", Aspect::kEfficiency, pair,
                       i < 12 ? Side::kLeft : Side::kRight, std::nullopt});

  const auto by_task = analyze(records, Grouping::kTaskAspectPair);
  REQUIRE(by_task.size() == 2);
  CHECK(by_task[0].task == "image_adjust_exposure");
  CHECK(by_task[1].result.a == 48);
  CHECK(by_task[1].result.b == 12);

  const auto pooled = analyze(records, Grouping::kAspectPair);
  REQUIRE(pooled.size() == 1);
  CHECK_FALSE(pooled[0].task);
  CHECK(pooled[0].result.a == 60);
  CHECK(pooled[0].result.b == 18);
  CHECK(pooled[0].result.stars == 3);

  const auto csv = analysis_csv(pooled, Grouping::kAspectPair);
  CHECK(csv.rfind("aspect,left,right,count_left,count_right,chi2,p,stars\n", 0) == 0);
  CHECK(csv.find("efficiency,withlib30,withoutlib,60,18,") != std::string::npos);
  CHECK(analysis_csv(by_task, Grouping::kTaskAspectPair).rfind("task,aspect", 0) == 0);

  const auto doc = analysis_json(pooled, Grouping::kAspectPair);
  CHECK(doc["group_by"] == "aspect-pair");
  CHECK(doc["rows"][0]["stars"] == 3);
  CHECK(grouping_from_string("task-aspect-pair") == Grouping::kTaskAspectPair);
  CHECK_THROWS_AS(grouping_from_string("task"), Error);
}

TEST_CASE("record JSONL round trip and validation") {
  std::vector<ComparisonRecord> records = {
      {"p001", "image_adjust_tint", Aspect::kPredictability,
       {LibraryMode::withlib(10), LibraryMode::withlib(25)}, Side::kRight, std::string("clearer")},
      {"p002", "design_align_text", Aspect::kExplorability,
       {LibraryMode::withlib(10), LibraryMode::withoutlib()}, Side::kLeft, std::nullopt}};
  std::stringstream ss;
  write_records_jsonl(ss, records);
  const auto back = read_records_jsonl(ss);
  REQUIRE(back.size() == 2);
  CHECK(to_json(back[0]) == to_json(records[0]));
  CHECK(to_json(back[1]) == to_json(records[1]));

  json bad = to_json(records[0]);
  bad["pair"] = {{"left", "withoutlib"}, {"right", "withlib30"}};
  try {
    comparison_record_from_json(bad);
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConflict);
  }
  bad = to_json(records[0]);
  bad["selection"] = "middle";
  CHECK_THROWS_AS(comparison_record_from_json(bad), Error);
  std::istringstream garbage("{\"participant_id\":\n");
  CHECK_THROWS_AS(read_records_jsonl(garbage), Error);
}

TEST_CASE("simulation is seeded and follows the model") {
  const auto plan = plan_study(78, 42);
  const auto a = simulate_raters(plan, SimulatedRaterModel::constant(0.8, 1));
  CHECK(a.size() == 78 * 18);
  std::vector<json> ja, jb;
  for (const auto& r : a) ja.push_back(to_json(r));
  for (const auto& r : simulate_raters(plan, SimulatedRaterModel::constant(0.8, 1))) jb.push_back(to_json(r));
  CHECK(ja == jb);

  auto larger = [](const ComparisonRecord& r) {
    return r.pair.left.responses() > r.pair.right.responses() ? Side::kLeft : Side::kRight;
  };
  int picked_larger = 0;
  for (const auto& r : a) picked_larger += r.selection == larger(r);
  const double frac = static_cast<double>(picked_larger) / a.size();
  CHECK(frac == doctest::Approx(0.8).epsilon(0.05));

  for (const auto& r : simulate_raters(plan, SimulatedRaterModel::constant(1.0, 2))) CHECK(r.selection == larger(r));
}

}
