#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/preference_library.hpp"
#include "support.hpp"

using namespace crowdgen;
using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& p) { return json::parse(testing::slurp(p)); }

std::set<std::string> rater_ids(const TaskRecord& t, Aspect a) {
  std::set<std::string> out;
  for (const auto& r : t.responses.at(a)) out.insert(r.rater_id);
  return out;
}

json small_doc() {
  return json::parse(R"({
    "version": "t",
    "tasks": [{
      "name": "image_adjust_hue",
      "description": "Shift hues.",
      "tags": ["color"],
      "responses": {"explorability": [
        {"rater_id": "a", "widget": "color_wheel", "reason": "spin it"},
        {"rater_id": "b", "widget": "slider", "reason": "drag"}
      ]}
    }]
  })");
}

}  // namespace

TEST_SUITE("library") {

TEST_CASE("fixture shape") {
  const auto& lib = testing::fixture();
  CHECK(lib.tasks.size() == 8);
  CHECK(lib.response_count() == 720);
  for (const auto& t : lib.tasks) {
    CHECK(t.responses.size() == 3);
    for (auto a : kAllAspects) CHECK(t.responses.at(a).size() == 30);
  }
}

TEST_CASE("malformed variants are rejected at the recorded path") {
  const auto dir = testing::data_path("library/malformed");
  const json expected = load_json(dir / "expected.json");
  CHECK(expected.size() == 10);
  for (const auto& [file, path] : expected.items()) {
    CAPTURE(file);
    const auto problems = validate_library_json(load_json(dir / file));
    REQUIRE_FALSE(problems.empty());
    const std::string prefix = path.get<std::string>() + ":";
    CHECK(std::any_of(problems.begin(), problems.end(),
                      [&](const std::string& p) { return p.rfind(prefix, 0) == 0; }));
    CHECK_THROWS_AS(parse_library(load_json(dir / file)), Error);
  }
}

TEST_CASE("unknown widget names the offending value") {
  json doc = small_doc();
  doc["tasks"][0]["responses"]["explorability"][1]["widget"] = "teleport_button";
  try {
    parse_library(doc);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    REQUIRE(e.details().size() == 1);
    CHECK(e.details()[0] ==
          "tasks[0].responses.explorability[1].widget: unknown widget 'teleport_button'");
  }
}

TEST_CASE("parse errors surface as validation errors") {
  std::istringstream in("{\"version\": ");
  CHECK_THROWS_AS(load_library(in), Error);
  CHECK_THROWS_AS(load_library_file(testing::data_path("library/does_not_exist.json")), Error);
}

TEST_CASE("round trip through the file format") {
  const auto& lib = testing::fixture();
  CHECK(parse_library(to_json(lib)) == lib);
  const auto small = parse_library(small_doc());
  CHECK(parse_library(to_json(small)) == small);
}

TEST_CASE("aggregate_frequencies counts responses") {
  TaskRecord t;
  t.name = "x";
  for (int i = 0; i < 30; ++i)
    t.responses[Aspect::kEfficiency].push_back(
        {"r" + std::to_string(i), i < 18 ? WidgetKind::kPresetButtons : WidgetKind::kSlider, "ok"});
  const auto f = aggregate_frequencies(t, Aspect::kEfficiency);
  CHECK(f.total == 30);
  CHECK(f.count(WidgetKind::kPresetButtons) == 18);
  CHECK(f.count(WidgetKind::kSlider) == 12);
  CHECK(f.counts.size() == 2);
  CHECK(f.argmax() == WidgetKind::kPresetButtons);
  CHECK_THROWS_AS(aggregate_frequencies(t, Aspect::kPredictability), Error);

  TaskRecord one;
  one.responses[Aspect::kExplorability].push_back({"r", WidgetKind::kSlider, "ok"});
  const auto g = aggregate_frequencies(one, Aspect::kExplorability);
  CHECK(g.total == 1);
  CHECK(g.count(WidgetKind::kSlider) == 1);
}

TEST_CASE("frequency totals match list lengths on the fixture") {
  for (const auto& t : testing::fixture().tasks) {
    for (const auto& [a, list] : t.responses) {
      const auto f = aggregate_frequencies(t, a);
      int sum = 0;
      for (const auto& [w, c] : f.counts) sum += c;
      CHECK(f.total == static_cast<int>(list.size()));
      CHECK(sum == f.total);
    }
  }
  const auto* sat = testing::fixture().find("image_adjust_saturation");
  REQUIRE(sat);
  CHECK(aggregate_frequencies(*sat, Aspect::kEfficiency).argmax() == WidgetKind::kPresetButtons);
}

TEST_CASE("library modes") {
  CHECK(LibraryMode::parse("withlib30") == LibraryMode::withlib(30));
  CHECK(LibraryMode::parse("withlib(10)") == LibraryMode::withlib(10));
  CHECK(LibraryMode::parse("withoutlib") == LibraryMode::withoutlib());
  CHECK(LibraryMode::withlib(25).to_string() == "withlib25");
  CHECK_FALSE(LibraryMode::withoutlib().uses_library());
  CHECK_THROWS_AS(LibraryMode::parse("withlib0"), Error);
  CHECK_THROWS_AS(LibraryMode::parse("withlib"), Error);
  CHECK_THROWS_AS(LibraryMode::parse("lib30"), Error);
}

TEST_CASE("subset sizes and identity at full size") {
  const auto& lib = testing::fixture();
  const auto s10 = subset_library(lib, LibraryMode::withlib(10), 7);
  CHECK(s10.response_count() == 240);
  for (std::uint64_t seed : {0u, 1u, 99u})
    CHECK(subset_library(lib, LibraryMode::withlib(30), seed) == lib);
  CHECK_THROWS_AS(subset_library(lib, LibraryMode::withlib(31), 0), Error);
  CHECK_THROWS_AS(subset_library(lib, LibraryMode::withoutlib(), 0), Error);
  CHECK(subset_library(lib, LibraryMode::withlib(10), 7) == s10);
}

TEST_CASE("subsets nest for a fixed seed") {
  const auto& lib = testing::fixture();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s10 = subset_library(lib, LibraryMode::withlib(10), seed);
    const auto s25 = subset_library(lib, LibraryMode::withlib(25), seed);
    for (std::size_t i = 0; i < lib.tasks.size(); ++i) {
      for (auto a : kAllAspects) {
        const auto small = rater_ids(s10.tasks[i], a);
        const auto big = rater_ids(s25.tasks[i], a);
        const auto full = rater_ids(lib.tasks[i], a);
        CHECK(small.size() == 10);
        CHECK(big.size() == 25);
        CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
        CHECK(std::includes(full.begin(), full.end(), big.begin(), big.end()));
      }
    }
  }
}

TEST_CASE("prompt serialization") {
  const auto& lib = testing::fixture();
  const auto doc = serialize_for_prompt(lib);
  REQUIRE(doc["tasks"].size() == 8);
  for (const auto& t : doc["tasks"]) {
    CHECK(t["widget_frequency"].size() == 3);
    CHECK(t["widget_reasons"].size() == 3);
    CHECK(t.contains("description"));
  }
  CHECK(serialize_for_prompt(lib).dump() == doc.dump());
  CHECK(serialize_for_prompt(empty_library())["tasks"].empty());
}

TEST_CASE("append_response re-validates") {
  auto lib = parse_library(small_doc());
  append_response(lib, "image_adjust_hue", Aspect::kExplorability,
                  {"c", WidgetKind::kColorPicker, "pick"});
  CHECK(lib.response_count() == 3);
  append_response(lib, "image_adjust_hue", Aspect::kEfficiency, {"a", WidgetKind::kSlider, "fast"});
  CHECK(lib.tasks[0].responses.at(Aspect::kEfficiency).size() == 1);

  auto expect_conflict = [&](std::string_view task, PreferenceResponse r) {
    try {
      append_response(lib, task, Aspect::kExplorability, std::move(r));
      FAIL("expected conflict");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConflict);
    }
  };
  expect_conflict("image_adjust_hue", {"a", WidgetKind::kSlider, "again"});
  expect_conflict("image_adjust_hue", {"d", WidgetKind::kSlider, "   "});
  expect_conflict("image_adjust_hue", {"", WidgetKind::kSlider, "x"});
  expect_conflict("no_such_task", {"e", WidgetKind::kSlider, "x"});
  CHECK(lib.response_count() == 4);
}

}
