#include <doctest.h>

#include <algorithm>
#include <set>

#include "crowdgen/error.hpp"
#include "crowdgen/task_model.hpp"
#include "support.hpp"

using namespace crowdgen;
using enum CapabilityTag;
using nlohmann::json;

namespace {

std::set<std::string> names(const RelevanceResult& r) {
  std::set<std::string> out;
  for (const auto& t : r.ranked) out.insert(t.task_name);
  return out;
}

}  // namespace

TEST_SUITE("task_model") {

TEST_CASE("keyword tagging of the evaluation descriptions") {
  CHECK(derive_tags("Adjust the image exposure by both decreasing and increasing it.") ==
        TagSet{kContinuous, kDiscrete});
  CHECK(derive_tags("Adjust the image tint to shift its color balance, creating both subtle and "
                    "dramatic effects by adding a yellow or magenta hue.") ==
        TagSet{kContinuous, kDiscrete, kColor});
  CHECK(derive_tags("Experiment with various placements for the logo to determine the most "
                    "visually appealing position.") == TagSet{kPosition, kDiscrete});
  CHECK(derive_tags("Make it pretty").empty());
}

TEST_CASE("derive_tags ignores case and whitespace") {
  const std::string base = "Place the watermark near the margin";
  CHECK(derive_tags("  PLACE   the\twatermark near THE margin ") == derive_tags(base));
  CHECK(derive_tags("exposure") == derive_tags("EXPOSURE"));
}

TEST_CASE("stop words and content words") {
  CHECK(stop_word_count() == 50);
  CHECK(is_stop_word("the"));
  CHECK_FALSE(is_stop_word("image"));
  CHECK(content_words("The image, the IMAGE and a hue!") == std::set<std::string>{"image", "hue"});
}

TEST_CASE("context parsing") {
  const auto ctx = task_context_from_json(json::parse(
      R"({"name":"t","description":"Adjust the exposure","aspects":["explorability","efficiency","efficiency"]})"));
  CHECK(ctx.aspects == std::vector<Aspect>{Aspect::kEfficiency, Aspect::kExplorability});
  CHECK(ctx.tags == TagSet{kContinuous, kDiscrete});

  const auto all = task_context_from_json(json::parse(R"({"name":"t","description":"x","tags":["color"]})"));
  CHECK(all.aspects.size() == 3);
  CHECK(all.tags == TagSet{kColor});
  CHECK(task_context_from_json(to_json(all)).tags == all.tags);

  try {
    task_context_from_json(json::parse(R"({"name":"t","description":"x","aspects":["speed"],"tags":["shiny"]})"));
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    CHECK(e.details().size() == 2);
  }
  CHECK_THROWS_AS(task_context_from_json(json::parse(R"({"name":"t","description":"  "})")), Error);
  CHECK_THROWS_AS(task_context_from_json(json::parse(R"({"name":"t","description":"x","aspects":[]})")),
                  Error);
}

TEST_CASE("relevance on continuous and discrete tags") {
  const auto ctx = make_task_context("probe", "zzz", {Aspect::kEfficiency}, TagSet{kContinuous, kDiscrete});
  const auto r = relevance(ctx, testing::fixture());
  CHECK(names(r) == std::set<std::string>{"image_adjust_lightness", "image_adjust_saturation",
                                          "image_adjust_hue", "image_place_watermark",
                                          "image_place_vignette"});
  REQUIRE(r.ranked.size() == 5);
  for (int i = 0; i < 3; ++i) CHECK(r.ranked[i].score.tag_overlap == 2);
  CHECK(r.ranked[3].score.tag_overlap == 1);
  CHECK(r.threshold_applied);
  for (std::size_t i = 1; i < r.ranked.size(); ++i)
    CHECK(r.ranked[i - 1].score.tenths() >= r.ranked[i].score.tenths());
}

TEST_CASE("relevance edge cases") {
  const auto& lib = testing::fixture();
  const auto none = make_task_context("probe", "qqq", {Aspect::kEfficiency}, TagSet{});
  CHECK(relevance(none, lib).ranked.empty());

  for (const auto& t : lib.tasks) {
    const auto self = make_task_context(t.name, t.description, {Aspect::kEfficiency}, t.tags);
    const auto r = relevance(self, lib);
    REQUIRE_FALSE(r.ranked.empty());
    CHECK(r.ranked.front().task_name == t.name);
  }

  const auto ctx = make_task_context("probe", "warm tone", {Aspect::kEfficiency}, TagSet{kColor});
  CHECK(relevance(ctx, lib, 2).ranked.size() == 2);
}

TEST_CASE("relevance ignores responses and unrelated tasks") {
  auto lib = testing::fixture();
  const auto ctx = make_task_context("probe", "Adjust the hue of the image", {Aspect::kPredictability});
  const auto before = relevance(ctx, lib);

  for (auto& t : lib.tasks)
    for (auto& [a, list] : t.responses) {
      auto copy = list;
      list.insert(list.end(), copy.begin(), copy.end());
    }
  TaskRecord unrelated;
  unrelated.name = "unrelated";
  unrelated.description = "zebra quantum";
  lib.tasks.insert(lib.tasks.begin() + 2, unrelated);

  const auto after = relevance(ctx, lib);
  REQUIRE(after.ranked.size() == before.ranked.size());
  for (std::size_t i = 0; i < after.ranked.size(); ++i) {
    CHECK(after.ranked[i].task_name == before.ranked[i].task_name);
    CHECK(after.ranked[i].score.tenths() == before.ranked[i].score.tenths());
  }
}

TEST_CASE("word overlap counts in tenths") {
  TaskRecord t;
  t.name = "t";
  t.description = "rocket color match";
  t.tags = TagSet{kColor};
  const auto ctx = make_task_context("c", "match the rocket", {Aspect::kEfficiency}, TagSet{kColor});
  const auto s = score_task(ctx, t);
  CHECK(s.tag_overlap == 1);
  CHECK(s.word_overlap == 2);
  CHECK(s.tenths() == 12);
  CHECK(s.value() == doctest::Approx(1.2));
}

}
