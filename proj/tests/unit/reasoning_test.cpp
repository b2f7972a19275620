#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>

#include "crowdgen/error.hpp"
#include "crowdgen/reasoning.hpp"
#include "support.hpp"

using namespace crowdgen;
using enum CapabilityTag;

namespace {

TaskContext exposure_ctx() {
  return make_task_context("image_adjust_exposure",
                           "Adjust the image exposure by both decreasing and increasing it.",
                           {kAllAspects.begin(), kAllAspects.end()});
}

// Library where every response of every list picks `w`.
PreferenceLibrary uniform_library(const PreferenceLibrary& base, Aspect aspect, WidgetKind w) {
  PreferenceLibrary lib = base;
  for (auto& t : lib.tasks)
    for (auto& r : t.responses[aspect]) r.widget = w;
  return lib;
}

// Independent recomputation of the oracle's vote distribution.
std::map<WidgetKind, double> expected_votes(const TaskContext& ctx, const PreferenceLibrary& lib,
                                            Aspect aspect) {
  std::map<WidgetKind, double> votes;
  double total = 0;
  for (const auto& t : lib.tasks) {
    const double score = score_task(ctx, t).value();
    if (score == 0) continue;
    const auto& list = t.responses.at(aspect);
    for (const auto& r : list) {
      if (!ctx.tags.empty() && !capabilities_of(r.widget).intersects(ctx.tags)) continue;
      votes[r.widget] += score / static_cast<double>(list.size());
      total += score / static_cast<double>(list.size());
    }
  }
  for (auto& [w, v] : votes) v /= total;
  return votes;
}

class CannedBackend : public ChatBackend {
 public:
  explicit CannedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override {
    last_messages = messages;
    const auto i = calls.fetch_add(1);
    return replies_[std::min<std::size_t>(i, replies_.size() - 1)];
  }
  std::atomic<std::size_t> calls{0};
  std::vector<ChatMessage> last_messages;

 private:
  std::vector<std::string> replies_;
};

const char* kFilledTemplate = R"(Here is my answer.
{
    "reasoning": {```reasoning
        "relevant tasks from the library": "image_adjust_hue is closest"

        "predictability_reasoning": {
            "Slider": "familiar"
        }

        "efficiency_reasoning": {
            "Preset Buttons": "one click"
        }

        "explorability_reasoning": {
            "Color Wheel": "see every hue"
        }
    ```}

    "widget": {```widget
        "image_adjust_tint": {
            "predictability": "Slider",
            "efficiency": "Preset Buttons",
            "explorability": "Color Wheel"
        }
    ```}
}
Hope this helps.)";

}  // namespace

TEST_SUITE("reasoning") {

TEST_CASE("prompt carries definitions, candidates and library sections") {
  const auto ctx = exposure_ctx();
  const auto with = build_reasoning_prompt(ctx, testing::fixture());
  for (const char* line : {"- Predictability: allows users", "- Efficiency: allows users",
                           "- Explorability: allows users"})
    CHECK(with.user.find(line) != std::string::npos);
  for (auto w : kAllWidgets) CHECK(with.user.find(std::string(display_name(w))) != std::string::npos);
  CHECK(with.user.find("widget frequency:") != std::string::npos);
  CHECK(with.user.find("Additional task information") != std::string::npos);
  CHECK(with.user.find("The response must be in JSON format.") != std::string::npos);
  CHECK_FALSE(with.serialized_library.empty());

  const auto without = build_reasoning_prompt(ctx, empty_library());
  CHECK(without.serialized_library.empty());
  CHECK(without.user.find("Crowdsourced UI widget preference library") == std::string::npos);
  CHECK(without.user.find("relevant tasks") == std::string::npos);
  CHECK(without.user.find("- Explorability: allows users") != std::string::npos);

  CHECK(build_reasoning_prompt(ctx, testing::fixture()).user == with.user);
}

TEST_CASE("prompt template lists only requested aspects") {
  const auto ctx = make_task_context("t", "Adjust the hue", {Aspect::kEfficiency});
  const auto p = build_reasoning_prompt(ctx, empty_library());
  CHECK(p.user.find("\"efficiency\": \"<UI widget type>\"") != std::string::npos);
  CHECK(p.user.find("\"predictability\": \"<UI widget type>\"") == std::string::npos);
}

TEST_CASE("oracle vote distribution matches the weighted mixture") {
  const auto& lib = testing::fixture();
  std::vector<TaskContext> probes = {exposure_ctx()};
  for (const auto& t : lib.tasks)
    probes.push_back(make_task_context(t.name, t.description, {kAllAspects.begin(), kAllAspects.end()}, t.tags));
  probes.push_back(make_task_context("logo", "Experiment with various placements for the logo",
                                     {kAllAspects.begin(), kAllAspects.end()}));
  for (const auto& ctx : probes) {
    for (auto a : kAllAspects) {
      CAPTURE(ctx.name);
      const auto got = oracle_vote_distribution(ctx, lib, a);
      const auto want = expected_votes(ctx, lib, a);
      REQUIRE(got.size() == want.size());
      double sum = 0;
      for (const auto& [w, p] : want) {
        CHECK(got.at(w) == doctest::Approx(p).epsilon(1e-12));
        sum += got.at(w);
      }
      CHECK(sum == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("oracle follows a unanimous library") {
  const auto lib = uniform_library(testing::fixture(), Aspect::kEfficiency, WidgetKind::kPresetButtons);
  const auto ctx = exposure_ctx();
  const auto dist = oracle_vote_distribution(ctx, lib, Aspect::kEfficiency);
  REQUIRE(dist.size() == 1);
  CHECK(dist.at(WidgetKind::kPresetButtons) == 1.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    CHECK(reason_once_oracle(ctx, lib, seed).per_aspect.at(Aspect::kEfficiency).widget ==
          WidgetKind::kPresetButtons);
}

TEST_CASE("single relevant task with one widget") {
  PreferenceLibrary lib;
  lib.version = "t";
  TaskRecord t;
  t.name = "image_adjust_hue";
  t.description = "hue";
  t.tags = TagSet{kColor};
  for (int i = 0; i < 5; ++i)
    t.responses[Aspect::kExplorability].push_back({"r" + std::to_string(i), WidgetKind::kColorWheel, "spin"});
  lib.tasks.push_back(t);
  const auto ctx = make_task_context("c", "recolor", {Aspect::kExplorability}, TagSet{kColor});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto out = reason_once_oracle(ctx, lib, seed);
    CHECK(out.per_aspect.at(Aspect::kExplorability).widget == WidgetKind::kColorWheel);
    CHECK(out.relevant_tasks == std::vector<std::string>{"image_adjust_hue"});
  }
}

TEST_CASE("fallback without library or relevant tasks") {
  const auto cont = make_task_context("t", "anything", {kAllAspects.begin(), kAllAspects.end()},
                                      TagSet{kContinuous});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto out = reason_once_oracle(cont, empty_library(), seed);
    REQUIRE(out.per_aspect.size() == 3);
    for (const auto& [a, c] : out.per_aspect) {
      CHECK(c.widget == WidgetKind::kSlider);
      CHECK_FALSE(c.rationale.empty());
    }
    CHECK(out.relevant_tasks.empty());
  }
  const auto color = make_task_context("t", "qqq", {Aspect::kEfficiency}, TagSet{kColor});
  CHECK(oracle_vote_distribution(color, empty_library(), Aspect::kEfficiency).empty());
  PreferenceLibrary unrelated = testing::fixture();
  for (auto& t : unrelated.tasks) t.tags = TagSet{kPosition};
  CHECK(reason_once_oracle(color, unrelated, 3).per_aspect.at(Aspect::kEfficiency).widget ==
        WidgetKind::kColorPicker);
}

TEST_CASE("oracle is deterministic and closed-world") {
  const auto& lib = testing::fixture();
  const auto ctx = make_task_context("image_adjust_tint",
                                     "Adjust the image tint to shift its color balance",
                                     {kAllAspects.begin(), kAllAspects.end()});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = reason_once_oracle(ctx, lib, seed);
    const auto b = reason_once_oracle(ctx, lib, seed);
    REQUIRE(a.per_aspect.size() == 3);
    for (auto asp : kAllAspects) {
      const auto& ca = a.per_aspect.at(asp);
      CHECK(ca.widget == b.per_aspect.at(asp).widget);
      CHECK(ca.rationale == b.per_aspect.at(asp).rationale);
      CHECK(capabilities_of(ca.widget).intersects(ctx.tags));
      CHECK(oracle_vote_distribution(ctx, lib, asp).count(ca.widget) == 1);
    }
  }
}

TEST_CASE("duplicating responses leaves the vote distribution unchanged") {
  auto doubled = testing::fixture();
  for (auto& t : doubled.tasks)
    for (auto& [a, list] : t.responses) {
      auto copy = list;
      list.insert(list.end(), copy.begin(), copy.end());
    }
  const auto ctx = exposure_ctx();
  for (auto a : kAllAspects) {
    const auto x = oracle_vote_distribution(ctx, testing::fixture(), a);
    const auto y = oracle_vote_distribution(ctx, doubled, a);
    REQUIRE(x.size() == y.size());
    for (const auto& [w, p] : x) CHECK(y.at(w) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("sampling frequencies track the distribution") {
  const auto& lib = testing::fixture();
  const auto ctx = make_task_context("image_adjust_tint", "Adjust the image tint",
                                     {Aspect::kExplorability});
  const auto dist = oracle_vote_distribution(ctx, lib, Aspect::kExplorability);
  constexpr int kRuns = 4000;
  std::map<WidgetKind, int> seen;
  for (int s = 0; s < kRuns; ++s)
    ++seen[reason_once_oracle(ctx, lib, static_cast<std::uint64_t>(s)).per_aspect.at(Aspect::kExplorability).widget];
  for (const auto& [w, p] : dist) {
    const double sd = std::sqrt(p * (1 - p) / kRuns);
    CHECK(std::abs(seen[w] / double(kRuns) - p) < 5 * sd + 1e-9);
  }
}

TEST_CASE("parse filled template") {
  const auto out = parse_reasoning_response(kFilledTemplate, {kAllAspects.begin(), kAllAspects.end()},
                                            "image_adjust_tint");
  REQUIRE(out.per_aspect.size() == 3);
  CHECK(out.per_aspect.at(Aspect::kPredictability).widget == WidgetKind::kSlider);
  CHECK(out.per_aspect.at(Aspect::kEfficiency).widget == WidgetKind::kPresetButtons);
  CHECK(out.per_aspect.at(Aspect::kExplorability).widget == WidgetKind::kColorWheel);
  CHECK(out.per_aspect.at(Aspect::kEfficiency).rationale == "one click");
}

TEST_CASE("parse strict json and normalization") {
  const std::string strict =
      R"({"widget": {"t": {"efficiency": "Color Picker", "explorability": "click on image"}}})";
  const auto out = parse_reasoning_response(strict, {Aspect::kEfficiency, Aspect::kExplorability});
  CHECK(out.per_aspect.at(Aspect::kEfficiency).widget == WidgetKind::kColorPicker);
  CHECK(out.per_aspect.at(Aspect::kExplorability).widget == WidgetKind::kClickOnImage);
  CHECK(out.per_aspect.at(Aspect::kEfficiency).rationale.empty());
  CHECK(out.per_aspect.size() == 2);
}

TEST_CASE("parse failures") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  const std::vector<Aspect> all(kAllAspects.begin(), kAllAspects.end());
  CHECK(kind_of([&] { parse_reasoning_response("no json here", all); }) == ErrorKind::kValidation);
  CHECK(kind_of([&] {
          parse_reasoning_response(R"({"widget":{"t":{"predictability":"Slider","efficiency":"Slider"}}})", all);
        }) == ErrorKind::kValidation);
  CHECK(kind_of([&] {
          parse_reasoning_response(R"({"widget":{"t":{"efficiency":"joystick"}}})", {Aspect::kEfficiency});
        }) == ErrorKind::kValidation);
}

TEST_CASE("llm pass with canned replies") {
  const auto ctx = make_task_context("image_adjust_tint", "Adjust the image tint", {kAllAspects.begin(), kAllAspects.end()});
  CannedBackend ok({kFilledTemplate});
  const auto out = reason_once_llm(ctx, testing::fixture(), ok, 0);
  CHECK(out.per_aspect.at(Aspect::kEfficiency).widget == WidgetKind::kPresetButtons);
  CHECK(out.library_responses == 720);
  CHECK(ok.calls == 1);

  CannedBackend retry({"garbage", kFilledTemplate});
  const auto second = reason_once_llm(ctx, testing::fixture(), retry, 2);
  CHECK(retry.calls == 2);
  CHECK(second.per_aspect.size() == 3);
  REQUIRE(retry.last_messages.size() == 4);
  CHECK(retry.last_messages[2].role == "assistant");
  CHECK(retry.last_messages[2].content == "garbage");

  CannedBackend bad({"still garbage"});
  try {
    reason_once_llm(ctx, testing::fixture(), bad, 0);
    FAIL("expected exhausted retries");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBackend);
    REQUIRE_FALSE(e.details().empty());
    CHECK(e.details()[0] == "still garbage");
  }
  CHECK(bad.calls == 1);
}

TEST_CASE("transcript records prompts and replies") {
  testing::TempDir dir;
  const auto file = dir.path() / "trace.jsonl";
  {
    Transcript tr(file);
    const auto ctx = make_task_context("t", "Adjust the hue", {Aspect::kEfficiency});
    CannedBackend b({R"({"widget":{"t":{"efficiency":"Slider"}}})"});
    reason_once_llm(ctx, empty_library(), b, 0, &tr);
  }
  const auto text = testing::slurp(file);
  const auto line = nlohmann::json::parse(text.substr(0, text.find('\n')));
  CHECK(line["reply"] == R"({"widget":{"t":{"efficiency":"Slider"}}})");
  CHECK(line["request"].size() == 2);
}

TEST_CASE("reason dispatch applies the library mode") {
  const auto& lib = testing::fixture();
  const auto ctx = exposure_ctx();
  ReasonerConfig cfg;
  cfg.library_mode = LibraryMode::withlib(10);
  cfg.library_seed = 3;
  CHECK(reason(ctx, lib, cfg).library_responses == 240);
  cfg.library_mode = LibraryMode::withlib(30);
  CHECK(reason(ctx, lib, cfg).library_responses == 720);
  cfg.library_mode = LibraryMode::withoutlib();
  const auto fb = reason(ctx, lib, cfg);
  CHECK(fb.library_responses == 0);
  for (const auto& [a, c] : fb.per_aspect) CHECK(c.widget == WidgetKind::kSlider);

  CannedBackend canned({R"({"widget":{"image_adjust_exposure":{"predictability":"Slider","efficiency":"Dropdown","explorability":"Text Field"}}})"});
  cfg.backend = Backend::kLlm;
  cfg.library_mode = LibraryMode::withlib(25);
  const auto llm = reason(ctx, lib, cfg, &canned);
  CHECK(llm.library_responses == 600);
  CHECK(llm.per_aspect.at(Aspect::kEfficiency).widget == WidgetKind::kDropdown);
}

TEST_CASE("unreachable endpoint is a backend error") {
  ReasonerConfig cfg;
  cfg.backend = Backend::kLlm;
  cfg.llm.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.llm.timeout_seconds = 2;
  cfg.llm.max_retries = 0;
  try {
    reason(exposure_ctx(), testing::fixture(), cfg);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBackend);
  }
  cfg.llm.endpoint = "ftp://nowhere";
  CHECK_THROWS_AS(reason(exposure_ctx(), testing::fixture(), cfg), Error);
}

}
