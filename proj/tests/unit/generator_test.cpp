#include <doctest.h>

#include <algorithm>
#include <regex>

#include "crowdgen/error.hpp"
#include "crowdgen/widget_generator.hpp"
#include "support.hpp"

using namespace crowdgen;
using nlohmann::json;

namespace {

TaskContext hue_task() {
  return make_task_context("image_adjust_hue", "Adjust the image hue", {kAllAspects.begin(), kAllAspects.end()});
}

TaskContext ctx_for(const std::string& task) {
  return make_task_context(task, "x", {Aspect::kEfficiency}, TagSet{CapabilityTag::kContinuous});
}

std::vector<WidgetSpec> all_bound_specs() {
  std::vector<WidgetSpec> out;
  for (const auto& task : bound_tasks())
    for (auto kind : kAllWidgets) {
      try {
        out.push_back(generate_spec(ctx_for(task), kind));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kUnprocessable) throw;
      }
    }
  return out;
}

int count_stanzas(const std::string& code) {
  static const std::regex marker(R"(# --- widget \d+: [a-z_]+ ---)");
  return static_cast<int>(std::distance(std::sregex_iterator(code.begin(), code.end(), marker), std::sregex_iterator()));
}

}  // namespace

TEST_SUITE("generator") {

TEST_CASE("hue task construction values") {
  const auto slider = generate_spec(hue_task(), WidgetKind::kSlider);
  REQUIRE(slider.binding.range);
  CHECK(*slider.binding.range == NumericRange{0.0, 1.0, 0.01});
  CHECK(slider.binding.op == "hue");
  CHECK(slider.binding.param == "h");

  const auto presets = generate_spec(hue_task(), WidgetKind::kPresetButtons);
  REQUIRE(presets.binding.presets);
  const std::vector<std::pair<double, std::string>> expected = {
      {0.0, "red"}, {0.2, "green"}, {0.4, "cyan"}, {0.6, "blue"}, {0.8, "magenta"}};
  REQUIRE(presets.binding.presets->size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK((*presets.binding.presets)[i].value == ParamValue::scalar(expected[i].first));
    CHECK((*presets.binding.presets)[i].preview == expected[i].second);
  }

  const auto dropdown = generate_spec(hue_task(), WidgetKind::kDropdown);
  REQUIRE(dropdown.binding.options);
  std::vector<double> values;
  for (const auto& v : *dropdown.binding.options) values.push_back(v.v.at(0));
  CHECK(values == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8});
}

TEST_CASE("symmetric defaults for exposure, tint and temperature") {
  for (const char* task : {"image_adjust_exposure", "image_adjust_tint", "image_adjust_temperature"}) {
    CAPTURE(task);
    const auto s = generate_spec(ctx_for(task), WidgetKind::kSlider);
    CHECK(*s.binding.range == NumericRange{-1.0, 1.0, 0.01});
    const auto p = generate_spec(ctx_for(task), WidgetKind::kPresetButtons);
    REQUIRE(p.binding.presets->size() == 5);
    for (const auto& preset : *p.binding.presets) CHECK(std::regex_match(preset.preview, std::regex("#[0-9a-f]{6}")));
  }
}

TEST_CASE("position ops use the plane or a 9-anchor grid") {
  const auto click = generate_spec(ctx_for("image_place_watermark"), WidgetKind::kClickOnImage);
  CHECK(click.binding.domain == Domain::kPlane);
  const auto grid = generate_spec(ctx_for("image_place_watermark"), WidgetKind::kPresetButtons);
  REQUIRE(grid.binding.presets->size() == 9);
  CHECK(grid.binding.presets->front().label == "top-left");
  CHECK(grid.binding.presets->front().preview == "marker:0.0,0.0");
  CHECK(grid.binding.presets->back().value == ParamValue::pair(1.0, 1.0));
}

TEST_CASE("kind and op mismatches are typed errors") {
  try {
    bind_widget("image_place_watermark", WidgetKind::kColorPicker);
    FAIL("expected mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnprocessable);
  }
  CHECK_THROWS_AS(bind_widget("image_adjust_hue", WidgetKind::kClickOnImage), Error);
  try {
    task_binding("image_sharpen");
    FAIL("expected unknown task");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnprocessable);
  }
}

TEST_CASE("every bound pair yields a consistent spec or an unprocessable error") {
  int ok = 0;
  for (const auto& task : bound_tasks())
    for (auto kind : kAllWidgets) {
      CAPTURE(task);
      CAPTURE(to_string(kind));
      try {
        const auto s = generate_spec(ctx_for(task), kind);
        CHECK(validate_spec(s).empty());
        CHECK(widget_spec_from_json(to_json(s)) == s);
        CHECK(generate_spec(ctx_for(task), kind) == s);
        ++ok;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kUnprocessable);
      }
    }
  CHECK(ok > static_cast<int>(bound_tasks().size()) * 4);
}

TEST_CASE("spec with recommendation data") {
  AggregatedRecommendation rec;
  rec.scores = {{WidgetKind::kPresetButtons, 2}, {WidgetKind::kSlider, 1}};
  rec.k = 3;
  rec.rationales[WidgetKind::kSlider] = {"fine control"};
  const auto s = generate_spec(hue_task(), WidgetKind::kSlider, rec);
  CHECK(s.score == 3);
  CHECK(s.rationale == std::vector<std::string>{"fine control"});
  CHECK_THROWS_AS(generate_spec(hue_task(), WidgetKind::kDropdown, rec), Error);
}

TEST_CASE("top widget per aspect skips unbindable kinds and duplicates") {
  auto rec = [](std::map<WidgetKind, int> scores) {
    AggregatedRecommendation r;
    r.scores = std::move(scores);
    for (const auto& [w, s] : r.scores) r.k += s;
    return r;
  };
  const std::map<Aspect, AggregatedRecommendation> recs = {
      {Aspect::kPredictability, rec({{WidgetKind::kSlider, 6}, {WidgetKind::kDropdown, 4}})},
      {Aspect::kEfficiency, rec({{WidgetKind::kClickOnImage, 7}, {WidgetKind::kPresetButtons, 3}})},
      {Aspect::kExplorability, rec({{WidgetKind::kSlider, 6}, {WidgetKind::kColorWheel, 4}})}};
  const auto specs = top_per_aspect_specs(hue_task(), recs);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].kind == WidgetKind::kSlider);
  CHECK(specs[1].kind == WidgetKind::kPresetButtons);
  CHECK(specs[1].score == 3);
}

TEST_CASE("bind_value maps widget values to ops") {
  const auto hue = bind_widget("image_adjust_hue", WidgetKind::kSlider);
  const auto op = std::get<ops::Hue>(bind_value(hue, 0.25));
  CHECK(op.h == 0.25);
  CHECK(op.mode == HueMode::kWrap);

  const auto wheel = bind_widget("image_adjust_hue", WidgetKind::kColorWheel);
  CHECK(std::get<ops::Hue>(bind_value(wheel, "#00ff00")).h == doctest::Approx(1.0 / 3));

  const auto rgb = bind_widget("image_adjust_tint", WidgetKind::kColorPicker);
  const auto cb = std::get<ops::ColorBalance>(bind_value(rgb, "#ff0000"));
  CHECK(cb.r == 2.0);
  CHECK(cb.g == 0.0);

  const auto vig = bind_widget("image_place_vignette", WidgetKind::kClickOnImage);
  const auto v = std::get<ops::Vignette>(bind_value(vig, json::array({0.25, 0.75})));
  CHECK(v.cx == 0.25);
  CHECK(v.cy == 0.75);

  const auto text = bind_widget("design_align_text", WidgetKind::kClickOnImage);
  const auto t = std::get<ops::TextAnchor>(bind_value(text, json::array({0.9, 0.4})));
  CHECK(t.margin == ops::Margin::kRight);
  CHECK(t.offset == 0.4);

  CHECK_THROWS_AS(bind_value(vig, 0.5), Error);
  CHECK_THROWS_AS(bind_value(hue, 1.5), Error);
  CHECK_THROWS_AS(bind_value(hue, "blue"), Error);
}

TEST_CASE("emit and extract round trip preserves bindings") {
  const auto specs = all_bound_specs();
  const auto code = emit_widget_code(specs);
  const auto back = extract_widget_code(code);
  REQUIRE(back.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CAPTURE(specs[i].id);
    CHECK(back[i].kind == specs[i].kind);
    CHECK(back[i].binding == specs[i].binding);
  }
}

TEST_CASE("emitted hue slider carries its construction values") {
  const auto code = emit_widget_code({generate_spec(hue_task(), WidgetKind::kSlider)});
  CHECK(code.find("widgets.FloatSlider(value=0.0, min=0.0, max=1.0, step=0.01)") != std::string::npos);
  CHECK(count_stanzas(code) == 1);
}

TEST_CASE("stanza counts") {
  const auto empty = emit_widget_code({});
  CHECK(count_stanzas(empty) == 0);
  CHECK(empty.find("import ipywidgets as widgets") != std::string::npos);
  CHECK(empty.find("display(widgets.HBox") != std::string::npos);
  CHECK(extract_widget_code(empty).empty());

  std::vector<WidgetSpec> eight;
  for (auto kind : kAllWidgets) {
    const bool plane = kind == WidgetKind::kClickOnImage;
    eight.push_back(generate_spec(ctx_for(plane ? "image_place_vignette" : "image_adjust_hue"), kind));
  }
  const auto code = emit_widget_code(eight);
  CHECK(count_stanzas(code) == 8);
  CHECK(extract_widget_code(code).size() == 8);
}

TEST_CASE("emit rejects unknown templates and inconsistent specs") {
  CHECK(code_templates() == std::vector<std::string>{"notebook"});
  CHECK_THROWS_AS(emit_widget_code({}, "react"), Error);
  auto bad = generate_spec(hue_task(), WidgetKind::kSlider);
  bad.binding.options = std::vector<ParamValue>{ParamValue::scalar(1)};
  CHECK_FALSE(validate_spec(bad).empty());
  CHECK_THROWS_AS(emit_widget_code({bad}), Error);
  bad = generate_spec(hue_task(), WidgetKind::kSlider);
  bad.score = 11;
  CHECK_FALSE(validate_spec(bad).empty());
}

TEST_CASE("codegen prompt") {
  const std::string example = testing::slurp(testing::data_path("codegen/hue_example.py"));
  REQUIRE_FALSE(example.empty());
  const std::vector<WidgetSpec> specs = {generate_spec(hue_task(), WidgetKind::kSlider),
                                         generate_spec(hue_task(), WidgetKind::kPresetButtons)};
  const auto p = build_codegen_prompt(specs, example);
  CHECK(p.user.find("widget_type") != std::string::npos);
  CHECK(p.user.find("\"widget_code\"") != std::string::npos);
  CHECK(p.user.find(example) != std::string::npos);
  CHECK(p.user.find("User task: image_adjust_hue") != std::string::npos);
  CHECK(p.user.find("widget_type: Slider, Preset Buttons") != std::string::npos);
  CHECK(build_codegen_prompt(specs, example).user == p.user);
  CHECK_THROWS_AS(build_codegen_prompt(specs, "  \n"), Error);
  CHECK_THROWS_AS(build_codegen_prompt({}, example), Error);
}

}
