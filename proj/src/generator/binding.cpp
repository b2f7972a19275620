#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <set>

#include "crowdgen/error.hpp"
#include "crowdgen/widget_generator.hpp"

namespace crowdgen {

namespace {

using nlohmann::json;

enum class Route { kScalar, kPosition };
enum class ColorRoute { kNone, kHue, kSetHue, kRgb };

struct Row {
  TaskBinding binding;
  Route route;
  NumericRange range;              // scalar kinds on scalar ops
  std::vector<double> values;      // dropdown/radio/preset values on scalar ops
  ColorRoute color;
  std::string plane_param;         // position ops: param driven by a 2-D value
  std::string axis_param;          // position ops: param driven by slider/text field
};

const std::vector<double> kSymmetric = {-1.0, -0.5, 0.0, 0.5, 1.0};
const std::vector<double> kGain = {0.0, 0.5, 1.0, 1.5, 2.0};
const std::vector<double> kStrength = {0.0, 0.25, 0.5, 0.75, 1.0};
const std::vector<double> kHues = {0.0, 0.2, 0.4, 0.6, 0.8};

const std::vector<Row>& table() {
  static const std::vector<Row> rows = {
      {{"image_adjust_lightness", "lightness", "d", json::object()}, Route::kScalar, {-1.0, 1.0, 0.01}, kSymmetric, ColorRoute::kNone, "", ""},
      {{"image_adjust_saturation", "saturation", "f", json::object()}, Route::kScalar, {0.0, 2.0, 0.01}, kGain, ColorRoute::kNone, "", ""},
      {{"image_adjust_hue", "hue", "h", {{"mode", "wrap"}}}, Route::kScalar, {0.0, 1.0, 0.01}, kHues, ColorRoute::kHue, "", ""},
      {{"image_adjust_fall_color", "tone_preset", "strength", {{"name", "fall"}}}, Route::kScalar, {0.0, 1.0, 0.01}, kStrength, ColorRoute::kHue, "", ""},
      {{"image_color_match", "set_hue", "h", json::object()}, Route::kScalar, {0.0, 1.0, 0.01}, kHues, ColorRoute::kSetHue, "", ""},
      {{"image_adjust_color_balance", "color_balance", "r", {{"g", 1.0}, {"b", 1.0}}}, Route::kScalar, {0.0, 2.0, 0.01}, kGain, ColorRoute::kRgb, "", ""},
      {{"image_place_watermark", "overlay", "position", {{"asset", "watermark"}, {"alpha", 0.5}}}, Route::kPosition, {0.0, 1.0, 0.01}, {}, ColorRoute::kNone, "position", "x"},
      {{"image_place_vignette", "vignette", "center", {{"radius", 0.35}, {"strength", 0.6}}}, Route::kPosition, {0.0, 1.0, 0.01}, {}, ColorRoute::kNone, "center", "cx"},
      {{"image_adjust_exposure", "exposure", "ev", json::object()}, Route::kScalar, {-1.0, 1.0, 0.01}, kSymmetric, ColorRoute::kNone, "", ""},
      {{"image_adjust_tint", "tint", "t", json::object()}, Route::kScalar, {-1.0, 1.0, 0.01}, kSymmetric, ColorRoute::kRgb, "", ""},
      {{"image_adjust_temperature", "temperature", "w", json::object()}, Route::kScalar, {-1.0, 1.0, 0.01}, kSymmetric, ColorRoute::kRgb, "", ""},
      {{"image_change_to_spring", "tone_preset", "strength", {{"name", "spring"}}}, Route::kScalar, {0.0, 1.0, 0.01}, kStrength, ColorRoute::kHue, "", ""},
      {{"design_align_text", "text_anchor", "position", {{"margin", "bottom"}}}, Route::kPosition, {0.0, 1.0, 0.01}, {}, ColorRoute::kNone, "position", "offset"},
      {{"design_position_logo", "overlay", "position", {{"asset", "logo"}, {"alpha", 1.0}}}, Route::kPosition, {0.0, 1.0, 0.01}, {}, ColorRoute::kNone, "position", "x"},
  };
  return rows;
}

const Row& row_for(std::string_view task) {
  for (const auto& r : table())
    if (r.binding.task == task) return r;
  throw Error(ErrorKind::kUnprocessable, "no image operation is bound to task '" + std::string(task) + "'",
              {std::string(task)});
}

struct Anchor {
  double x, y;
  const char* label;
};

constexpr std::array<Anchor, 9> kAnchors = {{{0.0, 0.0, "top-left"},
                                             {0.5, 0.0, "top"},
                                             {1.0, 0.0, "top-right"},
                                             {0.0, 0.5, "left"},
                                             {0.5, 0.5, "center"},
                                             {1.0, 0.5, "right"},
                                             {0.0, 1.0, "bottom-left"},
                                             {0.5, 1.0, "bottom"},
                                             {1.0, 1.0, "bottom-right"}}};

const std::array<const char*, 5> kHueNames = {"red", "green", "cyan", "blue", "magenta"};

struct NamedTriple {
  double r, g, b;
  const char* label;
};

constexpr std::array<NamedTriple, 5> kBalancePresets = {{{1.0, 1.0, 1.0, "neutral"},
                                                         {1.2, 1.0, 0.8, "warm"},
                                                         {0.8, 1.0, 1.2, "cool"},
                                                         {0.9, 1.2, 0.9, "green"},
                                                         {1.1, 0.8, 1.1, "magenta"}}};

std::string hex_color(const std::uint8_t* p) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", p[0], p[1], p[2]);
  return buf;
}

// Swatch: the op applied to a warm mid-tone reference pixel.
std::string swatch(const ParamBinding& b, const ParamValue& v) {
  ImageBuffer px(1, 1);
  px.pixels = {180, 120, 80, 255};
  const ImageBuffer out = apply_serial(px, bind_value(b, to_json(v)));
  return hex_color(out.pixels.data());
}

std::string marker(double x, double y) { return "marker:" + format_number(x) + "," + format_number(y); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s == "-0") s = "0";
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> bound_tasks() {
  std::vector<std::string> out;
  for (const auto& r : table()) out.push_back(r.binding.task);
  return out;
}

const TaskBinding& task_binding(std::string_view task) { return row_for(task).binding; }

ParamBinding bind_widget(std::string_view task, WidgetKind kind) {
  const Row& row = row_for(task);
  ParamBinding b;
  b.op = row.binding.op;
  b.param = row.binding.param;
  b.fixed = row.binding.fixed;

  auto mismatch = [&] {
    throw Error(ErrorKind::kUnprocessable,
                std::string(to_string(kind)) + " cannot drive the " + row.binding.op + " operation of " +
                    std::string(task),
                {std::string(task), std::string(to_string(kind))});
  };

  const bool color_kind = kind == WidgetKind::kColorWheel || kind == WidgetKind::kColorPicker;
  if (color_kind) {
    switch (row.color) {
      case ColorRoute::kNone: mismatch(); break;
      case ColorRoute::kHue:
        b.op = "hue";
        b.param = "h";
        b.fixed = {{"mode", "wrap"}};
        b.domain = Domain::kHue;
        break;
      case ColorRoute::kSetHue:
        b.domain = Domain::kHue;
        break;
      case ColorRoute::kRgb:
        b.op = "color_balance";
        b.param = "rgb";
        b.fixed = json::object();
        b.domain = Domain::kRgb;
        break;
    }
    return b;
  }

  if (row.route == Route::kPosition) {
    switch (kind) {
      case WidgetKind::kClickOnImage:
        b.param = row.plane_param;
        b.domain = Domain::kPlane;
        break;
      case WidgetKind::kSlider:
      case WidgetKind::kTextField:
        b.param = row.axis_param;
        b.range = row.range;
        break;
      case WidgetKind::kDropdown:
      case WidgetKind::kRadioButtons: {
        std::vector<ParamValue> opts;
        for (const auto& a : kAnchors) opts.push_back(ParamValue::pair(a.x, a.y));
        b.options = std::move(opts);
        break;
      }
      case WidgetKind::kPresetButtons: {
        std::vector<PresetOption> presets;
        for (const auto& a : kAnchors) presets.push_back({ParamValue::pair(a.x, a.y), a.label, marker(a.x, a.y)});
        b.presets = std::move(presets);
        break;
      }
      default: mismatch();
    }
    return b;
  }

  switch (kind) {
    case WidgetKind::kSlider:
    case WidgetKind::kTextField:
      b.range = row.range;
      break;
    case WidgetKind::kDropdown:
    case WidgetKind::kRadioButtons: {
      std::vector<ParamValue> opts;
      for (double v : row.values) opts.push_back(ParamValue::scalar(v));
      b.options = std::move(opts);
      break;
    }
    case WidgetKind::kPresetButtons: {
      std::vector<PresetOption> presets;
      if (row.color == ColorRoute::kRgb && row.binding.op == "color_balance") {
        b.param = "rgb";
        b.fixed = json::object();
        for (const auto& t : kBalancePresets) {
          ParamValue v{{t.r, t.g, t.b}};
          presets.push_back({v, t.label, swatch(b, v)});
        }
      } else if (row.binding.op == "hue" || row.binding.op == "set_hue") {
        for (std::size_t i = 0; i < row.values.size(); ++i)
          presets.push_back({ParamValue::scalar(row.values[i]), format_number(row.values[i]), kHueNames[i]});
      } else {
        for (double v : row.values) {
          const auto pv = ParamValue::scalar(v);
          presets.push_back({pv, format_number(v), swatch(b, pv)});
        }
      }
      b.presets = std::move(presets);
      break;
    }
    default: mismatch();
  }
  return b;
}

WidgetSpec generate_spec(const TaskContext& task, WidgetKind kind) {
  WidgetSpec spec;
  spec.task_name = task.name;
  spec.kind = kind;
  spec.id = task.name + "/" + std::string(to_string(kind));
  spec.binding = bind_widget(task.name, kind);
  spec.label = std::string(display_name(kind)) + ": " + spec.binding.op + " " + spec.binding.param;
  return spec;
}

WidgetSpec generate_spec(const TaskContext& task, WidgetKind kind,
                         const AggregatedRecommendation& rec) {
  if (rec.score(kind) <= 0)
    throw Error(ErrorKind::kValidation,
                std::string(to_string(kind)) + " has no score in the recommendation for " + task.name,
                {std::string(to_string(kind))});
  WidgetSpec spec = generate_spec(task, kind);
  spec.score = normalize_scores_integer(rec).at(kind);
  if (auto it = rec.rationales.find(kind); it != rec.rationales.end()) spec.rationale = it->second;
  return spec;
}

std::vector<WidgetSpec> top_per_aspect_specs(const TaskContext& task,
                                             const std::map<Aspect, AggregatedRecommendation>& recs) {
  task_binding(task.name);
  std::vector<WidgetSpec> specs;
  std::set<WidgetKind> seen;
  for (Aspect a : task.aspects) {
    auto it = recs.find(a);
    if (it == recs.end()) continue;
    for (WidgetKind kind : it->second.ranking()) {
      try {
        bind_widget(task.name, kind);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kUnprocessable) continue;  // op cannot take this kind
        throw;
      }
      if (seen.insert(kind).second) specs.push_back(generate_spec(task, kind, it->second));
      break;
    }
  }
  return specs;
}

OpKind bind_value(const ParamBinding& b, const json& value) {
  json doc = b.fixed;
  doc["op"] = b.op;
  auto numbers = [&](std::size_t n) {
    if (n == 1 && value.is_number()) return std::vector<double>{value.get<double>()};
    if (!value.is_array() || value.size() != n)
      throw Error(ErrorKind::kValidation, "value for " + b.op + "." + b.param + " must have " +
                                              std::to_string(n) + " component(s)", {b.param});
    std::vector<double> out;
    for (const auto& x : value) {
      if (!x.is_number()) throw Error(ErrorKind::kValidation, "value components must be numbers", {b.param});
      out.push_back(x.get<double>());
    }
    return out;
  };

  if (b.param == "rgb") {
    if (value.is_string()) {
      const std::string hex = value.get<std::string>();
      (void)hex_to_hue(hex);  // validates the format
      const auto channel = [&](int i) { return std::stoi(hex.substr(1 + 2 * i, 2), nullptr, 16) * 2.0 / 255.0; };
      doc["r"] = channel(0);
      doc["g"] = channel(1);
      doc["b"] = channel(2);
    } else {
      const auto v = numbers(3);
      doc["r"] = v[0];
      doc["g"] = v[1];
      doc["b"] = v[2];
    }
  } else if (b.param == "position" || b.param == "center") {
    const auto v = numbers(2);
    if (b.op == "text_anchor") {
      const std::array<std::pair<double, const char*>, 4> dist = {
          {{v[1], "top"}, {1.0 - v[1], "bottom"}, {v[0], "left"}, {1.0 - v[0], "right"}}};
      auto best = std::min_element(dist.begin(), dist.end(),
                                   [](const auto& a, const auto& c) { return a.first < c.first; });
      doc["margin"] = best->second;
      const std::string m = best->second;
      doc["offset"] = (m == "top" || m == "bottom") ? v[0] : v[1];
    } else if (b.param == "center") {
      doc["cx"] = v[0];
      doc["cy"] = v[1];
    } else {
      doc["x"] = v[0];
      doc["y"] = v[1];
    }
  } else if (b.domain == Domain::kHue && value.is_string()) {
    doc[b.param] = hex_to_hue(value.get<std::string>());
  } else {
    doc[b.param] = numbers(1)[0];
    if (b.op == "overlay" && !doc.contains("y")) doc["y"] = 0.5;
  }
  return op_from_json(doc);
}

std::vector<std::string> validate_spec(const WidgetSpec& spec) {
  std::vector<std::string> problems;
  const auto& b = spec.binding;
  const int populated = b.range.has_value() + b.options.has_value() + b.presets.has_value() + b.domain.has_value();
  if (populated != 1) problems.push_back("binding: exactly one of range/options/presets/domain must be set");
  if (spec.score < 0 || spec.score > 10) problems.push_back("score: outside [0, 10]");

  switch (spec.kind) {
    case WidgetKind::kSlider:
    case WidgetKind::kTextField:
      if (!b.range) problems.push_back("binding: " + std::string(to_string(spec.kind)) + " needs a range");
      break;
    case WidgetKind::kDropdown:
    case WidgetKind::kRadioButtons:
      if (!b.options) problems.push_back("binding: " + std::string(to_string(spec.kind)) + " needs options");
      break;
    case WidgetKind::kPresetButtons:
      if (!b.presets) problems.push_back("binding: preset_buttons needs presets");
      break;
    case WidgetKind::kColorWheel:
    case WidgetKind::kColorPicker:
      if (!b.domain || *b.domain == Domain::kPlane) problems.push_back("binding: color kinds need a hue or rgb domain");
      break;
    case WidgetKind::kClickOnImage:
      if (!b.domain || *b.domain != Domain::kPlane) problems.push_back("binding: click_on_image needs the plane domain");
      break;
  }
  if (b.range && !(b.range->min < b.range->max && b.range->step > 0))
    problems.push_back("binding.range: min < max and step > 0 required");
  if (b.options && b.options->empty()) problems.push_back("binding.options: empty");
  if (b.presets) {
    std::vector<std::string> labels;
    for (const auto& p : *b.presets) labels.push_back(p.label);
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
      problems.push_back("binding.presets: labels must be unique");
    if (b.presets->empty()) problems.push_back("binding.presets: empty");
  }
  return problems;
}

}  // namespace crowdgen
