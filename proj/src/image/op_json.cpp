#include <cmath>

#include "crowdgen/error.hpp"
#include "crowdgen/image_ops.hpp"
#include "kernels_common.hpp"

namespace crowdgen {

namespace {

using nlohmann::json;

using detail::overloaded;

void require_range(std::string_view op, std::string_view param, double v, double lo, double hi) {
  if (!std::isfinite(v) || v < lo || v > hi)
    throw Error(ErrorKind::kValidation,
                std::string(op) + "." + std::string(param) + " = " + std::to_string(v) +
                    " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                {std::string(op) + "." + std::string(param)});
}

double number(const json& doc, const char* key, double fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number())
    throw Error(ErrorKind::kValidation, std::string(key) + " must be a number", {key});
  return it->get<double>();
}

std::string text(const json& doc, const char* key, const char* fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_string())
    throw Error(ErrorKind::kValidation, std::string(key) + " must be a string", {key});
  return it->get<std::string>();
}

const char* margin_name(ops::Margin m) {
  switch (m) {
    case ops::Margin::kTop: return "top";
    case ops::Margin::kBottom: return "bottom";
    case ops::Margin::kLeft: return "left";
    case ops::Margin::kRight: return "right";
  }
  return "bottom";
}

}  // namespace

std::string_view op_name(const OpKind& op) {
  return std::visit(overloaded{
                        [](const ops::Hue&) { return "hue"; },
                        [](const ops::Saturation&) { return "saturation"; },
                        [](const ops::Lightness&) { return "lightness"; },
                        [](const ops::Exposure&) { return "exposure"; },
                        [](const ops::Tint&) { return "tint"; },
                        [](const ops::Temperature&) { return "temperature"; },
                        [](const ops::ColorBalance&) { return "color_balance"; },
                        [](const ops::TonePreset&) { return "tone_preset"; },
                        [](const ops::Overlay&) { return "overlay"; },
                        [](const ops::Vignette&) { return "vignette"; },
                        [](const ops::SetHue&) { return "set_hue"; },
                        [](const ops::TextAnchor&) { return "text_anchor"; },
                    },
                    op);
}

void validate_op(const OpKind& op) {
  const auto name = op_name(op);
  std::visit(overloaded{
                 [&](const ops::Hue& o) { require_range(name, "h", o.h, 0, 1); },
                 [&](const ops::Saturation& o) { require_range(name, "f", o.f, 0, 1e6); },
                 [&](const ops::Lightness& o) { require_range(name, "d", o.d, -1, 1); },
                 [&](const ops::Exposure& o) { require_range(name, "ev", o.ev, -1, 1); },
                 [&](const ops::Tint& o) { require_range(name, "t", o.t, -1, 1); },
                 [&](const ops::Temperature& o) { require_range(name, "w", o.w, -1, 1); },
                 [&](const ops::ColorBalance& o) {
                   require_range(name, "r", o.r, 0, 2);
                   require_range(name, "g", o.g, 0, 2);
                   require_range(name, "b", o.b, 0, 2);
                 },
                 [&](const ops::TonePreset& o) { require_range(name, "strength", o.strength, 0, 1); },
                 [&](const ops::Overlay& o) {
                   (void)overlay_asset(o.asset);
                   require_range(name, "x", o.x, 0, 1);
                   require_range(name, "y", o.y, 0, 1);
                   require_range(name, "alpha", o.alpha, 0, 1);
                 },
                 [&](const ops::Vignette& o) {
                   require_range(name, "cx", o.cx, 0, 1);
                   require_range(name, "cy", o.cy, 0, 1);
                   if (!std::isfinite(o.radius) || o.radius <= 0)
                     throw Error(ErrorKind::kValidation, "vignette.radius must be > 0",
                                 {"vignette.radius"});
                   require_range(name, "strength", o.strength, 0, 1);
                 },
                 [&](const ops::SetHue& o) { require_range(name, "h", o.h, 0, 1); },
                 [&](const ops::TextAnchor& o) { require_range(name, "offset", o.offset, 0, 1); },
             },
             op);
}

json to_json(const OpKind& op) {
  json doc = std::visit(
      overloaded{
          [](const ops::Hue& o) {
            return json{{"h", o.h}, {"mode", o.mode == HueMode::kWrap ? "wrap" : "clip"}};
          },
          [](const ops::Saturation& o) { return json{{"f", o.f}}; },
          [](const ops::Lightness& o) { return json{{"d", o.d}}; },
          [](const ops::Exposure& o) { return json{{"ev", o.ev}}; },
          [](const ops::Tint& o) { return json{{"t", o.t}}; },
          [](const ops::Temperature& o) { return json{{"w", o.w}}; },
          [](const ops::ColorBalance& o) { return json{{"r", o.r}, {"g", o.g}, {"b", o.b}}; },
          [](const ops::TonePreset& o) {
            return json{{"name", o.name == ops::Tone::kFall ? "fall" : "spring"},
                        {"strength", o.strength}};
          },
          [](const ops::Overlay& o) {
            return json{{"asset", o.asset}, {"x", o.x}, {"y", o.y}, {"alpha", o.alpha}};
          },
          [](const ops::Vignette& o) {
            return json{{"cx", o.cx}, {"cy", o.cy}, {"radius", o.radius}, {"strength", o.strength}};
          },
          [](const ops::SetHue& o) { return json{{"h", o.h}}; },
          [](const ops::TextAnchor& o) {
            return json{{"margin", margin_name(o.margin)}, {"offset", o.offset}};
          },
      },
      op);
  doc["op"] = std::string(op_name(op));
  return doc;
}

OpKind op_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("op") || !doc["op"].is_string())
    throw Error(ErrorKind::kValidation, "op document needs a string \"op\" field", {"op"});
  const std::string name = doc["op"];
  OpKind op;
  if (name == "hue") {
    const std::string mode = text(doc, "mode", "wrap");
    if (mode != "wrap" && mode != "clip")
      throw Error(ErrorKind::kValidation, "hue.mode must be wrap or clip", {"hue.mode"});
    op = ops::Hue{number(doc, "h", 0), mode == "wrap" ? HueMode::kWrap : HueMode::kClip};
  } else if (name == "saturation") {
    op = ops::Saturation{number(doc, "f", 1)};
  } else if (name == "lightness") {
    op = ops::Lightness{number(doc, "d", 0)};
  } else if (name == "exposure") {
    op = ops::Exposure{number(doc, "ev", 0)};
  } else if (name == "tint") {
    op = ops::Tint{number(doc, "t", 0)};
  } else if (name == "temperature") {
    op = ops::Temperature{number(doc, "w", 0)};
  } else if (name == "color_balance") {
    op = ops::ColorBalance{number(doc, "r", 1), number(doc, "g", 1), number(doc, "b", 1)};
  } else if (name == "tone_preset") {
    const std::string tone = text(doc, "name", "fall");
    if (tone != "fall" && tone != "spring")
      throw Error(ErrorKind::kValidation, "tone_preset.name must be fall or spring",
                  {"tone_preset.name"});
    op = ops::TonePreset{tone == "fall" ? ops::Tone::kFall : ops::Tone::kSpring,
                         number(doc, "strength", 0)};
  } else if (name == "overlay") {
    op = ops::Overlay{text(doc, "asset", "logo"), number(doc, "x", 0), number(doc, "y", 0),
                      number(doc, "alpha", 1)};
  } else if (name == "vignette") {
    op = ops::Vignette{number(doc, "cx", 0.5), number(doc, "cy", 0.5), number(doc, "radius", 0.5),
                       number(doc, "strength", 0)};
  } else if (name == "set_hue") {
    op = ops::SetHue{number(doc, "h", 0)};
  } else if (name == "text_anchor") {
    const std::string m = text(doc, "margin", "bottom");
    ops::Margin margin;
    if (m == "top") margin = ops::Margin::kTop;
    else if (m == "bottom") margin = ops::Margin::kBottom;
    else if (m == "left") margin = ops::Margin::kLeft;
    else if (m == "right") margin = ops::Margin::kRight;
    else
      throw Error(ErrorKind::kValidation, "text_anchor.margin must be top, bottom, left or right",
                  {"text_anchor.margin"});
    op = ops::TextAnchor{margin, number(doc, "offset", 0.5)};
  } else {
    throw Error(ErrorKind::kValidation, "unknown op '" + name + "'", {"op"});
  }
  validate_op(op);
  return op;
}

}  // namespace crowdgen
