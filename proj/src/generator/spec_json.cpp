#include "crowdgen/error.hpp"
#include "crowdgen/widget_generator.hpp"

namespace crowdgen {

namespace {

using nlohmann::json;

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::kHue: return "hue";
    case Domain::kRgb: return "rgb";
    case Domain::kPlane: return "plane";
  }
  return "hue";
}

ParamValue value_from_json(const json& j) {
  if (j.is_number()) return ParamValue::scalar(j.get<double>());
  if (!j.is_array() || j.empty() || j.size() > 3)
    fail(ErrorKind::kValidation, "parameter values are numbers or arrays of 2-3 numbers");
  ParamValue v;
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorKind::kValidation, "parameter value components must be numbers");
    v.v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

json to_json(const ParamValue& v) {
  if (v.v.size() == 1) return v.v[0];
  return json(v.v);
}

json to_json(const ParamBinding& b) {
  json doc = {{"op", b.op}, {"param", b.param}};
  if (!b.fixed.empty()) doc["fixed"] = b.fixed;
  if (b.range) doc["range"] = {{"min", b.range->min}, {"max", b.range->max}, {"step", b.range->step}};
  if (b.options) {
    json opts = json::array();
    for (const auto& o : *b.options) opts.push_back(to_json(o));
    doc["options"] = opts;
  }
  if (b.presets) {
    json presets = json::array();
    for (const auto& p : *b.presets)
      presets.push_back({{"value", to_json(p.value)}, {"label", p.label}, {"preview", p.preview}});
    doc["presets"] = presets;
  }
  if (b.domain) doc["domain"] = domain_name(*b.domain);
  return doc;
}

json to_json(const WidgetSpec& s) {
  return {{"spec_version", kSpecVersion},
          {"id", s.id},
          {"task", s.task_name},
          {"kind", std::string(to_string(s.kind))},
          {"label", s.label},
          {"score", s.score},
          {"reasons", s.rationale},
          {"binding", to_json(s.binding)}};
}

ParamBinding param_binding_from_json(const json& b) {
  try {
    ParamBinding out;
    out.op = b.at("op").get<std::string>();
    out.param = b.at("param").get<std::string>();
    out.fixed = b.value("fixed", json::object());
    if (b.contains("range"))
      out.range = NumericRange{b["range"].at("min").get<double>(), b["range"].at("max").get<double>(),
                               b["range"].at("step").get<double>()};
    if (b.contains("options")) {
      std::vector<ParamValue> opts;
      for (const auto& o : b["options"]) opts.push_back(value_from_json(o));
      out.options = std::move(opts);
    }
    if (b.contains("presets")) {
      std::vector<PresetOption> presets;
      for (const auto& p : b["presets"])
        presets.push_back({value_from_json(p.at("value")), p.at("label").get<std::string>(),
                           p.at("preview").get<std::string>()});
      out.presets = std::move(presets);
    }
    if (b.contains("domain")) {
      const std::string d = b["domain"].get<std::string>();
      if (d == "hue") out.domain = Domain::kHue;
      else if (d == "rgb") out.domain = Domain::kRgb;
      else if (d == "plane") out.domain = Domain::kPlane;
      else fail(ErrorKind::kValidation, "unknown binding domain '" + d + "'");
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("malformed widget binding: ") + e.what());
  }
}

WidgetSpec widget_spec_from_json(const json& doc) {
  try {
    if (doc.value("spec_version", 0) != kSpecVersion)
      fail(ErrorKind::kValidation, "unsupported spec_version");
    WidgetSpec s;
    s.id = doc.at("id").get<std::string>();
    s.task_name = doc.at("task").get<std::string>();
    const auto kind = widget_from_id(doc.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::kValidation, "unknown widget kind");
    s.kind = *kind;
    s.label = doc.at("label").get<std::string>();
    s.score = doc.at("score").get<int>();
    s.rationale = doc.value("reasons", std::vector<std::string>{});
    s.binding = param_binding_from_json(doc.at("binding"));
    if (auto problems = validate_spec(s); !problems.empty())
      throw Error(ErrorKind::kValidation, "inconsistent widget spec", problems);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("malformed widget spec: ") + e.what());
  }
}

}  // namespace crowdgen
