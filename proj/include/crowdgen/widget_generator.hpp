#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdgen/aggregator.hpp"
#include "crowdgen/image_ops.hpp"
#include "crowdgen/reasoning.hpp"
#include "crowdgen/task_model.hpp"
#include "crowdgen/widget_catalog.hpp"

namespace crowdgen {

inline constexpr int kSpecVersion = 1;

/// A parameter value: scalar, (x, y) pair or (r, g, b) triple.
struct ParamValue {
  std::vector<double> v;

  static ParamValue scalar(double x) { return {{x}}; }
  static ParamValue pair(double x, double y) { return {{x, y}}; }
  bool operator==(const ParamValue&) const = default;
};

struct NumericRange {
  double min, max, step;
  bool operator==(const NumericRange&) const = default;
};

struct PresetOption {
  ParamValue value;
  std::string label;
  std::string preview;  // CSS color ("red", "#a0b1c2") or "marker:x,y"
  bool operator==(const PresetOption&) const = default;
};

/// Continuous domains that need no enumerated values.
enum class Domain { kHue, kRgb, kPlane };

struct ParamBinding {
  std::string op;
  std::string param;
  nlohmann::json fixed = nlohmann::json::object();  // op params the widget does not drive
  // Exactly one of the following is set.
  std::optional<NumericRange> range;
  std::optional<std::vector<ParamValue>> options;
  std::optional<std::vector<PresetOption>> presets;
  std::optional<Domain> domain;

  bool operator==(const ParamBinding&) const = default;
};

struct WidgetSpec {
  std::string id;
  std::string task_name;
  WidgetKind kind;
  std::string label;
  ParamBinding binding;
  int score = 0;  // out of 10
  std::vector<std::string> rationale;

  bool operator==(const WidgetSpec&) const = default;
};

/// Op and widget defaults for a known task.
struct TaskBinding {
  std::string task;
  std::string op;
  std::string param;
  nlohmann::json fixed;
};

/// Tasks the generator can bind, in table order.
std::vector<std::string> bound_tasks();

/// Binding row for a task. Throws Error(kUnprocessable) for unknown tasks.
const TaskBinding& task_binding(std::string_view task);

/// Binding for (task, kind) without score or rationale. Throws
/// Error(kUnprocessable) for unknown tasks or kinds the op cannot take.
ParamBinding bind_widget(std::string_view task, WidgetKind kind);

/// Spec for one recommended widget; `kind` must have a score in `rec`.
WidgetSpec generate_spec(const TaskContext& task, WidgetKind kind,
                         const AggregatedRecommendation& rec);

/// Spec without recommendation data (score 0, no rationale).
WidgetSpec generate_spec(const TaskContext& task, WidgetKind kind);

/// Highest-ranked bindable widget per aspect of `task`, first occurrence of
/// each kind only.
std::vector<WidgetSpec> top_per_aspect_specs(const TaskContext& task,
                                             const std::map<Aspect, AggregatedRecommendation>& recs);

/// Structural problems in a spec; empty when consistent.
std::vector<std::string> validate_spec(const WidgetSpec& spec);

/// Image op produced by setting the widget to `value`. Hue and RGB domains
/// take "#rrggbb" strings (or a number for hue); the plane takes [x, y].
OpKind bind_value(const ParamBinding& binding, const nlohmann::json& value);

nlohmann::json to_json(const ParamValue& v);
nlohmann::json to_json(const ParamBinding& b);
nlohmann::json to_json(const WidgetSpec& s);
WidgetSpec widget_spec_from_json(const nlohmann::json& doc);
/// Binding alone; range, options and presets may be absent.
ParamBinding param_binding_from_json(const nlohmann::json& doc);

/// Example-guided code generation prompt. Throws Error(kValidation) for an
/// empty spec list or empty example code.
PromptBundle build_codegen_prompt(const std::vector<WidgetSpec>& specs,
                                  std::string_view example_code);

/// Names accepted by emit_widget_code.
std::vector<std::string> code_templates();

/// Renders specs through a named template ("notebook": ipywidgets cells).
std::string emit_widget_code(const std::vector<WidgetSpec>& specs,
                             std::string_view template_name = "notebook");

/// What the structural checker recovers from emitted code.
struct ExtractedWidget {
  WidgetKind kind;
  ParamBinding binding;
};

/// Re-reads emitted code stanza by stanza; values come from the widget
/// constructor arguments, not from comments.
std::vector<ExtractedWidget> extract_widget_code(std::string_view code);

/// Shortest round-trip decimal with at least one fractional digit ("0.0").
std::string format_number(double v);

}  // namespace crowdgen
