#include <charconv>
#include <regex>
#include <sstream>

#include "crowdgen/error.hpp"
#include "crowdgen/widget_generator.hpp"

namespace crowdgen {

namespace {

using nlohmann::json;

constexpr std::string_view kAllKindsExample =
    "Slider, Dropdown, Radio Buttons, Text Field, Preset Buttons, Color Wheel, Color Picker";

constexpr std::string_view kNotebookHeader = R"PY(import json
import urllib.request

import ipywidgets as widgets
import matplotlib.pyplot as plt
import numpy as np
from IPython.display import display
from matplotlib.patches import Wedge

ENGINE = "http://127.0.0.1:8080"
SESSION_ID = None  # set to a session created through POST /v1/sessions
output = widgets.Output()


def apply_op(binding, value):
    body = json.dumps({"session_id": SESSION_ID, "binding": binding, "value": value}).encode()
    request = urllib.request.Request(ENGINE + "/v1/image/apply", data=body,
                                     headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(request) as response:
        result = json.load(response)
    with output:
        output.clear_output(wait=True)
        print("image:", result["handle"])


def create_color_wheel(out, on_hue):
    with out:
        fig, ax = plt.subplots(figsize=(1.5, 1.5))
        num_colors = 360
        theta = np.linspace(0, 2 * np.pi, num_colors, endpoint=False)
        colors = plt.cm.hsv(theta / (2 * np.pi))
        for i in range(num_colors):
            ax.add_patch(Wedge(center=(0, 0), r=1, theta1=i, theta2=i + 1, color=colors[i]))
        ax.set_aspect('equal')
        ax.set_xlim(-1.1, 1.1)
        ax.set_ylim(-1.1, 1.1)
        ax.axis('off')

        def on_click(event):
            if event.inaxes:
                hue = (np.arctan2(event.ydata, event.xdata) / (2 * np.pi)) % 1.0
                on_hue(round(float(hue), 2))

        fig.canvas.mpl_connect('button_press_event', on_click)
        plt.show()


def image_click(out, on_point):
    with out:
        fig, ax = plt.subplots(figsize=(3, 3))
        ax.set_xlim(0, 1)
        ax.set_ylim(1, 0)

        def on_click(event):
            if event.inaxes:
                on_point(min(max(event.xdata, 0.0), 1.0), min(max(event.ydata, 0.0), 1.0))

        fig.canvas.mpl_connect('button_press_event', on_click)
        plt.show()


panel = []
)PY";

constexpr std::string_view kNotebookFooter = R"PY(
display(widgets.HBox([widgets.VBox(panel, layout=widgets.Layout(align_items='flex-start')), output]))
)PY";

std::string py_str(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\\' || c == '\'') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string py_value(const ParamValue& v) {
  if (v.v.size() == 1) return format_number(v.v[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < v.v.size(); ++i) out += (i ? ", " : "") + format_number(v.v[i]);
  return out + ")";
}

double default_value(const WidgetSpec& s) {
  const auto& p = s.binding.param;
  double v = (p == "f" || p == "r") ? 1.0 : (p == "x" || p == "cx" || p == "offset") ? 0.5 : 0.0;
  if (s.binding.range) v = std::clamp(v, s.binding.range->min, s.binding.range->max);
  return v;
}

json binding_header(const ParamBinding& b) {
  json doc = to_json(b);
  doc.erase("range");
  doc.erase("options");
  doc.erase("presets");
  return doc;
}

void emit_stanza(std::ostringstream& os, const WidgetSpec& s, std::size_t index) {
  const std::string var = std::string(to_string(s.kind)) + "_" + std::to_string(index);
  const std::string bind = "BINDING_" + std::to_string(index);
  const auto& b = s.binding;
  os << "\n# --- widget " << index << ": " << to_string(s.kind) << " ---\n"
     << bind << " = " << binding_header(b).dump() << "\n"
     << var << "_label = widgets.Label(value=" << py_str(s.label) << ")\n";

  switch (s.kind) {
    case WidgetKind::kSlider:
    case WidgetKind::kTextField: {
      const char* ctor = s.kind == WidgetKind::kSlider ? "FloatSlider" : "BoundedFloatText";
      os << var << " = widgets." << ctor << "(value=" << format_number(default_value(s))
         << ", min=" << format_number(b.range->min) << ", max=" << format_number(b.range->max)
         << ", step=" << format_number(b.range->step) << ")\n"
         << var << ".observe(lambda change: apply_op(" << bind << ", change['new']), names='value')\n"
         << "panel += [" << var << "_label, " << var << "]\n";
      break;
    }
    case WidgetKind::kDropdown:
    case WidgetKind::kRadioButtons: {
      const char* ctor = s.kind == WidgetKind::kDropdown ? "Dropdown" : "RadioButtons";
      std::string opts;
      for (std::size_t i = 0; i < b.options->size(); ++i) {
        const auto& v = (*b.options)[i];
        opts += i ? ", " : "";
        opts += v.v.size() == 1 ? py_value(v) : "(" + py_str(py_value(v)) + ", " + py_value(v) + ")";
      }
      const auto& first = b.options->front();
      os << var << " = widgets." << ctor << "(options=[" << opts << "], value=" << py_value(first) << ")\n"
         << var << ".observe(lambda change: apply_op(" << bind
         << ", list(change['new']) if isinstance(change['new'], tuple) else change['new']), names='value')\n"
         << "panel += [" << var << "_label, " << var << "]\n";
      break;
    }
    case WidgetKind::kPresetButtons: {
      os << var << "_presets = [\n";
      for (const auto& p : *b.presets)
        os << "    (" << py_value(p.value) << ", " << py_str(p.label) << ", " << py_str(p.preview) << "),\n";
      os << "]\n"
         << var << " = [\n"
         << "    widgets.Button(\n"
         << "        description=label,\n"
         << "        layout=widgets.Layout(width='75px', height='30px'),\n"
         << "        style={} if preview.startswith('marker:') else {'button_color': preview}\n"
         << "    )\n"
         << "    for value, label, preview in " << var << "_presets\n"
         << "]\n"
         << "for button, (value, label, preview) in zip(" << var << ", " << var << "_presets):\n"
         << "    button.on_click(lambda _, v=value: apply_op(" << bind
         << ", list(v) if isinstance(v, tuple) else v))\n"
         << "panel += [" << var << "_label, widgets.HBox(" << var << ")]\n";
      break;
    }
    case WidgetKind::kColorWheel:
      os << var << " = widgets.Output()\n"
         << "create_color_wheel(" << var << ", lambda hue: apply_op(" << bind << ", hue))\n"
         << "panel += [" << var << "_label, " << var << "]\n";
      break;
    case WidgetKind::kColorPicker:
      os << var << " = widgets.ColorPicker(concise=True, value='#ffffff', disabled=False)\n"
         << var << ".observe(lambda change: apply_op(" << bind << ", change['new']), names='value')\n"
         << "panel += [" << var << "_label, " << var << "]\n";
      break;
    case WidgetKind::kClickOnImage:
      os << var << " = widgets.Output()\n"
         << "image_click(" << var << ", lambda x, y: apply_op(" << bind << ", [x, y]))\n"
         << "panel += [" << var << "_label, " << var << "]\n";
      break;
  }
}

double parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorKind::kValidation, "emitted code has a malformed number '" + std::string(text) + "'");
  return v;
}

ParamValue parse_value(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (!text.empty() && text.front() == '(') {
    text.remove_prefix(1);
    if (text.empty() || text.back() != ')') fail(ErrorKind::kValidation, "unbalanced tuple in emitted code");
    text.remove_suffix(1);
    ParamValue v;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      v.v.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return v;
  }
  return ParamValue::scalar(parse_number(text));
}

std::string py_unquote(const std::string& s) {
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

ParamBinding binding_from_header(const std::string& line) {
  const auto eq = line.find(" = ");
  const json doc = json::parse(line.substr(eq + 3));
  ParamBinding b;
  b.op = doc.at("op").get<std::string>();
  b.param = doc.at("param").get<std::string>();
  b.fixed = doc.value("fixed", json::object());
  if (doc.contains("domain")) {
    const std::string d = doc["domain"];
    b.domain = d == "hue" ? Domain::kHue : d == "rgb" ? Domain::kRgb : Domain::kPlane;
  }
  return b;
}

}  // namespace

PromptBundle build_codegen_prompt(const std::vector<WidgetSpec>& specs, std::string_view example_code) {
  if (specs.empty()) fail(ErrorKind::kValidation, "codegen prompt needs at least one widget spec");
  if (example_code.find_first_not_of(" \t\r\n") == std::string_view::npos)
    fail(ErrorKind::kValidation, "codegen prompt needs non-empty example code");

  std::vector<WidgetKind> kinds;
  for (const auto& s : specs)
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) kinds.push_back(s.kind);
  std::string kind_list;
  for (std::size_t i = 0; i < kinds.size(); ++i) kind_list += (i ? ", " : "") + std::string(display_name(kinds[i]));
  std::string all_kinds;
  for (std::size_t i = 0; i < kAllWidgets.size(); ++i)
    all_kinds += (i ? (i + 1 == kAllWidgets.size() ? ", " : ", ") : "") + std::string(display_name(kAllWidgets[i]));

  nlohmann::ordered_json bindings = nlohmann::ordered_json::array();
  for (const auto& s : specs) {
    nlohmann::ordered_json entry;
    entry["widget_type"] = std::string(display_name(s.kind));
    entry["binding"] = to_json(s.binding);
    bindings.push_back(entry);
  }

  PromptBundle bundle;
  bundle.system = "You are a Python developer who writes ipywidgets code for image-editing tasks and answers in JSON.";
  bundle.task_description = specs.front().task_name;
  bundle.serialized_candidates = kind_list;

  std::ostringstream os;
  os << "Generate code for the UI widgets to perform the specified task. You should follow the steps below for the coding.\n\n"
     << "First, the UI widget code you provide must allow users to perform the task specified in the content of User task.\n\n"
     << "Second, the UI widget code you provide must follow the examples offered below for the implementation of "
     << all_kinds << ".\n"
     << "    - The UI widget types are in widget_type.\n"
     << "    - Find the example code for the relevant UI widget types.\n"
     << "    - When coding, you must only change the task to the specified task, implement the specified widgets, "
        "and keep the remaining code format the same as the example code.\n\n"
     << "Third, write your response in JSON format following the example responses below.\n"
     << "{\n"
     << "    \"task\": \"Adjust image hue\",\n\n"
     << "    \"widget_type\": \"" << kAllKindsExample << "\",\n\n"
     << "    \"widget_code\": {```python\n"
     << example_code << (example_code.ends_with('\n') ? "" : "\n")
     << "    ```}\n"
     << "}\n\n"
     << "User task: " << bundle.task_description << "\n\n"
     << "widget_type: " << kind_list << "\n\n"
     << "Widget parameter values:\n"
     << bindings.dump(4) << "\n";
  bundle.user = os.str();
  return bundle;
}

std::vector<std::string> code_templates() { return {"notebook"}; }

std::string emit_widget_code(const std::vector<WidgetSpec>& specs, std::string_view template_name) {
  if (template_name != "notebook")
    throw Error(ErrorKind::kValidation, "unknown code template '" + std::string(template_name) + "'",
                {std::string(template_name)});
  std::ostringstream os;
  os << kNotebookHeader;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (auto problems = validate_spec(specs[i]); !problems.empty())
      throw Error(ErrorKind::kValidation, "cannot emit inconsistent spec " + specs[i].id, problems);
    emit_stanza(os, specs[i], i);
  }
  os << kNotebookFooter;
  return os.str();
}

std::vector<ExtractedWidget> extract_widget_code(std::string_view code) {
  static const std::regex marker(R"(^# --- widget (\d+): ([a-z_]+) ---$)");
  static const std::regex numeric_ctor(R"(widgets\.(?:FloatSlider|BoundedFloatText)\(value=[^,]+, min=([^,]+), max=([^,]+), step=([^)]+)\))");
  static const std::regex options_ctor(R"(widgets\.(?:Dropdown|RadioButtons)\(options=\[(.*)\], value=)");
  static const std::regex labeled_option(R"(\('[^']*', (\([^)]*\))\))");
  static const std::regex preset_line(R"(^    \((\([^)]*\)|[^,]+), ('(?:[^'\\]|\\.)*'), ('(?:[^'\\]|\\.)*')\),$)");

  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(code)};
    for (std::string line; std::getline(in, line);) lines.push_back(line);
  }

  std::vector<ExtractedWidget> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, marker)) continue;
    const auto kind = widget_from_id(m[2].str());
    if (!kind) fail(ErrorKind::kValidation, "emitted code names unknown widget '" + m[2].str() + "'");
    if (i + 1 >= lines.size() || lines[i + 1].rfind("BINDING_", 0) != 0)
      fail(ErrorKind::kValidation, "widget stanza without a binding line");
    ExtractedWidget w{*kind, binding_from_header(lines[i + 1])};

    std::size_t end = i + 1;
    while (end + 1 < lines.size() && !std::regex_match(lines[end + 1], marker)) ++end;
    for (std::size_t j = i + 2; j <= end; ++j) {
      const std::string& line = lines[j];
      std::smatch c;
      if (std::regex_search(line, c, numeric_ctor)) {
        w.binding.range = NumericRange{parse_number(c[1].str()), parse_number(c[2].str()), parse_number(c[3].str())};
      } else if (std::regex_search(line, c, options_ctor)) {
        std::vector<ParamValue> opts;
        const std::string body = c[1].str();
        if (body.find('\'') != std::string::npos) {
          for (auto it = std::sregex_iterator(body.begin(), body.end(), labeled_option); it != std::sregex_iterator(); ++it)
            opts.push_back(parse_value((*it)[1].str()));
        } else {
          std::size_t start = 0;
          while (start < body.size()) {
            const std::size_t comma = body.find(',', start);
            opts.push_back(parse_value(body.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
          }
        }
        w.binding.options = std::move(opts);
      } else if (line.ends_with("_presets = [")) {
        std::vector<PresetOption> presets;
        for (++j; j <= end && lines[j] != "]"; ++j) {
          std::smatch p;
          if (!std::regex_match(lines[j], p, preset_line))
            fail(ErrorKind::kValidation, "malformed preset line: " + lines[j]);
          presets.push_back({parse_value(p[1].str()), py_unquote(p[2].str()), py_unquote(p[3].str())});
        }
        w.binding.presets = std::move(presets);
      }
    }
    out.push_back(std::move(w));
    i = end;
  }
  return out;
}

}  // namespace crowdgen
