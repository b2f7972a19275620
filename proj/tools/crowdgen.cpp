// Command-line front end over the engine.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "crowdgen/aggregator.hpp"
#include "crowdgen/error.hpp"
#include "crowdgen/image_ops.hpp"
#include "crowdgen/preference_library.hpp"
#include "crowdgen/service.hpp"
#include "crowdgen/study.hpp"
#include "crowdgen/widget_generator.hpp"

using namespace crowdgen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_file;
  std::string library;
  std::string tasks;
};

EngineConfig engine_config(const Common& c) {
  EngineConfig cfg = load_engine_config(c.config_file.empty() ? std::nullopt
                                                               : std::optional<fs::path>(c.config_file));
  if (!c.library.empty()) cfg.library_path = c.library;
  if (!c.tasks.empty()) cfg.tasks_path = c.tasks;
  return cfg;
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  json doc = json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::kValidation, "not valid JSON: " + path);
  return doc;
}

struct TaskArgs {
  std::string task_file;
  std::string task_name;
  std::vector<std::string> aspects;
};

void add_task_options(CLI::App* cmd, TaskArgs& t) {
  cmd->add_option("--task-file", t.task_file, "TaskContext JSON file");
  cmd->add_option("--task", t.task_name, "Named task from the task file or library");
  cmd->add_option("--aspects", t.aspects, "Aspects to reason about")->delimiter(',');
}

TaskContext task_from_args(const TaskArgs& t, const EngineConfig& cfg, const PreferenceLibrary& lib) {
  json doc;
  if (!t.task_file.empty()) {
    doc = read_json(t.task_file);
  } else if (!t.task_name.empty()) {
    auto ctx = resolve_named_task(t.task_name, load_named_tasks(cfg.tasks_path), lib);
    if (!ctx) throw Error(ErrorKind::kValidation, "unknown task name", {t.task_name});
    doc = to_json(*ctx);
  } else {
    throw Error(ErrorKind::kValidation, "give --task-file or --task");
  }
  if (!t.aspects.empty()) doc["aspects"] = t.aspects;
  return task_context_from_json(doc);
}

struct ReasonArgs {
  std::string mode;
  int k = 0;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> library_seed;
};

void add_reason_options(CLI::App* cmd, ReasonArgs& r) {
  cmd->add_option("--mode", r.mode, "withlib<n> or withoutlib");
  cmd->add_option("--k", r.k, "Reasoning passes");
  cmd->add_option("--backend", r.backend, "oracle or llm")->check(CLI::IsMember({"oracle", "llm"}));
  cmd->add_option("--seed", r.seed, "Oracle sampling seed");
  cmd->add_option("--library-seed", r.library_seed, "Seed for library subsetting");
}

struct Reasoned {
  TaskContext ctx;
  ReasonerConfig rc;
  int k;
  std::map<Aspect, AggregatedRecommendation> recs;
};

Reasoned run_reason(const Common& common, const TaskArgs& t, const ReasonArgs& r) {
  const EngineConfig cfg = engine_config(common);
  if (!fs::exists(cfg.library_path)) throw Error(ErrorKind::kIo, "library file not found: " + cfg.library_path.string());
  const PreferenceLibrary lib = load_library_file(cfg.library_path);
  Reasoned out{task_from_args(t, cfg, lib), {}, r.k > 0 ? r.k : cfg.k, {}};
  if (r.k < 0 || out.k < 1) throw Error(ErrorKind::kValidation, "k must be at least 1");
  task_binding(out.ctx.name);
  out.rc.llm = cfg.llm;
  out.rc.library_mode = r.mode.empty() ? cfg.default_mode : LibraryMode::parse(r.mode);
  out.rc.backend = r.backend.empty() ? cfg.backend : (r.backend == "llm" ? Backend::kLlm : Backend::kOracle);
  out.rc.seed = r.seed.value_or(cfg.seed);
  out.rc.library_seed = r.library_seed.value_or(cfg.library_seed);
  std::unique_ptr<Transcript> transcript;
  if (cfg.transcript_path) transcript = std::make_unique<Transcript>(*cfg.transcript_path);
  out.rc.transcript = transcript.get();
  if (out.rc.backend == Backend::kLlm && cfg.llm.api_key.empty())
    throw Error(ErrorKind::kBackend, "LLM backend requested but CROWDGEN_LLM_KEY is not set");
  out.recs = aggregate(out.ctx, lib, out.rc, out.k);
  out.rc.transcript = nullptr;
  return out;
}

std::vector<WidgetSpec> specs_for(const Common& common, const TaskArgs& t, const ReasonArgs& r,
                                  const std::vector<std::string>& kinds) {
  if (kinds.empty()) {
    const Reasoned res = run_reason(common, t, r);
    return top_per_aspect_specs(res.ctx, res.recs);
  }
  const EngineConfig cfg = engine_config(common);
  PreferenceLibrary lib;
  if (fs::exists(cfg.library_path)) lib = load_library_file(cfg.library_path);
  const TaskContext ctx = task_from_args(t, cfg, lib);
  std::vector<WidgetSpec> specs;
  for (const auto& k : kinds) {
    auto kind = widget_from_id(k);
    if (!kind) throw Error(ErrorKind::kValidation, "unknown widget kind", {k});
    specs.push_back(generate_spec(ctx, *kind));
  }
  return specs;
}

void print_error(const Error& e) {
  std::cerr << error_json(e).dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-guided widget recommendation engine"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_file, "key = value config file");
  app.add_option("--library", common.library, "Preference library JSON");
  app.add_option("--tasks", common.tasks, "Named task file");

  TaskArgs task;
  ReasonArgs reason;

  auto* reason_cmd = app.add_subcommand("reason", "Aggregate k reasoning passes into scored widgets");
  add_task_options(reason_cmd, task);
  add_reason_options(reason_cmd, reason);

  std::vector<std::string> kinds;
  std::string emit_template = "notebook";
  std::string example_code;
  auto* widgets_cmd = app.add_subcommand("widgets", "Widget specs for chosen kinds or the top widget per aspect");
  add_task_options(widgets_cmd, task);
  add_reason_options(widgets_cmd, reason);
  widgets_cmd->add_option("--kinds", kinds, "Widget kinds; omit for top-per-aspect")->delimiter(',');

  auto* emit_cmd = app.add_subcommand("emit", "Render widget specs as notebook code");
  add_task_options(emit_cmd, task);
  add_reason_options(emit_cmd, reason);
  emit_cmd->add_option("--kinds", kinds, "Widget kinds; omit for top-per-aspect")->delimiter(',');
  std::string specs_file;
  emit_cmd->add_option("--specs", specs_file, "WidgetSpec list JSON instead of a task");
  emit_cmd->add_option("--template", emit_template, "Code template")->check(CLI::IsMember(code_templates()));
  emit_cmd->add_option("--prompt-example", example_code, "Print the code generation prompt built on this example file");

  std::string in_png, out_png, op_text, op_file;
  auto* apply_cmd = app.add_subcommand("apply", "Apply one image operation to a PNG");
  apply_cmd->add_option("--in", in_png, "Input PNG")->required();
  apply_cmd->add_option("--out", out_png, "Output PNG")->required();
  auto* op_opt = apply_cmd->add_option("--op", op_text, "Operation JSON, e.g. {\"op\":\"hue\",\"h\":0.2}");
  apply_cmd->add_option("--op-file", op_file, "Operation JSON file")->excludes(op_opt);
  bool serial = false;
  apply_cmd->add_flag("--serial", serial, "Use the serial reference kernels");

  app.add_subcommand("catalog", "Print the widget catalog");

  auto* library_cmd = app.add_subcommand("library", "Library tools");
  library_cmd->require_subcommand(1);
  std::string library_file;
  auto* validate_cmd = library_cmd->add_subcommand("validate", "Validate a library file");
  validate_cmd->add_option("file", library_file, "Library JSON")->required();
  std::string subset_mode = "withlib30";
  std::uint64_t subset_seed = 0;
  auto* subset_cmd = library_cmd->add_subcommand("subset", "Sample n responses per task and aspect");
  subset_cmd->add_option("file", library_file, "Library JSON")->required();
  subset_cmd->add_option("--mode", subset_mode, "withlib<n> or withoutlib");
  subset_cmd->add_option("--seed", subset_seed, "Sampling seed");

  auto* study_cmd = app.add_subcommand("study", "Pairwise comparison study tools");
  study_cmd->require_subcommand(1);
  int n_participants = 0;
  std::uint64_t study_seed = 0;
  auto* plan_cmd = study_cmd->add_subcommand("plan", "Counterbalanced assignments");
  plan_cmd->add_option("--n", n_participants, "Participants")->required();
  plan_cmd->add_option("--seed", study_seed, "Pair order seed");
  double p_larger = 0.5;
  std::optional<std::uint64_t> plan_seed;
  auto* simulate_cmd = study_cmd->add_subcommand("simulate", "Simulated raters, JSON-lines records on stdout");
  simulate_cmd->add_option("--p", p_larger, "Probability of choosing the larger library")->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--n", n_participants, "Participants")->required();
  simulate_cmd->add_option("--seed", study_seed, "Rater seed");
  simulate_cmd->add_option("--plan-seed", plan_seed, "Plan seed (defaults to --seed)");
  std::string group_by = "aspect-pair", format = "csv", records_file = "-";
  auto* analyze_cmd = study_cmd->add_subcommand("analyze", "Chi-squared tests over JSON-lines records");
  analyze_cmd->add_option("records", records_file, "Records file, '-' for stdin");
  analyze_cmd->add_option("--group-by", group_by, "task-aspect-pair or aspect-pair")
      ->check(CLI::IsMember({"task-aspect-pair", "aspect-pair"}));
  analyze_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string listen;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--listen", listen, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error(Error(ErrorKind::kValidation, e.what()));
    return exit_code(ErrorKind::kValidation);
  }

  try {
    if (*reason_cmd) {
      const Reasoned r = run_reason(common, task, reason);
      std::cout << reason_response_json(r.ctx, r.rc, r.k, r.recs).dump(2) << '\n';
    } else if (*widgets_cmd) {
      json list = json::array();
      for (const auto& s : specs_for(common, task, reason, kinds)) list.push_back(to_json(s));
      std::cout << json{{"specs", list}}.dump(2) << '\n';
    } else if (*emit_cmd) {
      std::vector<WidgetSpec> specs;
      if (!specs_file.empty()) {
        json doc = read_json(specs_file);
        const json& list = doc.is_object() && doc.contains("specs") ? doc["specs"] : doc;
        if (!list.is_array()) throw Error(ErrorKind::kValidation, "expected a list of widget specs");
        for (const auto& s : list) specs.push_back(widget_spec_from_json(s));
      } else {
        specs = specs_for(common, task, reason, kinds);
      }
      if (!example_code.empty()) {
        const PromptBundle prompt = build_codegen_prompt(specs, read_text(example_code));
        std::cout << prompt.user << '\n';
      } else {
        if (specs.empty()) throw Error(ErrorKind::kValidation, "no widget specs to emit");
        std::cout << emit_widget_code(specs, emit_template);
      }
    } else if (*apply_cmd) {
      if (op_text.empty() && op_file.empty()) throw Error(ErrorKind::kValidation, "give --op or --op-file");
      json doc = json::parse(op_text.empty() ? read_text(op_file) : op_text, nullptr, false);
      if (doc.is_discarded()) throw Error(ErrorKind::kValidation, "operation is not valid JSON");
      const OpKind op = op_from_json(doc);
      const ImageBuffer img = read_png(in_png);
      write_png(out_png, serial ? apply_serial(img, op) : apply(img, op));
    } else if (app.got_subcommand("catalog")) {
      std::cout << catalog_json().dump(2) << '\n';
    } else if (*validate_cmd) {
      const json doc = read_json(library_file);
      const auto problems = validate_library_json(doc);
      if (!problems.empty()) throw Error(ErrorKind::kValidation, "library is invalid", problems);
      const PreferenceLibrary lib = parse_library(doc);
      std::cout << json{{"valid", true}, {"tasks", lib.tasks.size()}, {"responses", lib.response_count()}}.dump()
                << '\n';
    } else if (*subset_cmd) {
      const PreferenceLibrary lib = load_library_file(library_file);
      std::cout << to_json(subset_library(lib, LibraryMode::parse(subset_mode), subset_seed)).dump(2) << '\n';
    } else if (*plan_cmd) {
      std::cout << to_json(plan_study(n_participants, study_seed)).dump(2) << '\n';
    } else if (*simulate_cmd) {
      const StudyPlan plan = plan_study(n_participants, plan_seed.value_or(study_seed));
      write_records_jsonl(std::cout, simulate_raters(plan, SimulatedRaterModel::constant(p_larger, study_seed)));
    } else if (*analyze_cmd) {
      std::istringstream in(read_text(records_file));
      const Grouping g = grouping_from_string(group_by);
      const auto rows = analyze(read_records_jsonl(in), g);
      if (format == "csv") std::cout << analysis_csv(rows, g);
      else std::cout << analysis_json(rows, g).dump(2) << '\n';
    } else if (*serve_cmd) {
      EngineConfig cfg = engine_config(common);
      if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorKind::kValidation, "--listen expects host:port");
        cfg.listen_host = listen.substr(0, colon);
        cfg.listen_port = std::stoi(listen.substr(colon + 1));
      }
      Engine engine(cfg);
      HttpServer server(engine);
      const int port = server.bind(cfg.listen_host, cfg.listen_port);
      std::cerr << "listening on " << cfg.listen_host << ':' << port << std::endl;
      server.run();
    }
  } catch (const Error& e) {
    print_error(e);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    print_error(Error(ErrorKind::kIo, e.what()));
    return exit_code(ErrorKind::kIo);
  }
  return 0;
}
