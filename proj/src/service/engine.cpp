#include <fstream>
#include <random>
#include <set>

#include "crowdgen/error.hpp"
#include "crowdgen/service.hpp"
#include "files.hpp"

namespace crowdgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& key, const std::string& msg) {
  throw Error(ErrorKind::kValidation, "invalid request field", {key + ": " + msg});
}

const json* find(const json& body, const char* key) {
  auto it = body.find(key);
  return it == body.end() || it->is_null() ? nullptr : &*it;
}

std::optional<std::string> opt_string(const json& body, const char* key) {
  const json* v = find(body, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) bad_field(key, "expected string");
  return v->get<std::string>();
}

int int_field(const json& body, const char* key, int def, int lo, int hi) {
  const json* v = find(body, key);
  if (!v) return def;
  if (!v->is_number_integer()) bad_field(key, "expected integer");
  const auto x = v->get<long long>();
  if (x < lo || x > hi) bad_field(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::uint64_t seed_field(const json& body, const char* key, std::uint64_t def) {
  const json* v = find(body, key);
  if (!v) return def;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<long long>() >= 0) return static_cast<std::uint64_t>(v->get<long long>());
  bad_field(key, "expected non-negative integer");
}

json require_object(const json& body) {
  if (!body.is_object()) throw Error(ErrorKind::kValidation, "request body must be a JSON object");
  return body;
}

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 gen(std::random_device{}());
  std::lock_guard lock(mu);
  static constexpr char hex[] = "0123456789abcdef";
  std::uint64_t x = gen();
  std::string id = "s-";
  for (int i = 0; i < 16; ++i, x >>= 4) id += hex[x & 15];
  return id;
}

constexpr int kMaxK = 1000;

json history_json(const HistoryEntry& h) {
  json out = {{"kind", h.kind}, {"request", h.request}};
  if (h.kind == "reason") out["recommendations"] = h.recommendations;
  if (h.kind == "widgets") out["chosen_specs"] = h.chosen_specs;
  if (h.kind == "apply") {
    out["op"] = h.op.value_or(json());
    out["from_original"] = h.from_original;
    out["image_handle"] = h.image_handle;
  }
  return out;
}

HistoryEntry history_from_json(const json& j) {
  HistoryEntry h;
  h.kind = j.at("kind").get<std::string>();
  h.request = j.value("request", json::object());
  h.recommendations = j.value("recommendations", json());
  h.chosen_specs = j.value("chosen_specs", std::vector<std::string>{});
  if (j.contains("op") && !j["op"].is_null()) h.op = j["op"];
  h.from_original = j.value("from_original", false);
  h.image_handle = j.value("image_handle", std::string());
  return h;
}

}  // namespace

std::map<std::string, TaskContext> load_named_tasks(const fs::path& file) {
  std::map<std::string, TaskContext> out;
  if (file.empty() || !fs::exists(file)) return out;
  std::ifstream in(file);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("tasks") || !doc["tasks"].is_array())
    throw Error(ErrorKind::kValidation, "malformed task file " + file.string());
  for (const auto& t : doc["tasks"]) {
    TaskContext ctx = task_context_from_json(t);
    out[ctx.name] = std::move(ctx);
  }
  return out;
}

std::optional<TaskContext> resolve_named_task(const std::string& name,
                                              const std::map<std::string, TaskContext>& named,
                                              const PreferenceLibrary& lib) {
  if (auto it = named.find(name); it != named.end()) return it->second;
  if (const TaskRecord* t = lib.find(name)) {
    TaskContext ctx;
    ctx.name = t->name;
    ctx.description = t->description;
    ctx.aspects.assign(kAllAspects.begin(), kAllAspects.end());
    ctx.tags = t->tags;
    return ctx;
  }
  return std::nullopt;
}

json reason_response_json(const TaskContext& ctx, const ReasonerConfig& config, int k,
                          const std::map<Aspect, AggregatedRecommendation>& recs) {
  json list = json::array();
  for (Aspect a : ctx.aspects)
    if (auto it = recs.find(a); it != recs.end()) list.push_back(to_json(it->second));
  return {{"task", to_json(ctx)},
          {"library_mode", config.library_mode.to_string()},
          {"k", k},
          {"backend", config.backend == Backend::kOracle ? "oracle" : "llm"},
          {"seed", config.seed},
          {"recommendations", list}};
}

json to_json(const Session& s) {
  json history = json::array();
  for (const auto& h : s.history) history.push_back(history_json(h));
  return {{"session_id", s.id},
          {"task", to_json(s.context)},
          {"original_image", s.original_image},
          {"current_image", s.current_image},
          {"history", history}};
}

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      images_(config_.data_dir / "images"),
      library_(config_.library_path, config_.data_dir / "library.json"),
      records_(config_.data_dir / "study" / "records.jsonl") {
  validate_config(config_);
  if (config_.transcript_path) transcript_ = std::make_unique<Transcript>(*config_.transcript_path);
  named_tasks_ = load_named_tasks(config_.tasks_path);
  const fs::path plan_file = config_.data_dir / "study" / "plan.json";
  if (fs::exists(plan_file)) {
    std::ifstream in(plan_file);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::kIo, "corrupt study plan " + plan_file.string());
    plan_n_ = doc.at("n").get<int>();
    plan_ = plan_study(*plan_n_, doc.at("seed").get<std::uint64_t>());
  }
  const fs::path session_dir = config_.data_dir / "sessions";
  if (fs::exists(session_dir)) {
    for (const auto& entry : fs::directory_iterator(session_dir)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream in(entry.path());
      json doc = json::parse(in, nullptr, false);
      if (doc.is_discarded()) continue;
      Session s;
      s.id = doc.at("session_id").get<std::string>();
      s.context = task_context_from_json(doc.at("task"));
      s.original_image = doc.at("original_image").get<std::string>();
      s.current_image = doc.at("current_image").get<std::string>();
      for (const auto& h : doc.at("history")) s.history.push_back(history_from_json(h));
      sessions_[s.id] = std::move(s);
    }
  }
}

void Engine::set_chat_backend(std::shared_ptr<ChatBackend> backend) {
  std::lock_guard lock(chat_mu_);
  chat_ = std::move(backend);
}

ChatBackend* Engine::chat_backend() {
  std::lock_guard lock(chat_mu_);
  if (!chat_) {
    if (config_.llm.api_key.empty())
      throw Error(ErrorKind::kBackend, "LLM backend requested but CROWDGEN_LLM_KEY is not set");
    if (config_.llm.endpoint.empty()) throw Error(ErrorKind::kBackend, "LLM backend requested but llm_endpoint is not configured");
    chat_ = std::make_shared<HttpChatBackend>(config_.llm);
  }
  return chat_.get();
}

std::optional<TaskContext> Engine::named_task(const std::string& name) const {
  return resolve_named_task(name, named_tasks_, *library_.snapshot());
}

TaskContext Engine::context_from(const json& body, const Session* session) const {
  const json* task = find(body, "task");
  std::optional<TaskContext> ctx;
  if (task && task->is_object()) {
    ctx = task_context_from_json(*task);
  } else if (task && task->is_string()) {
    ctx = named_task(task->get<std::string>());
    if (!ctx) throw Error(ErrorKind::kValidation, "unknown task name", {task->get<std::string>()});
  } else if (task) {
    bad_field("task", "expected object or task name");
  } else if (body.contains("name") || body.contains("description")) {
    ctx = task_context_from_json(body);
  } else if (session) {
    ctx = session->context;
  } else {
    throw Error(ErrorKind::kValidation, "request names no task and no session");
  }
  // A bare aspect list narrows a named or session task.
  if (const json* aspects = find(body, "aspects"); aspects && !(task && task->is_object()) &&
                                                    !body.contains("name")) {
    json doc = to_json(*ctx);
    doc["aspects"] = *aspects;
    ctx = task_context_from_json(doc);
  }
  return *ctx;
}

Session& Engine::session_locked(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::kNotFound, "unknown session", {id});
  return it->second;
}

void Engine::persist_session(const Session& s) const {
  detail::write_atomic(config_.data_dir / "sessions" / (s.id + ".json"), to_json(s).dump(2) + "\n");
}

json Engine::reason(const json& raw) {
  const json body = require_object(raw);
  const auto session_id = opt_string(body, "session_id");
  std::optional<Session> session;
  if (session_id) {
    std::lock_guard lock(sessions_mu_);
    session = session_locked(*session_id);
  }
  const TaskContext ctx = context_from(body, session ? &*session : nullptr);
  task_binding(ctx.name);

  ReasonerConfig rc;
  rc.llm = config_.llm;
  rc.library_mode = config_.default_mode;
  if (auto mode = opt_string(body, "library_mode")) rc.library_mode = LibraryMode::parse(*mode);
  rc.backend = config_.backend;
  if (auto backend = opt_string(body, "backend")) {
    if (*backend == "oracle") rc.backend = Backend::kOracle;
    else if (*backend == "llm") rc.backend = Backend::kLlm;
    else bad_field("backend", "expected oracle or llm");
  }
  rc.seed = seed_field(body, "seed", config_.seed);
  rc.library_seed = seed_field(body, "library_seed", config_.library_seed);
  rc.transcript = transcript_.get();
  const int k = int_field(body, "k", config_.k, 1, kMaxK);

  ChatBackend* backend = rc.backend == Backend::kLlm ? chat_backend() : nullptr;
  const auto lib = library_.snapshot();
  const auto recs = aggregate(ctx, *lib, rc, k, backend);

  json out = reason_response_json(ctx, rc, k, recs);
  if (session_id) {
    std::lock_guard lock(sessions_mu_);
    Session& s = session_locked(*session_id);
    s.context = ctx;
    s.latest = recs;
    HistoryEntry h;
    h.kind = "reason";
    h.request = body;
    h.recommendations = out["recommendations"];
    s.history.push_back(std::move(h));
    persist_session(s);
    out["session_id"] = s.id;
  }
  return out;
}

json Engine::widgets(const json& raw) {
  const json body = require_object(raw);
  const auto session_id = opt_string(body, "session_id");
  std::optional<Session> session;
  if (session_id) {
    std::lock_guard lock(sessions_mu_);
    session = session_locked(*session_id);
  }
  const TaskContext ctx = context_from(body, session ? &*session : nullptr);

  std::vector<WidgetSpec> specs;
  const json* kinds = find(body, "kinds");
  const bool top = !kinds || (kinds->is_string() && kinds->get<std::string>() == "top-per-aspect") ||
                   (kinds->is_array() && kinds->empty());
  if (top) {
    if (!session || session->latest.empty())
      throw Error(ErrorKind::kValidation, "no recommendations to pick from; give kinds or reason in a session first");
    if (session->context.name != ctx.name)
      throw Error(ErrorKind::kValidation, "session recommendations are for a different task",
                  {session->context.name});
    specs = top_per_aspect_specs(ctx, session->latest);
  } else {
    if (!kinds->is_array()) bad_field("kinds", "expected array of widget kinds or \"top-per-aspect\"");
    std::set<WidgetKind> seen;
    for (std::size_t i = 0; i < kinds->size(); ++i) {
      const json& k = (*kinds)[i];
      auto kind = k.is_string() ? widget_from_id(k.get<std::string>()) : std::nullopt;
      if (!kind) bad_field("kinds[" + std::to_string(i) + "]", "unknown widget kind");
      if (seen.insert(*kind).second) specs.push_back(generate_spec(ctx, *kind));
    }
  }

  json list = json::array();
  for (const auto& s : specs) list.push_back(to_json(s));
  json out = {{"task", ctx.name}, {"specs", list}};
  if (session_id) {
    std::lock_guard lock(sessions_mu_);
    Session& s = session_locked(*session_id);
    HistoryEntry h;
    h.kind = "widgets";
    h.request = body;
    for (const auto& spec : specs) h.chosen_specs.push_back(spec.id);
    s.history.push_back(std::move(h));
    persist_session(s);
    out["session_id"] = s.id;
  }
  return out;
}

json Engine::emit(const json& raw) {
  const json body = require_object(raw);
  const std::string tmpl = opt_string(body, "template").value_or("notebook");
  std::vector<WidgetSpec> specs;
  if (const json* given = find(body, "specs")) {
    if (!given->is_array()) bad_field("specs", "expected array");
    for (const auto& s : *given) specs.push_back(widget_spec_from_json(s));
  } else {
    const json generated = widgets(body);
    for (const auto& s : generated.at("specs")) specs.push_back(widget_spec_from_json(s));
  }
  if (specs.empty()) throw Error(ErrorKind::kValidation, "no widget specs to emit");
  return {{"template", tmpl}, {"code", emit_widget_code(specs, tmpl)}};
}

Engine::ApplyResult Engine::apply_image(const json& raw) {
  const json body = require_object(raw);
  const auto session_id = opt_string(body, "session_id");
  const bool from_original = opt_string(body, "base").value_or("current") == "original";

  OpKind op;
  if (const json* o = find(body, "op")) {
    op = op_from_json(*o);
  } else if (const json* b = find(body, "binding")) {
    const json* value = find(body, "value");
    if (!value) bad_field("value", "required with binding");
    op = bind_value(param_binding_from_json(*b), *value);
  } else {
    throw Error(ErrorKind::kValidation, "request needs an op or a binding with a value");
  }

  ImageBuffer source;
  if (session_id) {
    std::string handle;
    {
      std::lock_guard lock(sessions_mu_);
      const Session& s = session_locked(*session_id);
      handle = from_original ? s.original_image : s.current_image;
    }
    source = images_.get(handle);
  } else if (auto handle = opt_string(body, "image_handle")) {
    source = images_.get(*handle);
  } else if (auto data = opt_string(body, "image")) {
    source = decode_png(base64_decode(*data));
  } else {
    throw Error(ErrorKind::kValidation, "request names no session, image handle or image");
  }

  ApplyResult result{std::string(), crowdgen::apply(source, op)};
  result.handle = images_.put(result.image);
  if (session_id) {
    std::lock_guard lock(sessions_mu_);
    Session& s = session_locked(*session_id);
    HistoryEntry h;
    h.kind = "apply";
    h.request = body;
    h.op = to_json(op);
    h.from_original = from_original;
    h.image_handle = result.handle;
    s.history.push_back(std::move(h));
    s.current_image = result.handle;
    persist_session(s);
  }
  return result;
}

json Engine::create_session(const json& raw) {
  const json body = require_object(raw);
  Session s;
  s.context = context_from(body, nullptr);
  if (auto handle = opt_string(body, "image_handle")) {
    images_.get_png(*handle);
    s.original_image = *handle;
  } else if (auto data = opt_string(body, "image")) {
    s.original_image = images_.put_png(base64_decode(*data));
  } else {
    throw Error(ErrorKind::kValidation, "a session needs an image or image_handle");
  }
  s.current_image = s.original_image;
  s.id = new_session_id();
  std::lock_guard lock(sessions_mu_);
  persist_session(s);
  json out = to_json(s);
  sessions_[s.id] = std::move(s);
  return out;
}

json Engine::get_session(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::kNotFound, "unknown session", {id});
  return to_json(it->second);
}

ImageBuffer Engine::replay_session(const std::string& id) const {
  Session s;
  {
    std::lock_guard lock(sessions_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorKind::kNotFound, "unknown session", {id});
    s = it->second;
  }
  const ImageBuffer original = images_.get(s.original_image);
  ImageBuffer img = original;
  for (const auto& h : s.history) {
    if (h.kind != "apply" || !h.op) continue;
    img = crowdgen::apply(h.from_original ? original : img, op_from_json(*h.op));
  }
  return img;
}

json Engine::library_summary() const {
  const auto lib = library_.snapshot();
  json tasks = json::array();
  for (const auto& t : lib->tasks) {
    json aspects = json::object();
    for (const auto& [aspect, responses] : t.responses) {
      const FrequencyTable f = aggregate_frequencies(t, aspect);
      json counts = json::object();
      for (const auto& [w, c] : f.counts) counts[std::string(to_string(w))] = c;
      aspects[std::string(to_string(aspect))] = {{"total", f.total}, {"counts", counts}};
    }
    json tags = json::array();
    for (auto tag : t.tags.to_vector()) tags.push_back(std::string(to_string(tag)));
    tasks.push_back({{"name", t.name}, {"description", t.description}, {"tags", tags}, {"aspects", aspects}});
  }
  return {{"version", lib->version}, {"responses", lib->response_count()}, {"tasks", tasks}};
}

json Engine::append_library_response(const json& raw) {
  const json body = require_object(raw);
  const auto task = opt_string(body, "task");
  const auto aspect_id = opt_string(body, "aspect");
  if (!task) bad_field("task", "required");
  if (!aspect_id) bad_field("aspect", "required");
  const auto aspect = aspect_from_id(*aspect_id);
  if (!aspect) bad_field("aspect", "unknown aspect");
  const json* resp = find(body, "response");
  if (!resp || !resp->is_object()) bad_field("response", "expected object");
  const auto rater = opt_string(*resp, "rater_id");
  const auto widget = opt_string(*resp, "widget");
  const auto reason = opt_string(*resp, "reason");
  if (!rater || !widget || !reason) bad_field("response", "needs rater_id, widget and reason strings");
  auto kind = widget_from_id(*widget);
  if (!kind) throw Error(ErrorKind::kConflict, "response names a widget outside the catalog", {*widget});
  library_.append(*task, *aspect, PreferenceResponse{*rater, *kind, *reason});
  const auto lib = library_.snapshot();
  const TaskRecord* t = lib->find(*task);
  return {{"task", *task}, {"aspect", *aspect_id}, {"total", aggregate_frequencies(*t, *aspect).total}};
}

json Engine::catalog() const {
  json out = catalog_json();
  out["tasks"] = bound_tasks();
  return out;
}

json Engine::study_plan(const json& raw) {
  const json body = require_object(raw);
  const json* n = find(body, "n");
  if (!n) bad_field("n", "required");
  const int count = int_field(body, "n", 0, 1, 100000);
  const std::uint64_t seed = seed_field(body, "seed", 0);
  StudyPlan plan = plan_study(count, seed);
  std::unique_lock lock(study_mu_);
  detail::write_atomic(config_.data_dir / "study" / "plan.json",
                       json{{"n", count}, {"seed", seed}}.dump() + "\n");
  plan_ = plan;
  plan_n_ = count;
  return to_json(plan);
}

namespace {

bool same_item(const ComparisonRecord& a, const ComparisonRecord& b) {
  return a.participant_id == b.participant_id && a.task == b.task && a.aspect == b.aspect && a.pair == b.pair;
}

void check_in_plan(const StudyPlan& plan, const ComparisonRecord& r) {
  const Assignment* a = plan.find(r.participant_id);
  if (!a) throw Error(ErrorKind::kConflict, "participant is not in the study plan", {r.participant_id});
  for (const auto& p : a->presentations)
    if (p.task == r.task && p.aspect == r.aspect && p.pair == r.pair) return;
  throw Error(ErrorKind::kConflict, "comparison is not part of the participant's assignment",
              {r.participant_id + ": " + r.task + "/" + std::string(to_string(r.aspect)) + "/" +
               r.pair.left.to_string() + "-vs-" + r.pair.right.to_string()});
}

}  // namespace

json Engine::study_record(const json& raw) {
  const ComparisonRecord r = comparison_record_from_json(require_object(raw));
  std::unique_lock lock(study_mu_);
  if (!plan_) throw Error(ErrorKind::kConflict, "no study plan has been created");
  check_in_plan(*plan_, r);
  for (const auto& existing : records_.snapshot())
    if (same_item(existing, r)) throw Error(ErrorKind::kConflict, "comparison already recorded", {r.participant_id});
  records_.append(r);
  return {{"recorded", to_json(r)}};
}

json Engine::study_simulate(const json& raw) {
  const json body = require_object(raw);
  const json* p = find(body, "p");
  if (!p || !p->is_number()) bad_field("p", "expected number in [0, 1]");
  const auto model = SimulatedRaterModel::constant(p->get<double>(), seed_field(body, "seed", 0));
  std::unique_lock lock(study_mu_);
  if (!plan_) throw Error(ErrorKind::kConflict, "no study plan has been created");
  const auto existing = records_.snapshot();
  int added = 0;
  for (const auto& r : simulate_raters(*plan_, model)) {
    bool dup = false;
    for (const auto& e : existing) dup = dup || same_item(e, r);
    if (dup) continue;
    records_.append(r);
    ++added;
  }
  return {{"recorded", added}};
}

std::vector<AnalysisRow> Engine::study_results(Grouping grouping) const {
  std::shared_lock lock(study_mu_);
  return analyze(records_.snapshot(), grouping);
}

}  // namespace crowdgen
