#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "crowdgen/image_ops.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs a shell line from the source tree and captures stdout.
Run shell(const std::string& line) {
  const std::string cmd = "cd '" + testing::source_dir().string() + "' && " + line;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int raw = ::pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

Run run(const std::string& args) { return shell("'" CROWDGEN_CLI "' " + args); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("reason prints a JSON payload") {
  testing::TempDir dir;
  const auto task_file = dir.path() / "t.json";
  std::ofstream(task_file) << R"({"name":"image_adjust_tint","description":"Adjust the image tint"})";
  const auto r = run("reason --task-file '" + task_file.string() +
                     "' --mode withlib30 --k 10 --backend oracle --seed 1 2>/dev/null");
  CHECK(r.status == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["recommendations"].size() == 3);
  CHECK(doc["k"] == 10);
  CHECK(run("reason --task-file '" + task_file.string() + "' --mode withlib30 --k 10 --backend oracle --seed 1")
            .out == r.out);
}

TEST_CASE("library validate reports violation paths") {
  CHECK(run("library validate data/library/fixture.json").status == 0);
  const auto bad = run("library validate data/library/malformed/unknown_widget.json 2>&1");
  CHECK(bad.status == 2);
  CHECK(bad.out.find("tasks[2].responses.efficiency[4].widget") != std::string::npos);
  CHECK(run("library validate data/library/nope.json 2>/dev/null").status == 4);
}

TEST_CASE("simulate piped into analyze") {
  const auto r = run("study simulate --p 0.8 --n 78 --seed 42 | '" CROWDGEN_CLI
                     "' study analyze --group-by aspect-pair --format csv");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("aspect,left,right,count_left,count_right,chi2,p,stars\n", 0) == 0);
  int rows = 0, starred = 0;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    starred += line.back() != '0';
  }
  CHECK(rows == 18);
  CHECK(starred > 0);
}

TEST_CASE("apply writes the edited image") {
  testing::TempDir dir;
  const auto out = dir.path() / "o.png";
  const auto r = run(R"(apply --in data/images/landscape_64.png --out ')" + out.string() +
                     R"(' --op '{"op":"hue","h":0.2}')");
  CHECK(r.status == 0);
  CHECK(crowdgen::read_png(out) == crowdgen::read_png(testing::data_path("golden/landscape_64_hue_0.2.png")));
  CHECK(run(R"(apply --in data/images/landscape_64.png --out ')" + out.string() +
            R"(' --op '{"op":"hue","h":4}' 2>/dev/null)").status == 2);
}

TEST_CASE("widgets and emit") {
  const auto w = run("widgets --task image_adjust_hue --kinds slider,preset_buttons");
  CHECK(w.status == 0);
  CHECK(json::parse(w.out)["specs"].size() == 2);
  const auto e = run("emit --task image_adjust_hue --kinds dropdown");
  CHECK(e.status == 0);
  CHECK(e.out.find("widgets.Dropdown(options=[0.0, 0.2, 0.4, 0.6, 0.8], value=0.0)") != std::string::npos);
  const auto p = run("emit --task image_adjust_hue --kinds slider --prompt-example data/codegen/hue_example.py");
  CHECK(p.status == 0);
  CHECK(p.out.find("widget_type") != std::string::npos);
  CHECK(run("widgets --task image_place_watermark --kinds color_wheel 2>/dev/null").status != 0);
}

TEST_CASE("llm backend without a key exits with the backend code") {
  const auto r = shell("env -u CROWDGEN_LLM_KEY '" CROWDGEN_CLI "' reason --task image_adjust_tint --backend llm 2>&1");
  CHECK(r.status == 3);
  CHECK(json::parse(r.out)["error"]["kind"] == "backend");
}

TEST_CASE("bad arguments exit with the validation code") {
  CHECK(run("study plan 2>/dev/null").status == 2);
  CHECK(run("frobnicate 2>/dev/null").status == 2);
}

}
