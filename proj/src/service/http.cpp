#include <httplib.h>

#include "crowdgen/error.hpp"
#include "crowdgen/service.hpp"

namespace crowdgen {

using nlohmann::json;

json error_json(const Error& e) {
  return {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}, {"details", e.details()}}}};
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, error_json(e), http_status(e.kind())); }

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::kValidation, "request body is not valid JSON");
  return doc;
}

bool wants_png(const httplib::Request& req) {
  const std::string accept = req.get_header_value("Accept");
  return accept.find("image/png") != std::string::npos && accept.find("application/json") == std::string::npos;
}

// Runs a handler and maps every failure onto the error body.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorKind::kValidation, std::string("malformed request: ") + e.what()));
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorKind::kIo, std::string("internal error: ") + e.what()));
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  Engine& engine;
  httplib::Server server;

  explicit Impl(Engine& e) : engine(e) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Expose-Headers", "X-Image-Handle"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Accept");
      res.status = 204;
    });

    server.Get("/v1/health", guarded([](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"status", "ok"}, {"spec_version", kSpecVersion}});
    }));
    server.Get("/v1/config", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, to_json(engine.config()));
    }));
    server.Post("/v1/reason", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.reason(parse_body(req)));
    }));
    server.Post("/v1/widgets", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.widgets(parse_body(req)));
    }));
    server.Post("/v1/emit", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.emit(parse_body(req)));
    }));

    server.Post("/v1/image/apply", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto result = engine.apply_image(parse_body(req));
      const auto png = encode_png(result.image);
      if (wants_png(req)) {
        res.set_header("X-Image-Handle", result.handle);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
        return;
      }
      send_json(res, {{"image_handle", result.handle},
                      {"width", result.image.width},
                      {"height", result.image.height},
                      {"image", base64_encode(png)}});
    }));
    server.Post("/v1/images", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::string handle;
      if (req.get_header_value("Content-Type") == "image/png") {
        handle = engine.images().put_png(
            std::span(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()));
      } else {
        const json body = parse_body(req);
        if (!body.contains("image") || !body["image"].is_string())
          throw Error(ErrorKind::kValidation, "expected a PNG body or {\"image\": base64}");
        handle = engine.images().put_png(base64_decode(body["image"].get<std::string>()));
      }
      send_json(res, {{"image_handle", handle}}, 201);
    }));
    server.Get(R"(/v1/images/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto png = engine.images().get_png(req.matches[1]);
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    }));

    server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.create_session(parse_body(req)), 201);
    }));
    server.Get(R"(/v1/sessions/([\w-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.get_session(req.matches[1]));
    }));
    server.Get(R"(/v1/sessions/([\w-]+)/replay)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const ImageBuffer replayed = engine.replay_session(id);
                 const std::string current = engine.get_session(id).at("current_image");
                 const std::string handle = engine.images().put(replayed);
                 send_json(res, {{"image_handle", handle}, {"matches_current", handle == current}});
               }));

    server.Get("/v1/library", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, engine.library_summary());
    }));
    server.Post("/v1/library/responses", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.append_library_response(parse_body(req)), 201);
    }));
    server.Get("/v1/catalog", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, engine.catalog());
    }));

    server.Post("/v1/study/plan", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.study_plan(parse_body(req)), 201);
    }));
    server.Post("/v1/study/record", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.study_record(parse_body(req)), 201);
    }));
    server.Post("/v1/study/simulate", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, engine.study_simulate(parse_body(req)), 201);
    }));
    server.Get("/v1/study/results", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Grouping g = grouping_from_string(
          req.has_param("group_by") ? req.get_param_value("group_by") : "aspect-pair");
      const auto rows = engine.study_results(g);
      if (req.get_param_value("format") == "csv") {
        res.set_content(analysis_csv(rows, g), "text/csv");
        return;
      }
      send_json(res, analysis_json(rows, g));
    }));
  }
};

HttpServer::HttpServer(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }

}  // namespace crowdgen
