#include "betaink/service.hpp"

#include <stdexcept>

#include <httplib.h>

#include "betaink/ink.hpp"
#include "betaink/perceptual.hpp"
#include "betaink/records.hpp"

namespace betaink {

using ojson = nlohmann::ordered_json;

namespace {

ojson error_json(const std::string& msg) { return {{"error", msg}}; }

HttpReply reply(int status, const ojson& j) { return {status, j.dump()}; }

std::string join_labels(const std::vector<int>& seq, const std::vector<std::string>& classes) {
  std::string s;
  for (int k : seq) s += classes.at(static_cast<std::size_t>(k));
  return s;
}

}  // namespace

std::vector<BpcSpan> compose_sequence(const PerceptualSequence& seq) {
  std::vector<BpcSpan> out;
  const std::vector<Epc> epcs = seq.dominant_epcs();
  std::size_t begin = 0;
  while (begin < epcs.size()) {
    std::size_t end = begin;
    while (end < epcs.size() && seq.items[end].pen_stroke == seq.items[begin].pen_stroke) ++end;
    for (BpcSpan s : compose_bpc(std::span<const Epc>(epcs).subspan(begin, end - begin))) {
      s.begin += begin;
      s.end += begin;
      out.push_back(s);
    }
    begin = end;
  }
  return out;
}

Recognizer::Recognizer(Model model) : model_(std::move(model)) {}

ojson Recognizer::stroke_records(const Analysis& a) const {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < a.segmentation.strokes.size(); ++i) {
    arr.push_back(stroke_record(a.segmentation.strokes[i], a.sequence.items[i]));
  }
  return arr;
}

ojson Recognizer::recognize(const InkTrace& trace) const {
  const Analysis a = analyze(trace, model_.features, true);
  Sample s;
  if (model_.pipeline == Pipeline::Perceptual || model_.pipeline == Pipeline::PerceptualBeta) {
    s = features_from_analysis(a, model_.pipeline);
  } else {
    s = featurize(trace, model_.pipeline, model_.features);
  }
  const Prediction p = predict(model_.net, s.x);
  const std::vector<BpcSpan> spans = compose_sequence(a.sequence);

  ojson out;
  if (model_.net.config.use_ctc) {
    out["label"] = join_labels(p.sequence, model_.classes);
  } else {
    out["label"] = model_.classes.at(static_cast<std::size_t>(p.label));
  }
  out["confidence"] = p.confidence;
  out["log_confidence"] = p.log_confidence;
  out["strokes"] = stroke_records(a);
  ojson bpc = ojson::array();
  for (const BpcSpan& sp : spans) {
    bpc.push_back({{"name", std::string(bpc_name(sp.bpc))}, {"span", {sp.begin, sp.end}}});
  }
  out["bpc"] = std::move(bpc);
  out["equation"] = handwriting_equation(a.sequence, spans);
  out["warnings"] = a.segmentation.warnings;
  return out;
}

RecognitionService::RecognitionService(std::vector<std::pair<std::string, Model>> models,
                                       Options opts)
    : opts_(opts) {
  if (models.empty()) throw std::invalid_argument("the service needs at least one model");
  for (auto& [name, m] : models) {
    models_.emplace_back(name, std::make_unique<Recognizer>(std::move(m)));
  }
}

const Recognizer* RecognitionService::find(const std::string& name) const {
  if (name.empty()) return models_.front().second.get();
  for (const auto& [n, r] : models_) {
    if (n == name) return r.get();
  }
  return nullptr;
}

HttpReply RecognitionService::health() const {
  ojson j;
  j["status"] = "ok";
  j["version"] = BETAINK_VERSION;
  ojson ms = ojson::array();
  for (const auto& [n, r] : models_) {
    ms.push_back({{"name", n},
                  {"pipeline", pipeline_name(r->model().pipeline)},
                  {"classes", r->model().classes}});
  }
  j["models"] = std::move(ms);
  return reply(200, j);
}

namespace {

HttpReply run_recognizer(const Recognizer& rec, const InkTrace& trace, ojson extra = {}) {
  try {
    ojson payload = rec.recognize(trace);
    for (auto it = extra.begin(); it != extra.end(); ++it) payload[it.key()] = it.value();
    return reply(200, payload);
  } catch (const ValidationError& e) {
    return reply(400, error_json(e.what()));
  } catch (const FeatureError& e) {
    return reply(422, error_json(e.what()));
  } catch (const std::exception& e) {
    return reply(500, error_json(std::string("recognition failed: ") + e.what()));
  }
}

InkPoint point_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("point message must be an object");
  for (const char* k : {"x", "y", "t", "pen"}) {
    if (!j.contains(k) || !j[k].is_number()) {
      throw ValidationError(std::string("point message needs numeric field '") + k + "'");
    }
  }
  const double pen = j["pen"].get<double>();
  if (pen != 0.0 && pen != 1.0) throw ValidationError("pen must be 0 or 1");
  return {j["x"].get<double>(), j["y"].get<double>(), j["t"].get<double>(), pen == 1.0 ? 1 : 0};
}

}  // namespace

HttpReply RecognitionService::recognize(const std::string& body,
                                        const std::string& model_name) const {
  const Recognizer* rec = find(model_name);
  if (rec == nullptr) return reply(404, error_json("unknown model '" + model_name + "'"));
  std::vector<InkTrace> traces;
  try {
    nlohmann::json j = nlohmann::json::parse(body);
    if (j.is_object()) j = nlohmann::json::array({j});
    if (!j.is_array() || j.size() != 1) {
      return reply(400, error_json("body must be one ink trace object"));
    }
    traces = parse_ink(j.dump(), InkFormat::Json);
  } catch (const nlohmann::json::exception& e) {
    return reply(400, error_json(std::string("malformed JSON: ") + e.what()));
  } catch (const ParseError& e) {
    return reply(400, error_json(e.what()));
  } catch (const ValidationError& e) {
    return reply(400, error_json(e.what()));
  }
  return run_recognizer(*rec, traces.front());
}

HttpReply RecognitionService::stream(const std::string& session, const std::string& body,
                                     const std::string& model_name) {
  if (session.empty()) return reply(400, error_json("missing session parameter"));
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    return reply(400, error_json(std::string("malformed JSON: ") + e.what()));
  }
  const bool end = msg.is_object() && msg.value("end", false);
  std::vector<InkPoint> incoming;
  if (!end) {
    try {
      if (msg.is_array()) {
        for (const auto& m : msg) incoming.push_back(point_from_json(m));
      } else {
        incoming.push_back(point_from_json(msg));
      }
    } catch (const std::exception& e) {
      return reply(400, error_json(e.what()));
    }
  }

  Session snapshot;
  std::size_t already = 0;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session);
    if (it == sessions_.end()) {
      if (end) return reply(404, error_json("unknown session '" + session + "'"));
      if (sessions_.size() >= opts_.max_sessions) {
        return reply(429, error_json("too many open sessions"));
      }
      if (find(model_name) == nullptr) {
        return reply(404, error_json("unknown model '" + model_name + "'"));
      }
      it = sessions_.emplace(session, Session{{}, 0, model_name}).first;
    }
    Session& s = it->second;
    if (s.points.size() + incoming.size() > opts_.max_points_per_session) {
      return reply(413, error_json("session point limit exceeded"));
    }
    s.points.insert(s.points.end(), incoming.begin(), incoming.end());
    snapshot = s;
    already = s.reported_runs;
    if (end) sessions_.erase(it);
  }

  const Recognizer* rec = find(snapshot.model);
  InkTrace trace;
  trace.points = snapshot.points;
  if (end) {
    try {
      trace = canonicalize(std::move(trace));
    } catch (const ValidationError& e) {
      return reply(400, error_json(e.what()));
    }
    return run_recognizer(*rec, trace, {{"session", session}, {"done", true}});
  }

  ojson out;
  out["session"] = session;
  out["done"] = false;
  out["points"] = snapshot.points.size();
  out["strokes"] = ojson::array();
  std::size_t completed = 0;
  try {
    trace = canonicalize(std::move(trace));
    const std::vector<PenStroke> runs = split_pen_strokes(trace);
    for (const PenStroke& r : runs) {
      if (r.end < trace.points.size()) ++completed;
    }
    if (completed > already) {
      InkTrace head;
      head.points.assign(trace.points.begin(),
                         trace.points.begin() + static_cast<std::ptrdiff_t>(runs[completed - 1].end));
      const Analysis a = analyze(head, rec->model().features, true);
      ojson& strokes = out["strokes"];
      for (std::size_t i = 0; i < a.segmentation.strokes.size(); ++i) {
        if (a.segmentation.strokes[i].pen_stroke >= already) {
          strokes.push_back(stroke_record(a.segmentation.strokes[i], a.sequence.items[i]));
        }
      }
    }
  } catch (const ValidationError& e) {
    return reply(400, error_json(e.what()));
  } catch (const FeatureError&) {
    // No stroke yet in the completed runs; report none.
  } catch (const std::exception& e) {
    return reply(500, error_json(std::string("segmentation failed: ") + e.what()));
  }
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session);
    if (it != sessions_.end()) it->second.reported_runs = std::max(it->second.reported_runs, completed);
  }
  return reply(200, out);
}

std::size_t RecognitionService::open_sessions() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

struct HttpServer::Impl {
  explicit Impl(RecognitionService& s) : service(s) {}
  RecognitionService& service;
  httplib::Server server;
};

HttpServer::HttpServer(RecognitionService& service)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.Get("/health", [&svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc.health());
  });
  srv.Post("/recognize", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.recognize(req.body, req.get_param_value("model")));
  });
  srv.Post("/stream", [&svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.stream(req.get_param_value("session"), req.body, req.get_param_value("model")));
  });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace betaink
