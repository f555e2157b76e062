#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaink/features.hpp"
#include "betaink/model_io.hpp"

namespace betaink {

/// Full recognition pipeline for one trained model. Stateless and safe to
/// share between threads.
class Recognizer {
 public:
  explicit Recognizer(Model model);

  /// {label, confidence, log_confidence, strokes: [...], bpc: [{name, span}],
  ///  equation}. Throws ValidationError / FeatureError on unusable ink.
  nlohmann::ordered_json recognize(const InkTrace& trace) const;

  /// Stroke records of the segmentation alone (no classification).
  nlohmann::ordered_json stroke_records(const Analysis& a) const;

  const Model& model() const { return model_; }

 private:
  Model model_;
};

/// BPC spans for a whole sequence, composed per pen-down stroke.
std::vector<BpcSpan> compose_sequence(const PerceptualSequence& seq);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Request handling, independent of the transport.
///   GET  /health                  version and loaded models
///   POST /recognize[?model=NAME]  body: one JSON ink trace object
///   POST /stream?session=ID       body: a point {x,y,t,pen}, an array of
///                                 points, or {"end":true}
/// Stream replies carry the stroke records of pen-down runs completed since
/// the previous reply; the reply to the end frame is the /recognize payload
/// of all points received, plus "session" and "done": true.
class RecognitionService {
 public:
  struct Options {
    std::size_t max_sessions = 64;
    std::size_t max_points_per_session = 200000;
  };

  RecognitionService(std::vector<std::pair<std::string, Model>> models, Options opts);
  explicit RecognitionService(std::vector<std::pair<std::string, Model>> models)
      : RecognitionService(std::move(models), Options{}) {}

  HttpReply health() const;
  HttpReply recognize(const std::string& body, const std::string& model_name = "") const;
  HttpReply stream(const std::string& session, const std::string& body,
                   const std::string& model_name = "");

  std::size_t open_sessions() const;

 private:
  struct Session {
    std::vector<InkPoint> points;
    std::size_t reported_runs = 0;
    std::string model;
  };

  const Recognizer* find(const std::string& name) const;

  std::vector<std::pair<std::string, std::unique_ptr<Recognizer>>> models_;
  Options opts_;
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
};

/// HTTP front end on top of RecognitionService.
class HttpServer {
 public:
  explicit HttpServer(RecognitionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the port,
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Call after bind.
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace betaink
