#include "betaink/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "betaink/ink.hpp"

namespace betaink {

using ojson = nlohmann::ordered_json;

ojson net_config_to_json(const NetConfig& c) {
  ojson j;
  j["input_dim"] = c.input_dim;
  j["hidden_sizes"] = c.hidden_sizes;
  j["num_classes"] = c.num_classes;
  j["use_ctc"] = c.use_ctc;
  j["dropout_p"] = c.dropout_p;
  j["seed"] = c.seed;
  return j;
}

NetConfig net_config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.input_dim = j.at("input_dim").get<int>();
  c.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  c.num_classes = j.at("num_classes").get<int>();
  c.use_ctc = j.at("use_ctc").get<bool>();
  c.dropout_p = j.at("dropout_p").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

ojson train_config_to_json(const TrainConfig& c) {
  ojson j;
  j["mode"] = train_mode_name(c.mode);
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["grad_clip"] = c.grad_clip;
  j["fuzzy_alpha"] = c.fuzzy_alpha;
  j["fuzzy_tau"] = c.fuzzy_tau;
  j["seed"] = c.seed;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.mode = train_mode_from_name(j.at("mode").get<std::string>());
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.fuzzy_alpha = j.at("fuzzy_alpha").get<double>();
  c.fuzzy_tau = j.at("fuzzy_tau").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

ojson feature_config_to_json(const FeatureConfig& c) {
  ojson j;
  j["resample_hz"] = c.preprocess.resample_hz;
  j["filter_order"] = c.preprocess.filter_order;
  j["filter_ripple_db"] = c.preprocess.filter_ripple_db;
  j["filter_cutoff_hz"] = c.preprocess.filter_cutoff_hz;
  j["dehook_arc_fraction"] = c.preprocess.dehook_arc_fraction;
  j["dehook_angle_deg"] = c.preprocess.dehook_angle_deg;
  j["normalize_height"] = c.preprocess.normalize_height;
  j["decimate"] = c.decimate;
  return j;
}

FeatureConfig feature_config_from_json(const nlohmann::json& j) {
  FeatureConfig c;
  c.preprocess.resample_hz = j.at("resample_hz").get<double>();
  c.preprocess.filter_order = j.at("filter_order").get<int>();
  c.preprocess.filter_ripple_db = j.at("filter_ripple_db").get<double>();
  c.preprocess.filter_cutoff_hz = j.at("filter_cutoff_hz").get<double>();
  c.preprocess.dehook_arc_fraction = j.at("dehook_arc_fraction").get<double>();
  c.preprocess.dehook_angle_deg = j.at("dehook_angle_deg").get<double>();
  c.preprocess.normalize_height = j.at("normalize_height").get<double>();
  c.decimate = j.at("decimate").get<int>();
  c.preprocess.validate();
  return c;
}

ojson model_to_json(const Model& m) {
  ojson j;
  j["format"] = "betaink.seqnet";
  j["version"] = 1;
  j["config"] = net_config_to_json(m.net.config);
  j["pipeline"] = pipeline_name(m.pipeline);
  j["features"] = feature_config_to_json(m.features);
  j["classes"] = m.classes;
  j["train"] = train_config_to_json(m.train);
  j["parameters"] = m.net.flatten();
  ojson log = ojson::array();
  for (const EpochMetrics& e : m.training_log) {
    log.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"accuracy", e.accuracy},
                   {"skipped", e.skipped}});
  }
  j["training_log"] = std::move(log);
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "betaink.seqnet") {
    throw std::invalid_argument("not a betaink.seqnet model file");
  }
  if (j.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported model version " + j.at("version").dump());
  }
  Model m;
  m.net = make_net(net_config_from_json(j.at("config")));
  m.pipeline = pipeline_from_name(j.at("pipeline").get<std::string>());
  if (pipeline_input_dim(m.pipeline) != m.net.config.input_dim) {
    throw std::invalid_argument("model input_dim does not match its pipeline");
  }
  m.features = feature_config_from_json(j.at("features"));
  m.classes = j.at("classes").get<std::vector<std::string>>();
  if (static_cast<int>(m.classes.size()) != m.net.config.num_classes) {
    throw std::invalid_argument("model class list does not match num_classes");
  }
  m.train = train_config_from_json(j.at("train"));
  m.net.unflatten(j.at("parameters").get<std::vector<double>>());
  for (const auto& e : j.at("training_log")) {
    m.training_log.push_back({e.at("epoch").get<int>(), e.at("loss").get<double>(),
                              e.at("accuracy").get<double>(), e.at("skipped").get<std::size_t>()});
  }
  return m;
}

void save_model(const Model& m, const std::filesystem::path& path) {
  write_file(path.string(), model_to_json(m).dump(1) + "\n");
}

Model load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace betaink
