#include "betaink/experiment.hpp"

#include <algorithm>
#include <stdexcept>

#include "betaink/parallel.hpp"
#include "betaink/random.hpp"

namespace betaink {

using ojson = nlohmann::ordered_json;

namespace {

int class_index(const std::vector<std::string>& classes, const InkTrace& t, std::size_t i) {
  if (!t.label) throw std::invalid_argument("trace " + std::to_string(i) + " has no label");
  const auto it = std::find(classes.begin(), classes.end(), *t.label);
  if (it == classes.end()) {
    throw std::invalid_argument("trace " + std::to_string(i) + " has unknown label '" + *t.label +
                                "'");
  }
  return static_cast<int>(it - classes.begin());
}

void score(EvalReport& r, const SeqNet& net, std::span<const Sample> test) {
  const std::size_t C = r.classes.size();
  r.confusion.assign(C, std::vector<std::size_t>(C, 0));
  const std::vector<Prediction> preds = predict_all(net, test);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    int p = net.config.use_ctc ? (preds[i].sequence.size() == 1 ? preds[i].sequence[0] : -1)
                               : preds[i].label;
    // An empty or multi-symbol CTC decoding counts as the first wrong class.
    const auto truth = static_cast<std::size_t>(test[i].label);
    if (p < 0) p = truth == 0 ? 1 : 0;
    ++r.confusion[truth][static_cast<std::size_t>(p)];
    if (static_cast<std::size_t>(p) == truth) ++hits;
  }
  r.per_class_rates.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    std::size_t row = 0;
    for (std::size_t v : r.confusion[c]) row += v;
    r.per_class_rates[c] = row > 0 ? static_cast<double>(r.confusion[c][c]) / static_cast<double>(row) : 0.0;
  }
  r.test_size = test.size();
  r.recognition_rate = test.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(test.size());
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const InkTrace> corpus, const std::vector<std::string>& classes, double split,
    std::uint64_t seed) {
  if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("split must lie in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(classes.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_class[static_cast<std::size_t>(class_index(classes, corpus[i], i))].push_back(i);
  }
  std::vector<std::size_t> train, test;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& idx = by_class[c];
    Rng rng(derive_seed({seed, 0x53504c4954ULL, c}));
    rng.shuffle(idx.begin(), idx.end());
    const auto n_train = static_cast<std::size_t>(std::llround(split * static_cast<double>(idx.size())));
    if (n_train == 0) {
      throw std::invalid_argument("class '" + classes[c] + "' has no training sample after the split");
    }
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

ojson experiment_config_to_json(const ExperimentConfig& cfg) {
  ojson j;
  j["pipeline"] = pipeline_name(cfg.pipeline);
  j["net"] = net_config_to_json(cfg.net);
  j["train"] = train_config_to_json(cfg.train);
  j["features"] = feature_config_to_json(cfg.features);
  j["split"] = cfg.split;
  j["augment_multiplier"] = cfg.augment_multiplier;
  j["augment"] = {{"rotate_deg_max", cfg.augment.rotate_deg_max},
                  {"scale_lo", cfg.augment.scale_lo},
                  {"scale_hi", cfg.augment.scale_hi},
                  {"translate_frac", cfg.augment.translate_frac},
                  {"jiggle_sigma", cfg.augment.jiggle_sigma},
                  {"flips", cfg.augment.flips},
                  {"seed", cfg.augment.seed}};
  if (cfg.noise) {
    j["noise"] = {{"kind", noise_kind_name(cfg.noise->kind)},
                  {"sigma", cfg.noise->sigma},
                  {"tremble_hz", cfg.noise->tremble_hz},
                  {"apply_to", noise_target_name(cfg.noise->apply_to)}};
  } else {
    j["noise"] = nullptr;
  }
  j["seed"] = cfg.seed;
  return j;
}

EvalReport run_experiment(std::span<const InkTrace> corpus, const std::vector<std::string>& classes,
                          const ExperimentConfig& cfg, Model* trained) {
  if (classes.size() < 2) throw std::invalid_argument("an experiment needs at least 2 classes");
  const auto [train_idx, test_idx] = stratified_split(corpus, classes, cfg.split, cfg.seed);

  std::vector<InkTrace> train_set, test_set;
  for (std::size_t i : train_idx) train_set.push_back(corpus[i]);
  for (std::size_t i : test_idx) test_set.push_back(corpus[i]);
  if (cfg.augment_multiplier > 1) {
    train_set = expand_corpus(train_set, cfg.augment, cfg.augment_multiplier);
  }
  if (cfg.noise) {
    if (cfg.noise->applies_to_train()) {
      train_set = add_noise(train_set, *cfg.noise, derive_seed({cfg.seed, 1}));
    }
    if (cfg.noise->applies_to_test()) {
      test_set = add_noise(test_set, *cfg.noise, derive_seed({cfg.seed, 2}));
    }
  }

  const std::vector<Sample> train_samples =
      featurize_corpus(train_set, cfg.pipeline, cfg.features, classes);
  const std::vector<Sample> test_samples =
      featurize_corpus(test_set, cfg.pipeline, cfg.features, classes);

  NetConfig nc = cfg.net;
  nc.input_dim = pipeline_input_dim(cfg.pipeline);
  nc.num_classes = static_cast<int>(classes.size());
  SeqNet net = make_net(nc);
  const TrainResult tr = train(net, train_samples, cfg.train);

  EvalReport r;
  r.pipeline = pipeline_name(cfg.pipeline);
  r.mode = train_mode_name(cfg.train.mode);
  r.classes = classes;
  r.train_size = train_samples.size();
  r.seed = cfg.seed;
  ExperimentConfig echo = cfg;
  echo.net = nc;
  r.config = experiment_config_to_json(echo);
  r.training_log = tr.log;
  score(r, net, test_samples);

  if (trained != nullptr) {
    trained->net = std::move(net);
    trained->pipeline = cfg.pipeline;
    trained->features = cfg.features;
    trained->classes = classes;
    trained->train = cfg.train;
    trained->training_log = tr.log;
  }
  return r;
}

EvalReport evaluate(const Model& model, std::span<const InkTrace> corpus) {
  const std::vector<Sample> test =
      featurize_corpus(corpus, model.pipeline, model.features, model.classes);
  EvalReport r;
  r.pipeline = pipeline_name(model.pipeline);
  r.mode = train_mode_name(model.train.mode);
  r.classes = model.classes;
  r.seed = model.train.seed;
  r.config = {{"net", net_config_to_json(model.net.config)},
              {"features", feature_config_to_json(model.features)}};
  r.training_log = model.training_log;
  score(r, model.net, test);
  return r;
}

ojson report_to_json(const EvalReport& r) {
  ojson j;
  j["pipeline"] = r.pipeline;
  j["mode"] = r.mode;
  j["classes"] = r.classes;
  j["recognition_rate"] = r.recognition_rate;
  j["confusion"] = r.confusion;
  j["per_class_rates"] = r.per_class_rates;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["seed"] = r.seed;
  j["config"] = r.config;
  ojson log = ojson::array();
  for (const EpochMetrics& e : r.training_log) {
    log.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"accuracy", e.accuracy},
                   {"skipped", e.skipped}});
  }
  j["training_log"] = std::move(log);
  return j;
}

std::string report_string(const EvalReport& r) { return report_to_json(r).dump(2) + "\n"; }

}  // namespace betaink
