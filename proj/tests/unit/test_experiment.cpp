#include <doctest.h>

#include <filesystem>

#include "betaink/experiment.hpp"
#include "betaink/synth_corpus.hpp"

using namespace betaink;

namespace {

const std::vector<InkTrace>& corpus() {
  static const std::vector<InkTrace> c = synth_corpus(default_digit_specs(), 10, 5);
  return c;
}

const std::vector<std::string>& classes() {
  static const std::vector<std::string> c = class_names(default_digit_specs());
  return c;
}

ExperimentConfig quick() {
  ExperimentConfig c;
  c.pipeline = Pipeline::Perceptual;
  c.net.hidden_sizes = {12};
  c.train.epochs = 4;
  c.train.batch_size = 8;
  c.split = 0.7;
  return c;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("stratified split") {
  const auto [train, test] = stratified_split(corpus(), classes(), 0.7, 3);
  CHECK(train.size() == 70);
  CHECK(test.size() == 30);
  CHECK(std::is_sorted(train.begin(), train.end()));
  CHECK(std::is_sorted(test.begin(), test.end()));
  std::vector<int> per(10, 0);
  for (std::size_t i : train) ++per[i / 10];
  for (int n : per) CHECK(n == 7);
  std::vector<std::size_t> all(train);
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(stratified_split(corpus(), classes(), 0.7, 3).first == train);
  CHECK(stratified_split(corpus(), classes(), 0.7, 4).first != train);
}

TEST_CASE("split errors") {
  CHECK_THROWS(stratified_split(corpus(), classes(), 1.0, 1));
  CHECK_THROWS(stratified_split(corpus(), classes(), 0.0, 1));
  auto unlabeled = corpus();
  unlabeled[3].label.reset();
  CHECK_THROWS_WITH(stratified_split(unlabeled, classes(), 0.5, 1), doctest::Contains("trace 3"));
  auto unknown = corpus();
  unknown[4].label = "Q";
  CHECK_THROWS_WITH(stratified_split(unknown, classes(), 0.5, 1), doctest::Contains("'Q'"));
  // One sample of "0" leaves no training sample for it at a small split.
  std::vector<InkTrace> thin(corpus().begin() + 9, corpus().end());
  ExperimentConfig c = quick();
  c.split = 0.3;
  CHECK_THROWS(run_experiment(thin, classes(), c));
}

TEST_CASE("reports are reproducible and consistent") {
  ExperimentConfig c = quick();
  c.augment_multiplier = 2;
  NoiseSpec n;
  n.sigma = 0.01;
  c.noise = n;
  const EvalReport a = run_experiment(corpus(), classes(), c);
  const EvalReport b = run_experiment(corpus(), classes(), c);
  CHECK(report_string(a) == report_string(b));
  CHECK(a.train_size == 140);
  CHECK(a.test_size == 30);
  CHECK(a.training_log.size() == 4);
  std::size_t trace = 0, total = 0;
  for (std::size_t i = 0; i < a.confusion.size(); ++i) {
    for (std::size_t j = 0; j < a.confusion[i].size(); ++j) total += a.confusion[i][j];
    trace += a.confusion[i][i];
  }
  CHECK(total == a.test_size);
  CHECK(a.recognition_rate == doctest::Approx(static_cast<double>(trace) / static_cast<double>(total)));
  CHECK(a.per_class_rates.size() == 10);
  const auto j = report_to_json(a);
  CHECK(j["pipeline"] == "perceptual");
  CHECK(j.contains("config"));
  c.seed = 2;
  CHECK(report_string(run_experiment(corpus(), classes(), c)) != report_string(a));
}

TEST_CASE("saved models reproduce the report") {
  Model m;
  const EvalReport r = run_experiment(corpus(), classes(), quick(), &m);
  const auto path = std::filesystem::temp_directory_path() / "betaink_test_model.json";
  save_model(m, path);
  const Model back = load_model(path);
  std::filesystem::remove(path);
  CHECK(back.net.flatten() == m.net.flatten());
  CHECK(back.classes == m.classes);
  CHECK(back.pipeline == m.pipeline);
  CHECK(model_to_json(back).dump() == model_to_json(m).dump());

  const auto [train, test] = stratified_split(corpus(), classes(), 0.7, 1);
  std::vector<InkTrace> held;
  for (std::size_t i : test) held.push_back(corpus()[i]);
  const EvalReport again = evaluate(back, held);
  CHECK(again.recognition_rate == r.recognition_rate);
  CHECK(again.confusion == r.confusion);
  CHECK_THROWS(load_model("/nonexistent/model.json"));
  CHECK_THROWS(model_from_json(nlohmann::json{{"format", "other"}}));
}

TEST_CASE("fuzzy CTC configuration is rejected") {
  ExperimentConfig c = quick();
  c.net.use_ctc = true;
  c.train.mode = TrainMode::Fuzzy;
  CHECK_THROWS(run_experiment(corpus(), classes(), c));
}

}  // TEST_SUITE
