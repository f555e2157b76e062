#include <doctest.h>

#ifdef BETAINK_HAVE_OPENMP
#include <omp.h>
#endif

#include "betaink/parallel.hpp"
#include "betaink/synth_corpus.hpp"

using namespace betaink;

namespace {

struct ThreadScope {
  ThreadScope() {
#ifdef BETAINK_HAVE_OPENMP
    before = omp_get_max_threads();
    omp_set_num_threads(4);
#endif
  }
  ~ThreadScope() {
#ifdef BETAINK_HAVE_OPENMP
    omp_set_num_threads(before);
#endif
  }
  int before = 1;
};

const std::vector<InkTrace>& corpus() {
  static const std::vector<InkTrace> c = synth_corpus(default_digit_specs(), 4, 21);
  return c;
}

const std::vector<std::string>& classes() {
  static const std::vector<std::string> c = class_names(default_digit_specs());
  return c;
}

void same_samples(const std::vector<Sample>& a, const std::vector<Sample>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].length == b[i].length);
    REQUIRE(a[i].x.rows() == b[i].x.rows());
    CHECK(a[i].x == b[i].x);
  }
}

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("featurize_corpus matches the serial reference") {
  ThreadScope threads;
  CHECK(parallel_threads() >= 1);
  for (Pipeline p : {Pipeline::Raw, Pipeline::PerceptualBeta}) {
    const auto par = featurize_corpus(corpus(), p, FeatureConfig{}, classes());
    same_samples(par, featurize_corpus_serial(corpus(), p, FeatureConfig{}, classes()));
    CHECK(par[5].label == 1);
  }
  InkTrace odd = corpus()[0];
  odd.label = "q";
  const std::vector<InkTrace> bad{odd};
  CHECK_THROWS(featurize_corpus(bad, Pipeline::Perceptual, FeatureConfig{}, classes()));
}

TEST_CASE("batch gradient and predictions are bit-identical to serial") {
  ThreadScope threads;
  const auto samples = featurize_corpus(corpus(), Pipeline::PerceptualBeta, FeatureConfig{}, classes());
  for (bool ctc : {false, true}) {
    NetConfig nc;
    nc.input_dim = 14;
    nc.hidden_sizes = {8};
    nc.num_classes = 10;
    nc.dropout_p = 0.3;
    nc.use_ctc = ctc;
    const SeqNet net = make_net(nc);
    std::vector<Target> targets;
    std::vector<std::size_t> idx;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      targets.push_back(ctc ? Target::ctc({samples[i].label}) : Target::hard(samples[i].label));
      idx.push_back((i * 7) % samples.size());
      seeds.push_back(1000 + i);
    }
    const BatchGradient a = batch_gradient(net, samples, targets, idx, seeds);
    const BatchGradient b = batch_gradient_serial(net, samples, targets, idx, seeds);
    CHECK(a.loss_sum == b.loss_sum);
    CHECK(a.counted == b.counted);
    CHECK(a.correct == b.correct);
    CHECK(a.skipped == b.skipped);
    CHECK(a.grad.flatten() == b.grad.flatten());

    const auto pa = predict_all(net, samples), pb = predict_all_serial(net, samples);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].label == pb[i].label);
      CHECK(pa[i].log_confidence == pb[i].log_confidence);
      CHECK(pa[i].sequence == pb[i].sequence);
    }
  }
}

TEST_CASE("training does not depend on the thread count") {
  const auto samples = featurize_corpus(corpus(), Pipeline::Perceptual, FeatureConfig{}, classes());
  NetConfig nc;
  nc.input_dim = 4;
  nc.hidden_sizes = {8};
  nc.num_classes = 10;
  nc.dropout_p = 0.2;
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 8;
  SeqNet one = make_net(nc), many = make_net(nc);
#ifdef BETAINK_HAVE_OPENMP
  omp_set_num_threads(1);
#endif
  train(one, samples, tc);
  {
    ThreadScope threads;
    train(many, samples, tc);
  }
  CHECK(one.flatten() == many.flatten());
}

}  // TEST_SUITE
