#include "betaink/parallel.hpp"

#include "betaink/ctc.hpp"

#include <algorithm>
#include <exception>

#ifdef BETAINK_HAVE_OPENMP
#include <omp.h>
#endif

namespace betaink {

namespace {

// Runs body(i) for i in [0, n), in parallel when enabled. The first failure
// by index is rethrown after the loop.
template <class F>
void run_indexed(std::size_t n, bool parallel, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
  if (parallel) {
#ifdef BETAINK_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

BatchGradient batch_gradient_impl(const SeqNet& net, std::span<const Sample> samples,
                                  std::span<const Target> targets,
                                  std::span<const std::size_t> indices,
                                  std::span<const std::uint64_t> seeds, bool parallel) {
  if (seeds.size() != indices.size()) {
    throw std::invalid_argument("batch_gradient: one dropout seed per index is required");
  }
  std::vector<LossGrad> parts(indices.size());
  const bool dropout = net.config.dropout_p > 0.0;
  run_indexed(indices.size(), parallel, [&](std::size_t k) {
    const std::size_t i = indices[k];
    const Sample& s = samples[i];
    if (dropout) {
      const DropoutMasks masks = sample_dropout(net, s.x.rows(), seeds[k]);
      parts[k] = loss_and_gradient(net, s.x, targets[i], &masks);
    } else {
      parts[k] = loss_and_gradient(net, s.x, targets[i], nullptr);
    }
  });
  BatchGradient out;
  out.grad = net.zeros_like();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const LossGrad& lg = parts[k];
    if (!lg.feasible) {
      ++out.skipped;
      continue;
    }
    out.grad += lg.grad;
    out.loss_sum += lg.loss;
    ++out.counted;
    const Sample& s = samples[indices[k]];
    const Eigen::Index T = lg.probs.rows();
    Prediction p;
    if (net.config.use_ctc) {
      p.sequence = ctc_decode(lg.probs);
    } else {
      Eigen::Index arg = 0;
      lg.probs.row(T - 1).maxCoeff(&arg);
      p.label = static_cast<int>(arg);
    }
    if (prediction_correct(net, p, s)) ++out.correct;
  }
  return out;
}

std::vector<Sample> featurize_impl(std::span<const InkTrace> corpus, Pipeline pipeline,
                                   const FeatureConfig& cfg,
                                   const std::vector<std::string>& classes, bool parallel) {
  std::vector<Sample> out(corpus.size());
  run_indexed(corpus.size(), parallel, [&](std::size_t i) {
    Sample s = featurize(corpus[i], pipeline, cfg);
    if (!classes.empty()) {
      const auto& label = corpus[i].label;
      if (!label) throw std::invalid_argument("trace " + std::to_string(i) + " has no label");
      const auto it = std::find(classes.begin(), classes.end(), *label);
      if (it == classes.end()) {
        throw std::invalid_argument("trace " + std::to_string(i) + " has unknown label '" +
                                    *label + "'");
      }
      s.label = static_cast<int>(it - classes.begin());
    }
    out[i] = std::move(s);
  });
  return out;
}

}  // namespace

int parallel_threads() {
#ifdef BETAINK_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

BatchGradient batch_gradient(const SeqNet& net, std::span<const Sample> samples,
                             std::span<const Target> targets, std::span<const std::size_t> indices,
                             std::span<const std::uint64_t> dropout_seeds) {
  return batch_gradient_impl(net, samples, targets, indices, dropout_seeds, true);
}

BatchGradient batch_gradient_serial(const SeqNet& net, std::span<const Sample> samples,
                                    std::span<const Target> targets,
                                    std::span<const std::size_t> indices,
                                    std::span<const std::uint64_t> dropout_seeds) {
  return batch_gradient_impl(net, samples, targets, indices, dropout_seeds, false);
}

std::vector<Prediction> predict_all(const SeqNet& net, std::span<const Sample> samples) {
  std::vector<Prediction> out(samples.size());
  run_indexed(samples.size(), true, [&](std::size_t i) { out[i] = predict(net, samples[i].x); });
  return out;
}

std::vector<Prediction> predict_all_serial(const SeqNet& net, std::span<const Sample> samples) {
  std::vector<Prediction> out(samples.size());
  run_indexed(samples.size(), false, [&](std::size_t i) { out[i] = predict(net, samples[i].x); });
  return out;
}

std::vector<Sample> featurize_corpus(std::span<const InkTrace> corpus, Pipeline pipeline,
                                     const FeatureConfig& cfg,
                                     const std::vector<std::string>& classes) {
  return featurize_impl(corpus, pipeline, cfg, classes, true);
}

std::vector<Sample> featurize_corpus_serial(std::span<const InkTrace> corpus, Pipeline pipeline,
                                            const FeatureConfig& cfg,
                                            const std::vector<std::string>& classes) {
  return featurize_impl(corpus, pipeline, cfg, classes, false);
}

}  // namespace betaink
