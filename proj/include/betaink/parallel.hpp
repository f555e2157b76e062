#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "betaink/features.hpp"
#include "betaink/ink.hpp"
#include "betaink/seqnet.hpp"
#include "betaink/train.hpp"

namespace betaink {

/// Data-parallel kernels. Each has a *_serial reference that produces
/// bit-identical output; the parallel versions use OpenMP when available.

int parallel_threads();

struct BatchGradient {
  SeqNet grad;  // summed over counted samples
  double loss_sum = 0.0;
  std::size_t counted = 0;
  std::size_t skipped = 0;
  std::size_t correct = 0;
};

/// Gradient of the summed loss over samples[indices]. dropout_seeds holds one
/// mask seed per index and is ignored when the net has dropout_p == 0.
BatchGradient batch_gradient(const SeqNet& net, std::span<const Sample> samples,
                             std::span<const Target> targets, std::span<const std::size_t> indices,
                             std::span<const std::uint64_t> dropout_seeds);
BatchGradient batch_gradient_serial(const SeqNet& net, std::span<const Sample> samples,
                                    std::span<const Target> targets,
                                    std::span<const std::size_t> indices,
                                    std::span<const std::uint64_t> dropout_seeds);

std::vector<Prediction> predict_all(const SeqNet& net, std::span<const Sample> samples);
std::vector<Prediction> predict_all_serial(const SeqNet& net, std::span<const Sample> samples);

/// Featurizes every trace; labels come from label_index (class name lookup),
/// which must be supplied for labelled corpora.
std::vector<Sample> featurize_corpus(std::span<const InkTrace> corpus, Pipeline pipeline,
                                     const FeatureConfig& cfg,
                                     const std::vector<std::string>& classes);
std::vector<Sample> featurize_corpus_serial(std::span<const InkTrace> corpus, Pipeline pipeline,
                                            const FeatureConfig& cfg,
                                            const std::vector<std::string>& classes);

}  // namespace betaink
