#include "betaink/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "betaink/parallel.hpp"
#include "betaink/random.hpp"

namespace betaink {

std::string train_mode_name(TrainMode m) { return m == TrainMode::Fuzzy ? "fuzzy" : "framewise"; }

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "framewise") return TrainMode::Framewise;
  if (name == "fuzzy") return TrainMode::Fuzzy;
  throw std::invalid_argument("unknown training mode '" + name + "' (framewise|fuzzy)");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(fuzzy_alpha >= 0.0 && fuzzy_alpha <= 1.0)) {
    throw std::invalid_argument("fuzzy_alpha must lie in [0, 1]");
  }
  if (!(fuzzy_tau > 0.0)) throw std::invalid_argument("fuzzy_tau must be > 0");
}

std::vector<SoftTarget> fuzzy_targets(std::span<const int> labels, std::span<const int> lengths,
                                      int num_classes, double alpha, double tau) {
  if (labels.size() != lengths.size()) {
    throw std::invalid_argument("fuzzy_targets: labels and lengths differ in size");
  }
  if (num_classes < 2) throw std::invalid_argument("fuzzy_targets needs at least 2 classes");
  std::vector<std::vector<int>> per_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("fuzzy_targets: label out of range");
    }
    per_class[static_cast<std::size_t>(labels[i])].push_back(lengths[i]);
  }
  std::vector<double> ref(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    auto& v = per_class[static_cast<std::size_t>(c)];
    if (v.empty()) {
      throw std::invalid_argument("fuzzy_targets: class " + std::to_string(c) +
                                  " has no training samples");
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    ref[static_cast<std::size_t>(c)] =
        n % 2 == 1 ? v[n / 2] : 0.5 * (static_cast<double>(v[n / 2 - 1]) + v[n / 2]);
  }

  std::vector<SoftTarget> out(labels.size());
  const auto C = static_cast<std::size_t>(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::vector<double> f(C);
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < C; ++c) {
      f[c] = -std::abs(lengths[i] - ref[c]) / tau;
      hi = std::max(hi, f[c]);
    }
    double z = 0.0;
    for (double& v : f) z += (v = std::exp(v - hi));
    for (double& v : f) v /= z;

    const auto truth = static_cast<std::size_t>(labels[i]);
    double a = alpha;
    for (std::size_t c = 0; c < C; ++c) {
      if (c == truth) continue;
      const double gap = f[c] - f[truth];
      if (gap >= 0.0) a = std::max(a, std::min(1.0, gap / (1.0 + gap) + 1e-6));
    }
    std::vector<double> dist(C);
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      dist[c] = (c == truth ? a : 0.0) + (1.0 - a) * f[c];
      sum += dist[c];
    }
    for (double& v : dist) v /= sum;
    out[i].dist = std::move(dist);
  }
  return out;
}

std::vector<Target> make_targets(std::span<const Sample> samples, const NetConfig& net,
                                 const TrainConfig& cfg) {
  std::vector<Target> out;
  out.reserve(samples.size());
  if (net.use_ctc) {
    if (cfg.mode == TrainMode::Fuzzy) {
      throw std::invalid_argument("fuzzy training needs a softmax head (use_ctc off)");
    }
    for (const Sample& s : samples) {
      out.push_back(Target::ctc(s.sequence.empty() ? std::vector<int>{s.label} : s.sequence));
    }
    return out;
  }
  if (cfg.mode == TrainMode::Framewise) {
    for (const Sample& s : samples) out.push_back(Target::hard(s.label));
    return out;
  }
  std::vector<int> labels, lengths;
  for (const Sample& s : samples) {
    labels.push_back(s.label);
    lengths.push_back(s.length);
  }
  for (auto& st : fuzzy_targets(labels, lengths, net.num_classes, cfg.fuzzy_alpha, cfg.fuzzy_tau)) {
    out.push_back(Target::soft(std::move(st.dist)));
  }
  return out;
}

bool prediction_correct(const SeqNet& net, const Prediction& p, const Sample& s) {
  if (net.config.use_ctc) {
    return p.sequence == (s.sequence.empty() ? std::vector<int>{s.label} : s.sequence);
  }
  return p.label == s.label;
}

double accuracy(const SeqNet& net, std::span<const Sample> samples) {
  if (samples.empty()) return 0.0;
  const std::vector<Prediction> preds = predict_all(net, samples);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (prediction_correct(net, preds[i], samples[i])) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

TrainResult train(SeqNet& net, std::span<const Sample> corpus, const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  for (const Sample& s : corpus) {
    if (s.label < 0 || s.label >= net.config.num_classes) {
      throw std::invalid_argument("sample label " + std::to_string(s.label) + " out of range");
    }
  }
  const std::vector<Target> targets = make_targets(corpus, net.config, cfg);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(derive_seed({cfg.seed, 0x5348554646ULL, static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order.begin(), order.end());
    EpochMetrics m;
    m.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t counted = 0, correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      std::vector<std::uint64_t> seeds;
      seeds.reserve(idx.size());
      for (std::size_t i : idx) {
        seeds.push_back(derive_seed({cfg.seed, static_cast<std::uint64_t>(epoch), i}));
      }
      BatchGradient bg = batch_gradient(net, corpus, targets, idx, seeds);
      if (!std::isfinite(bg.loss_sum)) {
        std::ostringstream msg;
        msg << "training diverged: loss is " << bg.loss_sum << " at epoch " << epoch
            << ", batch starting at position " << start << " (learning_rate " << cfg.learning_rate
            << "); lower the learning rate or tighten grad_clip";
        throw DivergenceError(msg.str());
      }
      loss_sum += bg.loss_sum;
      counted += bg.counted;
      correct += bg.correct;
      m.skipped += bg.skipped;
      if (bg.counted == 0) continue;
      SeqNet& g = bg.grad;
      g *= 1.0 / static_cast<double>(bg.counted);
      const double norm = std::sqrt(g.squared_norm());
      if (!std::isfinite(norm)) {
        throw DivergenceError("training diverged: non-finite gradient at epoch " +
                              std::to_string(epoch));
      }
      double step = -cfg.learning_rate;
      if (cfg.grad_clip > 0.0 && norm > cfg.grad_clip) step *= cfg.grad_clip / norm;
      g *= step;
      net += g;
    }
    m.loss = counted > 0 ? loss_sum / static_cast<double>(counted) : 0.0;
    m.accuracy = counted > 0 ? static_cast<double>(correct) / static_cast<double>(counted) : 0.0;
    result.log.push_back(m);
  }
  return result;
}

}  // namespace betaink
