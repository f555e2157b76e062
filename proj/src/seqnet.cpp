#include "betaink/seqnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "betaink/ctc.hpp"
#include "betaink/random.hpp"

namespace betaink {

void NetConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (hidden_sizes.empty()) throw std::invalid_argument("at least one hidden layer is required");
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("hidden sizes must be >= 1");
  }
  if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw std::invalid_argument("dropout_p must lie in [0, 1)");
  }
}

namespace {

template <class F>
void for_each_block(SeqNet& net, F&& f) {
  for (auto& l : net.layers) {
    f(l.w);
    f(l.u);
    f(l.b);
  }
  f(net.head_w);
  f(net.head_b);
}

template <class F>
void for_each_block(const SeqNet& net, F&& f) {
  for (const auto& l : net.layers) {
    f(l.w);
    f(l.u);
    f(l.b);
  }
  f(net.head_w);
  f(net.head_b);
}

// Row-major visit of a dense block.
template <class M, class F>
void visit_row_major(M& m, F&& f) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) f(m(r, c));
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct LayerCache {
  Eigen::MatrixXd in;     // D x T
  Eigen::MatrixXd gates;  // 4H x T, activated
  Eigen::MatrixXd c;      // H x T
  Eigen::MatrixXd tanh_c;
  Eigen::MatrixXd h;      // H x T
  Eigen::MatrixXd out;    // H x T, after dropout
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::MatrixXd logits;  // K x T
};

void check_input(const SeqNet& net, const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw std::invalid_argument("sequence must have at least one step");
  if (x.cols() != net.config.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(x.cols()) +
                                " features per step, network expects " +
                                std::to_string(net.config.input_dim));
  }
  if (!x.allFinite()) throw std::invalid_argument("input sequence contains non-finite values");
}

ForwardCache run_forward(const SeqNet& net, const Eigen::MatrixXd& x, const DropoutMasks* masks) {
  check_input(net, x);
  const Eigen::Index T = x.rows();
  ForwardCache fc;
  fc.layers.resize(net.layers.size());
  Eigen::MatrixXd input = x.transpose();
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const LstmLayer& L = net.layers[li];
    const Eigen::Index H = L.hidden();
    LayerCache& lc = fc.layers[li];
    lc.in = std::move(input);
    lc.gates = L.w * lc.in;
    lc.gates.colwise() += L.b;
    lc.c.resize(H, T);
    lc.tanh_c.resize(H, T);
    lc.h.resize(H, T);
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(H);
    for (Eigen::Index t = 0; t < T; ++t) {
      auto z = lc.gates.col(t);
      if (t > 0) z.noalias() += L.u * h_prev;
      for (Eigen::Index k = 0; k < H; ++k) {
        z[k] = sigmoid(z[k]);
        z[H + k] = sigmoid(z[H + k]);
        z[2 * H + k] = std::tanh(z[2 * H + k]);
        z[3 * H + k] = sigmoid(z[3 * H + k]);
        const double c = z[H + k] * c_prev[k] + z[k] * z[2 * H + k];
        const double tc = std::tanh(c);
        lc.c(k, t) = c;
        lc.tanh_c(k, t) = tc;
        lc.h(k, t) = z[3 * H + k] * tc;
      }
      h_prev = lc.h.col(t);
      c_prev = lc.c.col(t);
    }
    if (masks != nullptr) {
      lc.out = lc.h.cwiseProduct(masks->layers.at(li));
    } else {
      lc.out = lc.h;
    }
    input = lc.out;
  }
  fc.logits = net.head_w * fc.layers.back().out;
  fc.logits.colwise() += net.head_b;
  return fc;
}

Eigen::MatrixXd log_softmax_cols(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const double m = logits.col(t).maxCoeff();
    const double lse = m + std::log((logits.col(t).array() - m).exp().sum());
    out.col(t) = logits.col(t).array() - lse;
  }
  return out;
}

void check_target(const SeqNet& net, const Target& target) {
  const int C = net.config.num_classes;
  switch (target.kind) {
    case Target::Kind::Class:
      if (net.config.use_ctc) throw std::invalid_argument("class targets need a softmax head");
      if (target.label < 0 || target.label >= C) {
        throw std::invalid_argument("target label " + std::to_string(target.label) +
                                    " outside [0, " + std::to_string(C) + ")");
      }
      break;
    case Target::Kind::Soft:
      if (net.config.use_ctc) throw std::invalid_argument("soft targets need a softmax head");
      if (static_cast<int>(target.dist.size()) != C) {
        throw std::invalid_argument("soft target size does not match num_classes");
      }
      break;
    case Target::Kind::Ctc:
      if (!net.config.use_ctc) throw std::invalid_argument("CTC targets need a CTC head");
      break;
  }
}

// Loss and d loss / d logits (K x T).
std::pair<double, Eigen::MatrixXd> head_loss(const SeqNet& net, const Eigen::MatrixXd& logits,
                                             const Target& target, bool& feasible) {
  check_target(net, target);
  const Eigen::Index T = logits.cols();
  const Eigen::Index K = logits.rows();
  const Eigen::MatrixXd lp = log_softmax_cols(logits);
  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(K, T);
  feasible = true;
  if (target.kind == Target::Kind::Ctc) {
    const CtcResult r = ctc_loss(lp.transpose(), target.sequence);
    if (r.status != CtcStatus::Ok) {
      feasible = false;
      return {r.loss, dlogits};
    }
    dlogits = r.grad.transpose();
    return {r.loss, dlogits};
  }
  Eigen::VectorXd t = Eigen::VectorXd::Zero(K);
  if (target.kind == Target::Kind::Class) {
    t[target.label] = 1.0;
  } else {
    for (Eigen::Index k = 0; k < K; ++k) t[k] = target.dist[static_cast<std::size_t>(k)];
  }
  double loss = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (t[k] != 0.0) loss -= t[k] * lp(k, T - 1);
  }
  const double mass = t.sum();
  dlogits.col(T - 1) = lp.col(T - 1).array().exp().matrix() * mass - t;
  return {loss, dlogits};
}

}  // namespace

std::size_t SeqNet::parameter_count() const {
  std::size_t n = 0;
  for_each_block(*this, [&](const auto& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

std::vector<double> SeqNet::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for_each_block(*this, [&](const auto& m) {
    visit_row_major(m, [&](const double& v) { out.push_back(v); });
  });
  return out;
}

void SeqNet::unflatten(std::span<const double> params) {
  if (params.size() != parameter_count()) {
    throw std::invalid_argument("expected " + std::to_string(parameter_count()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::size_t i = 0;
  for_each_block(*this, [&](auto& m) { visit_row_major(m, [&](double& v) { v = params[i++]; }); });
}

SeqNet SeqNet::zeros_like() const {
  SeqNet z = *this;
  for_each_block(z, [](auto& m) { m.setZero(); });
  return z;
}

SeqNet& SeqNet::operator+=(const SeqNet& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].w += other.layers[l].w;
    layers[l].u += other.layers[l].u;
    layers[l].b += other.layers[l].b;
  }
  head_w += other.head_w;
  head_b += other.head_b;
  return *this;
}

SeqNet& SeqNet::operator*=(double s) {
  for_each_block(*this, [&](auto& m) { m *= s; });
  return *this;
}

double SeqNet::squared_norm() const {
  double n = 0.0;
  for_each_block(*this, [&](const auto& m) { n += m.squaredNorm(); });
  return n;
}

SeqNet make_net(const NetConfig& config) {
  config.validate();
  SeqNet net;
  net.config = config;
  int d = config.input_dim;
  for (int h : config.hidden_sizes) {
    LstmLayer L;
    L.w = Eigen::MatrixXd::Zero(4 * h, d);
    L.u = Eigen::MatrixXd::Zero(4 * h, h);
    L.b = Eigen::VectorXd::Zero(4 * h);
    net.layers.push_back(std::move(L));
    d = h;
  }
  net.head_w = Eigen::MatrixXd::Zero(config.output_dim(), d);
  net.head_b = Eigen::VectorXd::Zero(config.output_dim());

  Rng rng(config.seed);
  auto fill = [&](Eigen::MatrixXd& m) {
    visit_row_major(m, [&](double& v) { v = rng.uniform(-0.1, 0.1); });
  };
  for (auto& L : net.layers) {
    fill(L.w);
    fill(L.u);
    L.b.segment(L.hidden(), L.hidden()).setOnes();
  }
  fill(net.head_w);
  return net;
}

DropoutMasks sample_dropout(const SeqNet& net, Eigen::Index steps, std::uint64_t seed) {
  DropoutMasks m;
  const double p = net.config.dropout_p;
  const double keep_scale = 1.0 / (1.0 - p);
  Rng rng(seed);
  for (const auto& L : net.layers) {
    Eigen::MatrixXd mask(L.hidden(), steps);
    for (Eigen::Index t = 0; t < steps; ++t) {
      for (Eigen::Index k = 0; k < mask.rows(); ++k) {
        mask(k, t) = (p == 0.0 || rng.uniform() >= p) ? keep_scale : 0.0;
      }
    }
    m.layers.push_back(std::move(mask));
  }
  return m;
}

Eigen::MatrixXd forward(const SeqNet& net, const Eigen::MatrixXd& x, const DropoutMasks* masks) {
  const ForwardCache fc = run_forward(net, x, masks);
  return log_softmax_cols(fc.logits).array().exp().matrix().transpose();
}

Target Target::hard(int label) {
  Target t;
  t.kind = Kind::Class;
  t.label = label;
  return t;
}

Target Target::soft(std::vector<double> dist) {
  Target t;
  t.kind = Kind::Soft;
  t.dist = std::move(dist);
  return t;
}

Target Target::ctc(std::vector<int> sequence) {
  Target t;
  t.kind = Kind::Ctc;
  t.sequence = std::move(sequence);
  return t;
}

double loss_only(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                 const DropoutMasks* masks) {
  const ForwardCache fc = run_forward(net, x, masks);
  bool feasible = true;
  return head_loss(net, fc.logits, target, feasible).first;
}

LossGrad loss_and_gradient(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                           const DropoutMasks* masks) {
  const ForwardCache fc = run_forward(net, x, masks);
  LossGrad out;
  out.grad = net.zeros_like();
  auto [loss, dlogits] = head_loss(net, fc.logits, target, out.feasible);
  out.loss = loss;
  out.probs = log_softmax_cols(fc.logits).array().exp().matrix().transpose();
  if (!out.feasible) return out;

  const Eigen::Index T = x.rows();
  out.grad.head_w.noalias() = dlogits * fc.layers.back().out.transpose();
  out.grad.head_b = dlogits.rowwise().sum();
  Eigen::MatrixXd d_out = net.head_w.transpose() * dlogits;

  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const LstmLayer& L = net.layers[li];
    const LayerCache& lc = fc.layers[li];
    LstmLayer& G = out.grad.layers[li];
    const Eigen::Index H = L.hidden();
    if (masks != nullptr) d_out = d_out.cwiseProduct(masks->layers.at(li));
    Eigen::MatrixXd dz(4 * H, T);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const Eigen::VectorXd dh = d_out.col(t) + dh_next;
      const auto g = lc.gates.col(t);
      for (Eigen::Index k = 0; k < H; ++k) {
        const double i = g[k], f = g[H + k], cand = g[2 * H + k], o = g[3 * H + k];
        const double tc = lc.tanh_c(k, t);
        const double c_prev = t > 0 ? lc.c(k, t - 1) : 0.0;
        const double dc = dh[k] * o * (1.0 - tc * tc) + dc_next[k];
        dz(k, t) = dc * cand * i * (1.0 - i);
        dz(H + k, t) = dc * c_prev * f * (1.0 - f);
        dz(2 * H + k, t) = dc * i * (1.0 - cand * cand);
        dz(3 * H + k, t) = dh[k] * tc * o * (1.0 - o);
        dc_next[k] = dc * f;
      }
      dh_next.noalias() = L.u.transpose() * dz.col(t);
    }
    G.w.noalias() = dz * lc.in.transpose();
    if (T > 1) {
      G.u.noalias() = dz.rightCols(T - 1) * lc.h.leftCols(T - 1).transpose();
    }
    G.b = dz.rowwise().sum();
    if (li > 0) d_out = L.w.transpose() * dz;
  }
  return out;
}

Prediction predict(const SeqNet& net, const Eigen::MatrixXd& x) {
  const ForwardCache fc = run_forward(net, x, nullptr);
  const Eigen::MatrixXd lp = log_softmax_cols(fc.logits);
  Prediction p;
  if (net.config.use_ctc) {
    p.sequence = ctc_decode(lp.transpose());
    double lc = 0.0;
    for (Eigen::Index t = 0; t < lp.cols(); ++t) lc += lp.col(t).maxCoeff();
    p.log_confidence = lc;
    p.confidence = std::exp(lc);
    return p;
  }
  Eigen::Index k = 0;
  p.log_confidence = lp.col(lp.cols() - 1).maxCoeff(&k);
  p.label = static_cast<int>(k);
  p.confidence = std::exp(p.log_confidence);
  return p;
}

GradCheckReport grad_check(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                           double h, const DropoutMasks* masks) {
  const LossGrad lg = loss_and_gradient(net, x, target, masks);
  const std::vector<double> analytic = lg.grad.flatten();
  std::vector<double> params = net.flatten();
  SeqNet probe = net;
  GradCheckReport rep;
  rep.parameters = params.size();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    auto at = [&](double offset) {
      params[i] = keep + offset;
      probe.unflatten(params);
      return loss_only(probe, x, target, masks);
    };
    // Five-point stencil, O(h^4) truncation.
    const double numeric = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
    params[i] = keep;
    const double abs_err = std::abs(analytic[i] - numeric);
    const double rel =
        abs_err / std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    rep.max_absolute_error = std::max(rep.max_absolute_error, abs_err);
    if (rel > rep.max_relative_error) {
      rep.max_relative_error = rel;
      rep.worst_index = i;
    }
  }
  return rep;
}

}  // namespace betaink
