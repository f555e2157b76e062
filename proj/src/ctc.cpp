#include "betaink/ctc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace betaink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

int ctc_min_frames(std::span<const int> label) {
  int n = static_cast<int>(label.size());
  for (std::size_t i = 1; i < label.size(); ++i) {
    if (label[i] == label[i - 1]) ++n;
  }
  return n;
}

CtcResult ctc_loss(const Eigen::MatrixXd& lp, std::span<const int> label) {
  const Eigen::Index T = lp.rows();
  const Eigen::Index K = lp.cols();
  const int blank = static_cast<int>(K) - 1;
  if (T < 1 || K < 2) throw std::invalid_argument("ctc_loss needs T >= 1 and at least one class");
  for (int l : label) {
    if (l < 0 || l >= blank) throw std::invalid_argument("CTC label index out of range");
  }
  CtcResult out;
  out.grad = Eigen::MatrixXd::Zero(T, K);
  if (T < ctc_min_frames(label)) {
    out.status = CtcStatus::LabelTooLong;
    out.loss = std::numeric_limits<double>::infinity();
    return out;
  }

  const Eigen::Index S = 2 * static_cast<Eigen::Index>(label.size()) + 1;
  std::vector<int> ext(static_cast<std::size_t>(S), blank);
  for (std::size_t i = 0; i < label.size(); ++i) ext[2 * i + 1] = label[i];
  auto skip_ok = [&](Eigen::Index s) {
    return s >= 2 && ext[static_cast<std::size_t>(s)] != blank &&
           ext[static_cast<std::size_t>(s)] != ext[static_cast<std::size_t>(s - 2)];
  };

  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(T, S, kNegInf);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(T, S, kNegInf);
  alpha(0, 0) = lp(0, blank);
  if (S > 1) alpha(0, 1) = lp(0, ext[1]);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      if (skip_ok(s)) a = log_add(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + lp(t, ext[static_cast<std::size_t>(s)]);
    }
  }
  beta(T - 1, S - 1) = lp(T - 1, blank);
  if (S > 1) beta(T - 1, S - 2) = lp(T - 1, ext[static_cast<std::size_t>(S - 2)]);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = log_add(b, beta(t + 1, s + 1));
      if (s + 2 < S && skip_ok(s + 2)) b = log_add(b, beta(t + 1, s + 2));
      if (b != kNegInf) beta(t, s) = b + lp(t, ext[static_cast<std::size_t>(s)]);
    }
  }

  double log_p = alpha(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, alpha(T - 1, S - 2));
  out.loss = -log_p;

  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd occ = Eigen::VectorXd::Constant(K, kNegInf);
    for (Eigen::Index s = 0; s < S; ++s) {
      const int k = ext[static_cast<std::size_t>(s)];
      occ[k] = log_add(occ[k], alpha(t, s) + beta(t, s) - lp(t, k));
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      const double gamma = occ[k] == kNegInf ? 0.0 : std::exp(occ[k] - log_p);
      out.grad(t, k) = std::exp(lp(t, k)) - gamma;
    }
  }
  return out;
}

std::vector<int> ctc_decode(const Eigen::MatrixXd& probs) {
  const int blank = static_cast<int>(probs.cols()) - 1;
  std::vector<int> out;
  int prev = -1;
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    Eigen::Index k = 0;
    probs.row(t).maxCoeff(&k);
    const int sym = static_cast<int>(k);
    if (sym != prev && sym != blank) out.push_back(sym);
    prev = sym;
  }
  return out;
}

}  // namespace betaink
