// Acceptance run: one PASS/FAIL line per criterion, with the measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "betaink/augment.hpp"
#include "betaink/beta_elliptic.hpp"
#include "betaink/ctc.hpp"
#include "betaink/experiment.hpp"
#include "betaink/filter.hpp"
#include "betaink/noise.hpp"
#include "betaink/perceptual.hpp"
#include "betaink/preprocess.hpp"
#include "betaink/seqnet.hpp"
#include "betaink/synth_corpus.hpp"
#include "common/fixtures.hpp"
#include "common/oracles.hpp"

using namespace betaink;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------------------

Outcome beta_math() {
  double worst = 0.0;
  bool mid = true;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double t0 = rng.uniform(-5.0, 5.0);
    const BetaProfile b{t0, t0 + rng.uniform(0.05, 3.0), rng.uniform(0.5, 6.0), rng.uniform(0.5, 6.0), 1.0};
    worst = std::max({worst, std::abs(beta(b.tc(), b) - 1.0), std::abs(beta(b.t0, b)), std::abs(beta(b.t1, b))});
    BetaProfile sym = b;
    sym.q = sym.p;
    mid = mid && std::abs(sym.tc() - 0.5 * (sym.t0 + sym.t1)) <= 1e-12 * std::max(1.0, std::abs(sym.t0));
  }
  const double spot = beta(0.25, BetaProfile{0.0, 1.0, 2.0, 2.0, 1.0});
  const bool pass = worst <= 1e-12 && mid && std::abs(spot - 0.5625) <= 1e-12;
  return {pass, fmt("peak/end error %.1e, symmetric tc midpoint %s, spot %.15g", worst, mid ? "yes" : "no", spot)};
}

Outcome fit_oracle() {
  double clean = 0.0, noisy = 0.0, ell = 0.0;
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const double t0 = rng.uniform(0.0, 1.0);
    const BetaProfile b{t0, t0 + rng.uniform(0.15, 0.5), rng.uniform(1.2, 4.0), rng.uniform(1.2, 4.0),
                        rng.uniform(0.5, 20.0)};
    const auto v = oracles::sample_profile(b, 100.0);
    const BetaProfile f = fit_beta(v, b.t0, b.t1);
    clean = std::max({clean, rel(f.p, b.p), rel(f.q, b.q), rel(f.amplitude, b.amplitude)});
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng r(seed);
    const BetaProfile b{0.0, r.uniform(0.25, 0.5), r.uniform(1.5, 3.5), r.uniform(1.5, 3.5), r.uniform(1.0, 5.0)};
    const auto v = oracles::sample_profile(b, 100.0, &r, 0.01);
    const BetaProfile f = fit_beta(v, b.t0, b.t1);
    noisy = std::max({noisy, rel(f.p, b.p), rel(f.q, b.q), rel(f.amplitude, b.amplitude)});
  }
  for (int i = 0; i < 30; ++i) {
    EllipticArc e;
    e.x0 = rng.uniform(-2.0, 2.0);
    e.y0 = rng.uniform(-2.0, 2.0);
    e.a = rng.uniform(0.5, 2.0);
    e.b = e.a * rng.uniform(0.2, 0.9);
    e.theta = rng.uniform(-pi / 2, pi / 2);
    const double from = rng.uniform(-pi, pi);
    const auto pts = oracles::ellipse_points(e, from, from + rng.uniform(1.5, 3.0), 40);
    const ArcFit fit = fit_arc(pts, oracles::beta_points_of(pts));
    ell = std::max({ell, rel(fit.arc.a, e.a), rel(fit.arc.b, e.b), oracles::angle_gap(fit.arc.theta, e.theta)});
  }
  const bool pass = clean <= 1e-4 && noisy <= 0.1 && ell <= 1e-6;
  return {pass, fmt("clean %.1e, 1%% noise %.3f, ellipse %.1e", clean, noisy, ell)};
}

Outcome segmentation_round_trip() {
  int exact = 0, total = 0;
  double worst = 0.0;
  for (int k = 1; k <= 8; ++k) {
    for (std::uint64_t s = 0; s < 25; ++s) {
      const auto truth = fixtures::chain_strokes(derive_seed({0xACCE, static_cast<std::uint64_t>(k), s}), k);
      const SegmentResult r = segment(synthesize_trace(truth, 100.0));
      ++total;
      if (r.strokes.size() != truth.size()) continue;
      ++exact;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& g = r.strokes[i];
        const auto& w = truth[i];
        const double dur = w.beta.duration();
        worst = std::max({worst, rel(g.beta.p, w.beta.p), rel(g.beta.q, w.beta.q),
                          rel(g.beta.amplitude, w.beta.amplitude), rel(g.arc.a, w.arc.a), rel(g.arc.b, w.arc.b),
                          std::abs(g.beta.t0 - w.beta.t0) / dur, std::abs(g.beta.t1 - w.beta.t1) / dur});
      }
    }
  }
  return {exact == total && worst <= 0.1, fmt("%d/%d exact counts, worst parameter error %.3f", exact, total, worst)};
}

Outcome fuzzy_epc() {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = -pi / 2 + pi * (i + 0.5) / 10000.0;
    const auto m = epc_membership(a);
    worst = std::max(worst, std::abs(m.mu[0] + m.mu[1] + m.mu[2] + m.mu[3] - 1.0));
  }
  const auto b = epc_membership(pi / 8);
  const bool half = std::abs(b[Epc::Valley] - 0.5) <= 1e-9 && std::abs(b[Epc::RightObliqueShaft] - 0.5) <= 1e-9;

  const std::vector<double> headings{0, 45, 90, 135, 180, -45, 90, 0};
  const InkTrace trace = synthesize_trace(fixtures::heading_strokes(headings), 100.0);
  AffineDraw rot;
  rot.rotate_rad = pi / 4;
  const auto before = encode_sequence(segment(trace).strokes).dominant_epcs();
  const auto after = encode_sequence(segment(affine(trace, rot)).strokes).dominant_epcs();
  auto next = [](Epc e) {
    switch (e) {
      case Epc::Valley: return Epc::RightObliqueShaft;
      case Epc::RightObliqueShaft: return Epc::Shaft;
      case Epc::Shaft: return Epc::LeftObliqueShaft;
      default: return Epc::Valley;
    }
  };
  bool permuted = before.size() == headings.size() && after.size() == before.size();
  for (std::size_t i = 0; permuted && i < before.size(); ++i) permuted = after[i] == next(before[i]);
  return {worst <= 1e-9 && half && permuted,
          fmt("sum error %.1e, boundary %.3f/%.3f, rotation permutes %s", worst, b[Epc::Valley],
              b[Epc::RightObliqueShaft], permuted ? "yes" : "no")};
}

Outcome ctc_and_gradients() {
  double fwd = 0.0, ctc_grad = 0.0, net_grad = 0.0;
  Rng rng(5);
  auto activations = [&](int t, int c) {
    Eigen::MatrixXd a(t, c);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal(0.0, 1.5);
    return a;
  };
  for (int T = 1; T <= 6; ++T) {
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::MatrixXd logp = oracles::log_softmax_rows(activations(T, 4));
      std::vector<int> label;
      const auto len = rng.below(static_cast<std::uint64_t>(T) + 1);
      for (std::uint64_t i = 0; i < len; ++i) label.push_back(static_cast<int>(rng.below(3)));
      if (ctc_min_frames(label) > T) continue;
      fwd = std::max(fwd, std::abs(ctc_loss(logp, label).loss - oracles::brute_force_ctc(logp, label)));
    }
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Eigen::MatrixXd act = activations(8, 6);
    std::vector<int> label;
    for (int i = 0; i < 3; ++i) label.push_back(static_cast<int>(rng.below(5)));
    const CtcResult r = ctc_loss(oracles::log_softmax_rows(act), label);
    const double h = 1e-3;
    for (Eigen::Index i = 0; i < act.size(); ++i) {
      auto at = [&](double off) {
        Eigen::MatrixXd a = act;
        a.data()[i] += off;
        return ctc_loss(oracles::log_softmax_rows(a), label).loss;
      };
      const double num = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
      const double ana = r.grad.data()[i];
      ctc_grad = std::max(ctc_grad, std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), 1e-6}));
    }
    for (bool use_ctc : {false, true}) {
      NetConfig c;
      c.input_dim = 3;
      c.hidden_sizes = {5, 4};
      c.num_classes = 3;
      c.use_ctc = use_ctc;
      c.seed = seed;
      SeqNet net = make_net(c);
      auto p = net.flatten();
      Rng pr(seed * 7 + 1);
      for (double& v : p) v += pr.normal(0.0, 0.4);
      net.unflatten(p);
      Eigen::MatrixXd x(7, 3);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
      const Target t = use_ctc ? Target::ctc({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3))})
                               : Target::hard(static_cast<int>(rng.below(3)));
      net_grad = std::max(net_grad, grad_check(net, x, t).max_relative_error);
    }
  }
  return {fwd <= 1e-10 && ctc_grad <= 1e-4 && net_grad <= 1e-4,
          fmt("forward vs enumeration %.1e, CTC grad %.1e, net grad %.1e", fwd, ctc_grad, net_grad)};
}

// ---------------------------------------------------------------------------
// Synthetic recognition experiments

std::vector<SyntheticClassSpec> all_specs() {
  auto specs = default_digit_specs();
  for (auto& s : default_letter_specs()) specs.push_back(std::move(s));
  return specs;
}

const std::vector<InkTrace>& digit_corpus() {
  static const std::vector<InkTrace> c = synth_corpus(default_digit_specs(), 600, 2024);
  return c;
}

// 500 train / 100 test per class, training set doubled by augmentation.
ExperimentConfig digit_experiment(TrainMode mode) {
  ExperimentConfig c;
  c.pipeline = Pipeline::PerceptualBeta;
  c.split = 5.0 / 6.0;
  c.augment_multiplier = 2;
  c.train.mode = mode;
  c.train.epochs = 15;
  c.train.learning_rate = 0.1;
  c.train.batch_size = 16;
  return c;
}

ExperimentConfig jitter_experiment(TrainMode mode) {
  ExperimentConfig c = digit_experiment(mode);
  NoiseSpec n;
  n.kind = NoiseKind::GaussianJitter;
  n.sigma = 0.02;
  c.noise = n;
  return c;
}

// 100 train / 20 test per class over all 18 classes, training set doubled.
ExperimentConfig tremble_experiment(Pipeline p, bool noisy) {
  ExperimentConfig c;
  c.pipeline = p;
  c.split = 5.0 / 6.0;
  c.augment_multiplier = 2;
  c.net.hidden_sizes = {32};
  c.net.dropout_p = 0.2;
  c.train.epochs = 15;
  c.train.learning_rate = 0.1;
  c.train.batch_size = 16;
  if (noisy) {
    NoiseSpec n;
    n.kind = NoiseKind::Tremble;
    n.sigma = 0.2;
    n.tremble_hz = 40.0;
    c.noise = n;
  }
  return c;
}

std::vector<std::string> reports;  // kept for the determinism check

Outcome end_to_end() {
  const EvalReport r = run_experiment(digit_corpus(), class_names(default_digit_specs()),
                                      digit_experiment(TrainMode::Framewise));
  reports.push_back(report_string(r));
  return {r.train_size == 10000 && r.test_size == 1000 && r.recognition_rate >= 0.95,
          fmt("recognition rate %.4f (train %zu, test %zu)", r.recognition_rate, r.train_size, r.test_size)};
}

Outcome fuzzy_vs_framewise() {
  const auto classes = class_names(default_digit_specs());
  const EvalReport fw = run_experiment(digit_corpus(), classes, jitter_experiment(TrainMode::Framewise));
  const EvalReport fz = run_experiment(digit_corpus(), classes, jitter_experiment(TrainMode::Fuzzy));
  reports.push_back(report_string(fz));
  // Compared in hit counts: rate differences of exactly one point are not exact in doubles.
  auto hits = [](const EvalReport& r) {
    std::size_t h = 0;
    for (std::size_t c = 0; c < r.confusion.size(); ++c) h += r.confusion[c][c];
    return static_cast<double>(h);
  };
  const double n = static_cast<double>(fw.test_size);
  const bool pass = fz.test_size == fw.test_size && 100.0 * hits(fz) >= 100.0 * hits(fw) - n;
  return {pass, fmt("fuzzy %.4f, framewise %.4f, signed difference %+.2f points", fz.recognition_rate,
                    fw.recognition_rate, 100.0 * (hits(fz) - hits(fw)) / n)};
}

Outcome noise_robustness() {
  const auto specs = all_specs();
  const auto corpus = synth_corpus(specs, 120, 2025);
  const auto classes = class_names(specs);
  double drop[3];
  std::string detail;
  const Pipeline order[3] = {Pipeline::PerceptualBeta, Pipeline::ThetaEpc, Pipeline::Raw};
  for (int i = 0; i < 3; ++i) {
    const double clean = run_experiment(corpus, classes, tremble_experiment(order[i], false)).recognition_rate;
    const EvalReport noisy = run_experiment(corpus, classes, tremble_experiment(order[i], true));
    if (i == 0) reports.push_back(report_string(noisy));
    drop[i] = clean - noisy.recognition_rate;
    detail += fmt("%s %.3f->%.3f; ", pipeline_name(order[i]).c_str(), clean, noisy.recognition_rate);
  }
  const bool pass = drop[0] < drop[2] && drop[0] <= drop[1] && drop[1] <= drop[2];
  return {pass, detail + fmt("drops %.3f < %.3f (theta-epc %.3f between)", drop[0], drop[2], drop[1])};
}

Outcome preprocessing() {
  const PreprocessConfig cfg;
  const SosFilter sos = zpk_to_sos(chebyshev1_lowpass_zpk(cfg.filter_order, cfg.filter_ripple_db,
                                                          cfg.filter_cutoff_hz, cfg.resample_hz));
  // Zero-phase filtering applies the magnitude twice.
  const double gain = std::pow(std::abs(frequency_response(sos, 40.0, cfg.resample_hz)), 2);

  InkTrace t;
  for (int i = 0; i <= 300; ++i) {
    const double time = i / 100.0;
    t.points.push_back({time, 0.05 * std::sin(2 * pi * 40.0 * time), time, 1});
  }
  const InkTrace f = lowpass(t, cfg);
  double residual = 0.0;
  for (std::size_t i = 50; i < 250; ++i) residual = std::max(residual, std::abs(f.points[i].y));
  const double attenuation = 1.0 - residual / 0.05;

  // A straight body with 3-point hooks at both ends.
  InkTrace body;
  for (int i = 0; i <= 100; ++i) body.points.push_back({i / 100.0, 0.0, 0.0, 1});
  InkTrace hooked;
  for (int i = 3; i >= 1; --i) hooked.points.push_back({0.01 * i * std::cos(-pi / 3), 0.01 * i * std::sin(-pi / 3), 0.0, 1});
  for (const auto& p : body.points) hooked.points.push_back(p);
  for (int i = 1; i <= 3; ++i) {
    hooked.points.push_back({1.0 + 0.01 * i * std::cos(2 * pi / 3), 0.01 * i * std::sin(2 * pi / 3), 0.0, 1});
  }
  for (std::size_t i = 0; i < hooked.points.size(); ++i) hooked.points[i].t = 0.01 * static_cast<double>(i);
  const InkTrace d = dehook(hooked, cfg);
  bool removed = d.points.size() == body.points.size();
  for (std::size_t i = 0; removed && i < body.points.size(); ++i) {
    removed = d.points[i].x == body.points[i].x && d.points[i].y == body.points[i].y;
  }
  InkTrace arc;
  for (int i = 0; i <= 100; ++i) {
    const double a = pi * i / 100.0;
    arc.points.push_back({std::cos(a), std::sin(a), i / 100.0, 1});
  }
  const bool noop = dehook(arc, cfg) == arc;
  return {1.0 - gain >= 0.9 && attenuation >= 0.9 && removed && noop,
          fmt("40 Hz attenuation %.4f (response) / %.4f (measured), hooks removed %s, arc untouched %s",
              1.0 - gain, attenuation, removed ? "yes" : "no", noop ? "yes" : "no")};
}

// Re-runs the experiments of criteria 6-8, which must all have run first.
Outcome determinism() {
  if (reports.size() != 3) return {false, "needs criteria 6, 7 and 8 in the same run"};
  std::vector<std::string> again;
  again.push_back(report_string(run_experiment(digit_corpus(), class_names(default_digit_specs()),
                                               digit_experiment(TrainMode::Framewise))));
  again.push_back(report_string(run_experiment(digit_corpus(), class_names(default_digit_specs()),
                                               jitter_experiment(TrainMode::Fuzzy))));
  const auto specs = all_specs();
  again.push_back(report_string(run_experiment(synth_corpus(specs, 120, 2025), class_names(specs),
                                               tremble_experiment(Pipeline::PerceptualBeta, true))));
  std::size_t same = 0;
  for (std::size_t i = 0; i < again.size() && i < reports.size(); ++i) same += again[i] == reports[i] ? 1 : 0;
  return {reports.size() == 3 && same == 3,
          fmt("%zu/%zu re-run reports byte-identical", same, reports.size())};
}

}  // namespace

// Optional arguments pick criteria by number; default runs all.
int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"beta math", 1.0, beta_math},
      {"fit oracle", 30.0, fit_oracle},
      {"segmentation round trip", 120.0, segmentation_round_trip},
      {"fuzzy EPC", 5.0, fuzzy_epc},
      {"CTC and gradients", 60.0, ctc_and_gradients},
      {"end-to-end synthetic recognition", 600.0, end_to_end},
      {"fuzzy vs framewise", 1200.0, fuzzy_vs_framewise},
      {"noise robustness", 1800.0, noise_robustness},
      {"preprocessing", 10.0, preprocessing},
      {"determinism", 0.0, determinism},
  };
  int failed = 0;
  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[a]);
      return 2;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::string budget = c.budget_s > 0.0 ? fmt(" (%.1f s, budget %.0f s)", secs, c.budget_s) : fmt(" (%.1f s)", secs);
    std::printf("%s %2zu %s: %s%s\n", pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), budget.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
