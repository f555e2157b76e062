#include <algorithm>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "betaink/augment.hpp"
#include "betaink/experiment.hpp"
#include "betaink/features.hpp"
#include "betaink/ink.hpp"
#include "betaink/model_io.hpp"
#include "betaink/noise.hpp"
#include "betaink/parallel.hpp"
#include "betaink/preprocess.hpp"
#include "betaink/records.hpp"
#include "betaink/service.hpp"
#include "betaink/synth_corpus.hpp"

using namespace betaink;

namespace {

InkFormat guess_format(const std::string& path, const std::string& explicit_format) {
  if (!explicit_format.empty()) return ink_format_from_name(explicit_format);
  const bool text = path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
  return text ? InkFormat::Text : InkFormat::Json;
}

std::vector<InkTrace> load_ink(const std::string& path, const std::string& format) {
  return parse_ink(read_file(path), guess_format(path, format));
}

void save_ink(const std::string& path, std::span<const InkTrace> traces, const std::string& format) {
  write_file(path, serialize_ink(traces, guess_format(path, format)));
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
  } else {
    write_file(path, bytes);
  }
}

/// Class list in order of first appearance.
std::vector<std::string> corpus_classes(std::span<const InkTrace> corpus) {
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].label) throw std::invalid_argument("trace " + std::to_string(i) + " has no label");
    if (std::find(classes.begin(), classes.end(), *corpus[i].label) == classes.end()) {
      classes.push_back(*corpus[i].label);
    }
  }
  return classes;
}

std::vector<SyntheticClassSpec> spec_set(const std::string& name) {
  if (name == "digits") return default_digit_specs();
  if (name == "letters") return default_letter_specs();
  auto all = default_digit_specs();
  for (auto& s : default_letter_specs()) all.push_back(std::move(s));
  return all;
}

struct PreprocessFlags {
  PreprocessConfig cfg;
  void add(CLI::App* app) {
    app->add_option("--resample-hz", cfg.resample_hz, "Resampling rate")->capture_default_str();
    app->add_option("--cutoff-hz", cfg.filter_cutoff_hz, "Low-pass cutoff")->capture_default_str();
    app->add_option("--order", cfg.filter_order, "Chebyshev filter order")->capture_default_str();
    app->add_option("--ripple-db", cfg.filter_ripple_db, "Pass-band ripple")->capture_default_str();
  }
};

struct LearnFlags {
  std::string pipeline = "perceptual-beta";
  std::string mode = "framewise";
  NetConfig net;
  TrainConfig train;
  std::vector<int> hidden{64};

  void add(CLI::App* app) {
    app->add_option("--pipeline", pipeline, "raw | theta-epc | perceptual | perceptual-beta")
        ->capture_default_str();
    app->add_option("--mode", mode, "framewise | fuzzy")->capture_default_str();
    app->add_option("--epochs", train.epochs)->capture_default_str();
    app->add_option("--batch-size", train.batch_size)->capture_default_str();
    app->add_option("--lr", train.learning_rate)->capture_default_str();
    app->add_option("--clip", train.grad_clip)->capture_default_str();
    app->add_option("--hidden", hidden, "Hidden sizes, one per layer")->delimiter(',');
    app->add_option("--dropout", net.dropout_p)->capture_default_str();
    app->add_flag("--ctc", net.use_ctc, "Use a CTC head");
    app->add_option("--alpha", train.fuzzy_alpha, "Fuzzy target hard-label weight")
        ->capture_default_str();
    app->add_option("--tau", train.fuzzy_tau, "Fuzzy target temperature")->capture_default_str();
    app->add_option("--seed", train.seed)->capture_default_str();
  }

  void finish() {
    train.mode = train_mode_from_name(mode);
    net.hidden_sizes = hidden;
    net.seed = train.seed;
  }
};

void print_log(const std::vector<EpochMetrics>& log) {
  for (const EpochMetrics& e : log) {
    std::fprintf(stderr, "epoch %3d  loss %.6f  train-acc %.4f%s\n", e.epoch, e.loss, e.accuracy,
                 e.skipped ? ("  skipped " + std::to_string(e.skipped)).c_str() : "");
  }
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta-elliptic digital ink toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BETAINK_VERSION);

  std::string in, out, format;

  auto* pre = app.add_subcommand("preprocess", "Resample, dehook, filter and normalize ink");
  PreprocessFlags pre_flags;
  pre->add_option("--in", in)->required();
  pre->add_option("--out", out)->required();
  pre->add_option("--format", format, "json | text (default: from extension)");
  pre_flags.add(pre);

  auto* seg = app.add_subcommand("segment", "Segment ink into elliptic strokes");
  PreprocessFlags seg_flags;
  bool seg_raw = false;
  seg->add_option("--in", in)->required();
  seg->add_option("--out", out, "Stroke file (default: stdout)");
  seg->add_option("--format", format);
  seg->add_flag("--no-preprocess", seg_raw, "Segment the ink as given");
  seg_flags.add(seg);

  auto* enc = app.add_subcommand("encode", "Encode stroke files as perceptual sequences");
  bool with_beta = false;
  enc->add_option("--in", in)->required();
  enc->add_option("--out", out, "Sequence file (default: stdout)");
  enc->add_flag("--with-beta", with_beta, "Append the 10 stroke parameters");

  auto* syn = app.add_subcommand("synth", "Render a labelled synthetic corpus");
  int per_class = 10;
  std::uint64_t seed = 1;
  std::string set = "digits";
  syn->add_option("--out", out)->required();
  syn->add_option("--format", format);
  syn->add_option("--per-class", per_class)->capture_default_str();
  syn->add_option("--seed", seed)->capture_default_str();
  syn->add_option("--set", set)->check(CLI::IsMember({"digits", "letters", "all"}))
      ->capture_default_str();

  auto* aug = app.add_subcommand("augment", "Expand a corpus with affine and jiggle replicas");
  int multiplier = 2;
  AugmentConfig aug_cfg;
  std::vector<double> scale;
  aug->add_option("--in", in)->required();
  aug->add_option("--out", out)->required();
  aug->add_option("--format", format);
  aug->add_option("--multiplier", multiplier)->capture_default_str();
  aug->add_option("--seed", aug_cfg.seed)->capture_default_str();
  aug->add_option("--rotate", aug_cfg.rotate_deg_max, "Max rotation in degrees")
      ->capture_default_str();
  aug->add_option("--scale", scale, "LO,HI")->delimiter(',')->expected(2);
  aug->add_option("--jiggle", aug_cfg.jiggle_sigma, "Jiggle sigma (fraction of height)")
      ->capture_default_str();
  aug->add_flag("--flips", aug_cfg.flips, "Allow horizontal flips");

  auto* trn = app.add_subcommand("train", "Train a sequence classifier on a labelled corpus");
  LearnFlags trn_flags;
  trn->add_option("--in", in)->required();
  trn->add_option("--out", out, "Model file")->required();
  trn->add_option("--format", format);
  trn_flags.add(trn);

  auto* ev = app.add_subcommand(
      "eval", "Score a model on a corpus, or run a full split/train/test experiment");
  LearnFlags ev_flags;
  std::string model_path, save_model_path;
  double split = 0.8;
  int ev_multiplier = 1;
  std::string noise_kind, noise_target = "both";
  double noise_sigma = 0.0, tremble_hz = 40.0;
  std::uint64_t ev_seed = 1;
  ev->add_option("--in", in)->required();
  ev->add_option("--out", out, "Report file (default: stdout)");
  ev->add_option("--format", format);
  ev->add_option("--model", model_path, "Trained model; omit to run an experiment");
  ev->add_option("--save-model", save_model_path, "Write the experiment's trained model");
  ev->add_option("--split", split)->capture_default_str();
  ev->add_option("--augment", ev_multiplier, "Training-set multiplier")->capture_default_str();
  ev->add_option("--noise", noise_kind, "gaussian_jitter | tremble");
  ev->add_option("--noise-sigma", noise_sigma)->capture_default_str();
  ev->add_option("--tremble-hz", tremble_hz)->capture_default_str();
  ev->add_option("--noise-on", noise_target, "train | test | both")->capture_default_str();
  ev->add_option("--split-seed", ev_seed, "Seeds the split and noise")->capture_default_str();
  ev_flags.add(ev);

  auto* srv = app.add_subcommand("serve", "Serve /recognize, /stream and /health over HTTP");
  std::vector<std::string> models;
  std::string host = "127.0.0.1";
  int port = 8080;
  srv->add_option("--model", models, "NAME=PATH or PATH; repeatable")->required();
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();

  auto* gc = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  NetConfig gc_net;
  gc_net.input_dim = 4;
  gc_net.hidden_sizes = {6};
  gc_net.num_classes = 3;
  gc_net.dropout_p = 0.0;
  int gc_steps = 8, gc_seeds = 3;
  double gc_tol = 1e-4;
  gc->add_option("--input-dim", gc_net.input_dim)->capture_default_str();
  gc->add_option("--hidden", gc_net.hidden_sizes)->delimiter(',');
  gc->add_option("--classes", gc_net.num_classes)->capture_default_str();
  gc->add_option("--steps", gc_steps)->capture_default_str();
  gc->add_option("--seeds", gc_seeds)->capture_default_str();
  gc->add_option("--tolerance", gc_tol)->capture_default_str();
  gc->add_flag("--ctc", gc_net.use_ctc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) {
      pre_flags.cfg.validate();
      std::vector<InkTrace> traces = load_ink(in, format);
      for (InkTrace& t : traces) t = preprocess(t, pre_flags.cfg);
      save_ink(out, traces, format);
    } else if (*seg) {
      FeatureConfig fc;
      fc.preprocess = seg_flags.cfg;
      fc.preprocess.validate();
      std::vector<StrokeFileEntry> entries;
      for (const InkTrace& t : load_ink(in, format)) {
        const InkTrace ready = seg_raw ? canonicalize(t) : preprocess(t, fc.preprocess);
        SegmentResult r = segment(ready, fc.segment);
        for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
        entries.push_back({t.label, std::move(r.strokes)});
      }
      write_output(out, write_stroke_file(entries));
    } else if (*enc) {
      std::vector<PerceptualSequence> seqs;
      for (const StrokeFileEntry& e : read_stroke_file(read_file(in))) {
        PerceptualSequence s = encode_sequence(e.strokes, {}, with_beta);
        s.label = e.label;
        seqs.push_back(std::move(s));
      }
      write_output(out, write_sequence_file(seqs));
    } else if (*syn) {
      if (per_class < 1) throw std::invalid_argument("--per-class must be >= 1");
      const auto specs = spec_set(set);
      save_ink(out, synth_corpus(specs, per_class, seed), format);
    } else if (*aug) {
      if (!scale.empty()) {
        aug_cfg.scale_lo = scale[0];
        aug_cfg.scale_hi = scale[1];
      }
      const std::vector<InkTrace> corpus = load_ink(in, format);
      save_ink(out, expand_corpus(corpus, aug_cfg, multiplier), format);
    } else if (*trn) {
      trn_flags.finish();
      const std::vector<InkTrace> corpus = load_ink(in, format);
      Model m;
      m.pipeline = pipeline_from_name(trn_flags.pipeline);
      m.classes = corpus_classes(corpus);
      m.train = trn_flags.train;
      const std::vector<Sample> samples = featurize_corpus(corpus, m.pipeline, m.features, m.classes);
      NetConfig nc = trn_flags.net;
      nc.input_dim = pipeline_input_dim(m.pipeline);
      nc.num_classes = static_cast<int>(m.classes.size());
      m.net = make_net(nc);
      const TrainResult tr = train(m.net, samples, m.train);
      print_log(tr.log);
      m.training_log = tr.log;
      save_model(m, out);
    } else if (*ev) {
      const std::vector<InkTrace> corpus = load_ink(in, format);
      EvalReport report;
      if (!model_path.empty()) {
        report = evaluate(load_model(model_path), corpus);
      } else {
        ev_flags.finish();
        ExperimentConfig cfg;
        cfg.pipeline = pipeline_from_name(ev_flags.pipeline);
        cfg.net = ev_flags.net;
        cfg.train = ev_flags.train;
        cfg.split = split;
        cfg.augment_multiplier = ev_multiplier;
        cfg.seed = ev_seed;
        if (!noise_kind.empty()) {
          NoiseSpec ns;
          ns.kind = noise_kind_from_name(noise_kind);
          ns.sigma = noise_sigma;
          ns.tremble_hz = tremble_hz;
          ns.apply_to = noise_target_from_name(noise_target);
          ns.validate();
          cfg.noise = ns;
        }
        Model trained;
        report = run_experiment(corpus, corpus_classes(corpus), cfg, &trained);
        print_log(report.training_log);
        if (!save_model_path.empty()) save_model(trained, save_model_path);
      }
      std::fprintf(stderr, "recognition rate %.4f (%zu test samples)\n", report.recognition_rate,
                   report.test_size);
      write_output(out, report_string(report));
    } else if (*srv) {
      std::vector<std::pair<std::string, Model>> loaded;
      for (const std::string& spec : models) {
        const auto eq = spec.find('=');
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        const std::string name =
            eq == std::string::npos ? std::filesystem::path(path).stem().string() : spec.substr(0, eq);
        loaded.emplace_back(name, load_model(path));
      }
      RecognitionService service(std::move(loaded));
      HttpServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      server.serve();
      g_server = nullptr;
    } else if (*gc) {
      double worst = 0.0;
      for (int s = 1; s <= gc_seeds; ++s) {
        NetConfig nc = gc_net;
        nc.seed = static_cast<std::uint64_t>(s);
        const SeqNet net = make_net(nc);
        Rng rng(derive_seed({static_cast<std::uint64_t>(s), 0x4743}));
        Eigen::MatrixXd x(gc_steps, nc.input_dim);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
        Target target = Target::hard(static_cast<int>(rng.below(static_cast<std::uint64_t>(nc.num_classes))));
        if (nc.use_ctc) {
          std::vector<int> seq;
          for (int k = 0; k < std::min(3, gc_steps / 2); ++k) {
            seq.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(nc.num_classes))));
          }
          target = Target::ctc(seq);
        }
        const GradCheckReport r = grad_check(net, x, target);
        std::printf("seed %d  parameters %zu  max relative error %.3e  max absolute error %.3e\n", s,
                    r.parameters, r.max_relative_error, r.max_absolute_error);
        worst = std::max(worst, r.max_relative_error);
      }
      const bool ok = worst <= gc_tol;
      std::printf("%s: worst relative error %.3e (tolerance %.1e)\n", ok ? "ok" : "FAILED", worst, gc_tol);
      return ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
