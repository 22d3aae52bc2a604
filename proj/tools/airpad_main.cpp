// SPDX-License-Identifier: Apache-2.0
// airpad command-line entry point.
#include <fmt/core.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "airpad/dataset/augment.hpp"
#include "airpad/dataset/dataset_io.hpp"
#include "airpad/dataset/synth.hpp"
#include "airpad/gesture/capture.hpp"
#include "airpad/nn/gradcheck.hpp"
#include "airpad/nn/train.hpp"
#include "airpad/random.hpp"
#include "airpad/sensing/io.hpp"
#include "airpad/service/server.hpp"

namespace {

using namespace airpad;

constexpr const char* kSeedEnv = "AIRPAD_SEED";

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

struct SynthArgs {
  std::size_t per_class = 1000;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
  double noise = sensing::SensorConfig{}.noise_sigma;
};

int run_synth(const SynthArgs& a) {
  dataset::SynthConfig cfg;
  cfg.per_class = a.per_class;
  cfg.seed = a.seed;
  sensing::SensorConfig sensor;
  sensor.noise_sigma = a.noise;
  const auto result = dataset::build_dataset(cfg, sensor, a.threads);
  dataset::save_dataset(a.out, result.dataset, {a.seed, a.per_class});
  fmt::print("wrote {} train / {} test images to {} ({} re-drawn trajectories)\n",
             result.dataset.train.size(), result.dataset.test.size(), a.out,
             result.report.failures);
  return 0;
}

struct TrainArgs {
  std::string model = "cnn-aug";
  std::string data;
  std::size_t epochs = 20;
  std::size_t batch = 0;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::string out;
  std::string metrics;
  bool val_augment = false;
};

int run_train(const TrainArgs& a) {
  const nn::ModelSpec spec = nn::ModelSpec::preset(a.model);
  const dataset::Dataset data = dataset::load_dataset(a.data);

  nn::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch = a.batch ? a.batch : (spec.id == "cnn" ? 64 : 32);
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  cfg.label = a.model;
  if (a.model == "cnn-aug") cfg.augment = dataset::AugmentConfig{};
  cfg.on_epoch = [](const nn::EpochMetrics& m) {
    fmt::print("epoch {:>3}  loss {:.4f}  acc {:.4f}  val_loss {:.4f}  val_acc {:.4f}\n", m.epoch,
               m.train_loss, m.train_accuracy, m.val_loss, m.val_accuracy);
    std::fflush(stdout);
  };

  std::vector<gesture::DigitImage> val = data.test;
  if (a.val_augment) {
    dataset::AugmentConfig aug;
    aug.seed = derive_seed(a.seed, {0x7a1});
    val = dataset::augment_all(data.test, aug);
  }

  fmt::print("training {} on {} images ({} validation), batch {}\n", a.model, data.train.size(),
             val.size(), cfg.batch);
  const nn::TrainResult result = nn::train(spec, data.train, val, cfg);
  result.bundle.save(a.out);
  if (!a.metrics.empty()) write_text(a.metrics, result.report.to_csv());
  fmt::print("saved {} ({:.1f} s)\n", a.out, result.report.wall_seconds);
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string confusion;
  std::string split = "test";
};

int run_eval(const EvalArgs& a) {
  const nn::ModelBundle bundle = nn::ModelBundle::load(a.model);
  const dataset::Dataset data = dataset::load_dataset(a.data);
  const auto& images = a.split == "train" ? data.train : data.test;
  const nn::EvalResult r = nn::evaluate(bundle, images);
  fmt::print("split {}  n {}  loss {:.4f}  accuracy {:.4f}\n", a.split, images.size(), r.loss,
             r.accuracy);
  if (!a.confusion.empty()) write_text(a.confusion, r.confusion.to_csv());
  return 0;
}

struct SimulateArgs {
  std::string traj;
  std::string frames;
  bool classify = false;
  std::string model;
  std::uint64_t seed = 0;
  double noise = sensing::SensorConfig{}.noise_sigma;
};

int run_simulate(const SimulateArgs& a) {
  const auto samples = sensing::read_trajectory_json(a.traj);
  sensing::SensorConfig sensor;
  sensor.seed = a.seed;
  sensor.noise_sigma = a.noise;
  const auto result =
      gesture::capture(samples, sensing::ElectrodeLayout::standard(), sensor, {});
  if (!a.frames.empty()) sensing::write_frames_csv(a.frames, result.frames);
  fmt::print("frames {}  gestures {}  discarded {}\n", result.frames.size(),
             result.gestures.size(), result.discarded);
  if (a.classify) {
    if (a.model.empty()) throw Error(ErrorCode::kNoModelLoaded, "--classify needs --model");
    const nn::ModelBundle bundle = nn::ModelBundle::load(a.model);
    for (std::size_t i = 0; i < result.gestures.size(); ++i) {
      const auto& g = result.gestures[i];
      const auto p = nn::predict(bundle, gesture::render_gesture(g).quantized());
      fmt::print("gesture {}  t {:.3f}-{:.3f} s  points {}  digit {}  confidence {:.3f}\n", i,
                 g.start_t, g.end_t, g.points.size(), p.digit, p.confidence);
    }
  }
  return 0;
}

struct TrajectoryArgs {
  int digit = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_trajectory(const TrajectoryArgs& a) {
  dataset::SynthConfig cfg;
  std::mt19937_64 rng(derive_seed(a.seed, {static_cast<std::uint64_t>(a.digit)}));
  const auto samples = dataset::synth_trajectory(a.digit, cfg, rng);
  sensing::write_trajectory_json(a.out, samples);
  fmt::print("wrote {} samples ({:.2f} s) to {}\n", samples.size(),
             samples.back().t_s - samples.front().t_s, a.out);
  return 0;
}

int run_gradcheck(std::uint64_t seed, double tolerance) {
  bool ok = true;
  for (const auto& r : nn::gradient_suite(seed)) {
    const bool pass = r.passed(tolerance);
    ok = ok && pass;
    fmt::print("{:<22} {}  max_rel_error {:.3e}  ({} entries)\n", r.name, pass ? "PASS" : "FAIL",
               r.max_rel_error, r.checked);
  }
  return ok ? 0 : 1;
}

struct ServeArgs {
  unsigned short port = 8080;
  std::string address = "0.0.0.0";
  std::string model;
  std::string static_dir;
  int idle_timeout = 300;
  int threads = 2;
};

int run_serve(const ServeArgs& a) {
  std::shared_ptr<const nn::ModelBundle> bundle;
  if (!a.model.empty()) bundle = std::make_shared<const nn::ModelBundle>(nn::ModelBundle::load(a.model));
  service::ServerConfig cfg;
  cfg.address = a.address;
  cfg.port = a.port;
  cfg.threads = a.threads;
  cfg.idle_timeout = std::chrono::seconds(a.idle_timeout);
  if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);  // worker threads inherit the mask

  service::Server server(cfg, bundle);
  const unsigned short port = server.start();
  fmt::print("listening on {}:{}{}\n", a.address, port, bundle ? "" : " (no model loaded)");
  std::fflush(stdout);
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airpad: simulated capacitive air-writing digit recognition"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "synthesize a labeled image dataset");
  s->add_option("--per-class", synth.per_class, "trajectories per digit")->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed)->envname(kSeedEnv);
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--threads", synth.threads)->check(CLI::PositiveNumber);
  s->add_option("--noise", synth.noise, "sensor noise sigma");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a classifier");
  t->add_option("--model", train.model)->check(CLI::IsMember({"cnn-aug", "cnn", "mlp", "rnn"}));
  t->add_option("--data", train.data, "dataset directory")->required();
  t->add_option("--epochs", train.epochs);
  t->add_option("--batch", train.batch, "default 64 for cnn, 32 otherwise");
  t->add_option("--lr", train.lr);
  t->add_option("--seed", train.seed)->envname(kSeedEnv);
  t->add_option("--out", train.out, "model file")->required();
  t->add_option("--metrics", train.metrics, "per-epoch CSV");
  t->add_flag("--val-augment", train.val_augment, "validate on augmented test images");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "evaluate a model on a dataset split");
  e->add_option("--model", eval.model)->required();
  e->add_option("--data", eval.data)->required();
  e->add_option("--confusion", eval.confusion, "confusion matrix CSV");
  e->add_option("--split", eval.split)->check(CLI::IsMember({"train", "test"}));

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "replay a trajectory through the sensor and segmenter");
  m->add_option("--traj", sim.traj, "trajectory JSON")->required();
  m->add_option("--frames", sim.frames, "channel frames CSV");
  m->add_flag("--classify", sim.classify);
  m->add_option("--model", sim.model);
  m->add_option("--seed", sim.seed, "sensor noise seed")->envname(kSeedEnv);
  m->add_option("--noise", sim.noise, "sensor noise sigma");

  TrajectoryArgs traj;
  auto* tj = app.add_subcommand("trajectory", "write one synthetic hand trajectory as JSON");
  tj->add_option("--digit", traj.digit)->required()->check(CLI::Range(0, 9));
  tj->add_option("--seed", traj.seed)->envname(kSeedEnv);
  tj->add_option("--out", traj.out)->required();

  std::uint64_t gc_seed = 1;
  double gc_tol = 1e-4;
  auto* g = app.add_subcommand("gradcheck", "finite-difference check of every layer");
  g->add_option("--seed", gc_seed)->envname(kSeedEnv);
  g->add_option("--tolerance", gc_tol);

  ServeArgs serve;
  auto* v = app.add_subcommand("serve", "run the HTTP/WebSocket service");
  v->add_option("--port", serve.port);
  v->add_option("--address", serve.address);
  v->add_option("--model", serve.model);
  v->add_option("--static", serve.static_dir, "directory of web assets");
  v->add_option("--idle-timeout", serve.idle_timeout, "seconds")->check(CLI::PositiveNumber);
  v->add_option("--threads", serve.threads)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return run_synth(synth);
    if (*t) return run_train(train);
    if (*e) return run_eval(eval);
    if (*m) return run_simulate(sim);
    if (*tj) return run_trajectory(traj);
    if (*g) return run_gradcheck(gc_seed, gc_tol);
    if (*v) return run_serve(serve);
  } catch (const airpad::Error& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return 2;
  }
  return 1;
}
