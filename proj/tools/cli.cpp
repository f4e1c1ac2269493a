#include "cli.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "quanvnext/autodiff/gradcheck.hpp"
#include "quanvnext/autodiff/train.hpp"
#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/data/synth.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/eval/evaluate.hpp"
#include "quanvnext/eval/explain.hpp"
#include "quanvnext/eval/uncertainty.hpp"
#include "quanvnext/model/checkpoint.hpp"
#include "quanvnext/parallel.hpp"

namespace quanvnext::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Files a command produces. Unless commit() runs, everything registered is
// deleted again, along with the output directory if this run created it.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    created_dir_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }
  Outputs(const Outputs&) = delete;
  Outputs& operator=(const Outputs&) = delete;

  ~Outputs() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  const fs::path& dir() const noexcept { return dir_; }

  fs::path track(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = track(name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }

  // Writes run_<command>.json listing config, seed and the hash of every
  // produced file that exists.
  void commit(const std::string& command, json config, std::uint64_t seed) {
    json artifacts = json::object();
    for (const auto& f : files_) {
      if (fs::exists(f)) artifacts[f.filename().string()] = sha256_file(f);
    }
    json manifest{{"command", command}, {"seed", seed}, {"config", std::move(config)},
                  {"artifacts", std::move(artifacts)}};
    write("run_" + command + ".json", manifest.dump(2) + "\n");
    committed_ = true;
  }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  bool committed_ = false;
  std::vector<fs::path> files_;
};

json to_json(const RunConfig& c) {
  json j{{"command", c.command}, {"seed", c.seed}, {"threads", c.threads}};
  if (!c.manifest.empty()) j["manifest"] = c.manifest;
  if (c.synth.subjects > 0) {
    j["synth"] = {{"subjects", c.synth.subjects}, {"channels", c.synth.channels},
                  {"fs", c.synth.fs},             {"seconds", c.synth.seconds},
                  {"noise", c.synth.noise},       {"seed", c.synth.seed}};
  }
  if (c.command == "train") {
    j.update({{"preset", c.preset},
              {"model_config", c.model_config},
              {"width", c.width},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"no_skip", c.no_skip},
              {"no_aggregation", c.no_aggregation},
              {"no_shuffle", c.no_shuffle},
              {"select", c.select},
              {"window_s", c.window_s},
              {"overlap", c.overlap},
              {"train_fraction", c.train_fraction},
              {"validation_fraction", c.validation_fraction}});
  }
  if (c.command == "eval" || c.command == "uncertainty" || c.command == "explain") {
    j.update({{"checkpoint", c.checkpoint}, {"subset", c.subset}});
  }
  if (c.command == "uncertainty") j.update({{"eps", c.epsilons}, {"n", c.perturbations}});
  if (c.command == "explain") {
    j.update({{"stage", c.stage},
              {"max_samples", c.max_samples},
              {"stft_window", c.stft_window},
              {"stft_hop", c.stft_hop}});
  }
  return j;
}

std::vector<data::SubjectRecording> load_recordings(const RunConfig& c) {
  const bool has_manifest = !c.manifest.empty();
  const bool has_synth = c.synth.subjects > 0;
  if (has_manifest == has_synth) {
    throw ConfigError("exactly one data source is required: --manifest or --synth-subjects");
  }
  if (has_manifest) return data::load_all(data::load_manifest(c.manifest));
  return data::synth_generate({.subjects_per_class = c.synth.subjects,
                               .channels = c.synth.channels,
                               .sampling_rate_hz = c.synth.fs,
                               .duration_s = c.synth.seconds,
                               .noise_scale = c.synth.noise,
                               .seed = c.synth.seed});
}

data::PipelineOptions pipeline_options(const RunConfig& c) {
  return {.window_s = c.window_s,
          .overlap = c.overlap,
          .train_fraction = c.train_fraction,
          .validation_fraction = c.select == "val" ? c.validation_fraction : 0.0,
          .seed = c.seed};
}

json pipeline_json(const data::PipelineOptions& p) {
  return {{"window_s", p.window_s},
          {"overlap", p.overlap},
          {"train_fraction", p.train_fraction},
          {"validation_fraction", p.validation_fraction},
          {"seed", p.seed}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void print_summary(const std::string& what, const eval::Summary& s) {
  std::printf("%s: samples %zu  accuracy %s  mcc %s  auc %s  ece %s\n", what.c_str(), s.samples,
              fmt(s.accuracy).c_str(), fmt(s.mcc).c_str(), fmt(s.auc).c_str(), fmt(s.ece).c_str());
}

fs::path default_out(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (!c.checkpoint.empty()) return fs::path(c.checkpoint).parent_path().empty()
                                        ? fs::path(".")
                                        : fs::path(c.checkpoint).parent_path();
  throw ConfigError("--out is required for '" + c.command + "'");
}

int cmd_synth(const RunConfig& c) {
  if (c.synth.subjects < 1) throw ConfigError("--subjects must be positive");
  Outputs out(default_out(c));
  const auto recs = load_recordings(c);
  std::vector<data::ManifestEntry> entries;
  for (const auto& r : recs) {
    const std::string file = r.subject_id + ".f32";
    out.track(file);
    entries.push_back(data::write_subject(r, out.dir(), file));
  }
  data::write_manifest(out.track("manifest.json"), entries);
  out.commit(c.command, to_json(c), c.synth.seed);
  std::printf("wrote %zu subjects to %s\n", recs.size(), out.dir().string().c_str());
  return 0;
}

model::ModelConfig resolve_model_config(const RunConfig& c, const data::PreparedData& prep) {
  model::ModelConfig mc;
  const auto& any = !prep.train.windows.empty() ? prep.train.windows.front() : prep.test.windows.front();
  const int channels = static_cast<int>(any.signal.rows());
  const int length = static_cast<int>(any.signal.cols());
  if (!c.model_config.empty()) {
    mc = model::ModelConfig::from_json(read_text(c.model_config));
    if (mc.input_channels != channels || mc.input_length != length) {
      throw ConfigError("model config expects input (" + std::to_string(mc.input_channels) + ", " +
                        std::to_string(mc.input_length) + ") but the data windows are (" +
                        std::to_string(channels) + ", " + std::to_string(length) + ")");
    }
  } else {
    // Presets fix the architecture; the input geometry follows the data.
    mc = model::ModelConfig::preset_named(c.preset);
    mc.input_channels = channels;
    mc.input_length = length;
  }
  if (c.width > 0) mc.embed_width = c.width;
  if (c.no_skip) mc.use_skip = false;
  if (c.no_aggregation) mc.use_aggregation = false;
  if (c.no_shuffle) mc.use_shuffle = false;
  mc.validate();
  return mc;
}

int cmd_train(const RunConfig& c) {
  if (c.out.empty()) throw ConfigError("--out is required for 'train'");
  const auto selection = autodiff::parse_selection(c.select);
  const auto popts = pipeline_options(c);
  const auto prep = data::prepare(load_recordings(c), popts);
  if (prep.train.windows.empty()) throw ConfigError("no training windows after preprocessing");
  const auto mc = resolve_model_config(c, prep);

  auto m = model::build_model(mc, c.seed);
  m.normalization = {prep.train.stats.mean, prep.train.stats.stddev};

  autodiff::TrainOptions opts;
  opts.epochs = c.epochs;
  opts.batch_size = c.batch_size;
  opts.learning_rate = c.learning_rate > 0 ? c.learning_rate : autodiff::default_learning_rate(mc.preset);
  opts.seed = c.seed;
  opts.selection = selection;
  json metadata{{"seed", c.seed},
                {"pipeline", pipeline_json(popts)},
                {"learning_rate", opts.learning_rate},
                {"batch_size", c.batch_size},
                {"select", c.select},
                {"split", {{"train", prep.split.train}, {"test", prep.split.test}}}};
  opts.checkpoint_metadata = metadata.dump();

  Outputs out(c.out);
  opts.checkpoint_dir = out.dir();
  for (int e = 0; e <= c.epochs; ++e) out.track("epoch_" + std::to_string(e) + ".ckpt");
  opts.on_epoch = [](int epoch, double loss) {
    std::fprintf(stderr, "epoch %d  train_loss %s\n", epoch, fmt(loss).c_str());
  };

  const auto& monitor = selection == autodiff::Selection::kValidation ? prep.validation.windows
                                                                       : prep.test.windows;
  if (selection == autodiff::Selection::kValidation && monitor.empty()) {
    throw ConfigError("validation selection needs a validation split (--val-fraction > 0)");
  }
  const auto result = autodiff::train(std::move(m), prep.train.windows, monitor, opts);

  out.write("metrics.csv", autodiff::metrics_csv(result.log));
  model::save_checkpoint(out.track("best.ckpt"), result.selected_model, opts.checkpoint_metadata);
  json config = to_json(c);
  config["resolved_model"] = json::parse(mc.to_json());
  config["resolved_learning_rate"] = opts.learning_rate;
  config["selected_epoch"] = result.selected_epoch;
  out.commit(c.command, config, c.seed);

  std::printf("selected epoch %d (%s)\n", result.selected_epoch, c.select.c_str());
  if (!prep.test.windows.empty()) {
    print_summary("test", eval::evaluate(result.selected_model, prep.test.windows));
  }
  return 0;
}

// Windows for the post-training commands. "test" rebuilds the training-time
// split from the checkpoint metadata; "all" windows every recording and
// applies the checkpoint's normalization.
std::vector<data::Window> subset_windows(const RunConfig& c, const model::LoadedCheckpoint& ckpt) {
  const auto recs = load_recordings(c);
  const json meta = json::parse(ckpt.metadata_json.empty() ? "{}" : ckpt.metadata_json);
  data::PipelineOptions popts = pipeline_options(c);
  if (meta.contains("pipeline")) {
    const auto& p = meta["pipeline"];
    popts = {.window_s = p.at("window_s"),
             .overlap = p.at("overlap"),
             .train_fraction = p.at("train_fraction"),
             .validation_fraction = p.at("validation_fraction"),
             .seed = p.at("seed")};
  }
  if (c.subset == "test") return data::prepare(recs, popts).test.windows;
  if (c.subset != "all") throw ConfigError("unknown subset '" + c.subset + "' (test|all)");
  if (ckpt.model.normalization.empty()) throw ConfigError("checkpoint has no normalization statistics");
  std::vector<data::Window> windows;
  const data::ZScoreStats stats{ckpt.model.normalization.mean, ckpt.model.normalization.stddev};
  auto sorted = recs;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });
  for (const auto& r : sorted) {
    auto w = data::zscore_apply(data::window_signal(r, popts.window_s, popts.overlap), stats);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return windows;
}

model::LoadedCheckpoint load_ckpt(const RunConfig& c) {
  if (c.checkpoint.empty()) throw ConfigError("--ckpt is required for '" + c.command + "'");
  return model::load_checkpoint(c.checkpoint);
}

int cmd_eval(const RunConfig& c) {
  const auto ckpt = load_ckpt(c);
  const auto windows = subset_windows(c, ckpt);
  if (windows.empty()) throw ConfigError("no windows to evaluate");
  Outputs out(default_out(c));
  const auto preds = eval::predict(ckpt.model, windows);
  const auto s = eval::summarize(preds);
  out.write("eval.csv", "samples,accuracy,mcc,auc,ece,mean_loss\n" + std::to_string(s.samples) + "," +
                            fmt(s.accuracy) + "," + fmt(s.mcc) + "," + fmt(s.auc) + "," + fmt(s.ece) +
                            "," + fmt(s.mean_loss) + "\n");
  std::string rows = "subject_id,label,predicted,positive_probability\n";
  for (std::size_t i = 0; i < windows.size(); ++i) {
    rows += windows[i].subject_id + "," + std::to_string(preds.labels[i]) + "," +
            std::to_string(preds.predicted[i]) + "," + fmt(preds.positive_probability[i]) + "\n";
  }
  out.write("predictions.csv", rows);
  out.commit(c.command, to_json(c), c.seed);
  print_summary(c.subset, s);
  return 0;
}

int cmd_uncertainty(const RunConfig& c) {
  if (c.epsilons.empty()) throw ConfigError("--eps needs at least one value");
  const auto ckpt = load_ckpt(c);
  const auto windows = subset_windows(c, ckpt);
  if (windows.empty()) throw ConfigError("no windows to evaluate");
  Outputs out(default_out(c));
  const auto records = eval::uncertainty_report(ckpt.model, windows, c.epsilons, c.seed, c.perturbations);
  const std::string csv = eval::uncertainty_csv(records);
  out.write("uncertainty.csv", csv);
  out.commit(c.command, to_json(c), c.seed);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

std::vector<data::Window> spread_sample(const std::vector<data::Window>& windows, std::size_t max) {
  if (max == 0 || windows.size() <= max) return windows;
  std::vector<data::Window> picked;
  for (std::size_t i = 0; i < max; ++i) picked.push_back(windows[i * windows.size() / max]);
  return picked;
}

int cmd_explain(const RunConfig& c) {
  const auto ckpt = load_ckpt(c);
  const auto all = subset_windows(c, ckpt);
  if (all.empty()) throw ConfigError("no windows to explain");
  const auto stages_known = eval::activation_stages(ckpt.model);
  std::vector<std::string> stages;
  if (c.stage == "all") {
    stages = stages_known;
  } else if (std::find(stages_known.begin(), stages_known.end(), c.stage) != stages_known.end()) {
    stages = {c.stage};
  } else {
    throw ConfigError("unknown stage '" + c.stage + "' (all|embedding|block_1..block_" +
                      std::to_string(ckpt.model.blocks.size()) + "|projection)");
  }
  const auto samples = spread_sample(all, c.max_samples);
  Outputs out(default_out(c));
  for (const auto& stage : stages) {
    const auto act = eval::export_activations(ckpt.model, samples, stage);
    eval::write_activations_csv(out.track("activations_" + stage + ".csv"), act, samples);
    eval::write_activation_summary_csv(out.track("activation_summary_" + stage + ".csv"), act);
    if (act.samples.front().cols() >= c.stft_window) {
      eval::write_spectrogram_csv(out.track("spectrogram_" + stage + ".csv"), act, c.stft_window,
                                  c.stft_hop);
    } else {
      std::fprintf(stderr, "note: %s is shorter than the STFT window; no spectrogram written\n",
                   stage.c_str());
    }
    std::printf("%s: representative channel %zu\n", stage.c_str(), act.representative_channel);
  }
  eval::write_embeddings_csv(out.track("embeddings.csv"), eval::export_embeddings(ckpt.model, all));
  out.commit(c.command, to_json(c), c.seed);
  return 0;
}

int cmd_selfcheck(const RunConfig& c) {
  struct Item {
    const char* name;
    autodiff::CheckSummary s;
  };
  const Item items[] = {
      {"state invariants", autodiff::check_state_invariants(c.cases * 10, c.seed)},
      {"filter gradients", autodiff::check_filter_gradients(c.cases, c.seed)},
      {"model gradients", autodiff::check_model_gradients(c.cases, c.seed)},
  };
  bool ok = true;
  for (const auto& it : items) {
    std::printf("%-17s %s  cases %zu  worst %.3g%s%s\n", it.name, it.s.ok() ? "ok  " : "FAIL", it.s.cases,
                it.s.worst, it.s.ok() ? "" : "  first: ", it.s.first_failure.c_str());
    ok = ok && it.s.ok();
  }
  return ok ? 0 : 1;
}

void add_data_source(CLI::App* sub, RunConfig& c) {
  auto* manifest = sub->add_option("--manifest", c.manifest,
                                   "Dataset manifest (file, directory holding manifest.json, or "
                                   "path without the .json suffix)");
  auto* synth = sub->add_option("--synth-subjects", c.synth.subjects,
                                "Use generated data with this many subjects per class instead of "
                                "a manifest");
  manifest->excludes(synth);
  sub->add_option("--synth-channels", c.synth.channels, "Channels of generated data")
      ->capture_default_str()->needs(synth);
  sub->add_option("--synth-fs", c.synth.fs, "Sampling rate of generated data in Hz")
      ->capture_default_str()->needs(synth);
  sub->add_option("--synth-seconds", c.synth.seconds, "Recording length of generated data")
      ->capture_default_str()->needs(synth);
  sub->add_option("--synth-noise", c.synth.noise, "Background noise scale of generated data")
      ->capture_default_str()->needs(synth);
  sub->add_option("--synth-seed", c.synth.seed, "Seed for generated data")
      ->capture_default_str()->needs(synth);
}

void add_checkpoint_inputs(CLI::App* sub, RunConfig& c) {
  sub->add_option("--ckpt", c.checkpoint, "Checkpoint to load")->required();
  add_data_source(sub, c);
  sub->add_option("--subset", c.subset,
                  "Windows to use: 'test' rebuilds the training split, 'all' uses every recording")
      ->capture_default_str()
      ->check(CLI::IsMember({"test", "all"}));
  sub->add_option("--out", c.out, "Output directory (default: the checkpoint's directory)");
  sub->add_option("--seed", c.seed, "Seed for any randomized step")->capture_default_str();
}

}  // namespace

std::unique_ptr<CLI::App> build_app(RunConfig& c) {
  auto app = std::make_unique<CLI::App>("Quanvolutional time-series classifier: data, training, "
                                        "evaluation and analysis",
                                        "quanvnext");
  app->set_config("--config", "", "TOML/INI file with option values; command-line flags win");
  app->add_option("--threads", c.threads, "Worker thread cap (0 = all cores)")->capture_default_str();
  app->require_subcommand(1);

  auto* synth = app->add_subcommand("synth-data", "Write a seeded synthetic EEG-like dataset");
  synth->add_option("--subjects", c.synth.subjects, "Subjects per class")->required();
  synth->add_option("--channels", c.synth.channels, "Channels per recording")->capture_default_str();
  synth->add_option("--fs", c.synth.fs, "Sampling rate in Hz")->capture_default_str();
  synth->add_option("--seconds", c.synth.seconds, "Recording length in seconds")->capture_default_str();
  synth->add_option("--noise", c.synth.noise, "Background noise scale")->capture_default_str();
  synth->add_option("--seed", c.synth.seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", c.out, "Output directory")->required();

  auto* train = app->add_subcommand("train", "Train a model and checkpoint every epoch");
  add_data_source(train, c);
  auto* preset = train->add_option("--preset", c.preset, "Architecture preset")
                     ->capture_default_str()
                     ->check(CLI::IsMember({"dataset-1", "dataset-2"}));
  train->add_option("--model-config", c.model_config, "JSON model configuration file")
      ->excludes(preset);
  train->add_option("--width", c.width, "Override the embedding width (0 keeps the preset)")
      ->capture_default_str();
  train->add_option("--seed", c.seed, "Seed for initialization, splits and shuffling")
      ->capture_default_str();
  train->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  train->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str();
  train->add_option("--lr", c.learning_rate,
                    "Learning rate (0 = preset default: 0.00015 dataset-1, 0.0025 otherwise)")
      ->capture_default_str();
  train->add_option("--out", c.out, "Run directory")->required();
  train->add_flag("--no-skip", c.no_skip, "Ablation: drop the residual skip connection");
  train->add_flag("--no-aggregation", c.no_aggregation,
                  "Ablation: replace feature concatenation with a full-width quanvolution");
  train->add_flag("--no-shuffle", c.no_shuffle, "Ablation: disable both channel shuffles");
  train->add_option("--select", c.select,
                    "Checkpoint selection for best.ckpt: val (held-out train subjects), test, last")
      ->capture_default_str()
      ->check(CLI::IsMember({"val", "test", "last"}));
  train->add_option("--window-s", c.window_s, "Window length in seconds")->capture_default_str();
  train->add_option("--overlap", c.overlap, "Window overlap fraction")->capture_default_str();
  train->add_option("--train-fraction", c.train_fraction, "Fraction of subjects used for training")
      ->capture_default_str();
  train->add_option("--val-fraction", c.validation_fraction,
                    "Fraction of training subjects held out for --select val")
      ->capture_default_str();

  auto* eval = app->add_subcommand("eval", "Score a checkpoint");
  add_checkpoint_inputs(eval, c);

  auto* unc = app->add_subcommand("uncertainty", "Gaussian-perturbation uncertainty report");
  add_checkpoint_inputs(unc, c);
  unc->add_option("--eps", c.epsilons, "Comma-separated noise magnitudes")
      ->delimiter(',')
      ->capture_default_str();
  unc->add_option("--n", c.perturbations, "Perturbed copies per window")->capture_default_str();

  auto* explain = app->add_subcommand("explain", "Export activations, spectrograms and embeddings");
  add_checkpoint_inputs(explain, c);
  explain->add_option("--stage", c.stage, "all, embedding, block_N or projection")
      ->capture_default_str();
  explain->add_option("--max-samples", c.max_samples,
                      "Windows used for activation exports (0 = all)")
      ->capture_default_str();
  explain->add_option("--stft-window", c.stft_window, "Spectrogram window length")
      ->capture_default_str();
  explain->add_option("--stft-hop", c.stft_hop, "Spectrogram hop")->capture_default_str();

  auto* self = app->add_subcommand("selfcheck", "Run gradient and simulator invariant checks");
  self->add_option("--cases", c.cases, "Randomized gradient cases per suite")->capture_default_str();
  self->add_option("--seed", c.seed, "Seed for the randomized cases")->capture_default_str();

  for (auto* sub : app->get_subcommands({})) {
    sub->fallthrough();
    sub->callback([&c, sub] { c.command = sub->get_name(); });
  }
  return app;
}

int run(const RunConfig& c) {
  set_max_threads(c.threads);
  if (c.command == "synth-data") return cmd_synth(c);
  if (c.command == "train") return cmd_train(c);
  if (c.command == "eval") return cmd_eval(c);
  if (c.command == "uncertainty") return cmd_uncertainty(c);
  if (c.command == "explain") return cmd_explain(c);
  if (c.command == "selfcheck") return cmd_selfcheck(c);
  throw ConfigError("unknown command '" + c.command + "'");
}

int main(int argc, char** argv) {
  RunConfig config;
  auto app = build_app(config);
  try {
    app->parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app->exit(e);
  }
  auto one_line = [](std::string msg) {
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return msg;
  };
  try {
    return run(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "quanvnext %s: error: %s\n", config.command.c_str(), one_line(e.what()).c_str());
    return 2;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "quanvnext %s: error: %s\n", config.command.c_str(), one_line(e.what()).c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "quanvnext %s: error: %s\n", config.command.c_str(), one_line(e.what()).c_str());
    return 1;
  }
}

}  // namespace quanvnext::cli
