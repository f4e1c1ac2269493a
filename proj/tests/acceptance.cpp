// Acceptance run: one PASS/FAIL line per criterion. Arguments select a subset
// of criteria by number (default: all). Exit status is nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dense_sim.hpp"
#include "metric_oracles.hpp"
#include "quanvnext/autodiff/gradcheck.hpp"
#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/autodiff/tape.hpp"
#include "quanvnext/autodiff/train.hpp"
#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/data/synth.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/eval/evaluate.hpp"
#include "quanvnext/eval/metrics.hpp"
#include "quanvnext/eval/uncertainty.hpp"
#include "quanvnext/model/layers.hpp"
#include "quanvnext/model/quanvnext.hpp"
#include "quanvnext/qsim/filter.hpp"

using namespace quanvnext;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Preset shapes.

Outcome shapes() {
  const auto t0 = Clock::now();
  struct Case {
    const char* preset;
    std::size_t channels, length, emb_c, emb_l, proj_c, proj_l;
  };
  const Case cases[] = {{"dataset-1", 19, 2048, 32, 256, 2, 32}, {"dataset-2", 128, 2000, 8, 250, 2, 31}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    const auto m = model::build_model(c.preset, 1);
    Tensor x(c.channels, c.length);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (double& v : x.flat()) v = nd(rng);
    autodiff::Tape tape;
    const auto tr = model::record_forward(tape, m, x, false);
    const auto& e = tape.value(tr.embedding);
    const auto& p = tape.value(tr.projection);
    bool blocks_ok = true;
    for (const auto& b : tr.blocks) blocks_ok = blocks_ok && tape.value(b).same_shape(e);
    const bool good = e.rows() == c.emb_c && e.cols() == c.emb_l && p.rows() == c.proj_c &&
                      p.cols() == c.proj_l && blocks_ok;
    ok = ok && good;
    detail += fmt("%s emb %s proj %s; ", c.preset, e.shape_string().c_str(), p.shape_string().c_str());
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 60;
  return {ok, detail + fmt("%.1fs", secs)};
}

// ---------------------------------------------------------------------------
// 2. Simulator invariants on random states and circuits, checked against the
// dense Kronecker-product reference.

Outcome invariants() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> nq(1, 6), depth(1, 3);
  std::normal_distribution<double> nd;
  double worst_norm = 0, worst_range = 0, worst_dense = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = nq(rng), d = depth(rng);
    const auto circuit = qsim::FilterCircuit::random(n, d, rng);
    std::uniform_int_distribution<std::size_t> len(1, std::size_t{1} << n);
    std::vector<double> features(len(rng));
    double sq = 0;
    for (double& v : features) sq += (v = nd(rng)) * v;
    for (double& v : features) v /= std::sqrt(sq);
    const qsim::CompiledFilter compiled(circuit);
    auto state = qsim::amplitude_embed(features, n);
    worst_norm = std::max(worst_norm, std::abs(state.norm_squared() - 1.0));
    compiled.evolve(state);
    worst_norm = std::max(worst_norm, std::abs(state.norm_squared() - 1.0));
    const auto z = qsim::z_expectations(state);
    for (double v : z) worst_range = std::max(worst_range, std::abs(v) - 1.0);
    const auto ref = testsupport::run_circuit(features, n, circuit.theta(), circuit.lambda(), circuit.phi());
    for (int q = 0; q < n; ++q) worst_dense = std::max(worst_dense, std::abs(ref[q] - z[q]));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_norm <= 1e-9 && worst_range <= 0.0 && worst_dense < 1e-9 && secs < 60;
  return {ok, fmt("1000 circuits n<=6: max |norm-1| %.2e, max |E|-1 %.2e, dense diff %.2e; %.1fs", worst_norm,
                  worst_range, worst_dense, secs)};
}

// ---------------------------------------------------------------------------
// 3. Gradient suites.

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto f = autodiff::check_filter_gradients(100, 3, 1e-4);
  const auto m = autodiff::check_model_gradients(100, 3, 1e-3);
  const double secs = seconds_since(t0);
  const bool ok = f.ok() && m.ok() && f.cases >= 100 && m.cases >= 100 && secs < 300;
  std::string detail = fmt("filter %zu cases worst %.2e, model %zu cases worst %.2e; %.1fs", f.cases, f.worst,
                           m.cases, m.worst, secs);
  if (!f.ok()) detail += " [" + f.first_failure + "]";
  if (!m.ok()) detail += " [" + m.first_failure + "]";
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 4. Metrics against brute force, plus the hand examples.

Outcome metrics() {
  std::mt19937_64 rng(4);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = oracle::random_prediction_set(rng);
    worst = std::max(worst, std::abs(eval::mcc(eval::confusion(s.predicted, s.labels)) - oracle::mcc(s.predicted, s.labels)));
    worst = std::max(worst, std::abs(eval::auc_roc(s.scores, s.labels) - oracle::auc(s.scores, s.labels)));
    worst = std::max(worst, std::abs(eval::ece(s.confidence, s.correct) - oracle::ece(s.confidence, s.correct, 10)));
  }
  bool hand = true;
  hand &= eval::mcc({10, 10, 0, 0}) == 1.0;
  hand &= eval::mcc({0, 0, 10, 10}) == -1.0;
  hand &= eval::mcc({25, 25, 25, 25}) == 0.0;
  hand &= eval::auc_roc(std::vector<double>{0.9, 0.4, 0.6, 0.3}, std::vector<int>{1, 0, 1, 0}) == 1.0;
  hand &= eval::auc_roc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1, 0}) == 0.5;
  hand &= eval::auc_roc(std::vector<double>{0.8, 0.9, 0.1, 0.2}, std::vector<int>{1, 1, 0, 0}) == 1.0;
  hand &= eval::ece(std::vector<double>{1.0, 1.0}, std::vector<int>{1, 1}) == 0.0;
  hand &= std::abs(eval::ece(std::vector<double>{0.9, 0.9}, std::vector<int>{1, 0}) - 0.4) < 1e-12;
  hand &= eval::ece(std::vector<double>{0.75, 0.75, 0.75, 0.75}, std::vector<int>{1, 1, 1, 0}) == 0.0;
  return {worst <= 1e-12 && hand, fmt("1000 random sets, worst deviation %.2e; hand examples %s", worst, hand ? "ok" : "FAILED")};
}

// ---------------------------------------------------------------------------
// 5-7. Synthetic experiments.

// Desk-scale synthetic task: 40 subjects per class, 6 s recordings at 125 Hz,
// 4-second (500-sample) windows.
constexpr int kSeeds = 10;
constexpr int kSubjectsPerClass = 40;
constexpr int kSamplingRate = 125;
constexpr double kDurationS = 6.0;
constexpr double kNoise = 0.15;
constexpr int kEpochs = 30;
constexpr std::size_t kBatch = 8;
constexpr double kLearningRate = 0.003;

enum class Variant { kFull, kNoAggregation, kNoSkip, kNoShuffle };

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kNoAggregation: return "no-aggregation";
    case Variant::kNoSkip: return "no-skip";
    case Variant::kNoShuffle: return "no-shuffle";
  }
  return "?";
}

struct SeedRun {
  double accuracy = 0, mcc = 0, seconds = 0;
  std::optional<model::Model> trained;
};

class SyntheticLab {
 public:
  const data::PreparedData& data(int seed) {
    auto it = data_.find(seed);
    if (it != data_.end()) return it->second;
    data::SynthOptions so;
    so.subjects_per_class = kSubjectsPerClass;
    so.channels = 4;
    so.sampling_rate_hz = kSamplingRate;
    so.duration_s = kDurationS;
    so.noise_scale = kNoise;
    so.seed = static_cast<std::uint64_t>(seed);
    const double window_s = 500.0 / kSamplingRate;
    auto prep = data::prepare(data::synth_generate(so), {.window_s = window_s, .overlap = 0.9,
                                                         .train_fraction = 0.7, .validation_fraction = 0.0,
                                                         .seed = static_cast<std::uint64_t>(seed)});
    return data_.emplace(seed, std::move(prep)).first->second;
  }

  const SeedRun& run(int seed, Variant v) {
    const auto key = std::make_pair(seed, static_cast<int>(v));
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;
    const auto t0 = Clock::now();
    const auto& d = data(seed);
    auto cfg = model::ModelConfig::micro(4, 500, 8);
    cfg.use_aggregation = v != Variant::kNoAggregation;
    cfg.use_skip = v != Variant::kNoSkip;
    cfg.use_shuffle = v != Variant::kNoShuffle;
    autodiff::TrainOptions opt;
    opt.epochs = kEpochs;
    opt.batch_size = kBatch;
    opt.learning_rate = kLearningRate;
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.selection = autodiff::Selection::kLast;
    auto result = autodiff::train(model::build_model(cfg, static_cast<std::uint64_t>(seed)), d.train.windows, {}, opt);
    const auto s = eval::evaluate(result.final_model, d.test.windows);
    SeedRun r{s.accuracy, s.mcc, seconds_since(t0), std::move(result.final_model)};
    std::fprintf(stderr, "  [%s seed %d] test acc %.3f mcc %.3f (%zu train / %zu test windows) %.1fs\n",
                 variant_name(v), seed, r.accuracy, r.mcc, d.train.size(), d.test.size(), r.seconds);
    return runs_.emplace(key, std::move(r)).first->second;
  }

 private:
  std::map<int, data::PreparedData> data_;
  std::map<std::pair<int, int>, SeedRun> runs_;
};

Outcome synthetic_end_to_end(SyntheticLab& lab) {
  int good = 0;
  double total = 0;
  std::string accs;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto& r = lab.run(seed, Variant::kFull);
    good += r.accuracy >= 0.90 && r.mcc >= 0.80;
    total += r.seconds;
    accs += fmt("%s%.2f", seed > 1 ? "," : "", r.accuracy);
  }
  const bool ok = good >= 8 && total < 20 * 60;
  return {ok, fmt("%d/10 seeds reach acc>=0.90 & MCC>=0.80 (acc %s); %.0fs", good, accs.c_str(), total)};
}

Outcome ablation(SyntheticLab& lab) {
  std::map<Variant, double> mean;
  int shuffle_drop = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    for (Variant v : {Variant::kFull, Variant::kNoAggregation, Variant::kNoSkip, Variant::kNoShuffle}) {
      mean[v] += lab.run(seed, v).accuracy / kSeeds;
    }
    shuffle_drop += lab.run(seed, Variant::kFull).accuracy > lab.run(seed, Variant::kNoShuffle).accuracy;
  }
  const double full = mean[Variant::kFull], agg = mean[Variant::kNoAggregation], skip = mean[Variant::kNoSkip],
               shuf = mean[Variant::kNoShuffle];
  const bool ok = full >= agg && agg >= skip && full > shuf && shuffle_drop >= 7;
  return {ok, fmt("mean acc full %.3f, no-aggregation %.3f, no-skip %.3f, no-shuffle %.3f; shuffle drop positive in %d/10",
                  full, agg, skip, shuf, shuffle_drop)};
}

Outcome uncertainty(SyntheticLab& lab) {
  // Exactness at epsilon = 0 on a trained model.
  const auto& m0 = *lab.run(1, Variant::kFull).trained;
  const auto& test0 = lab.data(1).test.windows;
  bool exact = true;
  for (std::size_t i = 0; i < std::min<std::size_t>(test0.size(), 20); ++i) {
    const auto r = eval::perturb_predict(m0, test0[i].signal, 0.0, 50, 0, i);
    exact &= r.uncertainty == 0.0;
    exact &= r.mean_probabilities == autodiff::softmax(model::quanvnext_forward(test0[i].signal, m0).values());
  }
  int rows_ok = 0, gap = 0, undefined = 0;
  std::string pairs;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto& run = lab.run(seed, Variant::kFull);
    const auto recs = eval::uncertainty_report(*run.trained, lab.data(seed).test.windows, eval::kDefaultEpsilons,
                                               static_cast<std::uint64_t>(seed), 50);
    rows_ok += recs.size() == 3;
    const auto& r = recs.front();  // epsilon 0.1
    if (!r.mean_uncertainty_incorrect || !r.mean_uncertainty_correct) {
      ++undefined;
      pairs += fmt("%s-", seed > 1 ? "," : "");
      continue;
    }
    gap += *r.mean_uncertainty_incorrect > *r.mean_uncertainty_correct;
    pairs += fmt("%s%.3f/%.3f", seed > 1 ? "," : "", *r.mean_uncertainty_correct, *r.mean_uncertainty_incorrect);
  }
  const bool ok = exact && rows_ok == kSeeds && gap >= 8;
  return {ok, fmt("eps=0 exact %s; 3-row report %d/10; incorrect > correct at eps 0.1 in %d/10 (correct/incorrect %s; "
                  "%d seeds without errors)",
                  exact ? "yes" : "NO", rows_ok, gap, pairs.c_str(), undefined)};
}

// ---------------------------------------------------------------------------
// 8. Channel shuffle laws.

Outcome shuffle_laws() {
  int configs = 0;
  bool ok = true;
  for (std::size_t c = 1; c <= 16; ++c) {
    for (std::size_t g = 1; g <= c; ++g) {
      if (c % g != 0) continue;
      ++configs;
      Tensor x(c, 2);
      for (std::size_t i = 0; i < c; ++i) x(i, 0) = x(i, 1) = static_cast<double>(i);
      const auto y = model::channel_shuffle(x, static_cast<int>(g));
      std::vector<int> seen(c, 0);
      for (std::size_t j = 0; j < c; ++j) {
        const auto src = static_cast<std::size_t>(y(j, 0));
        ok &= y(j, 1) == y(j, 0) && src < c;
        if (src < c) seen[src]++;
        // Reshape (g, C/g), transpose, flatten: output j*g+i <- input i*(C/g)+j.
        const std::size_t i = j % g, jj = j / g;
        ok &= src == i * (c / g) + jj;
        if (g == 1 || g == c) ok &= src == j;
      }
      ok &= std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    }
  }
  return {ok, fmt("%d (C, g) pairs with C <= 16", configs)};
}

// ---------------------------------------------------------------------------
// 9. Byte-identical metrics.csv from two seeded runs.

Outcome determinism() {
  const auto recs = data::synth_generate({.subjects_per_class = 4, .channels = 4, .sampling_rate_hz = 32,
                                          .duration_s = 12, .noise_scale = kNoise, .seed = 9});
  const auto d = data::prepare(recs, {.window_s = 4.0, .overlap = 0.9, .train_fraction = 0.7, .seed = 9});
  const auto dir = fs::temp_directory_path() / "quanvnext_acceptance_determinism";
  fs::remove_all(dir);
  std::vector<std::string> files;
  for (int run = 0; run < 2; ++run) {
    autodiff::TrainOptions opt;
    opt.epochs = 3;
    opt.batch_size = 8;
    opt.learning_rate = 0.003;
    opt.seed = 9;
    opt.selection = autodiff::Selection::kTest;
    const auto r = autodiff::train(model::build_model(model::ModelConfig::micro(4, 128, 8), 9), d.train.windows,
                                   d.test.windows, opt);
    const auto path = dir / ("run" + std::to_string(run)) / "metrics.csv";
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << autodiff::metrics_csv(r.log);
    std::ifstream in(path, std::ios::binary);
    files.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  const bool ok = files[0] == files[1] && std::count(files[0].begin(), files[0].end(), '\n') == 4;
  return {ok, fmt("two 3-epoch runs, %zu bytes each, %s", files[0].size(), files[0] == files[1] ? "identical" : "DIFFER")};
}

// ---------------------------------------------------------------------------
// 10. Data pipeline laws.

Outcome pipeline_laws() {
  std::vector<std::string> failures;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };
  // Window counts.
  auto count_windows = [](std::size_t samples) {
    data::SubjectRecording r{"w", 0, 250, Tensor(1, samples)};
    return data::window_signal(r, 8.0, 0.9).size();
  };
  std::fprintf(stderr, "  (the short-recording warning below is expected)\n");
  check(count_windows(2000) == 1, "2000 samples -> 1 window");
  check(count_windows(2200) == 2, "2200 samples -> 2 windows");
  check(count_windows(1999) == 0, "1999 samples -> 0 windows");

  // Split: partition and stratification over many rosters and seeds.
  for (int per0 = 2; per0 <= 9; ++per0) {
    for (int per1 = 2; per1 <= 9; ++per1) {
      std::vector<data::SubjectInfo> subjects;
      for (int i = 0; i < per0; ++i) subjects.push_back({"h" + std::to_string(i), 0});
      for (int i = 0; i < per1; ++i) subjects.push_back({"m" + std::to_string(i), 1});
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = data::subject_split(subjects, 0.7, seed);
        std::set<std::string> train(s.train.begin(), s.train.end()), test(s.test.begin(), s.test.end());
        std::set<std::string> all = train;
        all.insert(test.begin(), test.end());
        check(train.size() + test.size() == subjects.size() && all.size() == subjects.size(), "split partition");
        int tr0 = 0, tr1 = 0, te0 = 0, te1 = 0;
        for (const auto& id : s.train) (id[0] == 'h' ? tr0 : tr1)++;
        for (const auto& id : s.test) (id[0] == 'h' ? te0 : te1)++;
        check(tr0 >= 1 && tr1 >= 1 && te0 >= 1 && te1 >= 1, "split keeps both classes on both sides");
        check(std::abs(tr0 - 0.7 * per0) <= 1.0 && std::abs(tr1 - 0.7 * per1) <= 1.0, "split stratification");
        const auto again = data::subject_split(subjects, 0.7, seed);
        check(again.train == s.train && again.test == s.test, "split determinism");
      }
    }
  }
  {
    std::vector<data::SubjectInfo> ten;
    for (int i = 0; i < 10; ++i) ten.push_back({"s" + std::to_string(i), i % 2});
    const auto s = data::subject_split(ten, 0.7, 1);
    check(s.train.size() == 7 && s.test.size() == 3, "10 subjects -> 7/3");
  }

  // Undersampling.
  {
    std::vector<data::Window> w;
    for (int i = 0; i < 50; ++i) w.push_back({"s", i < 30 ? 0 : 1, Tensor(1, 1, i)});
    const auto u = data::undersample(w, 3);
    const auto n0 = std::count_if(u.begin(), u.end(), [](const data::Window& x) { return x.label == 0; });
    check(n0 == 20 && u.size() == 40, "30 vs 20 -> 20 vs 20");
    bool ordered = true;
    for (std::size_t i = 1; i < u.size(); ++i) ordered &= u[i - 1].signal(0, 0) < u[i].signal(0, 0);
    check(ordered, "undersampling preserves order");
    std::vector<data::Window> balanced(w.begin() + 10, w.end());
    const auto b = data::undersample(balanced, 3);
    bool same = b.size() == balanced.size();
    for (std::size_t i = 0; same && i < b.size(); ++i) same = b[i].signal == balanced[i].signal;
    check(same, "balanced input unchanged");
  }

  // Leakage: mutating test recordings leaves the train statistics untouched.
  {
    auto recs = data::synth_generate({.subjects_per_class = 5, .channels = 3, .sampling_rate_hz = 50, .duration_s = 20, .seed = 10});
    const data::PipelineOptions opt{.window_s = 4.0, .overlap = 0.9, .train_fraction = 0.7, .seed = 10};
    const auto a = data::prepare(recs, opt);
    const std::set<std::string> test_ids(a.split.test.begin(), a.split.test.end());
    for (auto& r : recs)
      if (test_ids.count(r.subject_id))
        for (double& v : r.signal.flat()) v = 7.0 * v - 300.0;
    const auto b = data::prepare(recs, opt);
    check(a.train.stats.mean == b.train.stats.mean && a.train.stats.stddev == b.train.stats.stddev,
          "z statistics independent of test data");
    // The statistics equal a brute-force pooled computation over train windows.
    std::vector<data::Window> raw;
    for (const auto& r : recs)
      if (!test_ids.count(r.subject_id))
        for (auto& w : data::window_signal(r, 4.0, 0.9)) raw.push_back(std::move(w));
    bool pooled = true;
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0, n = 0;
      for (const auto& w : a.train.windows) {
        for (std::size_t t = 0; t < w.signal.cols(); ++t) {
          const double back = w.signal(c, t) * a.train.stats.stddev[c] + a.train.stats.mean[c];
          s += back;
          n += 1;
        }
      }
      pooled &= std::abs(s / n - a.train.stats.mean[c]) < 1e-9;
    }
    check(pooled, "pooled train statistics");
  }

  std::string detail = failures.empty() ? "window counts, split, undersampling, leakage all exact" : "";
  for (const auto& f : failures) {
    if (detail.find(f) == std::string::npos) detail += (detail.empty() ? "" : "; ") + f;
  }
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };

  SyntheticLab lab;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"preset shape conformance", shapes},
      {"quantum-core invariants", invariants},
      {"gradient suite", gradients},
      {"metric oracles", metrics},
      {"synthetic end-to-end", [&] { return synthetic_end_to_end(lab); }},
      {"ablation direction", [&] { return ablation(lab); }},
      {"uncertainty harness", [&] { return uncertainty(lab); }},
      {"channel-shuffle laws", shuffle_laws},
      {"determinism", determinism},
      {"data-pipeline laws", pipeline_laws},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
