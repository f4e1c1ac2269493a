#include "quanvnext/data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "quanvnext/error.hpp"

namespace quanvnext::data {

std::size_t WindowedDataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count_if(windows.begin(), windows.end(),
                                                [&](const Window& w) { return w.label == label; }));
}

std::vector<Window> window_signal(const SubjectRecording& rec, double window_s, double overlap) {
  if (!(window_s > 0.0) || overlap < 0.0 || overlap >= 1.0) {
    throw ArgumentError("window_signal: window_s must be positive and overlap in [0, 1)");
  }
  const auto width = static_cast<std::size_t>(std::llround(window_s * rec.sampling_rate_hz));
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(width) * (1.0 - overlap))));
  std::vector<Window> out;
  if (width == 0 || rec.samples() < width) {
    std::cerr << "warning: subject '" << rec.subject_id << "' has " << rec.samples()
              << " samples, shorter than one " << width << "-sample window; skipped\n";
    return out;
  }
  for (std::size_t start = 0; start + width <= rec.samples(); start += hop) {
    Window w{rec.subject_id, rec.label, Tensor(rec.channels(), width)};
    for (std::size_t c = 0; c < rec.channels(); ++c) {
      const auto src = rec.signal.row(c).subspan(start, width);
      std::copy(src.begin(), src.end(), w.signal.row(c).begin());
    }
    out.push_back(std::move(w));
  }
  return out;
}

Split subject_split(std::vector<SubjectInfo> subjects, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("subject_split: train fraction must be in (0, 1)");
  }
  std::ranges::sort(subjects, {}, &SubjectInfo::subject_id);
  std::map<int, std::vector<std::string>> by_label;
  for (const auto& s : subjects) by_label[s.label].push_back(s.subject_id);
  if (by_label.size() < 2) throw ConfigError("subject_split: need subjects from both classes");
  for (const auto& [label, ids] : by_label) {
    if (ids.size() < 2) {
      throw ConfigError("subject_split: class " + std::to_string(label) +
                        " has a single subject; cannot stratify");
    }
  }

  std::mt19937_64 rng(seed);
  // Largest-remainder apportionment of round(fraction * n) train slots.
  const std::size_t n = subjects.size();
  const auto total_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  struct Quota {
    int label;
    std::size_t take;
    double remainder;
    std::uint64_t tiebreak;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [label, ids] : by_label) {
    const double exact = train_fraction * static_cast<double>(ids.size());
    const auto floor_take = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({label, floor_take, exact - static_cast<double>(floor_take), rng()});
    assigned += floor_take;
  }
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    if (quotas[a].remainder != quotas[b].remainder) return quotas[a].remainder > quotas[b].remainder;
    return quotas[a].tiebreak < quotas[b].tiebreak;
  });
  for (std::size_t i = 0; assigned < total_train && i < order.size(); ++i, ++assigned) {
    ++quotas[order[i]].take;
  }

  Split split;
  for (auto& q : quotas) {
    auto ids = by_label[q.label];
    q.take = std::clamp<std::size_t>(q.take, 1, ids.size() - 1);
    std::shuffle(ids.begin(), ids.end(), rng);
    split.train.insert(split.train.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(q.take));
    split.test.insert(split.test.end(), ids.begin() + static_cast<std::ptrdiff_t>(q.take), ids.end());
  }
  std::ranges::sort(split.train);
  std::ranges::sort(split.test);
  return split;
}

std::vector<Window> undersample(const std::vector<Window>& windows, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < windows.size(); ++i) by_label[windows[i].label].push_back(i);
  if (by_label.size() < 2) throw ConfigError("undersample: both classes must be present");
  std::size_t minority = windows.size();
  for (const auto& [label, idx] : by_label) minority = std::min(minority, idx.size());

  std::mt19937_64 rng(seed);
  std::vector<bool> keep(windows.size(), false);
  for (auto& [label, idx] : by_label) {
    std::vector<std::size_t> chosen;
    std::sample(idx.begin(), idx.end(), std::back_inserter(chosen), minority, rng);
    for (std::size_t i : chosen) keep[i] = true;
  }
  std::vector<Window> out;
  out.reserve(minority * by_label.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (keep[i]) out.push_back(windows[i]);
  }
  return out;
}

ZScoreStats zscore_fit(const std::vector<Window>& train) {
  if (train.empty()) throw ArgumentError("zscore_fit: empty training set");
  const std::size_t channels = train.front().signal.rows();
  ZScoreStats s{std::vector<double>(channels, 0.0), std::vector<double>(channels, 0.0)};
  std::size_t count = 0;
  for (const auto& w : train) {
    if (w.signal.rows() != channels) throw ArgumentError("zscore_fit: channel count mismatch");
    count += w.signal.cols();
    for (std::size_t c = 0; c < channels; ++c) {
      for (double v : w.signal.row(c)) s.mean[c] += v;
    }
  }
  for (double& m : s.mean) m /= static_cast<double>(count);
  for (const auto& w : train) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (double v : w.signal.row(c)) s.stddev[c] += (v - s.mean[c]) * (v - s.mean[c]);
    }
  }
  for (double& v : s.stddev) v = std::max(std::sqrt(v / static_cast<double>(count)), kStdFloor);
  return s;
}

Tensor zscore_apply(const Tensor& signal, const ZScoreStats& stats) {
  if (signal.rows() != stats.mean.size() || stats.stddev.size() != stats.mean.size()) {
    throw ArgumentError("zscore_apply: statistics have " + std::to_string(stats.mean.size()) +
                        " channels, signal has " + std::to_string(signal.rows()));
  }
  Tensor out = signal;
  for (std::size_t c = 0; c < out.rows(); ++c) {
    const double sd = std::max(stats.stddev[c], kStdFloor);
    for (double& v : out.row(c)) v = (v - stats.mean[c]) / sd;
  }
  return out;
}

std::vector<Window> zscore_apply(const std::vector<Window>& windows, const ZScoreStats& stats) {
  std::vector<Window> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back({w.subject_id, w.label, zscore_apply(w.signal, stats)});
  return out;
}

namespace {

std::vector<Window> windows_for(const std::vector<SubjectRecording>& recs,
                                const std::set<std::string>& ids, const PipelineOptions& o) {
  std::vector<Window> out;
  for (const auto& r : recs) {
    if (!ids.contains(r.subject_id)) continue;
    auto w = window_signal(r, o.window_s, o.overlap);
    std::move(w.begin(), w.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<Window> balance(std::vector<Window> windows, std::uint64_t seed) {
  if (windows.empty()) return windows;
  const bool has0 = std::ranges::any_of(windows, [](const Window& w) { return w.label == 0; });
  const bool has1 = std::ranges::any_of(windows, [](const Window& w) { return w.label == 1; });
  return has0 && has1 ? undersample(windows, seed) : windows;
}

}  // namespace

PreparedData prepare(std::vector<SubjectRecording> recordings, const PipelineOptions& options) {
  std::ranges::sort(recordings, {}, &SubjectRecording::subject_id);
  std::vector<SubjectInfo> infos;
  for (const auto& r : recordings) infos.push_back({r.subject_id, r.label});

  PreparedData out;
  out.split = subject_split(infos, options.train_fraction, options.seed);
  std::vector<std::string> fit_ids = out.split.train;
  std::vector<std::string> val_ids;
  if (options.validation_fraction > 0.0) {
    std::vector<SubjectInfo> train_infos;
    for (const auto& i : infos) {
      if (std::ranges::binary_search(out.split.train, i.subject_id)) train_infos.push_back(i);
    }
    const Split inner = subject_split(train_infos, 1.0 - options.validation_fraction, options.seed + 1);
    fit_ids = inner.train;
    val_ids = inner.test;
  }

  auto train = balance(windows_for(recordings, {fit_ids.begin(), fit_ids.end()}, options), options.seed + 2);
  auto val = balance(windows_for(recordings, {val_ids.begin(), val_ids.end()}, options), options.seed + 3);
  auto test = balance(windows_for(recordings, {out.split.test.begin(), out.split.test.end()}, options),
                      options.seed + 4);
  if (train.empty()) throw ConfigError("prepare: no training windows produced");

  const ZScoreStats stats = zscore_fit(train);
  const std::size_t width = train.front().signal.cols();
  out.train = {zscore_apply(train, stats), width, stats};
  out.validation = {zscore_apply(val, stats), width, stats};
  out.test = {zscore_apply(test, stats), width, stats};
  return out;
}

}  // namespace quanvnext::data
