// Copyright 2026 The densloc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "densloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "densloc/error.hpp"
#include "densloc/random.hpp"

namespace densloc {

void LocalizationConfig::validate() const {
  if (!(smooth_sigma >= 0.0) || !std::isfinite(smooth_sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "smooth_sigma must be >= 0");
  }
  if (!(top_percentile > 0.0 && top_percentile <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top_percentile must be in (0, 1]");
  }
  if (samples_per_object < 1) {
    throw Error(ErrorCode::kInvalidArgument, "samples_per_object must be >= 1");
  }
  if (kmeans_max_iter < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans_max_iter must be >= 1");
  }
  if (!(kmeans_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans_tol must be > 0");
  }
  if (kmeans_restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans_restarts must be >= 1");
  }
}

namespace {

// Scatter every entry of `src` (stride `stride`, `n` entries) through the
// kernel into `dst`, renormalizing the kernel over the in-bounds taps.
void scatter_1d(const double* src, double* dst, std::size_t n, std::size_t stride,
                const std::vector<double>& taps, const std::vector<double>& inv_norm) {
  const long r = static_cast<long>(taps.size()) - 1;
  const long len = static_cast<long>(n);
  for (long c = 0; c < len; ++c) {
    const double v = src[static_cast<std::size_t>(c) * stride];
    if (v == 0.0) continue;
    const double scaled = v * inv_norm[static_cast<std::size_t>(c)];
    const long lo = std::max(0L, c - r);
    const long hi = std::min(len - 1, c + r);
    for (long t = lo; t <= hi; ++t) {
      dst[static_cast<std::size_t>(t) * stride] +=
          scaled * taps[static_cast<std::size_t>(std::labs(t - c))];
    }
  }
}

std::vector<double> inverse_norms(std::size_t n, const std::vector<double>& taps) {
  const long r = static_cast<long>(taps.size()) - 1;
  const long len = static_cast<long>(n);
  std::vector<double> out(n);
  for (long c = 0; c < len; ++c) {
    double s = 0.0;
    for (long t = std::max(0L, c - r); t <= std::min(len - 1, c + r); ++t) {
      s += taps[static_cast<std::size_t>(std::labs(t - c))];
    }
    out[static_cast<std::size_t>(c)] = 1.0 / s;
  }
  return out;
}

double sq_dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::size_t nearest(const Point& p, std::span<const Point> centers, double* d2_out) {
  std::size_t best = 0;
  double best_d = sq_dist(p, centers[0]);
  for (std::size_t c = 1; c < centers.size(); ++c) {
    const double d = sq_dist(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (d2_out) *d2_out = best_d;
  return best;
}

// Index of the first cumulative weight strictly above u.
std::size_t draw(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(std::distance(cumulative.begin(), it));
}

// Greedy k-means++: each new center is the best of several D^2-weighted
// candidates by resulting potential.
std::vector<Point> seed_plus_plus(std::span<const Point> samples, std::size_t k, Rng& rng) {
  const std::size_t n = samples.size();
  std::vector<Point> centers;
  centers.reserve(k);
  centers.push_back(samples[rng.below(n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(samples[i], centers[0]);

  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<double> cumulative(n);
  std::vector<double> trial_d2(n);
  std::vector<double> best_d2(n);
  while (centers.size() < k) {
    std::partial_sum(d2.begin(), d2.end(), cumulative.begin());
    const double potential = cumulative.back();
    if (!(potential > 0.0)) {
      // Every sample already coincides with a center.
      centers.push_back(samples[rng.below(n)]);
      continue;
    }
    std::size_t best_idx = 0;
    double best_pot = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t cand = draw(cumulative, rng.uniform() * potential);
      double pot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial_d2[i] = std::min(d2[i], sq_dist(samples[i], samples[cand]));
        pot += trial_d2[i];
      }
      if (pot < best_pot) {
        best_pot = pot;
        best_idx = cand;
        best_d2.swap(trial_d2);
      }
    }
    centers.push_back(samples[best_idx]);
    d2.swap(best_d2);
    best_d2.resize(n);
  }
  return centers;
}

KMeansResult lloyd(std::span<const Point> samples, std::vector<Point> centers,
                   const KMeansOptions& opts) {
  const std::size_t n = samples.size();
  const std::size_t k = centers.size();
  KMeansResult res;
  res.assignment.resize(n);
  std::vector<double> dist(n);

  auto assign = [&] {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res.assignment[i] = nearest(samples[i], centers, &dist[i]);
      obj += dist[i];
    }
    return obj;
  };

  res.history.push_back(assign());
  std::vector<double> sx(k), sy(k);
  std::vector<std::size_t> members(k);
  std::vector<char> taken(n);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    std::fill(sx.begin(), sx.end(), 0.0);
    std::fill(sy.begin(), sy.end(), 0.0);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      sx[c] += samples[i].x;
      sy[c] += samples[i].y;
      ++members[c];
    }
    std::vector<Point> next = centers;
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c] > 0) {
        const double m = static_cast<double>(members[c]);
        next[c] = {sx[c] / m, sy[c] / m};
      }
    }
    // Reseed empty clusters at the samples farthest from their (updated)
    // centers; each such sample moves to the reseeded cluster.
    if (std::find(members.begin(), members.end(), 0) != members.end()) {
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = sq_dist(samples[i], next[res.assignment[i]]);
      }
      std::fill(taken.begin(), taken.end(), 0);
      for (std::size_t c = 0; c < k; ++c) {
        if (members[c] != 0) continue;
        std::size_t far = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
        }
        if (far == n) break;
        taken[far] = 1;
        next[c] = samples[far];
        res.assignment[far] = c;
        dist[far] = 0.0;
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(sq_dist(centers[c], next[c])));
    }
    centers = std::move(next);
    res.history.push_back(assign());
    res.iterations = it + 1;
    if (shift < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.objective = res.history.back();
  res.centers = std::move(centers);
  return res;
}

}  // namespace

DensityMap gaussian_smooth(const DensityMap& dm, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing sigma must be >= 0");
  }
  if (sigma == 0.0 || dm.size() == 0) return dm;

  const auto radius = static_cast<std::size_t>(std::max(1.0, std::ceil(3.0 * sigma)));
  std::vector<double> taps(radius + 1);
  for (std::size_t t = 0; t <= radius; ++t) {
    const double d = static_cast<double>(t);
    taps[t] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const std::size_t h = dm.height(), w = dm.width();
  const std::vector<double> inv_w = inverse_norms(w, taps);
  const std::vector<double> inv_h = inverse_norms(h, taps);

  std::vector<double> src(dm.values().begin(), dm.values().end());
  std::vector<double> tmp(h * w, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    scatter_1d(src.data() + r * w, tmp.data() + r * w, w, 1, taps, inv_w);
  }
  std::vector<double> out(h * w, 0.0);
  for (std::size_t c = 0; c < w; ++c) {
    scatter_1d(tmp.data() + c, out.data() + c, h, w, taps, inv_h);
  }
  std::vector<float> values(h * w);
  std::transform(out.begin(), out.end(), values.begin(),
                 [](double v) { return static_cast<float>(v); });
  return DensityMap(h, w, std::move(values));
}

CandidateSet select_candidates(const DensityMap& dm, double top_percentile) {
  if (!(top_percentile > 0.0 && top_percentile <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top_percentile must be in (0, 1]");
  }
  const std::size_t total = dm.size();
  if (total == 0) throw Error(ErrorCode::kNoDensityMass, "no density mass");
  // The small slack keeps e.g. 0.03 * 100 from rounding up to 4.
  auto keep = static_cast<std::size_t>(
      std::ceil(top_percentile * static_cast<double>(total) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, total);

  const auto values = dm.values();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] > values[b] || (values[a] == values[b] && a < b);
                    });
  CandidateSet out;
  double sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t idx = order[i];
    if (!(values[idx] > 0.0f)) break;
    out.push_back({idx % dm.width(), idx / dm.width(), static_cast<double>(values[idx])});
    sum += values[idx];
  }
  if (out.empty()) throw Error(ErrorCode::kNoDensityMass, "no density mass");
  for (Candidate& c : out) c.weight /= sum;
  return out;
}

std::vector<Point> weighted_sample(std::span<const Candidate> cands,
                                   std::size_t n_samples, std::uint64_t seed) {
  if (cands.empty()) {
    throw Error(ErrorCode::kEmptyCandidates, "empty candidate set");
  }
  if (n_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  }
  std::vector<double> cumulative(cands.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!(cands[i].weight >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "candidate weights must be >= 0");
    }
    acc += cands[i].weight;
    cumulative[i] = acc;
  }
  if (!(acc > 0.0)) {
    throw Error(ErrorCode::kEmptyCandidates, "candidate weights sum to zero");
  }
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Candidate& c = cands[draw(cumulative, rng.uniform() * acc)];
    out.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
  }
  return out;
}

double kmeans_objective(std::span<const Point> samples, std::span<const Point> centers) {
  double obj = 0.0;
  double d = 0.0;
  for (const Point& p : samples) {
    nearest(p, centers, &d);
    obj += d;
  }
  return obj;
}

KMeansResult kmeans(std::span<const Point> samples, std::size_t k, const KMeansOptions& opts) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (samples.size() < k) {
    throw Error(ErrorCode::kInsufficientSamples,
                fmt::format("insufficient samples: {} for k = {}", samples.size(), k));
  }
  if (opts.max_iter < 1 || !(opts.tol > 0.0) || opts.restarts < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans needs max_iter >= 1, tol > 0, restarts >= 1");
  }
  KMeansResult best;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(opts.seed, r));
    KMeansResult run = lloyd(samples, seed_plus_plus(samples, k, rng), opts);
    if (r == 0 || run.objective < best.objective) best = std::move(run);
  }
  return best;
}

PointSet estimate_positions(const DensityMap& dm, const LocalizationConfig& cfg) {
  cfg.validate();
  if (dm.height() == 0 || dm.width() == 0) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  const double W = static_cast<double>(dm.width());
  const double H = static_cast<double>(dm.height());
  const double k_real = std::max(0.0, std::round(total_count(dm)));
  const auto k = static_cast<std::size_t>(k_real);
  if (k == 0) return PointSet({}, W, H);

  const DensityMap smoothed = gaussian_smooth(dm, cfg.smooth_sigma);
  const CandidateSet cands = select_candidates(smoothed, cfg.top_percentile);
  const std::vector<Point> samples =
      weighted_sample(cands, k * cfg.samples_per_object, cfg.seed);

  KMeansOptions opts;
  opts.max_iter = cfg.kmeans_max_iter;
  opts.tol = cfg.kmeans_tol;
  opts.seed = derive_seed(cfg.seed, 1);
  opts.restarts = cfg.kmeans_restarts;
  KMeansResult km = kmeans(samples, k, opts);

  std::vector<Point> centers;
  centers.reserve(k);
  for (const Point& c : km.centers) {
    centers.push_back({std::clamp(c.x, 0.0, std::nextafter(W, 0.0)),
                       std::clamp(c.y, 0.0, std::nextafter(H, 0.0))});
  }
  return PointSet(std::move(centers), W, H);
}

}  // namespace densloc
