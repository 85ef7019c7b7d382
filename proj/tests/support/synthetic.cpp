#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "clap/rng.hpp"

namespace clap::testing {

namespace {

double regime(std::size_t state, double t, double scale) {
  const double two_pi = 2.0 * std::numbers::pi;
  switch (state % 4) {
    case 0: return std::sin(two_pi * t / 25.3) * scale;
    case 1: return (std::fmod(t, 41.7) < 20.85 ? 1.0 : -1.0) * scale;
    case 2: return (0.5 * std::sin(two_pi * t / 12.9) + 0.5 * std::sin(two_pi * t / 46.7)) * scale;
    default: return (2.0 * std::fmod(t, 33.4) / 33.4 - 1.0) * scale;
  }
}

Synthetic assemble(std::vector<std::vector<double>> channels, std::vector<std::size_t> bounds,
                   Labels segment_states, const std::string& name) {
  Synthetic s;
  s.series = TimeSeries::from_channels(channels, name);
  const std::size_t n = s.series.length();
  bounds.pop_back();
  s.truth = Segmentation(bounds, n);
  s.segment_states = segment_states;
  Labels states;
  for (std::size_t i = 0; i < s.truth.num_segments(); ++i) {
    states.insert(states.end(), s.truth.segment_end(i) - s.truth.segment_begin(i), segment_states[i]);
  }
  s.states = StateSequence{states};
  return s;
}

}  // namespace

Synthetic recurring_states(std::uint64_t seed, std::size_t segments, std::size_t states,
                           std::size_t min_length, std::size_t max_length, double noise,
                           std::size_t channels) {
  Rng rng(RngSeed{seed}, "synthetic");
  std::vector<std::vector<double>> values(channels);
  std::vector<std::size_t> bounds;
  Labels segment_states;
  std::size_t n = 0;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const std::size_t state = seg % states;
    const std::size_t length = min_length + static_cast<std::size_t>(rng.below(max_length - min_length + 1));
    for (std::size_t c = 0; c < channels; ++c) {
      double clock = rng.uniform(0.0, 100.0);
      // Channels see the regimes in rotated order with their own scale.
      const std::size_t shown = (state + c) % states;
      const double scale = 1.0 + 0.5 * static_cast<double>(c);
      for (std::size_t t = 0; t < length; ++t) {
        values[c].push_back(regime(shown, clock, scale) + noise * rng.normal());
        // Jittered clock, so that no regime locks onto the window stride.
        clock += std::max(0.1, 1.0 + 0.3 * rng.normal());
      }
    }
    n += length;
    bounds.push_back(n);
    segment_states.push_back(static_cast<Label>(state + 1));
  }
  return assemble(std::move(values), std::move(bounds), std::move(segment_states),
                  "recurring_" + std::to_string(seed));
}

Synthetic two_regimes(std::uint64_t seed, std::size_t n) {
  Rng rng(RngSeed{seed}, "two_regimes");
  const std::size_t half = n / 2;
  const double phase = rng.uniform(0.0, 40.0);
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t t = 0; t < half; ++t) {
    x.push_back(std::sin(2.0 * std::numbers::pi * (static_cast<double>(t) + phase) / 40.0) +
                0.1 * rng.normal());
  }
  for (std::size_t t = half; t < n; ++t) {
    // Student-t with 3 degrees of freedom.
    const double z = rng.normal();
    double chi = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double g = rng.normal();
      chi += g * g;
    }
    x.push_back(z / std::sqrt(chi / 3.0));
  }
  return assemble({x}, {half, n}, {1, 2}, "two_regimes_" + std::to_string(seed));
}

TimeSeries add_noise(const TimeSeries& ts, double sigma, std::uint64_t seed) {
  Rng rng(RngSeed{seed}, "noise");
  std::vector<std::vector<double>> channels;
  for (std::size_t c = 0; c < ts.channels(); ++c) {
    auto x = ts.channel(c);
    double mean = 0.0, sq = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double v : x) sq += (v - mean) * (v - mean);
    double sd = std::sqrt(sq / static_cast<double>(x.size()));
    if (!(sd > 0.0)) sd = 1.0;
    std::vector<double> y;
    y.reserve(x.size());
    for (double v : x) y.push_back((v - mean) / sd + sigma * rng.normal());
    channels.push_back(std::move(y));
  }
  return TimeSeries::from_channels(channels, ts.name());
}

}  // namespace clap::testing
