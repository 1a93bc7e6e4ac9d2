#include "tpp/spectral.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace tpp {

std::vector<double> periodogram(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 2) return {};
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
  const std::size_t nyquist = n / 2;
  std::vector<double> bins(nyquist, 0.0);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t k = 1; k <= nyquist; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // (k * t) mod n keeps the phase argument small and exact.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      const double x = signal[t] - mean;
      re += x * std::cos(phase);
      im -= x * std::sin(phase);
    }
    const bool self_conjugate = (2 * k == n);
    bins[k - 1] = (self_conjugate ? 1.0 : 2.0) * (re * re + im * im) * norm;
  }
  return bins;
}

BandPower band_power(std::span<const double> signal) {
  const std::vector<double> bins = periodogram(signal);
  BandPower out;
  const std::size_t k = bins.size();
  if (k == 0) return out;
  const std::size_t split = (k + 1) / 2;
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < split; ++i) low += bins[i];
  for (std::size_t i = split; i < k; ++i) high += bins[i];
  out.low = low / static_cast<double>(split);
  if (k > split) out.high = high / static_cast<double>(k - split);
  return out;
}

}  // namespace tpp
