#pragma once

#include <span>
#include <vector>

namespace tpp {

/// One-sided periodogram of the mean-removed signal, bins k = 1..floor(L/2).
/// Normalized so the bins sum to the mean squared deviation of the signal.
std::vector<double> periodogram(std::span<const double> signal);

struct BandPower {
  double low = 0.0;
  double high = 0.0;
};

/// Mean bin power below and above the half-Nyquist split: bins
/// 1..ceil(K/2) are low, the rest high. An empty band reads 0.
BandPower band_power(std::span<const double> signal);

}  // namespace tpp
