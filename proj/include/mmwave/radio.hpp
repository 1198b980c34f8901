#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmwave/errors.hpp"

namespace mmwave {

/// Physical-layer constants of the Friis-based rate model.
struct RadioParams {
  double bandwidth_hz = 1.2e9;
  double tx_power_w = 1e-4;
  double gain_tx = 1.0;
  double gain_rx = 1.0;
  double wavelength_m = 5e-3;
  double ref_distance_m = 1.0;
  double pathloss_exponent = 2.0;
  double noise_w_per_hz = 0.0;
  double interference_w_per_hz = 0.0;

  /// The default simulation parameter set: 1200 MHz, 0.1 mW, -134 dBm/MHz,
  /// eta = 2, d0 = 1 m, 5 mm wavelength, unit antenna gains, no interference.
  static RadioParams table_one() {
    RadioParams p;
    p.noise_w_per_hz = dbm_per_mhz_to_w_per_hz(-134.0);
    return p;
  }

  static double dbm_per_mhz_to_w_per_hz(double dbm_per_mhz) {
    return std::pow(10.0, dbm_per_mhz / 10.0) * 1e-3 / 1e6;
  }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw DomainError(std::string("invalid radio parameter: ") + what);
    };
    require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0, "bandwidth must be > 0");
    require(std::isfinite(tx_power_w) && tx_power_w > 0, "tx power must be > 0");
    require(std::isfinite(gain_tx) && gain_tx > 0, "tx gain must be > 0");
    require(std::isfinite(gain_rx) && gain_rx > 0, "rx gain must be > 0");
    require(std::isfinite(wavelength_m) && wavelength_m > 0, "wavelength must be > 0");
    require(std::isfinite(ref_distance_m) && ref_distance_m > 0,
            "reference distance must be > 0");
    require(pathloss_exponent >= 2.0 && pathloss_exponent <= 6.0,
            "path-loss exponent must lie in [2, 6]");
    require(std::isfinite(noise_w_per_hz) && noise_w_per_hz > 0, "noise density must be > 0");
    require(std::isfinite(interference_w_per_hz) && interference_w_per_hz >= 0,
            "interference must be >= 0");
  }
};

namespace detail {

inline void check_distance(double d) {
  if (!(d > 0) || std::isnan(d)) throw DomainError("distance must be positive");
}

// Received SNR at the reference distance for a given noise-plus-interference
// density.
inline double reference_snr(const RadioParams& p, double noise_density) {
  if (!(noise_density > 0) || !std::isfinite(noise_density)) {
    throw DomainError("noise power density must be finite and > 0");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return p.tx_power_w * p.gain_rx * p.gain_tx * p.wavelength_m * p.wavelength_m /
         (16.0 * pi2 * noise_density * p.bandwidth_hz);
}

}  // namespace detail

/// SNR operating point at distance d. Constant inside the reference distance,
/// power-law decay (d/d0)^-eta outside it.
inline double snr(const RadioParams& p, double d) {
  detail::check_distance(d);
  const double at_ref = detail::reference_snr(p, p.noise_w_per_hz);
  if (d <= p.ref_distance_m) return at_ref;
  return at_ref * std::pow(d / p.ref_distance_m, -p.pathloss_exponent);
}

/// Maximum achievable rate in bits/s over a link of length d.
/// Distances below d0 are clamped to d0.
inline double rate(const RadioParams& p, double d) {
  detail::check_distance(d);
  const double eff = std::max(d, p.ref_distance_m);
  const double at_ref = detail::reference_snr(p, p.noise_w_per_hz + p.interference_w_per_hz);
  const double s = at_ref * std::pow(p.ref_distance_m / eff, p.pathloss_exponent);
  return p.bandwidth_hz * std::log2(1.0 + s);
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Distance at which snr() drops to `target_db`, found by bisection.
/// Throws SpecError when the target exceeds the reference-distance SNR.
inline double cell_radius(const RadioParams& p, double target_db) {
  const double target = from_db(target_db);
  const double d0 = p.ref_distance_m;
  if (target > snr(p, d0)) {
    throw SpecError("SNR target " + std::to_string(target_db) +
                    " dB exceeds the reference-distance SNR " + std::to_string(to_db(snr(p, d0))) +
                    " dB");
  }
  double lo = d0;
  double hi = 2.0 * d0;
  while (snr(p, hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (snr(p, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Integer scaling for the exact-optimality regime: round(value * 10^digits).
inline double scale_to_integer(double value, int digits) {
  return std::round(value * std::pow(10.0, digits));
}

}  // namespace mmwave
