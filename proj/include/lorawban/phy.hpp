#pragma once

// Sample-level LoRa baseband: chirp modulation, dechirp correlation, co-SF
// interference composition and maximum-magnitude detection. One sample per
// chip (T = 1/B), 2^sf chips per symbol.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/rng.hpp"

namespace lorawban::phy {

using Complex = std::complex<double>;

inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;

inline bool valid_sf(int sf) { return sf >= kMinSf && sf <= kMaxSf; }

inline void require_sf(int sf) {
  if (!valid_sf(sf)) throw DomainError("spreading factor must lie in [7, 12], got " + std::to_string(sf));
}

inline int chips_per_symbol(int sf) { return 1 << sf; }

class LoRaSymbol {
 public:
  LoRaSymbol(int value, int sf) : value_(value), sf_(sf) {
    require_sf(sf);
    if (value < 0 || value >= chips_per_symbol(sf))
      throw DomainError("symbol value " + std::to_string(value) + " out of range for SF" +
                        std::to_string(sf));
  }

  int value() const noexcept { return value_; }
  int sf() const noexcept { return sf_; }
  int chips() const noexcept { return chips_per_symbol(sf_); }

  friend bool operator==(const LoRaSymbol&, const LoRaSymbol&) = default;

 private:
  int value_;
  int sf_;
};

// 2^sf complex baseband samples carrying one symbol of energy `symbol_energy`.
struct Waveform {
  int sf = kMinSf;
  double symbol_energy = 1.0;
  std::vector<Complex> samples;

  double energy() const {
    double e = 0.0;
    for (const auto& s : samples) e += std::norm(s);
    return e;
  }
};

// One co-SF collision realisation: the interferer switches from chirp i1 to
// chirp 0 at sample tau and arrives at power 1/sir relative to the desired link.
struct InterferenceOffset {
  int tau = 0;
  int i1 = 0;
  double sir = 1.0;

  void validate(int sf) const {
    require_sf(sf);
    const int n = chips_per_symbol(sf);
    if (tau < 0 || tau > n / 2) throw DomainError("offset tau must lie in [0, 2^(sf-1)]");
    if (i1 < 0 || i1 >= n) throw DomainError("interfering symbol i1 out of range");
    if (!(sir > 0.0)) throw DomainError("signal-to-interference ratio must be positive");
  }
};

struct CorrelatorOutput {
  std::vector<Complex> bins;
};

namespace detail {

// Per-SF lookup tables: exp(j 2 pi k / N) and the FFT plan.
struct SfTables {
  explicit SfTables(int sf) : n(chips_per_symbol(sf)), fft(static_cast<std::size_t>(n)) {
    cis.resize(n);
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * numerics::kPi * k / n;
      cis[k] = {std::cos(angle), std::sin(angle)};
    }
    // conj of the base up-chirp exp(j 2 pi m^2 / N), used before the FFT.
    down.resize(n);
    for (int m = 0; m < n; ++m) {
      const auto idx = static_cast<std::int64_t>(m) * m % n;
      down[m] = std::conj(cis[idx]);
    }
  }
  int n;
  std::vector<Complex> cis;
  std::vector<Complex> down;
  numerics::FftPlan fft;
};

inline const SfTables& tables(int sf) {
  require_sf(sf);
  static std::array<std::unique_ptr<SfTables>, kMaxSf + 1> cache;
  static std::once_flag flags[kMaxSf + 1];
  std::call_once(flags[sf], [sf] { cache[sf] = std::make_unique<SfTables>(sf); });
  return *cache[sf];
}

// Phase index of chirp q at sample m: ((q + m) mod N) * m mod N.
inline int chirp_phase_index(int q, int m, int n) {
  return static_cast<int>(static_cast<std::int64_t>((q + m) % n) * m % n);
}

// |sin(pi k count / N) / sin(pi k / N)|, replaced by its limit `count` when
// k is a multiple of N. Arguments are reduced in integers first.
inline double dirichlet_ratio(int k, int count, int n) {
  const int k_mod = ((k % n) + n) % n;
  if (k_mod == 0) return static_cast<double>(count);
  const auto num_idx = static_cast<std::int64_t>(k_mod) * count % (2 * n);
  const double num = std::sin(numerics::kPi * static_cast<double>(num_idx) / n);
  const double den = std::sin(numerics::kPi * static_cast<double>(k_mod) / n);
  return std::abs(num / den);
}

}  // namespace detail

// Unit-energy chirp for symbol q.
inline Waveform unit_chirp(int q, int sf) {
  const LoRaSymbol sym(q, sf);
  const auto& t = detail::tables(sf);
  Waveform w;
  w.sf = sf;
  w.symbol_energy = 1.0;
  w.samples.resize(t.n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(t.n));
  for (int m = 0; m < t.n; ++m) w.samples[m] = amp * t.cis[detail::chirp_phase_index(q, m, t.n)];
  return w;
}

// samples[m] = sqrt(E_s / 2^sf) exp(j 2 pi ((q + m) mod 2^sf) m / 2^sf).
inline Waveform modulate(const LoRaSymbol& symbol, double energy) {
  if (!(energy >= 0.0)) throw DomainError("symbol energy must be nonnegative");
  Waveform w = unit_chirp(symbol.value(), symbol.sf());
  const double scale = std::sqrt(energy);
  for (auto& s : w.samples) s *= scale;
  w.symbol_energy = energy;
  return w;
}

// Correlation against the unit chirp of one probe bin (direct summation).
inline Complex dechirp(const Waveform& received, int probe, int sf) {
  const int n = chips_per_symbol(sf);
  require_sf(sf);
  if (static_cast<int>(received.samples.size()) != n)
    throw ShapeError("dechirp: waveform length does not match 2^sf");
  if (probe < 0 || probe >= n) throw DomainError("dechirp: probe bin out of range");
  const auto& t = detail::tables(sf);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  Complex acc{0.0, 0.0};
  for (int m = 0; m < n; ++m)
    acc += received.samples[m] * std::conj(t.cis[detail::chirp_phase_index(probe, m, n)]);
  return acc * amp;
}

// All 2^sf correlator bins at once: dechirp by the base chirp, then an FFT.
inline CorrelatorOutput correlate(const Waveform& received) {
  const auto& t = detail::tables(received.sf);
  if (static_cast<int>(received.samples.size()) != t.n)
    throw ShapeError("correlate: waveform length does not match 2^sf");
  CorrelatorOutput out;
  out.bins.resize(t.n);
  for (int m = 0; m < t.n; ++m) out.bins[m] = received.samples[m] * t.down[m];
  t.fft.forward(out.bins);
  const double amp = 1.0 / std::sqrt(static_cast<double>(t.n));
  for (auto& b : out.bins) b *= amp;
  return out;
}

// Index of the largest-magnitude bin; ties go to the smallest index.
inline LoRaSymbol demodulate(const Waveform& received, int sf) {
  if (received.sf != sf) throw ShapeError("demodulate: waveform SF does not match");
  const auto out = correlate(received);
  int best = 0;
  double best_mag = std::norm(out.bins[0]);
  for (int i = 1; i < static_cast<int>(out.bins.size()); ++i) {
    const double mag = std::norm(out.bins[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return LoRaSymbol(best, sf);
}

// Interfering waveform: chirp i1 on samples [0, tau), chirp 0 on [tau, 2^sf),
// both at amplitude sqrt(energy / sir).
inline Waveform interferer_splice(const InterferenceOffset& offset, int sf, double energy) {
  offset.validate(sf);
  const auto& t = detail::tables(sf);
  Waveform w;
  w.sf = sf;
  w.symbol_energy = energy / offset.sir;
  w.samples.resize(t.n);
  const double amp = std::sqrt(energy / (offset.sir * t.n));
  for (int m = 0; m < t.n; ++m) {
    const int q = m < offset.tau ? offset.i1 : 0;
    w.samples[m] = amp * t.cis[detail::chirp_phase_index(q, m, t.n)];
  }
  return w;
}

// Power gain of one link: small-scale/shadowing power times path gain.
struct LinkGain {
  double fading = 1.0;
  double path_gain = 1.0;

  double power() const { return fading * path_gain; }
};

// sqrt(desired gain) * desired + sqrt(interferer gain) * splice + noise, where
// the noise is circularly-symmetric complex Gaussian of per-sample variance
// `noise_variance`. `rng` may be null only when noise_variance is 0.
inline Waveform compose_received(const Waveform& desired, LinkGain desired_link,
                                 const std::optional<InterferenceOffset>& interference,
                                 LinkGain interferer_link, double noise_variance, rng::Stream* rng) {
  if (desired_link.fading < 0.0 || desired_link.path_gain < 0.0 || interferer_link.fading < 0.0 ||
      interferer_link.path_gain < 0.0 || noise_variance < 0.0)
    throw DomainError("compose_received: powers must be nonnegative");
  if (noise_variance > 0.0 && rng == nullptr)
    throw DomainError("compose_received: noise requested without a random stream");
  Waveform out;
  out.sf = desired.sf;
  out.symbol_energy = desired.symbol_energy;
  out.samples.resize(desired.samples.size());
  const double a_desired = std::sqrt(desired_link.power());
  for (std::size_t m = 0; m < desired.samples.size(); ++m) out.samples[m] = a_desired * desired.samples[m];
  if (interference) {
    const auto splice = interferer_splice(*interference, desired.sf, desired.symbol_energy);
    if (splice.samples.size() != desired.samples.size())
      throw ShapeError("compose_received: waveform lengths differ");
    const double a_int = std::sqrt(interferer_link.power());
    for (std::size_t m = 0; m < out.samples.size(); ++m) out.samples[m] += a_int * splice.samples[m];
  }
  if (noise_variance > 0.0) {
    const double sd = std::sqrt(noise_variance / 2.0);
    for (auto& s : out.samples) {
      const double re = rng->normal();
      const double im = rng->normal();
      s += Complex{sd * re, sd * im};
    }
  }
  return out;
}

// Upper bound on |Delta_probe| for one offset realisation.
inline double xcorr_upper_bound(const InterferenceOffset& offset, int probe, int sf) {
  offset.validate(sf);
  const int n = chips_per_symbol(sf);
  if (probe < 0 || probe >= n) throw DomainError("xcorr_upper_bound: probe bin out of range");
  const double first = detail::dirichlet_ratio(probe - offset.i1, offset.tau, n);
  const double second = detail::dirichlet_ratio(probe, n - offset.tau, n);
  return (first + second) / (n * std::sqrt(offset.sir));
}

// Peak-bin bound U_0: the bound at bin 0 with the chirp-0 segment taken at
// its maximum (2^sf - tau). This is the scalar the interference SEP integrates.
inline double peak_bin_bound(const InterferenceOffset& offset, int sf) {
  offset.validate(sf);
  const int n = chips_per_symbol(sf);
  const double first = detail::dirichlet_ratio(-offset.i1, offset.tau, n);
  return (first + static_cast<double>(n - offset.tau)) / (n * std::sqrt(offset.sir));
}

}  // namespace lorawban::phy
