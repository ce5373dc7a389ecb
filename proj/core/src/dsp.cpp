#include "szbench/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "szbench/errors.hpp"

namespace szbench::dsp {

namespace {

using cd = std::complex<double>;

cd bilinear(cd s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

// |H(e^{jw})| of one section.
double section_gain(const Biquad& s, double w) {
  const cd z = std::polar(1.0, w);
  const cd z2 = z * z;
  const cd num = s.b0 * z2 + s.b1 * z + s.b2;
  const cd den = z2 + s.a1 * z + s.a2;
  return std::abs(num / den);
}

std::vector<double> run_cascade(std::span<const Biquad> sections, std::vector<double> y) {
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double x = v;
      const double out = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * out + z2;
      z2 = s.b2 * x - s.a2 * out;
      v = out;
    }
  }
  return y;
}

// Samples until the slowest pole's impulse response decays to 0.1% of its
// initial value. Marginal or unstable sections report "pad everything".
std::size_t settle_length(std::span<const Biquad> sections) {
  double r_max = 0.0;
  for (const auto& s : sections) {
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) {
      r_max = std::max(r_max, std::sqrt(s.a2));
    } else {
      const double root = std::sqrt(disc);
      r_max = std::max({r_max, std::abs((-s.a1 + root) / 2.0),
                        std::abs((-s.a1 - root) / 2.0)});
    }
  }
  if (r_max <= 0.0) return 0;
  if (!(r_max < 1.0)) return std::numeric_limits<std::size_t>::max();
  const double n = std::ceil(std::log(1000.0) / -std::log(r_max));
  return static_cast<std::size_t>(std::min(n, 1e9));
}

// Like run_cascade, but each section starts in its steady state for a
// constant input equal to the first sample, so a signal with a nonzero mean
// enters without a startup transient.
std::vector<double> run_cascade_settled(std::span<const Biquad> sections,
                                        std::vector<double> y) {
  for (const auto& s : sections) {
    if (y.empty()) break;
    const double u = y.front();
    const double den = 1.0 + s.a1 + s.a2;
    const double v = den != 0.0 ? u * (s.b0 + s.b1 + s.b2) / den : 0.0;
    double z2 = s.b2 * u - s.a2 * v;
    double z1 = s.b1 * u - s.a1 * v + z2;
    for (double& sample : y) {
      const double x = sample;
      const double out = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * out + z2;
      z2 = s.b2 * x - s.a2 * out;
      sample = out;
    }
  }
  return y;
}

}  // namespace

Biquad notch(double f0_hz, double q, double fs_hz) {
  if (!(fs_hz > 0) || !(f0_hz > 0) || !(f0_hz < fs_hz / 2) || !(q > 0)) {
    throw ContractError("notch frequency must sit inside (0, fs/2) with positive q");
  }
  const double w0 = 2.0 * std::numbers::pi * f0_hz / fs_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;

  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

std::vector<Biquad> butterworth_bandpass(int n_pole_pairs, double lo_hz, double hi_hz,
                                         double fs_hz) {
  if (n_pole_pairs < 1) throw ContractError("band-pass needs at least one pole pair");
  if (!(fs_hz > 0) || !(lo_hz > 0) || !(lo_hz < hi_hz) || !(hi_hz < fs_hz / 2)) {
    throw ContractError("band-pass edges must satisfy 0 < lo < hi < fs/2");
  }

  const int n = n_pole_pairs;  // low-pass prototype order
  const double w_lo = 2.0 * fs_hz * std::tan(std::numbers::pi * lo_hz / fs_hz);
  const double w_hi = 2.0 * fs_hz * std::tan(std::numbers::pi * hi_hz / fs_hz);
  const double w0 = std::sqrt(w_lo * w_hi);
  const double bw = w_hi - w_lo;

  // Low-pass prototype poles on the unit circle, left half plane.
  std::vector<cd> proto;
  for (int k = 1; k <= n; ++k) {
    proto.push_back(std::polar(1.0, std::numbers::pi * (2.0 * k + n - 1.0) / (2.0 * n)));
  }

  std::vector<Biquad> sections;
  auto add_conjugate_pair_section = [&](cd z) {
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    sections.push_back(s);
  };

  for (const cd& p : proto) {
    if (p.imag() < -1e-12) continue;  // conjugate twin handled via its upper-half partner

    const cd pb = p * bw;
    const cd root = std::sqrt(pb * pb - 4.0 * w0 * w0);
    const cd s1 = (pb + root) / 2.0;
    const cd s2 = (pb - root) / 2.0;

    if (p.imag() > 1e-12) {
      // Complex prototype pole: each band-pass pole pairs with its own
      // conjugate (coming from the prototype's conjugate twin).
      add_conjugate_pair_section(bilinear(s1, fs_hz));
      add_conjugate_pair_section(bilinear(s2, fs_hz));
    } else {
      // Real prototype pole (odd order): its two band-pass poles form one
      // section, conjugate or both real.
      const cd z1 = bilinear(s1, fs_hz);
      const cd z2 = bilinear(s2, fs_hz);
      Biquad s;
      s.b0 = 1.0;
      s.b1 = 0.0;
      s.b2 = -1.0;
      s.a1 = -(z1 + z2).real();
      s.a2 = (z1 * z2).real();
      sections.push_back(s);
    }
  }

  const double wc = 2.0 * std::atan(w0 / (2.0 * fs_hz));
  for (auto& s : sections) {
    const double g = section_gain(s, wc);
    if (!(g > 0)) throw ContractError("degenerate band-pass section");
    s.b0 /= g;
    s.b1 /= g;
    s.b2 /= g;
  }
  return sections;
}

std::vector<double> filter(std::span<const Biquad> sections, std::span<const double> x) {
  return run_cascade(sections, std::vector<double>(x.begin(), x.end()));
}

std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2 || sections.empty()) return std::vector<double>(x.begin(), x.end());

  std::size_t pad = std::max(3 * (2 * sections.size() + 1), settle_length(sections));
  pad = std::min(pad, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  ext = run_cascade_settled(sections, std::move(ext));
  std::reverse(ext.begin(), ext.end());
  ext = run_cascade_settled(sections, std::move(ext));
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

double bessel_i0(double x) {
  const double half = x / 2.0;
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double f = half / k;
    term *= f * f;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace szbench::dsp
