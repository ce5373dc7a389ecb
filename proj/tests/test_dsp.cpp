#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "szbench/dsp.hpp"
#include "szbench/errors.hpp"

using namespace szbench;

namespace {

// Frequency response of a biquad cascade, computed directly from the transfer
// function (independent of the time-domain filter code).
double cascade_gain(const std::vector<dsp::Biquad>& sections, double hz, double fs) {
  const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * hz / fs);
  std::complex<double> h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 * z * z + s.b1 * z + s.b2) / (z * z + s.a1 * z + s.a2);
  }
  return std::abs(h);
}

}  // namespace

TEST_CASE("notch kills its center frequency and passes the rest") {
  const double fs = 256.0;
  const auto section = dsp::notch(50.0, 30.0, fs);
  const std::vector<dsp::Biquad> cascade{section};

  CHECK(cascade_gain(cascade, 50.0, fs) < 1e-9);
  CHECK(cascade_gain(cascade, 10.0, fs) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(cascade_gain(cascade, 100.0, fs) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("band-pass has unit center gain and -3 dB edges") {
  const double fs = 256.0;
  const auto cascade = dsp::butterworth_bandpass(2, 2.0, 40.0, fs);
  CHECK(cascade.size() == 2);

  // Pre-warped band edges land exactly on the analog -3 dB points.
  CHECK(cascade_gain(cascade, 2.0, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(cascade_gain(cascade, 40.0, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

  // Geometric center of the pre-warped band has unit gain by construction.
  const double w_lo = 2.0 * fs * std::tan(std::numbers::pi * 2.0 / fs);
  const double w_hi = 2.0 * fs * std::tan(std::numbers::pi * 40.0 / fs);
  const double center_hz = std::atan(std::sqrt(w_lo * w_hi) / (2.0 * fs)) * fs / std::numbers::pi;
  CHECK(cascade_gain(cascade, center_hz, fs) == doctest::Approx(1.0).epsilon(1e-9));

  // Stopband suppression.
  CHECK(cascade_gain(cascade, 0.05, fs) < 1e-3);
  CHECK(cascade_gain(cascade, 120.0, fs) < 0.02);
}

TEST_CASE("odd-order band-pass handles the real prototype pole") {
  const double fs = 256.0;
  const auto cascade = dsp::butterworth_bandpass(3, 4.0, 30.0, fs);
  CHECK(cascade.size() == 3);
  CHECK(cascade_gain(cascade, 4.0, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(cascade_gain(cascade, 30.0, fs) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("filter implements the difference equation") {
  const dsp::Biquad s{0.5, 0.25, -0.125, -0.3, 0.2};
  const std::vector<double> x{1.0, 0.0, 2.0, -1.0};
  const auto y = dsp::filter(std::vector<dsp::Biquad>{s}, x);

  // Hand-unrolled y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2].
  std::vector<double> expected(4);
  expected[0] = 0.5 * 1.0;
  expected[1] = 0.25 * 1.0 + 0.3 * expected[0];
  expected[2] = 0.5 * 2.0 - 0.125 * 1.0 + 0.3 * expected[1] - 0.2 * expected[0];
  expected[3] = 0.5 * -1.0 + 0.25 * 2.0 + 0.3 * expected[2] - 0.2 * expected[1];

  REQUIRE(y.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(y[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("filtfilt is zero-phase on an in-band tone") {
  const double fs = 256.0;
  const auto cascade = dsp::butterworth_bandpass(2, 2.0, 40.0, fs);
  const auto x = test::sine_wave(fs, 8.0, 10.0);
  const auto y = dsp::filtfilt(cascade, x);

  REQUIRE(y.size() == x.size());
  // Forward-backward filtering doubles the magnitude response but cancels the
  // phase: a mid-band tone comes back nearly unchanged and unshifted.
  const std::size_t lo = x.size() / 10;
  const std::size_t hi = x.size() - lo;
  for (std::size_t i = lo; i < hi; ++i) {
    CHECK(std::abs(y[i] - x[i]) < 0.02);
  }
}

TEST_CASE("filtfilt handles short and empty inputs") {
  const auto cascade = dsp::butterworth_bandpass(2, 2.0, 40.0, 256.0);
  CHECK(dsp::filtfilt(cascade, std::vector<double>{}).empty());
  CHECK(dsp::filtfilt(cascade, std::vector<double>{1.0}) == std::vector<double>{1.0});
  CHECK(dsp::filtfilt(cascade, std::vector<double>(5, 2.0)).size() == 5);
}

TEST_CASE("design rejects out-of-range parameters") {
  CHECK_THROWS_AS(dsp::notch(0.0, 30.0, 256.0), ContractError);
  CHECK_THROWS_AS(dsp::notch(128.0, 30.0, 256.0), ContractError);
  CHECK_THROWS_AS(dsp::butterworth_bandpass(0, 2.0, 40.0, 256.0), ContractError);
  CHECK_THROWS_AS(dsp::butterworth_bandpass(2, 40.0, 2.0, 256.0), ContractError);
  CHECK_THROWS_AS(dsp::butterworth_bandpass(2, 2.0, 130.0, 256.0), ContractError);
}

TEST_CASE("bessel_i0 matches reference values") {
  CHECK(dsp::bessel_i0(0.0) == 1.0);
  CHECK(dsp::bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-12));
  CHECK(dsp::bessel_i0(2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-12));
  CHECK(dsp::bessel_i0(8.0) == doctest::Approx(427.56411572180474).epsilon(1e-10));
}
