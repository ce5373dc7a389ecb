#pragma once

#include <span>
#include <vector>

namespace szbench::dsp {

// Second-order IIR section, a0 normalized to 1:
//   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Narrow band-stop at f0_hz with quality factor q.
Biquad notch(double f0_hz, double q, double fs_hz);

// Butterworth band-pass of order 2 * n_pole_pairs as cascaded biquads,
// unit gain at the (pre-warped) center frequency.
std::vector<Biquad> butterworth_bandpass(int n_pole_pairs, double lo_hz, double hi_hz,
                                         double fs_hz);

std::vector<double> filter(std::span<const Biquad> sections, std::span<const double> x);

// Zero-phase forward-backward filtering with odd-reflection edge padding.
// Each pass starts from the filter's steady state for the first sample, so a
// constant signal passes through transient-free.
std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x);

// Zero-order modified Bessel function of the first kind (Kaiser window).
double bessel_i0(double x);

}  // namespace szbench::dsp
