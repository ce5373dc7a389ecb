#include "szbench/resample.hpp"

#include <cmath>
#include <numbers>

#include "szbench/dsp.hpp"
#include "szbench/errors.hpp"

namespace szbench::dsp {

namespace {

double sinc(double t) {
  if (std::abs(t) < 1e-12) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::sin(pt) / pt;
}

// Reflect m into [0, n - 1] with whole-sample symmetry (period 2n - 2).
std::int64_t reflect(std::int64_t m, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  m %= period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

}  // namespace

Rational approximate_ratio(double ratio, std::int64_t max_den) {
  if (!(ratio > 0) || !std::isfinite(ratio)) {
    throw ContractError("rate ratio must be a positive finite number");
  }

  std::int64_t p_prev = 1, q_prev = 0;
  auto a = static_cast<std::int64_t>(std::floor(ratio));
  std::int64_t p = a, q = 1;
  double x = ratio;

  while (q <= max_den) {
    const double frac = x - std::floor(x);
    if (frac < 1e-12) break;
    x = 1.0 / frac;
    a = static_cast<std::int64_t>(std::floor(x));
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    if (q_next > max_den) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }

  if (p < 1 || std::abs(static_cast<double>(p) / q - ratio) > 1e-9 * ratio) {
    throw ContractError("rate ratio " + std::to_string(ratio) +
                        " has no small rational form; resampling it is not supported");
  }
  return {p, q};
}

PolyphaseResampler::PolyphaseResampler(double source_fs, double target_fs,
                                       const ResamplerSpec& spec) {
  if (!(source_fs > 0) || !(target_fs > 0)) {
    throw ContractError("sampling rates must be positive");
  }
  if (!(spec.cutoff_ratio > 0) || !(spec.cutoff_ratio <= 1) || spec.zero_crossings < 1 ||
      !(spec.kaiser_beta >= 0)) {
    throw ContractError("bad resampler kernel parameters");
  }

  ratio_ = approximate_ratio(target_fs / source_fs);
  if (is_identity()) return;

  const auto up = static_cast<double>(ratio_.num);
  const auto down = static_cast<double>(ratio_.den);

  // Kernel cutoff in cycles per input sample: cutoff_ratio times the Nyquist
  // frequency of the slower side.
  const double fcn = 0.5 * spec.cutoff_ratio * std::min(1.0, up / down);
  const double half_width = spec.zero_crossings / (2.0 * fcn);
  const auto reach = static_cast<std::int64_t>(std::ceil(half_width + 1e-9));

  tap_origin_ = -reach;
  taps_per_phase_ = 2 * reach + 1;

  const double i0_beta = bessel_i0(spec.kaiser_beta);
  phase_taps_.assign(static_cast<std::size_t>(ratio_.num),
                     std::vector<double>(static_cast<std::size_t>(taps_per_phase_), 0.0));
  for (std::int64_t r = 0; r < ratio_.num; ++r) {
    auto& taps = phase_taps_[static_cast<std::size_t>(r)];
    const double frac = static_cast<double>(r) / up;
    double sum = 0.0;
    for (std::int64_t i = 0; i < taps_per_phase_; ++i) {
      const double x = frac - static_cast<double>(tap_origin_ + i);
      const double u = x / half_width;
      if (std::abs(u) > 1.0) continue;
      const double window = bessel_i0(spec.kaiser_beta * std::sqrt(1.0 - u * u)) / i0_beta;
      const double v = 2.0 * fcn * sinc(2.0 * fcn * x) * window;
      taps[static_cast<std::size_t>(i)] = v;
      sum += v;
    }
    for (double& t : taps) t /= sum;  // a constant input maps to itself exactly
  }
}

std::int64_t PolyphaseResampler::output_length(std::int64_t input_length) const {
  if (input_length < 0) throw ContractError("negative input length");
  return (2 * input_length * ratio_.num + ratio_.den) / (2 * ratio_.den);
}

std::vector<double> PolyphaseResampler::process(std::span<const double> input) const {
  const auto n = static_cast<std::int64_t>(input.size());
  if (is_identity() || n == 0) return std::vector<double>(input.begin(), input.end());

  const std::int64_t out_len = output_length(n);
  std::vector<double> out(static_cast<std::size_t>(out_len));

  for (std::int64_t j = 0; j < out_len; ++j) {
    const std::int64_t jm = j * ratio_.den;
    const std::int64_t q = jm / ratio_.num;
    const std::int64_t r = jm % ratio_.num;
    const auto& taps = phase_taps_[static_cast<std::size_t>(r)];

    const std::int64_t first = q + tap_origin_;
    double acc = 0.0;
    if (first >= 0 && first + taps_per_phase_ <= n) {
      const double* x = input.data() + first;
      for (std::int64_t i = 0; i < taps_per_phase_; ++i) {
        acc += taps[static_cast<std::size_t>(i)] * x[i];
      }
    } else {
      for (std::int64_t i = 0; i < taps_per_phase_; ++i) {
        acc += taps[static_cast<std::size_t>(i)] * input[static_cast<std::size_t>(
                                                      reflect(first + i, n))];
      }
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

std::vector<double> resample_signal(std::span<const double> input, double source_fs,
                                    double target_fs, const ResamplerSpec& spec) {
  return PolyphaseResampler(source_fs, target_fs, spec).process(input);
}

}  // namespace szbench::dsp
