#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace szbench::dsp {

// Anti-aliasing kernel parameters of the polyphase windowed-sinc resampler.
struct ResamplerSpec {
  double kaiser_beta = 8.0;
  double cutoff_ratio = 0.9;  // fraction of the lower rate's Nyquist
  int zero_crossings = 64;    // sinc zero crossings per side
};

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

// Best rational approximation of `ratio` with den <= max_den (continued
// fractions). Throws ContractError when no approximation is within 1e-9
// relative -- the requested ratio is unsupported.
Rational approximate_ratio(double ratio, std::int64_t max_den = 4096);

// Rate converter by a rational factor L/M. Phase tables are precomputed at
// construction; process() is a pure function of its input. Edges are handled
// by reflection, so a constant signal stays constant to the last sample.
class PolyphaseResampler {
 public:
  PolyphaseResampler(double source_fs, double target_fs, const ResamplerSpec& spec = {});

  std::int64_t output_length(std::int64_t input_length) const;
  bool is_identity() const { return ratio_.num == ratio_.den; }

  std::vector<double> process(std::span<const double> input) const;

 private:
  Rational ratio_;
  std::int64_t taps_per_phase_ = 0;
  std::int64_t tap_origin_ = 0;                // index offset of the first tap
  std::vector<std::vector<double>> phase_taps_;  // [phase][tap], each sums to 1
};

std::vector<double> resample_signal(std::span<const double> input, double source_fs,
                                    double target_fs, const ResamplerSpec& spec = {});

}  // namespace szbench::dsp
