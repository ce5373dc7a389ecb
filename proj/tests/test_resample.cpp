#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "szbench/errors.hpp"
#include "szbench/resample.hpp"

using namespace szbench;

TEST_CASE("rational rate ratios reduce to lowest terms") {
  auto r = dsp::approximate_ratio(256.0 / 512.0);
  CHECK(r.num == 1);
  CHECK(r.den == 2);

  r = dsp::approximate_ratio(256.0 / 200.0);
  CHECK(r.num == 32);
  CHECK(r.den == 25);

  r = dsp::approximate_ratio(256.0 / 250.0);
  CHECK(r.num == 128);
  CHECK(r.den == 125);

  r = dsp::approximate_ratio(1.0);
  CHECK(r.num == 1);
  CHECK(r.den == 1);
}

TEST_CASE("irrational ratios are rejected") {
  CHECK_THROWS_AS(dsp::approximate_ratio(std::numbers::pi), ContractError);
  CHECK_THROWS_AS(dsp::PolyphaseResampler(std::numbers::pi * 100.0, 256.0), ContractError);
}

TEST_CASE("equal rates copy the input bit for bit") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 13.0);
  std::vector<double> x(4097);
  for (auto& v : x) v = dist(rng);

  dsp::PolyphaseResampler rs(256.0, 256.0);
  CHECK(rs.is_identity());
  const auto y = rs.process(x);
  REQUIRE(y.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("output length rounds the rational image of the input length") {
  dsp::PolyphaseResampler up(250.0, 256.0);
  CHECK(up.output_length(1000) == 1024);
  CHECK(up.output_length(0) == 0);

  dsp::PolyphaseResampler down(512.0, 256.0);
  CHECK(down.output_length(1000) == 500);
  CHECK(down.output_length(999) == 500);  // 999/2 rounds half up
  CHECK(down.output_length(1) == 1);

  dsp::PolyphaseResampler odd(200.0, 256.0);
  CHECK(odd.output_length(200) == 256);
  CHECK(odd.output_length(37) == 47);  // round(37 * 32 / 25) = round(47.36)
}

TEST_CASE("constant signals pass through unchanged") {
  const std::vector<double> x(500, 7.0);

  for (double source : {512.0, 200.0, 250.0}) {
    dsp::PolyphaseResampler rs(source, 256.0);
    const auto y = rs.process(x);
    REQUIRE(static_cast<std::int64_t>(y.size()) == rs.output_length(500));
    for (const double v : y) CHECK(v == doctest::Approx(7.0).epsilon(1e-9));
  }
}

TEST_CASE("downsampling a tone preserves amplitude and phase") {
  const double f_src = 512.0;
  const double f_dst = 256.0;
  const double tone = 10.0;
  const auto x = test::sine_wave(f_src, 20.0, tone);

  dsp::PolyphaseResampler rs(f_src, f_dst);
  const auto y = rs.process(x);
  REQUIRE(static_cast<std::int64_t>(y.size()) == rs.output_length(static_cast<std::int64_t>(x.size())));

  const std::size_t lo = y.size() / 10;
  const std::size_t hi = y.size() - lo;
  for (std::size_t i = lo; i < hi; ++i) {
    const double want = std::sin(2.0 * std::numbers::pi * tone * static_cast<double>(i) / f_dst);
    CHECK(std::abs(y[i] - want) < 0.01);
  }
}

TEST_CASE("upsampling a tone preserves amplitude and phase") {
  const double f_src = 200.0;
  const double f_dst = 256.0;
  const double tone = 10.0;
  const auto x = test::sine_wave(f_src, 20.0, tone);

  dsp::PolyphaseResampler rs(f_src, f_dst);
  const auto y = rs.process(x);

  const std::size_t lo = y.size() / 10;
  const std::size_t hi = y.size() - lo;
  for (std::size_t i = lo; i < hi; ++i) {
    const double want = std::sin(2.0 * std::numbers::pi * tone * static_cast<double>(i) / f_dst);
    CHECK(std::abs(y[i] - want) < 0.01);
  }
}

TEST_CASE("resampling is linear") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> a(777), b(777);
  for (auto& v : a) v = dist(rng);
  for (auto& v : b) v = dist(rng);

  std::vector<double> combo(777);
  for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = 2.0 * a[i] - 3.0 * b[i];

  dsp::PolyphaseResampler rs(250.0, 256.0);
  const auto ya = rs.process(a);
  const auto yb = rs.process(b);
  const auto yc = rs.process(combo);
  REQUIRE(ya.size() == yc.size());
  for (std::size_t i = 0; i < yc.size(); ++i) {
    CHECK(yc[i] == doctest::Approx(2.0 * ya[i] - 3.0 * yb[i]).epsilon(1e-9));
  }
}

TEST_CASE("short inputs resample without reading out of range") {
  dsp::PolyphaseResampler rs(200.0, 256.0);
  for (std::int64_t n : {0, 1, 2, 5, 30}) {
    const std::vector<double> x(static_cast<std::size_t>(n), 1.5);
    const auto y = rs.process(x);
    CHECK(static_cast<std::int64_t>(y.size()) == rs.output_length(n));
    for (const double v : y) CHECK(v == doctest::Approx(1.5).epsilon(1e-9));
  }
}

TEST_CASE("invalid construction parameters are rejected") {
  CHECK_THROWS_AS(dsp::PolyphaseResampler(0.0, 256.0), ContractError);
  CHECK_THROWS_AS(dsp::PolyphaseResampler(256.0, -1.0), ContractError);

  dsp::ResamplerSpec bad;
  bad.zero_crossings = 0;
  CHECK_THROWS_AS(dsp::PolyphaseResampler(512.0, 256.0, bad), ContractError);

  bad = {};
  bad.cutoff_ratio = 1.5;
  CHECK_THROWS_AS(dsp::PolyphaseResampler(512.0, 256.0, bad), ContractError);
}

TEST_CASE("convenience wrapper matches the class") {
  const auto x = test::sine_wave(512.0, 4.0, 25.0);
  dsp::PolyphaseResampler rs(512.0, 256.0);
  const auto direct = rs.process(x);
  const auto wrapped = dsp::resample_signal(x, 512.0, 256.0);
  CHECK(direct == wrapped);
}
