#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ebi_unmix/dsp.hpp"
#include "ebi_unmix/error.hpp"
#include "oracles.hpp"

using ebi::Matrix;
using ebi::SignalMatrix;

namespace {

SignalMatrix ramp(std::size_t n, std::size_t channels = 1, double rate = 1000.0) {
  Matrix m(n, channels);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < channels; ++c) m(r, c) = static_cast<double>(r) + 1000.0 * c;
  return SignalMatrix(m, rate);
}

SignalMatrix noise(std::size_t n, std::uint64_t seed, double rate = 1000.0) {
  return SignalMatrix(oracle::random_matrix(n, 1, seed), rate);
}

}  // namespace

TEST_CASE("frame_signal") {
  SUBCASE("non-overlapping frames drop the tail") {
    const auto set = ebi::frame_signal(ramp(25000, 4), {10000, 10000});
    REQUIRE(set.frames.size() == 2);
    CHECK(set.dropped == 5000);
    CHECK(!set.too_short);
    CHECK(set.frames[1].samples()(0, 0) == 10000.0);
    CHECK(set.frames[1].sample_rate_hz() == 1000.0);
    CHECK(set.frames[1].channel_labels() == set.frames[0].channel_labels());
  }
  SUBCASE("exact fit") {
    const auto set = ebi::frame_signal(ramp(100), {100, 100});
    CHECK(set.frames.size() == 1);
    CHECK(set.dropped == 0);
  }
  SUBCASE("overlapping windows") {
    const auto set = ebi::frame_signal(ramp(8), {4, 2});
    REQUIRE(set.frames.size() == 3);
    CHECK(set.starts == std::vector<std::size_t>{0, 2, 4});
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(set.frames[k].samples()(i, 0) == static_cast<double>(2 * k + i));
      }
    }
  }
  SUBCASE("too-short input yields no frames and a warning flag") {
    const auto set = ebi::frame_signal(ramp(50), {100, 100});
    CHECK(set.frames.empty());
    CHECK(set.too_short);
  }
  SUBCASE("concatenated frames reproduce the truncated input") {
    const SignalMatrix s = ramp(1037, 3);
    const auto set = ebi::frame_signal(s, {100, 100});
    std::size_t row = 0;
    for (const auto& f : set.frames) {
      for (std::size_t r = 0; r < f.length(); ++r, ++row) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(f.samples()(r, c) == s.samples()(row, c));
      }
    }
    CHECK(row + set.dropped == 1037);
  }
}

TEST_CASE("decimate") {
  SUBCASE("10x on a frame") {
    const auto d = ebi::decimate(ramp(10000, 4), 10);
    CHECK(d.length() == 1000);
    CHECK(d.sample_rate_hz() == 100.0);
  }
  SUBCASE("factor 1 is the identity") {
    const SignalMatrix s = ramp(17, 2);
    CHECK(ebi::decimate(s, 1) == s);
  }
  SUBCASE("index arithmetic") {
    const auto d = ebi::decimate(ramp(10), 3);
    REQUIRE(d.length() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(d.samples()(i, 0) == 3.0 * static_cast<double>(i));
  }
  SUBCASE("factor 0 is rejected") {
    CHECK_THROWS_AS(ebi::decimate(ramp(10), 0), ebi::Error);
  }
  SUBCASE("composition: decimate(f) then decimate(g) == decimate(f*g)") {
    const SignalMatrix s = ramp(997, 2);
    for (std::size_t f : {1u, 2u, 3u, 5u}) {
      for (std::size_t g : {1u, 2u, 7u}) {
        const auto twice = ebi::decimate(ebi::decimate(s, f), g);
        const auto once = ebi::decimate(s, f * g);
        CHECK(twice.samples() == once.samples());
        CHECK(twice.sample_rate_hz() == doctest::Approx(once.sample_rate_hz()).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("design_butterworth_lp2") {
  SUBCASE("-3 dB at cutoff, unit DC gain, stable") {
    for (double rate : {100.0, 250.0, 1000.0, 44100.0}) {
      for (double frac : {0.01, 0.1, 0.25, 0.4, 0.49}) {
        const double cutoff = frac * rate;
        const auto c = ebi::design_butterworth_lp2(cutoff, rate);
        CHECK(std::abs(std::abs(c.response(cutoff, rate)) - 1.0 / std::sqrt(2.0)) < 1e-6);
        CHECK(std::abs(c.dc_gain() - 1.0) < 1e-9);
        CHECK(c.stable());
      }
    }
  }
  SUBCASE("matches the analog prototype through the bilinear map") {
    const double rate = 1000.0, cutoff = 40.0;
    const auto c = ebi::design_butterworth_lp2(cutoff, rate);
    for (int i = 0; i < 50; ++i) {
      const double f = 0.1 * std::pow(499.0 / 0.1, i / 49.0);
      const auto digital = c.response(f, rate);
      const auto analog = oracle::butterworth_analog_at(f, cutoff, rate);
      CHECK(std::abs(digital - analog) < 1e-6);
    }
  }
  SUBCASE("cutoff at or above Nyquist is a design error") {
    try {
      ebi::design_butterworth_lp2(50.0, 100.0);
      FAIL("expected throw");
    } catch (const ebi::Error& e) {
      CHECK(e.kind() == ebi::ErrorKind::filter_design);
    }
    CHECK_THROWS_AS(ebi::design_butterworth_lp2(0.0, 100.0), ebi::Error);
    CHECK_THROWS_AS(ebi::design_filter({4, 10.0, ebi::FilterKind::low_pass}, 100.0), ebi::Error);
  }
}

TEST_CASE("apply_filter") {
  const auto c = ebi::design_butterworth_lp2(40.0, 100.0);

  SUBCASE("zero in, zero out") {
    const auto y = ebi::apply_filter(SignalMatrix(Matrix(64, 2), 100.0), c);
    CHECK(ebi::max_abs(y.samples()) == 0.0);
  }
  SUBCASE("unit DC settles to 1") {
    const auto lp = ebi::design_butterworth_lp2(5.0, 1000.0);
    const auto y = ebi::apply_filter(SignalMatrix(Matrix(2000, 1, 1.0), 1000.0), lp);
    CHECK(std::abs(y.samples()(1999, 0) - 1.0) < 1e-6);
  }
  SUBCASE("unstable coefficients are rejected") {
    ebi::BiquadCoefficients bad{1.0, 0.0, 0.0, 0.0, 1.5};
    try {
      ebi::apply_filter(SignalMatrix(Matrix(4, 1, 1.0), 100.0), bad);
      FAIL("expected throw");
    } catch (const ebi::Error& e) {
      CHECK(e.kind() == ebi::ErrorKind::unstable_filter);
    }
  }
  SUBCASE("matches the difference equation written out") {
    const SignalMatrix x = noise(200, 4, 100.0);
    const auto y = ebi::apply_filter(x, c);
    std::vector<double> in = x.samples().column(0), ref(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      auto at = [&](const std::vector<double>& v, std::ptrdiff_t i) {
        return i < 0 ? 0.0 : v[static_cast<std::size_t>(i)];
      };
      const auto ik = static_cast<std::ptrdiff_t>(k);
      ref[k] = c.b0 * in[k] + c.b1 * at(in, ik - 1) + c.b2 * at(in, ik - 2) -
               c.a1 * at(ref, ik - 1) - c.a2 * at(ref, ik - 2);
      CHECK(y.samples()(k, 0) == doctest::Approx(ref[k]).epsilon(1e-12));
    }
  }
  SUBCASE("linearity") {
    const SignalMatrix x = noise(500, 1, 100.0), z = noise(500, 2, 100.0);
    const double a = 0.7, b = -2.3;
    const Matrix combo = a * x.samples() + b * z.samples();
    const auto lhs = ebi::apply_filter(SignalMatrix(combo, 100.0), c).samples();
    const auto rhs = a * ebi::apply_filter(x, c).samples() + b * ebi::apply_filter(z, c).samples();
    CHECK(ebi::max_abs_diff(lhs, rhs) < 1e-9);
  }
  SUBCASE("time invariance") {
    const std::size_t shift = 13;
    const SignalMatrix x = noise(400, 5, 100.0);
    Matrix shifted(400 + shift, 1);
    for (std::size_t i = 0; i < 400; ++i) shifted(i + shift, 0) = x.samples()(i, 0);
    const auto y = ebi::apply_filter(x, c).samples();
    const auto ys = ebi::apply_filter(SignalMatrix(shifted, 100.0), c).samples();
    for (std::size_t i = 0; i < 400; ++i) CHECK(std::abs(ys(i + shift, 0) - y(i, 0)) < 1e-9);
  }
  SUBCASE("white noise rolls off at >= 12 dB per octave above cutoff") {
    const double rate = 1000.0, cutoff = 50.0;
    const auto lp = ebi::design_butterworth_lp2(cutoff, rate);
    const SignalMatrix x = noise(1 << 16, 77, rate);
    const auto y = ebi::apply_filter(x, lp).samples().column(0);
    const auto in = x.samples().column(0);
    auto gain_db = [&](double f) {
      double out_p = 0.0, in_p = 0.0;
      for (double df : {-4.0, -2.0, 0.0, 2.0, 4.0}) {
        out_p += oracle::segment_power(y, f + df, rate, 1024);
        in_p += oracle::segment_power(in, f + df, rate, 1024);
      }
      return 10.0 * std::log10(out_p / in_p);
    };
    const double g100 = gain_db(2 * cutoff);
    const double g200 = gain_db(4 * cutoff);
    CHECK(g100 - g200 >= 12.0);
    CHECK(gain_db(10.0) > -0.5);
  }
  SUBCASE("zero-phase variant has squared magnitude and no lag") {
    const double rate = 1000.0;
    const auto lp = ebi::design_butterworth_lp2(20.0, rate);
    Matrix m(2000, 1);
    for (std::size_t i = 0; i < 2000; ++i)
      m(i, 0) = std::sin(2.0 * std::numbers::pi * 2.0 * static_cast<double>(i) / rate);
    const auto y = ebi::apply_filter_zero_phase(SignalMatrix(m, rate), lp).samples();
    const double g = std::norm(lp.response(2.0, rate));
    for (std::size_t i = 500; i < 1500; ++i) CHECK(std::abs(y(i, 0) - g * m(i, 0)) < 1e-3);
  }
}

TEST_CASE("periodogram agrees with a direct DFT") {
  const SignalMatrix x = noise(300, 21, 50.0);
  const auto v = x.samples().column(0);
  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= 300.0;
  std::vector<double> centered = v;
  for (double& s : centered) s -= mean;
  const auto pg = ebi::periodogram(v, 50.0);
  REQUIRE(pg.power.size() == 151);
  for (std::size_t k : {0u, 1u, 17u, 90u, 150u}) {
    CHECK(pg.freq_hz[k] == doctest::Approx(k * 50.0 / 300.0));
    CHECK(pg.power[k] == doctest::Approx(oracle::dft_power(centered, pg.freq_hz[k], 50.0))
                             .epsilon(1e-9)
                             .scale(1e-12));
  }
  Matrix tone(400, 1);
  for (std::size_t i = 0; i < 400; ++i)
    tone(i, 0) = std::cos(2.0 * std::numbers::pi * 7.5 * static_cast<double>(i) / 100.0);
  CHECK(ebi::peak_frequency(ebi::periodogram(tone.column(0), 100.0)) == doctest::Approx(7.5));
}
