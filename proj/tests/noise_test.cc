// Copyright 2026 The pqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pqsim/noise.h"

namespace pqsim {
namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix plus_state() {
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return DensityMatrix::pure(plus);
}

bool is_identity(const KrausChannel& ch) {
  const Matrix s = ch.superoperator();
  return (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff() < 1e-15;
}

TEST(Depolarizing, Examples) {
  EXPECT_TRUE(is_identity(depolarizing_channel(0.0)));
  EXPECT_LT(completeness_error(depolarizing_channel(1e-3).operators()), 1e-12);
  const DensityMatrix out = apply_channel(plus_state(), depolarizing_channel(0.75), {0});
  EXPECT_LT((out.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(depolarizing_channel(1.5), std::invalid_argument);
  EXPECT_THROW(depolarizing_channel(-0.1), std::invalid_argument);
}

TEST(BasicChannels, Examples) {
  EXPECT_EQ(std::abs(apply_channel(plus_state(), dephasing_channel(0.5), {0}).matrix()(1, 0)), 0.0);
  const double p = 0.3;
  const DensityMatrix out =
      apply_channel(DensityMatrix::basis_state(1, 1), amplitude_damping_channel(p), {0});
  EXPECT_NEAR(out.matrix()(0, 0).real(), p, 1e-15);
  EXPECT_NEAR(out.matrix()(1, 1).real(), 1.0 - p, 1e-15);
  EXPECT_LT(completeness_error(bit_flip_channel(1e-6).operators()), 1e-12);
}

TEST(PhaseDamping, ScalesCoherenceBySqrtOneMinusLambda) {
  const double lambda = 0.36;
  const DensityMatrix out = apply_channel(plus_state(), phase_damping_channel(lambda), {0});
  EXPECT_NEAR(out.matrix()(0, 1).real(), 0.5 * std::sqrt(1.0 - lambda), 1e-15);
  EXPECT_NEAR(out.matrix()(0, 0).real(), 0.5, 1e-15);
  // Same p removes twice as much coherence in the flip form.
  const DensityMatrix flip = apply_channel(plus_state(), dephasing_channel(lambda), {0});
  EXPECT_NEAR(flip.matrix()(0, 1).real(), 0.5 * (1.0 - 2.0 * lambda), 1e-15);
}

TEST(CoherenceForm, SelectsChannel) {
  CoherenceParams c;
  c.form = DephasingForm::kPhaseFlip;
  EXPECT_LT((coherence_dephasing_channel(0.2, c).superoperator() -
             dephasing_channel(0.2).superoperator()).cwiseAbs().maxCoeff(), 1e-15);
  c.form = DephasingForm::kPhaseDamping;
  EXPECT_LT((coherence_dephasing_channel(0.2, c).superoperator() -
             phase_damping_channel(0.2).superoperator()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(dephasing_form_from_name(dephasing_form_name(DephasingForm::kPhaseFlip)),
            DephasingForm::kPhaseFlip);
  EXPECT_THROW(dephasing_form_from_name("lorentzian"), std::invalid_argument);
}

TEST(Channels, RandomStatesKeepInvariants) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> g;
  CoherenceParams c;
  ShuttleParams sp;
  const ValleyDistribution d = ValleyDistribution::from_moments(100.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    Matrix a(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int k = 0; k < 4; ++k) a(r, k) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    const double p = u(rng);
    for (const KrausChannel& ch :
         {depolarizing_channel(p), dephasing_channel(p), bit_flip_channel(p),
          amplitude_damping_channel(p), phase_damping_channel(p), idle_channel(p * 5e4, c),
          shuttle_channel(p * 1e5, sp, d, c)}) {
      const DensityMatrix out = apply_channel(DensityMatrix(2, rho), ch, {i % 2});
      EXPECT_EQ(out.check(1e-12, 1e-10, 1e-10), "") << ch.label();
    }
  }
}

TEST(IdleChannel, Examples) {
  CoherenceParams c;
  EXPECT_TRUE(is_identity(idle_channel(0.0, c)));
  EXPECT_NEAR(idle_dephasing_prob(1000.0, c), 0.01, 1e-15);
  c.law = DephasingLaw::kGaussian;
  EXPECT_NEAR(idle_dephasing_prob(1000.0, c), 1e-4, 1e-18);
  EXPECT_THROW(idle_channel(-1.0, c), std::invalid_argument);
  // Beyond T2/2 the value is still produced (with a warning), clamped at 1.
  c.law = DephasingLaw::kLinear;
  EXPECT_DOUBLE_EQ(idle_dephasing_prob(3e5, c), 1.0);
}

TEST(ValleyExcitation, Examples) {
  EXPECT_EQ(valley_excitation_prob(100.0, 0.0, 10.0, 20.0), 0.0);
  EXPECT_NEAR(valley_excitation_prob(0.0, kPi / 2, 10.0, 20.0), 0.5, 1e-15);
  // Pinned from an independent 50-digit evaluation of the closed form.
  EXPECT_NEAR(valley_excitation_prob(20.0, kPi, 10.0, 20.0), 1.8629164494053706e-3, 1e-15);
  EXPECT_THROW(valley_excitation_prob(20.0, 1.0, 0.0, 20.0), std::invalid_argument);
  EXPECT_THROW(valley_excitation_prob(20.0, 1.0, 10.0, 0.0), std::invalid_argument);
}

TEST(ValleyExcitation, SmallEnergySpreadTendsToFixedSplitting) {
  const double e0 = 100.0, v = 10.0, dx = 20.0;
  // Midpoint rule over the phase with many nodes; the integrand is smooth.
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = -kPi + (i + 0.5) * 2.0 * kPi / n;
    sum += valley_excitation_prob(e0, phi, v, dx);
  }
  const double want = sum / n;
  // Moment inversion is ill-conditioned this far out, so set nu and s directly.
  ValleyDistribution narrow;
  narrow.mean_ev = e0;
  narrow.std_ev = 1e-5;
  narrow.rice_nu = e0;
  narrow.rice_s = 1e-5;
  const double got = mean_valley_excitation(narrow, v, dx);
  EXPECT_NEAR(got / want, 1.0, 1e-6);
}

TEST(ValleyExcitation, AdiabaticLimit) {
  EXPECT_LT(mean_valley_excitation(ValleyDistribution::from_moments(100.0, 20.0), 1e-3, 20.0), 1e-9);
}

TEST(ValleyCache, MemoisesByKey) {
  ValleyCache cache;
  const ValleyDistribution d = ValleyDistribution::from_moments(100.0, 20.0);
  const double a = cache.get(d, 10.0, 20.0);
  EXPECT_EQ(cache.get(d, 10.0, 20.0), a);
  EXPECT_EQ(cache.size(), 1u);
  cache.get(d, 11.0, 20.0);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(a, mean_valley_excitation(d, 10.0, 20.0));
}

TEST(Rice, RoundTripThroughNumericalMoments) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  const double h = 0.005;
  for (double x = h / 2; x < 600.0; x += h) {
    const double w = rice_pdf(x, 200.0, 30.0) * h;
    m0 += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / m0, sd = std::sqrt(m2 / m0 - mean * mean);
  const auto [nu, s] = rice_params_from_moments(mean, sd);
  EXPECT_NEAR(nu / 200.0, 1.0, 1e-6);
  EXPECT_NEAR(s / 30.0, 1.0, 1e-6);
}

TEST(Rice, LargeRatioAsymptoticsAndInfeasibleMoments) {
  const auto [m, sd] = rice_moments(100.0, 1.0);
  EXPECT_NEAR(m / std::sqrt(100.0 * 100.0 + 1.0), 1.0, 1e-3);
  EXPECT_GT(sd, 0.0);
  EXPECT_THROW(rice_params_from_moments(1.0, 100.0), std::invalid_argument);
  EXPECT_THROW(ValleyDistribution::from_moments(50.0, 30.0), std::invalid_argument);
}

TEST(Rice, PdfIntegratesToOne) {
  double sum = 0.0;
  const double h = 0.01;
  for (double x = h / 2; x < 600.0; x += h) sum += rice_pdf(x, 200.0, 30.0) * h;
  EXPECT_NEAR(sum, 1.0, 1e-8);
}

TEST(Shuttle, DephasingExamples) {
  ShuttleParams sp;
  CoherenceParams c;
  EXPECT_EQ(shuttle_dephasing_prob(0.0, 1e-3, sp, c), 0.0);
  EXPECT_NEAR(adiabatic_dephasing_prob(10000.0, sp, c), 2e-5, 1e-20);
  const double p_bar = 1e-4, len = 35000.0;
  const double p_v = 1.0 - std::pow(1.0 - p_bar, len / sp.dot_size_nm);
  const double p_ad = 2.0 * 1000.0 * len / std::pow(10.0 * 1e5, 2);
  EXPECT_NEAR(shuttle_dephasing_prob(len, p_bar, sp, c), 1.0 - (1.0 - p_v) * (1.0 - p_ad), 1e-13);
}

TEST(Shuttle, RelaxationExamples) {
  ShuttleParams sp;
  CoherenceParams c;
  EXPECT_EQ(shuttle_relaxation_prob(0.0, sp, c), 0.0);
  EXPECT_NEAR(shuttle_relaxation_prob(10000.0, sp, c), 1.01e-4, 1e-18);
  EXPECT_NEAR(shuttle_relaxation_prob(20000.0, sp, c), 2.0 * shuttle_relaxation_prob(10000.0, sp, c),
              1e-18);
}

TEST(Shuttle, ChannelComposesDephasingAndRelaxation) {
  ShuttleParams sp;
  CoherenceParams c;
  const ValleyDistribution d = ValleyDistribution::from_moments(100.0, 20.0);
  const KrausChannel ch = shuttle_channel(20000.0, sp, d, c);
  EXPECT_LT(completeness_error(ch.operators()), 1e-10);
  const double pd = shuttle_dephasing_prob(20000.0, d, sp, c);
  const double pr = shuttle_relaxation_prob(20000.0, sp, c);
  const KrausChannel want = phase_damping_channel(pd).then(amplitude_damping_channel(pr));
  EXPECT_LT((ch.superoperator() - want.superoperator()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spam, Examples) {
  SpamParams ideal{1.0, 0.0, 5000.0};
  const SpamModel m0 = spam_channels(ideal);
  EXPECT_EQ(m0.confusion, 0.0);
  EXPECT_TRUE(is_identity(m0.init_error));
  const SpamModel m = spam_channels(SpamParams{});
  EXPECT_NEAR(m.confusion, 1.0 - 0.999 * (1.0 - 1e-5), 1e-16);
  EXPECT_NEAR(m.confusion, 1.01e-3, 1e-7);
}

TEST(Spam, RepeatedReadoutAgreementMatchesConfusion) {
  const double c = spam_channels(SpamParams{}).confusion;
  std::mt19937_64 rng(29);
  std::bernoulli_distribution flip(c);
  const int shots = 1000000;
  int agree = 0;
  for (int i = 0; i < shots; ++i) agree += flip(rng) == flip(rng);
  const double want = (1 - c) * (1 - c) + c * c;
  const double se = std::sqrt(want * (1 - want) / shots);
  EXPECT_LT(std::abs(agree / double(shots) - want), 3 * se);
}

TEST(Params, Validation) {
  CoherenceParams c;
  c.t2_ns = 3e9;  // above 2 T1
  EXPECT_THROW(c.validate(), std::invalid_argument);
  ShuttleParams sp;
  sp.velocity_m_s = 0.0;
  EXPECT_THROW(sp.validate(), std::invalid_argument);
  GateErrorParams g;
  g.p_d = 2.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  EXPECT_THROW(dephasing_law_from_name("cubic"), std::invalid_argument);
}

}  // namespace
}  // namespace pqsim
