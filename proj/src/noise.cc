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

#include "pqsim/noise.h"

#include <cmath>
#include <iostream>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_roots.h>
#include <gsl/gsl_sf_bessel.h>

namespace pqsim {
namespace {

constexpr double kPi = std::numbers::pi;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " probability " << p << " outside [0, 1]";
    throw std::invalid_argument(os.str());
  }
}

void warn_once(const std::string& key, const std::string& message) {
  static std::mutex mu;
  static std::set<std::string> seen;
  std::lock_guard<std::mutex> lock(mu);
  if (seen.insert(key).second) std::cerr << "warning: " << message << "\n";
}

void gsl_quiet() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

// Lets a capturing lambda act as a gsl_function.
template <typename F>
double trampoline(double x, void* params) {
  return (*static_cast<F*>(params))(x);
}

template <typename F>
gsl_function make_gsl_function(F& f) {
  gsl_function g;
  g.function = &trampoline<F>;
  g.params = &f;
  return g;
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const {
    gsl_integration_workspace_free(w);
  }
};
struct QawoTableDeleter {
  void operator()(gsl_integration_qawo_table* t) const {
    gsl_integration_qawo_table_free(t);
  }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;
using QawoTable = std::unique_ptr<gsl_integration_qawo_table, QawoTableDeleter>;

constexpr std::size_t kQuadLimit = 2000;
constexpr double kOuterAbsTol = 1e-12;
constexpr double kOuterRelTol = 1e-8;
constexpr double kInnerAbsTol = 1e-14;
constexpr double kInnerRelTol = 1e-10;

// Laguerre L_{1/2}(-r^2/2) written with exponentially scaled Bessel functions.
double laguerre_half(double r) {
  const double y = r * r / 4.0;
  return (1.0 + 2.0 * y) * gsl_sf_bessel_I0_scaled(y) +
         2.0 * y * gsl_sf_bessel_I1_scaled(y);
}

// mean / s and variance / s^2 as functions of r = nu / s.
std::pair<double, double> rice_unit_moments(double r) {
  const double m = std::sqrt(kPi / 2.0) * laguerre_half(r);
  return {m, 2.0 + r * r - m * m};
}

// P(E)/E for the Rice density; finite at E = 0.
double rice_pdf_over_x(double x, double nu, double s) {
  const double s2 = s * s;
  const double z = x * nu / s2;
  const double d = x - nu;
  return std::exp(-d * d / (2.0 * s2)) * gsl_sf_bessel_I0_scaled(z) / s2;
}

}  // namespace

void GateErrorParams::validate() const {
  require_probability(p_d, "p_d");
  require_probability(p_phi, "p_phi");
  require_probability(p_b, "p_b");
}

std::string dephasing_law_name(DephasingLaw law) {
  return law == DephasingLaw::kLinear ? "linear" : "gaussian";
}

DephasingLaw dephasing_law_from_name(const std::string& name) {
  if (name == "linear") return DephasingLaw::kLinear;
  if (name == "gaussian") return DephasingLaw::kGaussian;
  throw std::invalid_argument("unknown dephasing law '" + name + "'");
}

std::string dephasing_form_name(DephasingForm form) {
  return form == DephasingForm::kPhaseFlip ? "phase_flip" : "phase_damping";
}

DephasingForm dephasing_form_from_name(const std::string& name) {
  if (name == "phase_flip") return DephasingForm::kPhaseFlip;
  if (name == "phase_damping") return DephasingForm::kPhaseDamping;
  throw std::invalid_argument("unknown dephasing form '" + name + "'");
}

void CoherenceParams::validate() const {
  if (!(t1_ns > 0.0) || !(t2_ns > 0.0)) {
    throw std::invalid_argument("T1 and T2 must be positive");
  }
  if (t2_ns > 2.0 * t1_ns) {
    throw std::invalid_argument("T2 must not exceed 2 T1");
  }
}

ValleyDistribution ValleyDistribution::from_moments(double mean_ev,
                                                    double std_ev) {
  ValleyDistribution d;
  d.mean_ev = mean_ev;
  d.std_ev = std_ev;
  std::tie(d.rice_nu, d.rice_s) = rice_params_from_moments(mean_ev, std_ev);
  return d;
}

void ShuttleParams::validate() const {
  if (!(dot_size_nm > 0.0) || !(noise_corr_length_nm > 0.0) ||
      !(velocity_m_s > 0.0) || !(flip_prob_per_10um > 0.0)) {
    throw std::invalid_argument("shuttle parameters must be positive");
  }
}

void SpamParams::validate() const {
  require_probability(f_m, "F_m");
  require_probability(charge_error, "charge detection error");
  if (!(t_r_ns > 0.0)) throw std::invalid_argument("T_r must be positive");
}

double clamp_probability(double p, const char* what) {
  if (std::isnan(p)) throw NumericalError(std::string(what) + " is NaN");
  if (p > 1.0) {
    warn_once(what, std::string(what) + " exceeded 1 and was clamped");
    return 1.0;
  }
  return p < 0.0 ? 0.0 : p;
}

KrausChannel depolarizing_channel(double p) {
  require_probability(p, "depolarizing");
  const UnitaryGate x = build_gate(GateKind::kX);
  Matrix y(2, 2);
  y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  const double a = std::sqrt(p / 3.0);
  return KrausChannel({std::sqrt(1.0 - p) * Matrix::Identity(2, 2),
                       a * x.matrix, a * y, a * z},
                      "depolarizing");
}

KrausChannel dephasing_channel(double p) {
  require_probability(p, "dephasing");
  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  return KrausChannel(
      {std::sqrt(1.0 - p) * Matrix::Identity(2, 2), std::sqrt(p) * z},
      "dephasing");
}

KrausChannel phase_damping_channel(double lambda) {
  require_probability(lambda, "phase damping");
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - lambda);
  k1(1, 1) = std::sqrt(lambda);
  return KrausChannel({k0, k1}, "phase_damping");
}

KrausChannel coherence_dephasing_channel(double p, const CoherenceParams& c) {
  return c.form == DephasingForm::kPhaseFlip ? dephasing_channel(p)
                                             : phase_damping_channel(p);
}

KrausChannel bit_flip_channel(double p) {
  require_probability(p, "bit flip");
  return KrausChannel({std::sqrt(1.0 - p) * Matrix::Identity(2, 2),
                       std::sqrt(p) * build_gate(GateKind::kX).matrix},
                      "bit_flip");
}

KrausChannel amplitude_damping_channel(double p) {
  require_probability(p, "amplitude damping");
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - p);
  k1(0, 1) = std::sqrt(p);
  return KrausChannel({k0, k1}, "amplitude_damping");
}

double idle_dephasing_prob(double t_ns, const CoherenceParams& c) {
  if (t_ns < 0.0) throw std::invalid_argument("negative idle time");
  const double ratio = t_ns / c.t2_ns;
  if (ratio > 0.5) {
    warn_once("idle_t_over_t2", "idle time exceeds T2/2; linearised dephasing is unreliable");
  }
  const double p = c.law == DephasingLaw::kLinear ? ratio : ratio * ratio;
  return clamp_probability(p, "idle dephasing probability");
}

double idle_relaxation_prob(double t_ns, const CoherenceParams& c) {
  if (t_ns < 0.0) throw std::invalid_argument("negative idle time");
  return clamp_probability(t_ns / c.t1_ns, "idle relaxation probability");
}

KrausChannel idle_channel(double t_ns, const CoherenceParams& c) {
  return coherence_dephasing_channel(idle_dephasing_prob(t_ns, c), c)
      .then(amplitude_damping_channel(idle_relaxation_prob(t_ns, c)));
}

double rice_pdf(double x, double nu, double s) {
  if (x < 0.0) return 0.0;
  return x * rice_pdf_over_x(x, nu, s);
}

std::pair<double, double> rice_moments(double nu, double s) {
  if (!(s > 0.0) || nu < 0.0) {
    throw std::invalid_argument("Rice parameters need nu >= 0 and s > 0");
  }
  const auto [m, var] = rice_unit_moments(nu / s);
  return {m * s, std::sqrt(std::max(var, 0.0)) * s};
}

std::pair<double, double> rice_params_from_moments(double mean, double std) {
  if (!(mean > 0.0) || !(std > 0.0)) {
    throw std::invalid_argument("Rice moments need mean > 0 and std > 0");
  }
  // mean/std is a function of r = nu/s alone, rising from the Rayleigh value
  // sqrt(pi/(4-pi)) at r = 0.
  auto ratio = [](double r) {
    const auto [m, var] = rice_unit_moments(r);
    return m / std::sqrt(var);
  };
  const double target = mean / std;
  const double floor = ratio(0.0);
  if (target < floor * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "no Rice distribution has mean/std = " << target
       << " (minimum is " << floor << ")";
    throw std::invalid_argument(os.str());
  }
  double r = 0.0;
  if (target > floor) {
    gsl_quiet();
    auto f = [&](double x) { return ratio(x) - target; };
    gsl_function gf = make_gsl_function(f);
    std::unique_ptr<gsl_root_fsolver, decltype(&gsl_root_fsolver_free)> solver(
        gsl_root_fsolver_alloc(gsl_root_fsolver_brent), &gsl_root_fsolver_free);
    double lo = 0.0, hi = 2.0 * target + 10.0;
    gsl_root_fsolver_set(solver.get(), &gf, lo, hi);
    int status = GSL_CONTINUE;
    for (int iter = 0; iter < 500 && status == GSL_CONTINUE; ++iter) {
      gsl_root_fsolver_iterate(solver.get());
      lo = gsl_root_fsolver_x_lower(solver.get());
      hi = gsl_root_fsolver_x_upper(solver.get());
      status = gsl_root_test_interval(lo, hi, 1e-300, 1e-15);
    }
    if (status != GSL_SUCCESS) {
      throw NumericalError("Rice moment inversion did not converge");
    }
    r = gsl_root_fsolver_root(solver.get());
  }
  const double s = mean / (std::sqrt(kPi / 2.0) * laguerre_half(r));
  const double nu = r * s;
  const auto [m_chk, s_chk] = rice_moments(nu, s);
  if (std::abs(m_chk - mean) > 1e-10 * mean ||
      std::abs(s_chk - std) > 1e-10 * std::max(std, 1e-3 * mean)) {
    throw NumericalError("Rice moment inversion residual above 1e-10");
  }
  return {nu, s};
}

double valley_excitation_prob(double e_v, double delta_phi, double v_m_s,
                              double dx_nm) {
  if (!(v_m_s > 0.0) || !(dx_nm > 0.0)) {
    throw std::invalid_argument("velocity and dot size must be positive");
  }
  if (e_v < 0.0) throw std::invalid_argument("negative valley splitting");
  if (std::abs(delta_phi) > kPi * (1.0 + 1e-12)) {
    throw std::invalid_argument("valley phase difference outside [-pi, pi]");
  }
  const double w = kHbarUeVNs * v_m_s * delta_phi / dx_nm;
  const double denom = e_v * e_v + w * w;
  if (denom == 0.0) return 0.0;
  const double theta = std::sqrt(denom) * dx_nm / (2.0 * kHbarUeVNs * v_m_s);
  const double s = std::sin(theta);
  return std::clamp(w * w / denom * s * s, 0.0, 1.0);
}

double mean_valley_excitation(const ValleyDistribution& dist, double v_m_s,
                              double dx_nm) {
  if (!(v_m_s > 0.0) || !(dx_nm > 0.0)) {
    throw std::invalid_argument("velocity and dot size must be positive");
  }
  if (!(dist.rice_s > 0.0)) {
    throw std::invalid_argument("valley distribution has no Rice parameters");
  }
  gsl_quiet();
  const double nu = dist.rice_nu, s = dist.rice_s;
  // The Rice tail beyond 12 std carries less than ~1e-30 of the mass and the
  // integrand is bounded by 1, so truncation is far below the tolerances.
  const double e_lo = std::max(0.0, dist.mean_ev - 12.0 * dist.std_ev);
  const double e_hi = dist.mean_ev + 12.0 * dist.std_ev;
  const double k = dx_nm / (kHbarUeVNs * v_m_s);

  Workspace outer_ws(gsl_integration_workspace_alloc(kQuadLimit));
  Workspace inner_ws(gsl_integration_workspace_alloc(kQuadLimit));
  Workspace cycle_ws(gsl_integration_workspace_alloc(kQuadLimit));
  QawoTable table(
      gsl_integration_qawo_table_alloc(k, 1.0, GSL_INTEG_COSINE, 30));
  int inner_status = GSL_SUCCESS;

  // For fixed phase difference, substitute u = sqrt(E^2 + w^2). Then
  // sin^2(theta) = (1 - cos(k u))/2 and the E-integral becomes
  // int g(u) (1 - cos(k u)) du with g smooth.
  auto inner = [&](double phi) -> double {
    const double w = kHbarUeVNs * v_m_s * phi / dx_nm;
    if (w == 0.0) return 0.0;
    const double u_lo = std::hypot(e_lo, w), u_hi = std::hypot(e_hi, w);
    auto g = [&](double u) {
      const double e = std::sqrt(std::max((u - w) * (u + w), 0.0));
      return rice_pdf_over_x(e, nu, s) * w * w / (2.0 * u);
    };
    gsl_function gf = make_gsl_function(g);
    double smooth = 0.0, smooth_err = 0.0, osc = 0.0, osc_err = 0.0;
    int st = gsl_integration_qag(&gf, u_lo, u_hi, kInnerAbsTol, kInnerRelTol,
                                 kQuadLimit, GSL_INTEG_GAUSS31, inner_ws.get(),
                                 &smooth, &smooth_err);
    if (st != GSL_SUCCESS) {
      inner_status = st;
      return std::nan("");
    }
    gsl_integration_qawo_table_set_length(table.get(), u_hi - u_lo);
    st = gsl_integration_qawo(&gf, u_lo, kInnerAbsTol, kInnerRelTol,
                              kQuadLimit, cycle_ws.get(), table.get(), &osc,
                              &osc_err);
    if (st != GSL_SUCCESS) {
      inner_status = st;
      return std::nan("");
    }
    return smooth - osc;
  };
  gsl_function outer_fn = make_gsl_function(inner);
  double result = 0.0, abserr = 0.0;
  const int st = gsl_integration_qag(&outer_fn, 0.0, kPi, kOuterAbsTol,
                                     kOuterRelTol, kQuadLimit,
                                     GSL_INTEG_GAUSS21, outer_ws.get(), &result,
                                     &abserr);
  if (inner_status != GSL_SUCCESS || st != GSL_SUCCESS || std::isnan(result)) {
    std::ostringstream os;
    os << "valley quadrature did not converge (mean " << dist.mean_ev
       << " ueV, std " << dist.std_ev << " ueV, v " << v_m_s << " m/s): "
       << gsl_strerror(inner_status != GSL_SUCCESS ? inner_status : st);
    throw NumericalError(os.str());
  }
  // Symmetric phase range [-pi, pi] with density 1/(2 pi): factor 2/(2 pi).
  return std::clamp(result / kPi, 0.0, 1.0);
}

double ValleyCache::get(const ValleyDistribution& dist, double v_m_s,
                        double dx_nm) {
  const Key key{dist.mean_ev, dist.std_ev, v_m_s, dx_nm};
  {
    std::shared_lock<std::shared_mutex> lock(mu_);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
  }
  const double value = mean_valley_excitation(dist, v_m_s, dx_nm);
  std::unique_lock<std::shared_mutex> lock(mu_);
  values_.emplace(key, value);
  return value;
}

std::size_t ValleyCache::size() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  return values_.size();
}

void ValleyCache::clear() {
  std::unique_lock<std::shared_mutex> lock(mu_);
  values_.clear();
}

ValleyCache& default_valley_cache() {
  static ValleyCache cache;
  return cache;
}

double valley_dephasing_prob(double length_nm, double p_bar, double dx_nm) {
  if (length_nm < 0.0) throw std::invalid_argument("negative shuttle length");
  const double n = length_nm / dx_nm;
  return clamp_probability(-std::expm1(n * std::log1p(-p_bar)),
                           "valley dephasing probability");
}

double adiabatic_dephasing_prob(double length_nm, const ShuttleParams& sp,
                                const CoherenceParams& c) {
  if (length_nm < 0.0) throw std::invalid_argument("negative shuttle length");
  const double vt2 = sp.velocity_m_s * c.t2_ns;
  return clamp_probability(2.0 * sp.noise_corr_length_nm * length_nm / (vt2 * vt2),
                           "adiabatic dephasing probability");
}

double shuttle_dephasing_prob(double length_nm, double p_bar,
                              const ShuttleParams& sp,
                              const CoherenceParams& c) {
  const double p_v = valley_dephasing_prob(length_nm, p_bar, sp.dot_size_nm);
  const double p_ad = adiabatic_dephasing_prob(length_nm, sp, c);
  return clamp_probability(1.0 - (1.0 - p_v) * (1.0 - p_ad),
                           "shuttle dephasing probability");
}

double shuttle_dephasing_prob(double length_nm, const ValleyDistribution& dist,
                              const ShuttleParams& sp,
                              const CoherenceParams& c) {
  if (length_nm == 0.0) return 0.0;
  return shuttle_dephasing_prob(
      length_nm,
      default_valley_cache().get(dist, sp.velocity_m_s, sp.dot_size_nm), sp, c);
}

double shuttle_relaxation_prob(double length_nm, const ShuttleParams& sp,
                               const CoherenceParams& c) {
  if (length_nm < 0.0) throw std::invalid_argument("negative shuttle length");
  if (!(sp.velocity_m_s > 0.0)) throw std::invalid_argument("velocity must be positive");
  const double p = length_nm / (sp.velocity_m_s * c.t1_ns) +
                   sp.flip_prob_per_10um * length_nm / 10000.0;
  return clamp_probability(p, "shuttle relaxation probability");
}

KrausChannel shuttle_channel(double length_nm, const ShuttleParams& sp,
                             const ValleyDistribution& dist,
                             const CoherenceParams& c, ValleyCache& cache) {
  const double p_bar =
      length_nm > 0.0 ? cache.get(dist, sp.velocity_m_s, sp.dot_size_nm) : 0.0;
  return coherence_dephasing_channel(shuttle_dephasing_prob(length_nm, p_bar, sp, c), c)
      .then(amplitude_damping_channel(shuttle_relaxation_prob(length_nm, sp, c)));
}

SpamModel spam_channels(const SpamParams& sp) {
  sp.validate();
  SpamModel m{bit_flip_channel(1.0 - sp.f_m),
              1.0 - sp.f_m * (1.0 - sp.charge_error)};
  return m;
}

}  // namespace pqsim
