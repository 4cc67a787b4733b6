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

#ifndef PQSIM_NOISE_H_
#define PQSIM_NOISE_H_

#include <map>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "pqsim/core.h"

namespace pqsim {

// Internal units: energies in ueV, lengths in nm, times in ns. A velocity in
// m/s is numerically equal to nm/ns.
inline constexpr double kHbarUeVNs = 0.6582119569;

// Raised when an adaptive quadrature or root find fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GateErrorParams {
  double p_d = 1e-3;    // 1q depolarizing
  double p_phi = 1e-3;  // CP phase flip, per qubit
  double p_b = 1e-6;    // CP bit flip, per qubit
  void validate() const;
};

enum class DephasingLaw { kLinear, kGaussian };
std::string dephasing_law_name(DephasingLaw law);
DephasingLaw dephasing_law_from_name(const std::string& name);

// How a dephasing probability p becomes a channel for idling and shuttling.
// phase_flip: {sqrt(1-p) I, sqrt(p) Z}. phase_damping: the damping form with
// lambda = p, coherences scale by sqrt(1 - p).
enum class DephasingForm { kPhaseFlip, kPhaseDamping };
std::string dephasing_form_name(DephasingForm form);
DephasingForm dephasing_form_from_name(const std::string& name);

struct CoherenceParams {
  double t1_ns = 1e9;
  double t2_ns = 1e5;
  DephasingLaw law = DephasingLaw::kLinear;
  DephasingForm form = DephasingForm::kPhaseDamping;
  void validate() const;
};

struct ValleyDistribution {
  double mean_ev = 100.0;  // ueV
  double std_ev = 20.0;    // ueV
  double rice_nu = 0.0;
  double rice_s = 0.0;

  static ValleyDistribution from_moments(double mean_ev, double std_ev);
};

struct ShuttleParams {
  double dot_size_nm = 20.0;
  double noise_corr_length_nm = 1000.0;
  double velocity_m_s = 10.0;
  double flip_prob_per_10um = 1e-4;
  void validate() const;
};

struct SpamParams {
  double f_m = 0.999;
  double charge_error = 1e-5;
  double t_r_ns = 5000.0;
  void validate() const;
};

// Clamps to [0, 1]; values above 1 are reported once per `what` on stderr.
double clamp_probability(double p, const char* what);

KrausChannel depolarizing_channel(double p);
KrausChannel dephasing_channel(double p);
KrausChannel bit_flip_channel(double p);
KrausChannel phase_damping_channel(double lambda);
// Dephasing channel in the form selected by `c`.
KrausChannel coherence_dephasing_channel(double p, const CoherenceParams& c);
KrausChannel amplitude_damping_channel(double p);

double idle_dephasing_prob(double t_ns, const CoherenceParams& c);
double idle_relaxation_prob(double t_ns, const CoherenceParams& c);
KrausChannel idle_channel(double t_ns, const CoherenceParams& c);

// Rice distribution helpers. Moments are (mean, standard deviation).
double rice_pdf(double x, double nu, double s);
std::pair<double, double> rice_moments(double nu, double s);
std::pair<double, double> rice_params_from_moments(double mean, double std);

double valley_excitation_prob(double e_v, double delta_phi, double v_m_s,
                              double dx_nm);
// Average of valley_excitation_prob over Rice(E_v) x uniform(delta_phi).
double mean_valley_excitation(const ValleyDistribution& dist, double v_m_s,
                              double dx_nm);

// Memo for mean_valley_excitation keyed on (mean, std, v, dx). Concurrent
// readers, exclusive writers.
class ValleyCache {
 public:
  double get(const ValleyDistribution& dist, double v_m_s, double dx_nm);
  std::size_t size() const;
  void clear();

 private:
  using Key = std::tuple<double, double, double, double>;
  mutable std::shared_mutex mu_;
  std::map<Key, double> values_;
};
ValleyCache& default_valley_cache();

double valley_dephasing_prob(double length_nm, double p_bar, double dx_nm);
double adiabatic_dephasing_prob(double length_nm, const ShuttleParams& sp,
                                const CoherenceParams& c);
double shuttle_dephasing_prob(double length_nm, double p_bar,
                              const ShuttleParams& sp,
                              const CoherenceParams& c);
double shuttle_dephasing_prob(double length_nm, const ValleyDistribution& dist,
                              const ShuttleParams& sp,
                              const CoherenceParams& c);
double shuttle_relaxation_prob(double length_nm, const ShuttleParams& sp,
                               const CoherenceParams& c);
KrausChannel shuttle_channel(double length_nm, const ShuttleParams& sp,
                             const ValleyDistribution& dist,
                             const CoherenceParams& c,
                             ValleyCache& cache = default_valley_cache());

struct SpamModel {
  KrausChannel init_error;   // bit flip after preparing the target state
  double confusion = 0.0;    // classical readout flip probability
};
SpamModel spam_channels(const SpamParams& sp);

}  // namespace pqsim

#endif  // PQSIM_NOISE_H_
