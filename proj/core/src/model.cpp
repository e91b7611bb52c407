#include "tlsfluc/model.hpp"

#include <cmath>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"

namespace tlsfluc {

void ResonatorParams::validate() const {
  if (!(loaded_q > 0.0)) throw ValidationError("resonator: loaded_q must be > 0");
  if (!(coupling_q_mag > 0.0)) throw ValidationError("resonator: coupling_q_mag must be > 0");
  if (!(f_r_hz > 0.0)) throw ValidationError("resonator: f_r must be > 0");
  internal_q(loaded_q, coupling_q_mag, phi_rad);  // throws if non-physical
}

void TLSModel::validate() const {
  if (!(f_delta0 > 0.0)) throw ValidationError("tls: f_delta0 must be > 0");
  if (!(n_c > 0.0)) throw ValidationError("tls: n_c must be > 0");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("tls: beta must be in (0, 1]");
  if (!(q_pi > 0.0)) throw ValidationError("tls: q_pi must be > 0");
}

void Environment::validate() const {
  if (!(temperature_k >= 0.0)) throw ValidationError("environment: temperature must be >= 0");
  if (!(mean_photons >= 0.0)) throw ValidationError("environment: mean_photons must be >= 0");
}

std::complex<double> eval_s21(double f_hz, const ResonatorParams& p) {
  const std::complex<double> i(0.0, 1.0);
  const double x = f_hz / p.f_r_hz - 1.0;
  const std::complex<double> resonance =
      (p.loaded_q / p.coupling_q_mag) * std::exp(i * p.phi_rad) /
      (1.0 + 2.0 * i * p.loaded_q * x);
  return p.amplitude_a * std::exp(-i * (2.0 * k_pi * f_hz * p.delay_tau_s)) *
         (1.0 - resonance);
}

double internal_q(double loaded_q, double coupling_q_mag, double phi_rad) {
  if (!(loaded_q > 0.0) || !(coupling_q_mag > 0.0)) {
    throw ValidationError("internal_q: quality factors must be > 0");
  }
  const double inv = 1.0 / loaded_q - std::cos(phi_rad) / coupling_q_mag;
  if (!(inv > 0.0)) {
    throw NonPhysicalError("internal_q: 1/Q - cos(phi)/|Qc| is not positive");
  }
  return 1.0 / inv;
}

double loaded_q_from_internal(double internal_q, double coupling_q_mag, double phi_rad) {
  if (!(internal_q > 0.0) || !(coupling_q_mag > 0.0)) {
    throw ValidationError("loaded_q_from_internal: quality factors must be > 0");
  }
  const double inv = 1.0 / internal_q + std::cos(phi_rad) / coupling_q_mag;
  if (!(inv > 0.0)) {
    throw NonPhysicalError("loaded_q_from_internal: implied 1/Q is not positive");
  }
  return 1.0 / inv;
}

double tls_inverse_q(const TLSModel& m, const Environment& env) {
  // T = 0 is the continuous limit tanh -> 1.
  double thermal = 1.0;
  if (env.temperature_k > 0.0) {
    thermal = std::tanh(k_hbar * env.omega_r / (2.0 * k_boltzmann * env.temperature_k));
  }
  const double saturation = std::pow(1.0 + env.mean_photons / m.n_c, m.beta);
  return m.f_delta0 * thermal / saturation + 1.0 / m.q_pi;
}

double photon_number(double power_dbm_at_source, double total_attenuation_db,
                     const ResonatorParams& p) {
  if (!(total_attenuation_db >= 0.0)) {
    throw ValidationError("photon_number: attenuation must be >= 0");
  }
  const double p_in_w =
      std::pow(10.0, (power_dbm_at_source - total_attenuation_db - 30.0) / 10.0);
  const double omega = 2.0 * k_pi * p.f_r_hz;
  return 2.0 * p.loaded_q * p.loaded_q * p_in_w /
         (k_hbar * omega * omega * p.coupling_q_mag);
}

double decay_rate(double f_r_hz, double q_i) {
  if (!(f_r_hz > 0.0) || !(q_i > 0.0)) {
    throw ValidationError("decay_rate: f_r and q_i must be > 0");
  }
  return 2.0 * k_pi * f_r_hz / q_i;
}

}  // namespace tlsfluc
