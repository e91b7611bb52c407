#pragma once

#include <complex>

namespace tlsfluc {

// Hanger-mode resonance:
//   S21(f) = A e^{-i 2 pi f tau} (1 - (Q/|Qc|) e^{i phi} / (1 + 2 i Q (f/f_r - 1)))
// with the internal quality factor defined by 1/Q_i = 1/Q - cos(phi)/|Qc|.
struct ResonatorParams {
  std::complex<double> amplitude_a{1.0, 0.0};  // complex line attenuation
  double delay_tau_s = 0.0;                    // cable delay
  double f_r_hz = 0.0;                         // resonance frequency
  double loaded_q = 0.0;
  double coupling_q_mag = 0.0;                 // |Qc|
  double phi_rad = 0.0;                        // impedance-mismatch angle

  // Throws ValidationError on nonpositive Q, |Qc| or f_r; NonPhysicalError
  // when the implied 1/Q_i is not positive.
  void validate() const;
};

// Saturable TLS loss with a power-independent floor:
//   1/Q_i = f_delta0 * tanh(hbar w_r / 2 kB T) / (1 + <n>/n_c)^beta + 1/q_pi
struct TLSModel {
  double f_delta0 = 0.0;  // effective TLS loss tangent
  double n_c = 0.0;       // critical photon number
  double beta = 0.0;      // saturation exponent, in (0, 1]
  double q_pi = 0.0;      // power-independent quality factor

  void validate() const;
};

struct Environment {
  double omega_r = 0.0;        // rad/s
  double temperature_k = 0.0;  // >= 0; T = 0 means the tanh factor is 1
  double mean_photons = 0.0;   // >= 0

  void validate() const;
};

std::complex<double> eval_s21(double f_hz, const ResonatorParams& p);

// 1/Q_i = 1/Q - cos(phi)/|Qc|; throws NonPhysicalError when that is <= 0.
double internal_q(double loaded_q, double coupling_q_mag, double phi_rad);

// Loaded Q from a given internal Q (inverse of the identity above).
double loaded_q_from_internal(double internal_q, double coupling_q_mag, double phi_rad);

double tls_inverse_q(const TLSModel& m, const Environment& env);

// <n> = 2 Q^2 P_in / (hbar w_r^2 |Qc|), P_in = 10^{(dBm - attenuation - 30)/10} W.
double photon_number(double power_dbm_at_source, double total_attenuation_db,
                     const ResonatorParams& p);

// Internal decay rate 2 pi f_r / Q_i in rad/s.
double decay_rate(double f_r_hz, double q_i);

}  // namespace tlsfluc
