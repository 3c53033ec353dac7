#pragma once

#include <vector>

#include "otoc/gate.hpp"

namespace otoc {

// Scattering data of a (perturbed dual-unitary) gate. B[k-1] holds B_k and
// z[k-1] holds z_k for k = 1..k_max, with
//   z_1 = (B_1 - 1)/(q^2 - 1),   z_k = (B_k - B_{k-1})/(q^2 - 1).
struct ScatteringAmplitudes {
  int q = 0;
  std::vector<double> B;
  std::vector<double> z;
};

// One application of the CPTP transfer channel T on a q^2 x q^2 operator.
// Kraus operators E_{kk'}[(a,a'),(b,b')] = q^{-1/2} sum_f U_{ka,bf} U*_{k'a',b'f}.
Matrix bk_channel_apply(const Gate& g, const Matrix& rho);

// Max-entry norm of sum E^dag E - 1 (trace-preservation defect).
double bk_channel_tp_defect(const Gate& g);

// B_k = <phi| T^k[1] |phi> with the two-site Bell state phi; z per definition.
// Bounds 1 <= B_k <= q^2 and monotonicity are re-asserted (tolerance 1e-9).
ScatteringAmplitudes compute_amplitudes(const Gate& g, int k_max = 12);

// z1 = 1 - q^2 E_lin / (q^2 - 1) from the linear operator entanglement.
double z1_from_entanglement(double e_lin, int q);

// Lower bound B_k >= q^2 - (q^2 - 1)(1 - z1)^k with z1 = (B1-1)/(q^2-1).
double bk_lower_bound(double b1, int q, int k);

// Haar-averaged amplitude z_k = z1 (1 - z1)^{k-1}.
double haar_averaged_zk(double z1, int k);

// Relaxation timescale tau = -1/log(1 - z1) of the light-cone OTOC.
double relaxation_timescale(double z1);

// JSON round trip, schema { "q": int, "B": [..], "z": [..] }.
std::string amplitudes_to_json(const ScatteringAmplitudes& a);
ScatteringAmplitudes amplitudes_from_json(const std::string& text);

}  // namespace otoc
