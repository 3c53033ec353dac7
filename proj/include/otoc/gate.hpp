#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "otoc/errors.hpp"

namespace otoc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kUnitaryTol = 1e-10;  // default max-entry tolerance

// Two-site gate on C^q (x) C^q. Row/column composites are (a*q + b) with the
// first factor on the left site, i.e. elements U_{ab,cd}; rows are outputs.
struct Gate {
  int q = 0;
  Matrix u;  // q^2 x q^2, unitary within tolerance
};

// Validates shape and unitarity (max-entry norm of U^dag U - 1 <= tol).
Gate make_gate(const Matrix& u, int q, double tol = kUnitaryTol);

// Space-time reshuffle Ut_{ab,cd} = U_{db,ca}. Not unitary in general; its
// unitarity defines dual-unitarity. Applying the reshuffle twice returns the
// original matrix.
Matrix dual_gate(const Gate& g);

bool is_dual_unitary(const Gate& g, double tol = 1e-8);

// Operator-Schmidt data: sigma are the squared singular values of the
// reshuffle R_{(a,c),(b,d)} = U_{ab,cd}, sorted non-increasing, normalized so
// sum sigma_j = q^2. e_lin = 1 - sum sigma_j^2 / q^4.
struct SchmidtSpectrum {
  std::vector<double> sigma;
  double e_lin = 0.0;
};
SchmidtSpectrum schmidt_spectrum(const Gate& g);

// Haar-distributed unitary (QR of a complex Ginibre matrix, R-diagonal phases
// divided out). Deterministic in seed.
Matrix haar_unitary(int dim, std::uint64_t seed);

// GUE-distributed Hermitian matrix rescaled to spectral norm 1.
Matrix gue_hermitian(int dim, std::uint64_t seed);

// exp(i * scale * H) for Hermitian H, via eigendecomposition.
Matrix hermitian_phase_exp(const Matrix& h, double scale);

// Dual-unitary family at q = 2:
//   (u1 (x) u2) exp[-i(pi/4 XX + pi/4 YY + J ZZ)] (v1 (x) v2).
Gate du_gate_q2(double J, const Matrix& u1, const Matrix& u2, const Matrix& v1,
                const Matrix& v2);

// Same family with Haar one-site dressings drawn from the seed.
Gate du_gate_q2_random(double J, std::uint64_t seed);

// V exp(i * eps * W) for Hermitian W. Breaks dual-unitarity at order eps^2.
Gate perturb(const Gate& v, const Matrix& w, double eps,
             double herm_tol = 1e-12);

// Pauli matrix; axis 1 = X, 2 = Y, 3 = Z. Traceless, tr sigma^2 = 2.
Eigen::Matrix2cd pauli(int axis);

// Kronecker product, row-major composite (i_a * cols_b + i_b) convention.
Matrix kron(const Matrix& a, const Matrix& b);

// JSON round trip, schema { "q": int, "re": [[..]], "im": [[..]] } with
// row-major q^2 x q^2 matrices. Serialization preserves doubles exactly.
std::string gate_to_json(const Gate& g);
Gate gate_from_json(const std::string& text, double tol = kUnitaryTol);

}  // namespace otoc
