#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "otoc/gate.hpp"

namespace otoc {

enum class Parity { plus, minus };

inline constexpr std::size_t kDefaultFoldedBudget = std::size_t(1) << 20;

// Orthonormal crossing-state basis vector |n,k_bar> in the n-leg folded space
// (dimension q^{4n}, leg 1 slowest). |n,0_bar> = |n,0>; for k >= 1
// |n,k_bar> = (q|n,k> - |n,k-1>)/sqrt(q^2-1), where |n,k> carries bare
// circles on legs 1..k and bare squares on legs k+1..n, normalized by q^{-n}.
Vector mcs_basis_vector(int n, int k, int q,
                        std::size_t max_dim = kDefaultFoldedBudget);

// (n+1) x (n+1) projection of the column transfer matrix onto the crossing
// basis. Upper triangular with unit (0,0) entry, diagonal 1-z1 below, and
// constant superdiagonals:
//   (0|T|k) = sqrt(q^2-1) z_k / q^{k-1},
//   (l|T|k) = (q^2 z_{k-l} - z_{k-l+1}) / q^{k-l}   for k > l >= 1.
// z entries past the supplied vector are treated as zero.
struct McsTransferMatrix {
  int n = 0;
  int q = 0;
  std::vector<double> z;
  Eigen::MatrixXd m;
};
McsTransferMatrix projected_transfer(const std::vector<double>& z, int n,
                                     int q);

// Number of eigenvalues within tol of target (Schur-based; the matrix is
// non-normal, so degenerate eigenvalues scatter under naive refinement).
int eigenvalue_multiplicity(const Eigen::MatrixXd& m, double target,
                            double tol = 1e-8);

// Light-cone channel M+ acting on one-site operators,
//   M+(sigma) = (1/q) tr_1[ U (sigma (x) 1) U^dag ],
// and the norms M_j(sigma) = tr[(M+^j sigma)^dag (M+^j sigma)]/q, j = 0..n.
Matrix lightcone_channel(const Gate& g, const Matrix& sigma);
std::vector<double> lightcone_norms(const Gate& g, const Matrix& sigma, int n);

// Boundary vectors in the crossing basis. The left and plus-right vectors are
// universal; the minus-right vector needs the gate through the light-cone
// channel of sigma_beta and is absent when no gate is supplied.
struct McsBoundary {
  Eigen::VectorXd left;
  Eigen::VectorXd right_plus;
  std::optional<Eigen::VectorXd> right_minus;
};
McsBoundary boundaries(int n, int q, const Matrix& sigma_alpha,
                       const Matrix& sigma_beta);
McsBoundary boundaries(int n, int q, const Matrix& sigma_alpha,
                       const Matrix& sigma_beta, const Gate& g);

// C+(n,m) = (L| T^m |R+);  C-(n,m) = (L| T^{m-1} |R-). Iterated mat-vec,
// never forming T^m. m >= 1.
double otoc_mcs(const McsTransferMatrix& t, const McsBoundary& b, int m,
                Parity parity);

}  // namespace otoc
