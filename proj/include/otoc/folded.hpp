#pragma once

#include <cstddef>

#include "otoc/gate.hpp"

namespace otoc {

// Folded picture: four circuit copies (fwd, conj, fwd, conj) ride on every
// physical leg, so a folded leg has dimension q^4 with the composite index
// s = ((s1*q + s2)*q + s3)*q + s4.
//
// The two pairing states on one folded leg (bare, un-normalized):
//   square(s) = delta(s1,s2) delta(s3,s4)   pairs copies (1,2) and (3,4)
//   circle(s) = delta(s4,s1) delta(s2,s3)   pairs copies (4,1) and (2,3)
// Their dressed variants weave a one-site operator into the pairing. Squares
// terminate legs on the initial-time side, circles on the final-time side.
Eigen::VectorXd folded_square(int q);
Eigen::VectorXd folded_circle(int q);
Vector dressed_square(const Matrix& sigma);  // sigma(s1,s2) sigma(s3,s4)
Vector dressed_circle(const Matrix& sigma);  // sigma(s4,s1) sigma(s2,s3)

// Folded two-site gate (U (x) U^*)^(x2) with both site legs kept composite:
// row (a*q^4 + b) = (out-left, out-right), column (c*q^4 + d) = (in-left,
// in-right).
struct FoldedGate {
  int q = 0;
  Matrix w;  // q^8 x q^8

  // Same tensor with the column composite swapped to (d*q^4 + c); this is the
  // layout the staircase contraction consumes.
  Matrix pair_swapped() const;
};

FoldedGate fold(const Gate& g, std::size_t max_entries = std::size_t(1) << 24);

// Checks that sigma is q x q, Hermitian, traceless and normalized to
// tr[sigma^2] = q; throws otherwise. The traceless check can be waived,
// which admits the identity operator (its OTOC is trivially 1).
void validate_sigma(const Matrix& sigma, int q, double tol = 1e-9,
                    bool require_traceless = true);

}  // namespace otoc
