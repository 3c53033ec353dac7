#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "otoc/folded.hpp"
#include "otoc/mcs.hpp"

namespace otoc {

// Light-cone coordinates. n counts rows across the light cone, m along it;
// parity + iff (t - x) is even:
//   +: n = (t-x+2)/2, m = (t+x)/2     -: n = (t-x+1)/2, m = (t+x+1)/2.
struct LightconeCoords {
  int n = 0;
  int m = 0;
  Parity parity = Parity::plus;
};
LightconeCoords to_lightcone(int x, int t);          // requires 0 <= x <= t
std::pair<int, int> to_spacetime(const LightconeCoords& c);  // returns (x, t)

// Matrix-free applier of the n-leg column transfer matrix T_n: a staircase of
// n copies of one folded gate, capped with a bare square below leg n and a
// bare circle above leg 1, prefactor 1/q. Acts on vectors of dimension q^{4n}
// (leg 1 slowest); intermediates are one folded leg larger.
class FoldedColumnOperator {
 public:
  FoldedColumnOperator(const FoldedGate& g, int n,
                       std::size_t max_dim = kDefaultFoldedBudget);

  Vector apply(const Vector& v) const;
  Matrix dense() const;  // column-by-column; small n only

  int n() const { return n_; }
  int q() const { return q_; }
  std::size_t dim() const { return dim_; }

 private:
  int n_, q_;
  std::size_t p_;    // q^4, one folded leg
  std::size_t dim_;  // p_^n
  Matrix g_;         // staircase layout, see FoldedGate::pair_swapped
};

// Column sequence of a circuit: either one gate everywhere (Floquet) or
// dual-unitary patches of width w interleaved with single perturbed columns.
// Column j (1-based, counted from the initial-time boundary inward) uses
// gates[pattern[(j-1) % pattern.size()]].
struct CircuitColumnSpec {
  std::vector<Gate> gates;
  std::vector<int> pattern;

  static CircuitColumnSpec homogeneous(Gate g);
  static CircuitColumnSpec dilute_defect(Gate du, Gate pert, int w);
  const Gate& column_gate(int j) const;
};

// Full folded boundary vectors (products of pairing states over n legs).
Vector left_vector(int n, const Matrix& sigma_alpha, int q);
Vector right_plus_vector(int n, const Matrix& sigma_beta, int q);
// Minus-parity right boundary: a partial column dressed with sigma_beta,
// contracted into a single n-leg vector.
Vector right_minus_vector(int n, const Matrix& sigma_beta, const FoldedGate& g,
                          std::size_t max_dim = kDefaultFoldedBudget);

// Exact contraction C(n,m) for the given column sequence. The imaginary part
// is asserted below 1e-10 and dropped.
double otoc_exact(const CircuitColumnSpec& spec, const Matrix& sigma_alpha,
                  const Matrix& sigma_beta, int n, int m, Parity parity,
                  std::size_t max_dim = kDefaultFoldedBudget);

// Exact Floquet OTOC on the light cone: C+(1,m) for m = 1..m_max via the full
// q^4-dimensional single-leg column operator (no basis truncation).
std::vector<double> lightcone_floquet(const Gate& g, const Matrix& sigma_alpha,
                                      const Matrix& sigma_beta, int m_max);

}  // namespace otoc
