// Exact staircase contraction: coordinate maps, calibration against dense
// Heisenberg evolution, transfer-matrix structure, and the chaotic plateau.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "otoc/amplitudes.hpp"
#include "otoc/brute_force.hpp"
#include "otoc/errors.hpp"
#include "otoc/folded.hpp"
#include "otoc/gate.hpp"
#include "otoc/mcs.hpp"

#include "oracles.hpp"

using namespace otoc;

namespace {

Matrix sigma_z() { return pauli(3); }
Matrix sigma_x() { return pauli(1); }

Gate generic_perturbed_gate() {
  return perturb(du_gate_q2_random(0.5, 3), gue_hermitian(4, 7), 0.35);
}

// Fast-mixing dressed dual-unitary gate: its single-leg column operator has
// subleading spectral radius ~0.73, so light-cone transients are dead well
// before m = 90.
Gate fast_du_gate() { return du_gate_q2_random(0.4 * (M_PI / 4.0), 77); }

}  // namespace

TEST_CASE("light-cone coordinates round-trip and hit the documented values") {
  // On the light cone x = t the point is one row deep, parity plus.
  for (int t : {1, 2, 5, 9}) {
    const LightconeCoords c = to_lightcone(t, t);
    CHECK(c.parity == Parity::plus);
    CHECK(c.n == 1);
    CHECK(c.m == t);
  }
  // One site inside the cone the parity flips and the row count stays 1.
  for (int t : {2, 3, 6}) {
    const LightconeCoords c = to_lightcone(t - 1, t);
    CHECK(c.parity == Parity::minus);
    CHECK(c.n == 1);
    CHECK(c.m == t);
  }
  // Spot checks two rows deep.
  {
    const LightconeCoords c = to_lightcone(1, 3);
    CHECK(c.parity == Parity::plus);
    CHECK(c.n == 2);
    CHECK(c.m == 2);
  }
  {
    const LightconeCoords c = to_lightcone(1, 4);
    CHECK(c.parity == Parity::minus);
    CHECK(c.n == 2);
    CHECK(c.m == 3);
  }

  for (int t = 1; t <= 12; ++t) {
    for (int x = 0; x <= t; ++x) {
      const auto [xr, tr] = to_spacetime(to_lightcone(x, t));
      CHECK(xr == x);
      CHECK(tr == t);
    }
  }

  CHECK_THROWS_AS(to_lightcone(-1, 3), DomainError);
  CHECK_THROWS_AS(to_lightcone(4, 3), DomainError);
  CHECK_THROWS_AS(to_lightcone(1, 0), DomainError);
  CHECK_THROWS_AS(to_spacetime(LightconeCoords{0, 3, Parity::plus}),
                  DomainError);
  CHECK_THROWS_AS(to_spacetime(LightconeCoords{3, 1, Parity::plus}),
                  DomainError);
}

TEST_CASE("dense Heisenberg evolution reproduces the staircase contraction") {
  // The two implementations share no code: the oracle evolves sigma_alpha in
  // the unfolded 2^L state space and traces against sigma_beta, while
  // otoc_exact sweeps folded column operators between boundary vectors.
  const Gate g = generic_perturbed_gate();
  const CircuitColumnSpec spec = CircuitColumnSpec::homogeneous(g);

  const std::vector<std::pair<Matrix, Matrix>> pairs = {
      {sigma_z(), sigma_z()}, {sigma_z(), sigma_x()}};

  std::vector<std::pair<int, int>> points;  // (x, t)
  for (int t = 1; t <= 3; ++t)
    for (int x = 1; x <= t; ++x) points.emplace_back(x, t);
  points.emplace_back(2, 4);  // parity plus, two rows deep
  points.emplace_back(3, 4);  // parity minus, two rows deep

  for (const auto& [sa, sb] : pairs) {
    for (const auto& [x, t] : points) {
      const LightconeCoords c = to_lightcone(x, t);
      const double exact = otoc_exact(spec, sa, sb, c.n, c.m, c.parity);
      const double dense = otoc_test::heisenberg_otoc(g, sa, sb, x, t,
                                                      /*row0_even=*/false);
      CAPTURE(x);
      CAPTURE(t);
      CHECK(std::abs(exact - dense) < 1e-12);
    }
  }
}

TEST_CASE("identity observables give a flat correlator") {
  const Gate g = generic_perturbed_gate();
  const CircuitColumnSpec spec = CircuitColumnSpec::homogeneous(g);
  const Matrix eye = Matrix::Identity(2, 2);
  for (const Parity parity : {Parity::plus, Parity::minus}) {
    CHECK(std::abs(otoc_exact(spec, eye, sigma_z(), 1, 3, parity) - 1.0) <
          1e-12);
    CHECK(std::abs(otoc_exact(spec, sigma_z(), eye, 2, 4, parity) - 1.0) <
          1e-12);
    CHECK(std::abs(otoc_exact(spec, eye, eye, 1, 2, parity) - 1.0) < 1e-12);
  }
}

TEST_CASE("the column operator is unital and a contraction") {
  const std::vector<Gate> gates = {make_gate(haar_unitary(4, 21), 2),
                                   generic_perturbed_gate()};
  for (const Gate& g : gates) {
    const FoldedGate f = fold(g);
    for (int n = 1; n <= 3; ++n) {
      const FoldedColumnOperator op(f, n);
      const Vector v0 = mcs_basis_vector(n, 0, 2);
      CHECK((op.apply(v0) - v0).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  // Sub-multiplicativity on random vectors (unitarity makes T_n a
  // contraction in the folded 2-norm).
  const FoldedColumnOperator op(fold(gates[0]), 2);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector v(op.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v[i] = std::complex<double>(normal(rng), normal(rng));
    CHECK(op.apply(v).norm() <= v.norm() + 1e-12);
  }
}

TEST_CASE("dual-unitary gates fix the whole crossing-state basis") {
  // For a dual-unitary gate every z_k vanishes; combined with the contraction
  // property this forces T_n |n,k_bar> = |n,k_bar> exactly.
  for (const auto& [J, seed] :
       std::vector<std::pair<double, std::uint64_t>>{{0.3, 4}, {0.9, 17}}) {
    const Gate g = du_gate_q2_random(J, seed);
    const FoldedGate f = fold(g);
    for (int n = 1; n <= 3; ++n) {
      const FoldedColumnOperator op(f, n);
      for (int k = 0; k <= n; ++k) {
        const Vector v = mcs_basis_vector(n, k, 2);
        CAPTURE(n);
        CAPTURE(k);
        CHECK((op.apply(v) - v).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("crossing-basis matrix elements match the amplitude formulas") {
  // <l_bar| T_n |k_bar> must coincide with the projected transfer matrix
  // built from the scattering amplitudes alone: upper triangular, unit (0,0)
  // entry, diagonal 1 - z1, first row sqrt(q^2-1) z_k / q^{k-1}, and constant
  // side diagonals (q^2 z_d - z_{d+1}) / q^d.
  const int n = 3;
  const std::vector<Gate> gates = {
      make_gate(haar_unitary(4, 5), 2), make_gate(haar_unitary(4, 11), 2),
      perturb(du_gate_q2_random(0.7, 9), gue_hermitian(4, 13), 0.4)};
  for (const Gate& g : gates) {
    const ScatteringAmplitudes amps = compute_amplitudes(g, n);
    const McsTransferMatrix proj = projected_transfer(amps.z, n, 2);

    const FoldedColumnOperator op(fold(g), n);
    std::vector<Vector> basis;
    for (int k = 0; k <= n; ++k) basis.push_back(mcs_basis_vector(n, k, 2));

    for (int k = 0; k <= n; ++k) {
      const Vector tk = op.apply(basis[std::size_t(k)]);
      for (int l = 0; l <= n; ++l) {
        const std::complex<double> el = basis[std::size_t(l)].dot(tk);
        CAPTURE(l);
        CAPTURE(k);
        CHECK(std::abs(el.imag()) < 1e-12);
        CHECK(std::abs(el.real() - proj.m(l, k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("deep inside the light cone the correlator reaches the plateau") {
  // Dressed dual-unitary gates relax to constant correlators: -1/(q^2-1) one
  // row deep, zero further inside (plus parity), and a value set by the
  // light-cone channel norms for minus parity.
  const Gate g = fast_du_gate();
  const CircuitColumnSpec spec = CircuitColumnSpec::homogeneous(g);
  const Matrix z = sigma_z();

  CHECK(std::abs(otoc_exact(spec, z, z, 1, 90, Parity::plus) + 1.0 / 3.0) <
        1e-10);
  CHECK(std::abs(otoc_exact(spec, z, z, 2, 90, Parity::plus)) < 1e-10);

  // Minus parity plateau: C-(n, m) -> (q^2 M_n - M_{n-1}) / (q^2 - 1) with
  // M_j the light-cone channel norms of sigma_beta.
  const std::vector<double> norms = lightcone_norms(g, z, 2);
  for (int n : {1, 2}) {
    const double pred =
        (4.0 * norms[std::size_t(n)] - norms[std::size_t(n - 1)]) / 3.0;
    CHECK(std::abs(otoc_exact(spec, z, z, n, 90, Parity::minus) - pred) <
          1e-10);
  }

  // The light-cone scan agrees with point evaluations and settles on the
  // plateau.
  const std::vector<double> cone = lightcone_floquet(g, z, z, 95);
  REQUIRE(cone.size() == 95);
  for (int m : {3, 17}) {
    CHECK(std::abs(cone[std::size_t(m - 1)] -
                   otoc_exact(spec, z, z, 1, m, Parity::plus)) < 1e-12);
  }
  for (int m = 90; m <= 95; ++m)
    CHECK(std::abs(cone[std::size_t(m - 1)] + 1.0 / 3.0) < 1e-10);
}

TEST_CASE("dilute defect columns share the plumbing of homogeneous circuits") {
  const Gate du = fast_du_gate();
  const Gate pert = generic_perturbed_gate();

  const CircuitColumnSpec spec = CircuitColumnSpec::dilute_defect(du, pert, 3);
  REQUIRE(spec.pattern.size() == 4);
  // Columns 1..w are dual-unitary, column w+1 is the defect, then repeat.
  CHECK(&spec.column_gate(1) == &spec.gates[0]);
  CHECK(&spec.column_gate(3) == &spec.gates[0]);
  CHECK(&spec.column_gate(4) == &spec.gates[1]);
  CHECK(&spec.column_gate(5) == &spec.gates[0]);
  CHECK(&spec.column_gate(8) == &spec.gates[1]);

  // Using the same gate in both slots must reproduce the homogeneous value.
  const Matrix z = sigma_z();
  const CircuitColumnSpec both = CircuitColumnSpec::dilute_defect(du, du, 2);
  const CircuitColumnSpec homog = CircuitColumnSpec::homogeneous(du);
  for (int m : {5, 24}) {
    CHECK(std::abs(otoc_exact(both, z, z, 2, m, Parity::plus) -
                   otoc_exact(homog, z, z, 2, m, Parity::plus)) < 1e-13);
  }

  CHECK_THROWS_AS(CircuitColumnSpec::dilute_defect(du, pert, 0), DomainError);
  CHECK_THROWS_AS(spec.column_gate(0), DomainError);
}

TEST_CASE("guards reject invalid requests") {
  const Gate g = generic_perturbed_gate();
  const CircuitColumnSpec spec = CircuitColumnSpec::homogeneous(g);
  const Matrix z = sigma_z();

  CHECK_THROWS_AS(otoc_exact(spec, z, z, 1, 0, Parity::plus), DomainError);
  CHECK_THROWS_AS(otoc_exact(spec, z, z, 0, 3, Parity::plus), DomainError);
  // q = 2 and n = 6 needs 2^24 folded entries, past the default budget.
  CHECK_THROWS_AS(otoc_exact(spec, z, z, 6, 6, Parity::plus), BudgetError);

  Matrix bad = sigma_z();
  bad(0, 1) = std::complex<double>(0.3, 0.1);
  CHECK_THROWS_AS(otoc_exact(spec, bad, z, 1, 2, Parity::plus),
                  NonHermitianError);
  CHECK_THROWS_AS(otoc_exact(spec, Matrix::Identity(3, 3), z, 1, 2,
                             Parity::plus),
                  DimensionError);
}
