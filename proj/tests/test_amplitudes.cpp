#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "otoc/amplitudes.hpp"
#include "otoc/errors.hpp"
#include "otoc/gate.hpp"

using namespace otoc;

namespace {

Matrix swap_gate_u() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(3, 3) = 1.0;
  u(1, 2) = u(2, 1) = 1.0;
  return u;
}

Matrix bell_projector(int q) {
  Vector phi = Vector::Zero(q * q);
  for (int j = 0; j < q; ++j) phi(j * q + j) = 1.0 / std::sqrt(double(q));
  return phi * phi.adjoint();
}

}  // namespace

TEST_CASE("transfer channel is trace preserving for unitary gates") {
  CHECK(bk_channel_tp_defect(make_gate(swap_gate_u(), 2)) < 1e-12);
  for (unsigned seed = 0; seed < 5; ++seed)
    CHECK(bk_channel_tp_defect(make_gate(haar_unitary(4, seed), 2)) < 1e-12);
}

TEST_CASE("identity gate: bell state is the channel fixed point, B_k = q^2") {
  const Gate id = make_gate(Matrix::Identity(4, 4), 2);
  const Matrix bell = bell_projector(2);
  CHECK((bk_channel_apply(id, bell) - bell).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((bk_channel_apply(id, Matrix::Identity(4, 4)) - 4.0 * bell)
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  const ScatteringAmplitudes a = compute_amplitudes(id, 4);
  REQUIRE(a.B.size() == 4);
  for (double b : a.B) CHECK(b == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(a.z[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(std::abs(a.z[k]) < 1e-12);
}

TEST_CASE("swap gate: channel is the identity map, B_k = 1") {
  const Gate sw = make_gate(swap_gate_u(), 2);
  const Matrix rho = gue_hermitian(4, 17);
  CHECK((bk_channel_apply(sw, rho) - rho).cwiseAbs().maxCoeff() < 1e-13);

  const ScatteringAmplitudes a = compute_amplitudes(sw, 5);
  for (double b : a.B) CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
  for (double z : a.z) CHECK(std::abs(z) < 1e-12);
}

TEST_CASE("dual-unitary gates have B_k = 1 for all k") {
  for (unsigned seed = 0; seed < 6; ++seed) {
    const Gate g = du_gate_q2_random(0.3 + 0.11 * seed, seed);
    const ScatteringAmplitudes a = compute_amplitudes(g, 5);
    for (double b : a.B) CHECK(b == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("B_k matches the direct folded-gate contraction") {
  for (unsigned seed = 0; seed < 4; ++seed) {
    const Gate g = make_gate(haar_unitary(4, 40 + seed), 2);
    const ScatteringAmplitudes a = compute_amplitudes(g, 3);
    for (int k = 1; k <= 3; ++k)
      CHECK(a.B[k - 1] ==
            doctest::Approx(otoc_test::bk_direct(g, k)).epsilon(1e-10));
  }
}

TEST_CASE("z1 equals the operator-entanglement expression") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Gate g = make_gate(haar_unitary(4, 60 + seed), 2);
    const ScatteringAmplitudes a = compute_amplitudes(g, 1);
    const double z1 = z1_from_entanglement(schmidt_spectrum(g).e_lin, 2);
    CHECK(a.z[0] == doctest::Approx(z1).epsilon(1e-10));
  }
}

TEST_CASE("B_k respects rigorous bounds and monotonicity for generic gates") {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const Gate g = make_gate(haar_unitary(4, 100 + seed), 2);
    const ScatteringAmplitudes a = compute_amplitudes(g, 6);
    double prev = 1.0;
    for (int k = 1; k <= 6; ++k) {
      const double bk = a.B[k - 1];
      CHECK(bk >= 1.0 - 1e-10);
      CHECK(bk <= 4.0 + 1e-10);
      CHECK(bk >= prev - 1e-10);
      CHECK(a.z[k - 1] >= -1e-10);
      prev = bk;
    }
  }
}

TEST_CASE("bk_lower_bound is exact in the limits and tight near dual-unitarity") {
  // Equality at the two ends of the family: B_k = 1 at z1 = 0, q^2 at z1 = 1.
  for (int k = 1; k <= 6; ++k) {
    CHECK(bk_lower_bound(1.0, 2, k) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bk_lower_bound(4.0, 2, k) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(bk_lower_bound(1.9, 2, k) <= 4.0 + 1e-14);
  }
  // bound(1) reproduces B_1 and the curve is nondecreasing in k.
  CHECK(bk_lower_bound(1.9, 2, 1) == doctest::Approx(1.9).epsilon(1e-14));
  for (int k = 1; k < 6; ++k)
    CHECK(bk_lower_bound(1.9, 2, k) <= bk_lower_bound(1.9, 2, k + 1) + 1e-14);

  // Near dual-unitarity it tracks B_k closely; it is a leading-order result,
  // not a pointwise bound, so only closeness is asserted.
  for (unsigned s = 0; s < 10; ++s) {
    const Gate g =
        perturb(du_gate_q2_random(0.4 + 0.03 * s, s), gue_hermitian(4, 200 + s), 0.2);
    const ScatteringAmplitudes a = compute_amplitudes(g, 6);
    for (int k = 1; k <= 6; ++k)
      CHECK(std::abs(a.B[k - 1] - bk_lower_bound(a.B[0], 2, k)) < 2e-2);
  }
}

TEST_CASE("z_k obeys the geometric bound for perturbed dual-unitary gates") {
  for (double eps : {0.1, 0.3, 0.5}) {
    for (unsigned s = 0; s < 8; ++s) {
      const Gate g =
          perturb(du_gate_q2_random(0.35 + 0.05 * s, s), gue_hermitian(4, 50 + s), eps);
      const ScatteringAmplitudes a = compute_amplitudes(g, 8);
      for (int k = 1; k <= 8; ++k)
        CHECK(a.z[k - 1] <= std::pow(1.0 - a.z[0], k - 1) + 1e-9);
    }
  }
}

TEST_CASE("haar dressing average of z_2 matches z1 (1 - z1)") {
  // z1 is a one-site invariant, so it is fixed by the core; the higher
  // amplitudes average to z1 (1-z1)^{k-1} over Haar dressings.
  const Gate core = perturb(du_gate_q2_random(0.5, 2), gue_hermitian(4, 3), 0.35);
  const double z1 = compute_amplitudes(core, 1).z[0];
  REQUIRE(z1 > 1e-4);

  const int n = 1000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const unsigned s = 5000 + 4 * static_cast<unsigned>(i);
    const Matrix dressed = kron(haar_unitary(2, s), haar_unitary(2, s + 1)) *
                           core.u *
                           kron(haar_unitary(2, s + 2), haar_unitary(2, s + 3));
    const Gate g = make_gate(dressed, 2);
    CHECK(compute_amplitudes(g, 1).z[0] == doctest::Approx(z1).epsilon(1e-9));
    const double z2 = compute_amplitudes(g, 2).z[1];
    acc += z2;
    acc2 += z2 * z2;
  }
  const double mean = acc / n;
  const double var = std::max(acc2 / n - mean * mean, 0.0);
  const double three_sigma = 3.0 * std::sqrt(var / n);
  CHECK(std::abs(mean - haar_averaged_zk(z1, 2)) < three_sigma + 1e-10);
}

TEST_CASE("relaxation timescale and haar-averaged amplitudes") {
  CHECK(relaxation_timescale(0.1) ==
        doctest::Approx(-1.0 / std::log(0.9)).epsilon(1e-14));
  CHECK_THROWS_AS(relaxation_timescale(0.0), DomainError);
  CHECK_THROWS_AS(relaxation_timescale(1.0), DomainError);
  CHECK(haar_averaged_zk(0.25, 1) == doctest::Approx(0.25));
  CHECK(haar_averaged_zk(0.25, 3) == doctest::Approx(0.25 * 0.75 * 0.75));
}

TEST_CASE("amplitudes json round trip") {
  const Gate g = make_gate(haar_unitary(4, 33), 2);
  const ScatteringAmplitudes a = compute_amplitudes(g, 4);
  const ScatteringAmplitudes back = amplitudes_from_json(amplitudes_to_json(a));
  CHECK(back.q == a.q);
  REQUIRE(back.B.size() == a.B.size());
  REQUIRE(back.z.size() == a.z.size());
  for (std::size_t i = 0; i < a.B.size(); ++i) {
    CHECK(back.B[i] == a.B[i]);
    CHECK(back.z[i] == a.z[i]);
  }
  CHECK_THROWS_AS(amplitudes_from_json("{\"q\": 2, \"B\": []}"), ParseError);
}
