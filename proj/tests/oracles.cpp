#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace otoc_test {

using otoc::Complex;
using otoc::Gate;
using otoc::Matrix;

namespace {

long ipow(int base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

Matrix identity(long dim) { return Matrix::Identity(dim, dim); }

// I_{q^s} (x) m (x) I_{q^{L-s-w}} for a w-site operator m placed at site s.
Matrix embed(const Matrix& m, int site, int n_sites, int q, int width) {
  Matrix r = otoc::kron(identity(ipow(q, site)), m);
  return otoc::kron(r, identity(ipow(q, n_sites - site - width)));
}

// One brickwork layer: the same two-site gate on every bond b >= offset with
// b = offset (mod 2), identity on uncovered edge sites.
Matrix layer(const Gate& g, int n_sites, int offset) {
  Matrix r = identity(ipow(g.q, offset));
  int site = offset;
  while (site + 1 <= n_sites - 1) {
    r = otoc::kron(r, g.u);
    site += 2;
  }
  if (site <= n_sites - 1) r = otoc::kron(r, identity(ipow(g.q, n_sites - site)));
  return r;
}

}  // namespace

double heisenberg_otoc(const Gate& g, const Matrix& sigma_alpha,
                       const Matrix& sigma_beta, int x, int t,
                       bool row0_even) {
  if (t < 0 || x < 0) throw std::invalid_argument("heisenberg_otoc: x, t must be >= 0");
  const int q = g.q;
  const int n_sites = t + std::max(x, t) + 1;
  const long dim = ipow(q, n_sites);
  if (dim > (1L << 14))
    throw std::invalid_argument("heisenberg_otoc: chain too large for dense evolution");

  // sigma_alpha evolves from site t; its causal cone then stays inside the
  // chain, so the open-boundary truncation is exact.
  Matrix a = embed(sigma_alpha, t, n_sites, q, 1);
  const Matrix b = embed(sigma_beta, t + x, n_sites, q, 1);
  for (int tau = t - 1; tau >= 0; --tau) {
    const int offset = ((row0_even ? 0 : 1) + tau) % 2;
    const Matrix r = layer(g, n_sites, offset);
    a = (r.adjoint() * a * r).eval();
  }
  const Complex c = (a * b * a * b).trace() / static_cast<double>(dim);
  if (std::abs(c.imag()) > 1e-9)
    throw std::runtime_error("heisenberg_otoc: correlator has a large imaginary part");
  return c.real();
}

double bk_direct(const Gate& g, int k) {
  if (k < 1) throw std::invalid_argument("bk_direct: k must be >= 1");
  const otoc::FoldedGate f = otoc::fold(g);
  const long p = ipow(g.q, 4);
  const Eigen::VectorXd sq = otoc::folded_square(g.q);
  const Eigen::VectorXd ci = otoc::folded_circle(g.q);

  // Hop matrix: close legs a (out-left) with a square and d (in-right) with a
  // circle, leaving a map from leg c to leg b.
  Matrix hop = Matrix::Zero(p, p);
  for (long a = 0; a < p; ++a) {
    if (sq(a) == 0.0) continue;
    for (long d = 0; d < p; ++d) {
      if (ci(d) == 0.0) continue;
      for (long b = 0; b < p; ++b)
        for (long c = 0; c < p; ++c) hop(b, c) += f.w(a * p + b, c * p + d);
    }
  }

  otoc::Vector v = sq.cast<Complex>();
  for (int i = 0; i < k; ++i) v = (hop * v).eval();
  const Complex val = ci.cast<Complex>().dot(v) / std::pow(double(g.q), k + 1);
  if (std::abs(val.imag()) > 1e-9)
    throw std::runtime_error("bk_direct: amplitude has a large imaginary part");
  return val.real();
}

}  // namespace otoc_test
