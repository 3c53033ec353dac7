#include "otoc/folded.hpp"

#include <cmath>
#include <string>

namespace otoc {

namespace {

// Decode a folded leg index into its four copy indices.
inline void decode(int s, int q, int out[4]) {
  out[3] = s % q; s /= q;
  out[2] = s % q; s /= q;
  out[1] = s % q; s /= q;
  out[0] = s;
}

}  // namespace

Eigen::VectorXd folded_square(int q) {
  const int p = q * q * q * q;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  int c[4];
  for (int s = 0; s < p; ++s) {
    decode(s, q, c);
    if (c[0] == c[1] && c[2] == c[3]) v(s) = 1.0;
  }
  return v;
}

Eigen::VectorXd folded_circle(int q) {
  const int p = q * q * q * q;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  int c[4];
  for (int s = 0; s < p; ++s) {
    decode(s, q, c);
    if (c[3] == c[0] && c[1] == c[2]) v(s) = 1.0;
  }
  return v;
}

Vector dressed_square(const Matrix& sigma) {
  const int q = int(sigma.rows());
  const int p = q * q * q * q;
  Vector v(p);
  int c[4];
  for (int s = 0; s < p; ++s) {
    decode(s, q, c);
    v(s) = sigma(c[0], c[1]) * sigma(c[2], c[3]);
  }
  return v;
}

Vector dressed_circle(const Matrix& sigma) {
  const int q = int(sigma.rows());
  const int p = q * q * q * q;
  Vector v(p);
  int c[4];
  for (int s = 0; s < p; ++s) {
    decode(s, q, c);
    v(s) = sigma(c[3], c[0]) * sigma(c[1], c[2]);
  }
  return v;
}

FoldedGate fold(const Gate& g, std::size_t max_entries) {
  const int q = g.q;
  std::size_t p = 1;
  for (int i = 0; i < 4; ++i) p *= std::size_t(q);  // q^4
  if (p * p > max_entries / (p * p))
    // p^4 = q^16 matrix entries
    throw BudgetError("fold: q^16 = " + std::to_string(q) +
                      "^16 entries exceed the budget");
  FoldedGate f;
  f.q = q;
  f.w.resize(p * p, p * p);
  int a[4], b[4], c[4], d[4];
  for (std::size_t ai = 0; ai < p; ++ai) {
    decode(int(ai), q, a);
    for (std::size_t bi = 0; bi < p; ++bi) {
      decode(int(bi), q, b);
      for (std::size_t ci = 0; ci < p; ++ci) {
        decode(int(ci), q, c);
        for (std::size_t di = 0; di < p; ++di) {
          decode(int(di), q, d);
          // copies (fwd, conj, fwd, conj) of U_{ab,cd}
          Complex v = g.u(a[0] * q + b[0], c[0] * q + d[0]);
          v *= std::conj(g.u(a[1] * q + b[1], c[1] * q + d[1]));
          v *= g.u(a[2] * q + b[2], c[2] * q + d[2]);
          v *= std::conj(g.u(a[3] * q + b[3], c[3] * q + d[3]));
          f.w(ai * p + bi, ci * p + di) = v;
        }
      }
    }
  }
  return f;
}

Matrix FoldedGate::pair_swapped() const {
  std::size_t p = 1;
  for (int i = 0; i < 4; ++i) p *= std::size_t(q);
  Matrix g(p * p, p * p);
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t d = 0; d < p; ++d)
      g.col(d * p + c) = w.col(c * p + d);
  return g;
}

void validate_sigma(const Matrix& sigma, int q, double tol,
                    bool require_traceless) {
  if (sigma.rows() != q || sigma.cols() != q)
    throw DimensionError("sigma must be q x q");
  const double herm = (sigma - sigma.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= tol))
    throw NonHermitianError("sigma deviation from Hermitian " +
                            std::to_string(herm));
  const double tr = std::abs(sigma.trace());
  if (require_traceless && !(tr <= tol))
    throw DomainError("sigma must be traceless, |tr| = " + std::to_string(tr));
  const double norm = std::abs((sigma.adjoint() * sigma).trace().real() - q);
  if (!(norm <= tol))
    throw DomainError("sigma must satisfy tr[sigma^2] = q, deviation " +
                      std::to_string(norm));
}

}  // namespace otoc
