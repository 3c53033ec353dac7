#include "otoc/mcs.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "otoc/folded.hpp"

namespace otoc {

namespace {

double zk_or_zero(const std::vector<double>& z, int k) {
  // Amplitudes past the supplied truncation are exponentially small and
  // treated as zero.
  return (k >= 1 && std::size_t(k) <= z.size()) ? z[std::size_t(k - 1)] : 0.0;
}

}  // namespace

Vector mcs_basis_vector(int n, int k, int q, std::size_t max_dim) {
  if (n < 1) throw DomainError("mcs_basis_vector: n must be >= 1");
  if (k < 0 || k > n) throw DomainError("mcs_basis_vector: need 0 <= k <= n");
  std::size_t p = 1;
  for (int i = 0; i < 4; ++i) p *= std::size_t(q);
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    if (dim > max_dim / p)
      throw BudgetError("mcs_basis_vector: q^{4n} exceeds budget");
    dim *= p;
  }
  const Eigen::VectorXd circle = folded_circle(q);
  const Eigen::VectorXd square = folded_square(q);
  // |n,k> = q^{-n} (circles on legs 1..k, squares on k+1..n), leg 1 slowest.
  auto plain = [&](int kk) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
    for (int leg = 1; leg <= n; ++leg) {
      const Eigen::VectorXd& f = (leg <= kk) ? circle : square;
      Eigen::VectorXd next(v.size() * f.size());
      for (Eigen::Index a = 0; a < v.size(); ++a)
        next.segment(a * f.size(), f.size()) = v(a) * f;
      v = std::move(next);
    }
    return Eigen::VectorXd(v * std::pow(double(q), -n));
  };
  Eigen::VectorXd v;
  if (k == 0) {
    v = plain(0);
  } else {
    v = (double(q) * plain(k) - plain(k - 1)) / std::sqrt(double(q) * q - 1.0);
  }
  return v.cast<Complex>();
}

McsTransferMatrix projected_transfer(const std::vector<double>& z, int n,
                                     int q) {
  if (n < 1) throw DomainError("projected_transfer: n must be >= 1");
  if (q < 2) throw DomainError("projected_transfer: q must be >= 2");
  if (z.empty())
    throw InsufficientDataError("projected_transfer: need at least z1");
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!(z[i] >= -1e-9))
      throw DomainError("projected_transfer: negative amplitude z_" +
                        std::to_string(i + 1));
  if (!(z[0] <= 1.0 + 1e-9))
    throw DomainError("projected_transfer: z1 > 1");

  const double z1 = z[0];
  const double qq = double(q) * q;
  McsTransferMatrix out;
  out.n = n;
  out.q = q;
  out.z = z;
  out.m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.m(0, 0) = 1.0;
  for (int k = 1; k <= n; ++k)
    out.m(0, k) =
        std::sqrt(qq - 1.0) * zk_or_zero(z, k) / std::pow(double(q), k - 1);
  for (int l = 1; l <= n; ++l) {
    out.m(l, l) = 1.0 - z1;
    for (int k = l + 1; k <= n; ++k)
      out.m(l, k) = (qq * zk_or_zero(z, k - l) - zk_or_zero(z, k - l + 1)) /
                    std::pow(double(q), k - l);
  }

  // Structure re-asserted on every construction: strict upper-triangularity
  // and constant superdiagonals below row 0 are consequences of unitarity.
  for (int r = 0; r <= n; ++r)
    for (int c = 0; c < r; ++c)
      if (out.m(r, c) != 0.0)
        throw DomainError("projected_transfer: lost causality structure");
  for (int l = 2; l <= n; ++l)
    for (int k = l + 1; k <= n; ++k)
      if (std::abs(out.m(l, k) - out.m(l - 1, k - 1)) > 1e-14)
        throw DomainError("projected_transfer: superdiagonal not constant");
  return out;
}

int eigenvalue_multiplicity(const Eigen::MatrixXd& m, double target,
                            double tol) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  int count = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (std::abs(es.eigenvalues()(i) - Complex(target, 0.0)) <= tol) ++count;
  return count;
}

Matrix lightcone_channel(const Gate& g, const Matrix& sigma) {
  const int q = g.q;
  if (sigma.rows() != q || sigma.cols() != q)
    throw DimensionError("lightcone_channel: sigma must be q x q");
  const Matrix big = g.u * kron(sigma, Matrix::Identity(q, q)) * g.u.adjoint();
  Matrix out = Matrix::Zero(q, q);
  for (int a = 0; a < q; ++a)
    out += big.block(a * q, a * q, q, q);
  return out / double(q);
}

std::vector<double> lightcone_norms(const Gate& g, const Matrix& sigma,
                                    int n) {
  std::vector<double> out;
  out.reserve(std::size_t(n) + 1);
  Matrix s = sigma;
  out.push_back((s.adjoint() * s).trace().real() / g.q);
  for (int j = 1; j <= n; ++j) {
    s = lightcone_channel(g, s);
    out.push_back((s.adjoint() * s).trace().real() / g.q);
  }
  return out;
}

namespace {

McsBoundary boundaries_impl(int n, int q, const Matrix& sigma_alpha,
                            const Matrix& sigma_beta, const Gate* g) {
  if (n < 1) throw DomainError("boundaries: n must be >= 1");
  validate_sigma(sigma_alpha, q);
  validate_sigma(sigma_beta, q);
  const double qq = double(q) * q;
  const double s = std::sqrt(qq - 1.0);
  McsBoundary b;
  b.left = Eigen::VectorXd::Zero(n + 1);
  b.left(0) = std::pow(double(q), -0.5 * n);
  b.left(1) = -std::pow(double(q), -0.5 * n) / s;
  b.right_plus = Eigen::VectorXd::Zero(n + 1);
  b.right_plus(n) = std::pow(double(q), 1.0 - 0.5 * n) / s;
  if (g != nullptr) {
    if (g->q != q) throw DimensionError("boundaries: gate q mismatch");
    const std::vector<double> mn = lightcone_norms(*g, sigma_beta, n);
    Eigen::VectorXd rm(n + 1);
    rm(0) = std::pow(double(q), 0.5 * n) * mn[std::size_t(n)];
    for (int k = 1; k <= n; ++k)
      rm(k) = std::pow(double(q), 0.5 * n + 1.0 - k) *
              (mn[std::size_t(n - k)] - mn[std::size_t(n - k + 1)]) / s;
    b.right_minus = std::move(rm);
  }
  return b;
}

}  // namespace

McsBoundary boundaries(int n, int q, const Matrix& sigma_alpha,
                       const Matrix& sigma_beta) {
  return boundaries_impl(n, q, sigma_alpha, sigma_beta, nullptr);
}

McsBoundary boundaries(int n, int q, const Matrix& sigma_alpha,
                       const Matrix& sigma_beta, const Gate& g) {
  return boundaries_impl(n, q, sigma_alpha, sigma_beta, &g);
}

double otoc_mcs(const McsTransferMatrix& t, const McsBoundary& b, int m,
                Parity parity) {
  if (m < 1) throw DomainError("otoc_mcs: m must be >= 1");
  if (b.left.size() != t.m.rows())
    throw DimensionError("otoc_mcs: boundary size does not match matrix");
  Eigen::VectorXd v;
  int applications;
  if (parity == Parity::plus) {
    v = b.right_plus;
    applications = m;
  } else {
    if (!b.right_minus)
      throw DomainError(
          "otoc_mcs: minus parity needs a gate-built right boundary");
    v = *b.right_minus;
    applications = m - 1;
  }
  for (int i = 0; i < applications; ++i) v = t.m * v;
  return b.left.dot(v);
}

}  // namespace otoc
