#include "otoc/gate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <json.hpp>

namespace otoc {

namespace {

double unitarity_defect(const Matrix& u) {
  const Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

}  // namespace

Gate make_gate(const Matrix& u, int q, double tol) {
  if (q < 2) throw DimensionError("make_gate: q must be >= 2");
  const Eigen::Index d = Eigen::Index(q) * q;
  if (u.rows() != d || u.cols() != d)
    throw DimensionError("make_gate: expected " + std::to_string(d) + "x" +
                         std::to_string(d) + " matrix, got " +
                         std::to_string(u.rows()) + "x" +
                         std::to_string(u.cols()));
  const double defect = unitarity_defect(u);
  if (!(defect <= tol))
    throw NonUnitaryError("make_gate: max-entry unitarity deviation " +
                          std::to_string(defect) + " exceeds tol " +
                          std::to_string(tol));
  return Gate{q, u};
}

Matrix dual_gate(const Gate& g) {
  const int q = g.q;
  Matrix ut(q * q, q * q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        for (int d = 0; d < q; ++d)
          ut(a * q + b, c * q + d) = g.u(d * q + b, c * q + a);
  return ut;
}

bool is_dual_unitary(const Gate& g, double tol) {
  return unitarity_defect(dual_gate(g)) <= tol;
}

SchmidtSpectrum schmidt_spectrum(const Gate& g) {
  const int q = g.q;
  // Reshuffle grouping both left-site indices against both right-site ones.
  Matrix r(q * q, q * q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        for (int d = 0; d < q; ++d)
          r(a * q + c, b * q + d) = g.u(a * q + b, c * q + d);
  Eigen::JacobiSVD<Matrix> svd(r);
  SchmidtSpectrum out;
  out.sigma.resize(q * q);
  double purity = 0.0;
  for (int j = 0; j < q * q; ++j) {
    const double s = svd.singularValues()(j);
    out.sigma[j] = s * s;
    purity += s * s * s * s;
  }
  out.e_lin = 1.0 - purity / (double(q) * q * q * q);
  return out;
}

Matrix haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("haar_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      a(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix qmat = qr.householderQ();
  const Matrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar, not QR-biased.
  for (int j = 0; j < dim; ++j) {
    const Complex rd = rmat(j, j);
    const double mag = std::abs(rd);
    qmat.col(j) *= (mag > 0 ? rd / mag : Complex(1, 0));
  }
  return qmat;
}

Matrix gue_hermitian(int dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("gue_hermitian: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      a(i, j) = Complex(re, im);
    }
  Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double norm2 = es.eigenvalues().cwiseAbs().maxCoeff();
  if (norm2 <= 0) throw DomainError("gue_hermitian: degenerate sample");
  return h / norm2;
}

Matrix hermitian_phase_exp(const Matrix& h, double scale) {
  const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-12))
    throw NonHermitianError("hermitian_phase_exp: deviation " +
                            std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(h.rows());
  for (Eigen::Index j = 0; j < h.rows(); ++j)
    phases(j) = std::exp(Complex(0.0, scale * es.eigenvalues()(j)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Gate du_gate_q2(double J, const Matrix& u1, const Matrix& u2, const Matrix& v1,
                const Matrix& v2) {
  for (const Matrix* m : {&u1, &u2, &v1, &v2}) {
    if (m->rows() != 2 || m->cols() != 2)
      throw DimensionError("du_gate_q2: one-site factors must be 2x2");
    if (unitarity_defect(*m) > 1e-10)
      throw NonUnitaryError("du_gate_q2: non-unitary one-site factor");
  }
  const Matrix x = pauli(1), y = pauli(2), z = pauli(3);
  const double c = M_PI / 4.0;
  const Matrix h = c * kron(x, x) + c * kron(y, y) + J * kron(z, z);
  const Matrix core = hermitian_phase_exp(h, -1.0);
  const Matrix u = kron(u1, u2) * core * kron(v1, v2);
  return make_gate(u, 2, 1e-12);
}

Gate du_gate_q2_random(double J, std::uint64_t seed) {
  return du_gate_q2(J, haar_unitary(2, seed), haar_unitary(2, seed + 1),
                    haar_unitary(2, seed + 2), haar_unitary(2, seed + 3));
}

Gate perturb(const Gate& v, const Matrix& w, double eps, double herm_tol) {
  if (w.rows() != v.u.rows() || w.cols() != v.u.cols())
    throw DimensionError("perturb: W shape does not match the gate");
  const double herm = (w - w.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= herm_tol))
    throw NonHermitianError("perturb: W deviation from Hermitian " +
                            std::to_string(herm));
  const Matrix wh = 0.5 * (w + w.adjoint());
  return make_gate(v.u * hermitian_phase_exp(wh, eps), v.q, 1e-10);
}

Eigen::Matrix2cd pauli(int axis) {
  Eigen::Matrix2cd m;
  const Complex i(0.0, 1.0);
  switch (axis) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw DomainError("pauli: axis must be 1, 2 or 3");
  }
  return m;
}

std::string gate_to_json(const Gate& g) {
  nlohmann::json j;
  j["q"] = g.q;
  const Eigen::Index d = g.u.rows();
  std::vector<std::vector<double>> re(d, std::vector<double>(d));
  std::vector<std::vector<double>> im(d, std::vector<double>(d));
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      re[r][c] = g.u(r, c).real();
      im[r][c] = g.u(r, c).imag();
    }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

Gate gate_from_json(const std::string& text, double tol) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gate_from_json: ") + e.what());
  }
  if (!j.contains("q") || !j.contains("re") || !j.contains("im"))
    throw ParseError("gate_from_json: need keys q, re, im");
  int q;
  std::vector<std::vector<double>> re, im;
  try {
    q = j.at("q").get<int>();
    re = j.at("re").get<std::vector<std::vector<double>>>();
    im = j.at("im").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gate_from_json: ") + e.what());
  }
  const std::size_t d = std::size_t(q) * std::size_t(q);
  if (re.size() != d || im.size() != d)
    throw ParseError("gate_from_json: matrix must have q^2 rows");
  Matrix u(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    if (re[r].size() != d || im[r].size() != d)
      throw ParseError("gate_from_json: matrix must have q^2 columns");
    for (std::size_t c = 0; c < d; ++c) u(r, c) = Complex(re[r][c], im[r][c]);
  }
  return make_gate(u, q, tol);
}

}  // namespace otoc
