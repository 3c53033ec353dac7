#include "otoc/amplitudes.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

namespace otoc {

namespace {

// Kraus operators E_{kk'} of the transfer channel as one big map applied
// term by term: T[rho] = sum_{kk'} E_{kk'} rho E_{kk'}^dag with
// E_{kk'}[(a,a'),(b,b')] = q^{-1/2} sum_f U_{ka,bf} conj(U_{k'a',b'f}).
std::vector<Matrix> kraus_ops(const Gate& g) {
  const int q = g.q;
  const double norm = 1.0 / std::sqrt(double(q));
  std::vector<Matrix> es;
  es.reserve(std::size_t(q) * q);
  for (int k = 0; k < q; ++k)
    for (int kp = 0; kp < q; ++kp) {
      Matrix e(q * q, q * q);
      for (int a = 0; a < q; ++a)
        for (int ap = 0; ap < q; ++ap)
          for (int b = 0; b < q; ++b)
            for (int bp = 0; bp < q; ++bp) {
              Complex s = 0.0;
              for (int f = 0; f < q; ++f)
                s += g.u(k * q + a, b * q + f) *
                     std::conj(g.u(kp * q + ap, bp * q + f));
              e(a * q + ap, b * q + bp) = norm * s;
            }
      es.push_back(std::move(e));
    }
  return es;
}

Vector bell_state(int q) {
  Vector phi = Vector::Zero(q * q);
  for (int j = 0; j < q; ++j) phi(j * q + j) = 1.0;
  return phi / std::sqrt(double(q));
}

}  // namespace

Matrix bk_channel_apply(const Gate& g, const Matrix& rho) {
  const Eigen::Index d = Eigen::Index(g.q) * g.q;
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionError("bk_channel_apply: rho must be q^2 x q^2");
  Matrix out = Matrix::Zero(d, d);
  for (const Matrix& e : kraus_ops(g)) out += e * rho * e.adjoint();
  return out;
}

double bk_channel_tp_defect(const Gate& g) {
  const Eigen::Index d = Eigen::Index(g.q) * g.q;
  Matrix s = Matrix::Zero(d, d);
  for (const Matrix& e : kraus_ops(g)) s += e.adjoint() * e;
  return (s - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

ScatteringAmplitudes compute_amplitudes(const Gate& g, int k_max) {
  if (k_max < 1) throw DomainError("compute_amplitudes: k_max must be >= 1");
  const int q = g.q;
  const double qq = double(q) * q;
  const std::vector<Matrix> es = kraus_ops(g);
  const Vector phi = bell_state(q);

  ScatteringAmplitudes out;
  out.q = q;
  out.B.reserve(std::size_t(k_max));
  out.z.reserve(std::size_t(k_max));

  Matrix rho = Matrix::Identity(q * q, q * q);
  double prev = 1.0;  // B_0 plays the role of the k = 0 baseline
  for (int k = 1; k <= k_max; ++k) {
    Matrix next = Matrix::Zero(q * q, q * q);
    for (const Matrix& e : es) next += e * rho * e.adjoint();
    rho = std::move(next);
    const Complex bvalc = phi.adjoint() * rho * phi;
    if (std::abs(bvalc.imag()) > 1e-10)
      throw DomainError("compute_amplitudes: non-real B_k");
    const double b = bvalc.real();
    // Bounds and monotonicity are theorems; violations mean a broken gate
    // or index convention, so they are hard errors.
    if (!(b >= 1.0 - 1e-9) || !(b <= qq + 1e-9))
      throw DomainError("compute_amplitudes: B_" + std::to_string(k) +
                        " = " + std::to_string(b) + " outside [1, q^2]");
    if (!(b >= prev - 1e-9))
      throw DomainError("compute_amplitudes: B_k not monotone at k = " +
                        std::to_string(k));
    out.B.push_back(b);
    out.z.push_back((b - prev) / (qq - 1.0));
    prev = b;
  }
  // z1 = 0 forces every z_k to vanish (dual-unitary fixed point).
  if (out.z[0] <= 1e-12)
    for (double zk : out.z)
      if (zk > 1e-8)
        throw DomainError("compute_amplitudes: z1 = 0 but a later z_k > 0");
  return out;
}

double z1_from_entanglement(double e_lin, int q) {
  const double qq = double(q) * q;
  if (!(e_lin >= -1e-12) || !(e_lin <= 1.0 - 1.0 / qq + 1e-9))
    throw DomainError("z1_from_entanglement: E_lin outside [0, 1 - 1/q^2]");
  return 1.0 - qq * e_lin / (qq - 1.0);
}

double bk_lower_bound(double b1, int q, int k) {
  const double qq = double(q) * q;
  if (!(b1 >= 1.0 - 1e-9) || !(b1 <= qq + 1e-9))
    throw DomainError("bk_lower_bound: B1 outside [1, q^2]");
  if (k < 1) throw DomainError("bk_lower_bound: k must be >= 1");
  const double z1 = (b1 - 1.0) / (qq - 1.0);
  return qq - (qq - 1.0) * std::pow(1.0 - z1, k);
}

double haar_averaged_zk(double z1, int k) {
  if (!(z1 >= 0.0) || !(z1 <= 1.0))
    throw DomainError("haar_averaged_zk: z1 outside [0,1]");
  if (k < 1) throw DomainError("haar_averaged_zk: k must be >= 1");
  return z1 * std::pow(1.0 - z1, k - 1);
}

double relaxation_timescale(double z1) {
  if (!(z1 > 0.0) || !(z1 < 1.0))
    throw DomainError("relaxation_timescale: defined for z1 in (0,1) only");
  return -1.0 / std::log1p(-z1);
}

std::string amplitudes_to_json(const ScatteringAmplitudes& a) {
  nlohmann::json j;
  j["q"] = a.q;
  j["B"] = a.B;
  j["z"] = a.z;
  return j.dump();
}

ScatteringAmplitudes amplitudes_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("amplitudes_from_json: ") + e.what());
  }
  ScatteringAmplitudes a;
  try {
    a.q = j.at("q").get<int>();
    a.B = j.at("B").get<std::vector<double>>();
    a.z = j.at("z").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("amplitudes_from_json: ") + e.what());
  }
  if (a.q < 2 || a.B.size() != a.z.size() || a.B.empty())
    throw ParseError("amplitudes_from_json: inconsistent field sizes");
  return a;
}

}  // namespace otoc
