#include "otoc/brute_force.hpp"

#include <cmath>
#include <string>

namespace otoc {

LightconeCoords to_lightcone(int x, int t) {
  if (x < 0 || t < 1 || x > t)
    throw DomainError("to_lightcone: need 0 <= x <= t, t >= 1");
  LightconeCoords c;
  if (((t - x) & 1) == 0) {
    c.parity = Parity::plus;
    c.n = (t - x + 2) / 2;
    c.m = (t + x) / 2;
  } else {
    c.parity = Parity::minus;
    c.n = (t - x + 1) / 2;
    c.m = (t + x + 1) / 2;
  }
  return c;
}

std::pair<int, int> to_spacetime(const LightconeCoords& c) {
  if (c.n < 1 || c.m < c.n - 1)
    throw DomainError("to_spacetime: invalid (n, m)");
  int x, t;
  if (c.parity == Parity::plus) {
    x = c.m - c.n + 1;
    t = c.m + c.n - 1;
  } else {
    x = c.m - c.n;
    t = c.m + c.n - 1;
  }
  return {x, t};
}

FoldedColumnOperator::FoldedColumnOperator(const FoldedGate& g, int n,
                                           std::size_t max_dim)
    : n_(n), q_(g.q) {
  if (n < 1) throw DomainError("FoldedColumnOperator: n must be >= 1");
  p_ = 1;
  for (int i = 0; i < 4; ++i) p_ *= std::size_t(q_);
  dim_ = 1;
  for (int i = 0; i < n_; ++i) {
    if (dim_ > max_dim / p_)
      throw BudgetError("FoldedColumnOperator: q^{4n} exceeds budget at n = " +
                        std::to_string(n));
    dim_ *= p_;
  }
  g_ = g.pair_swapped();
}

// One column is a staircase of n gates. State layout during the sweep:
// X[l_1, ..., l_n, aux] row-major (aux fastest). The aux slot starts as the
// bare square below leg n; gate i (processed i = n..1) eats (aux, l_i) as its
// inputs and emits (l_i, aux) as outputs; the final aux is closed with the
// bare circle above leg 1. Prefactor 1/q.
Vector FoldedColumnOperator::apply(const Vector& v) const {
  if (std::size_t(v.size()) != dim_)
    throw DimensionError("apply_column: vector has wrong dimension");
  const Eigen::Index p = Eigen::Index(p_);
  const Eigen::Index fibers = Eigen::Index(dim_ / p_);  // p^{n-1}

  const Eigen::VectorXd cap_bottom = folded_square(q_);
  const Eigen::VectorXd cap_top = folded_circle(q_);

  // X as a (dim, p) matrix: column aux, row (l_1..l_n).
  Matrix x(dim_, p);
  for (Eigen::Index a = 0; a < p; ++a) x.col(a) = v * cap_bottom(a);

  Matrix fib(p * p, fibers);
  for (int gate = n_; gate >= 1; --gate) {
    // Stride of leg `gate` inside the (l_1..l_n) row index.
    std::size_t stride = 1;
    for (int j = n_; j > gate; --j) stride *= p_;
    const std::size_t outer_hi = dim_ / (stride * p_);  // legs above `gate`
    // Gather fibers indexed (l_gate, aux); the remaining legs enumerate
    // columns as hi * stride + lo.
    Eigen::Index f = 0;
    for (std::size_t hi = 0; hi < outer_hi; ++hi)
      for (std::size_t lo = 0; lo < stride; ++lo, ++f) {
        const std::size_t row0 = hi * stride * p_ + lo;
        for (Eigen::Index l = 0; l < p; ++l)
          fib.block(l * p, f, p, 1) =
              x.block(Eigen::Index(row0 + std::size_t(l) * stride), 0, 1, p)
                  .transpose();
      }
    fib = g_ * fib;  // (l_gate, aux) -> outputs in the same slots
    f = 0;
    for (std::size_t hi = 0; hi < outer_hi; ++hi)
      for (std::size_t lo = 0; lo < stride; ++lo, ++f) {
        const std::size_t row0 = hi * stride * p_ + lo;
        for (Eigen::Index l = 0; l < p; ++l)
          x.block(Eigen::Index(row0 + std::size_t(l) * stride), 0, 1, p) =
              fib.block(l * p, f, p, 1).transpose();
      }
  }
  Vector out = x * cap_top.cast<Complex>();
  out /= double(q_);
  return out;
}

Matrix FoldedColumnOperator::dense() const {
  Matrix t(dim_, dim_);
  Vector e = Vector::Zero(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    e(j) = 1.0;
    t.col(j) = apply(e);
    e(j) = 0.0;
  }
  return t;
}

CircuitColumnSpec CircuitColumnSpec::homogeneous(Gate g) {
  CircuitColumnSpec s;
  s.gates.push_back(std::move(g));
  s.pattern = {0};
  return s;
}

CircuitColumnSpec CircuitColumnSpec::dilute_defect(Gate du, Gate pert, int w) {
  if (w < 1) throw DomainError("dilute_defect: patch width must be >= 1");
  if (du.q != pert.q) throw DimensionError("dilute_defect: mismatched q");
  CircuitColumnSpec s;
  s.gates.push_back(std::move(du));
  s.gates.push_back(std::move(pert));
  s.pattern.assign(std::size_t(w), 0);
  s.pattern.push_back(1);
  return s;
}

const Gate& CircuitColumnSpec::column_gate(int j) const {
  if (j < 1) throw DomainError("column_gate: columns are 1-based");
  if (pattern.empty()) throw DomainError("column_gate: empty pattern");
  return gates.at(std::size_t(pattern[std::size_t(j - 1) % pattern.size()]));
}

namespace {

// Product over n folded legs, leg 1 slowest.
Vector leg_product(const std::vector<Vector>& legs) {
  Vector v = legs.front();
  for (std::size_t i = 1; i < legs.size(); ++i) {
    Vector next(v.size() * legs[i].size());
    for (Eigen::Index a = 0; a < v.size(); ++a)
      next.segment(a * legs[i].size(), legs[i].size()) = v(a) * legs[i];
    v = std::move(next);
  }
  return v;
}

}  // namespace

Vector left_vector(int n, const Matrix& sigma_alpha, int q) {
  validate_sigma(sigma_alpha, q, 1e-9, false);
  std::vector<Vector> legs;
  legs.push_back(dressed_circle(sigma_alpha));
  for (int i = 1; i < n; ++i)
    legs.push_back(folded_circle(q).cast<Complex>());
  Vector v = leg_product(legs);
  v *= std::pow(double(q), -0.5 * n);
  return v;
}

Vector right_plus_vector(int n, const Matrix& sigma_beta, int q) {
  validate_sigma(sigma_beta, q, 1e-9, false);
  std::vector<Vector> legs;
  for (int i = 1; i < n; ++i)
    legs.push_back(folded_square(q).cast<Complex>());
  legs.push_back(dressed_square(sigma_beta));
  Vector v = leg_product(legs);
  v *= std::pow(double(q), -0.5 * n);
  return v;
}

// The minus-parity right boundary is a partial column: the staircase with all
// leg inputs closed by bare squares, the bottom aux carrying the dressing
// sigma_beta, and the top aux closed by the bare circle. The output legs stay
// open, entangled through the aux bond, so the result is not a product state.
Vector right_minus_vector(int n, const Matrix& sigma_beta, const FoldedGate& g,
                          std::size_t max_dim) {
  const int q = g.q;
  validate_sigma(sigma_beta, q, 1e-9, false);
  std::size_t p = 1;
  for (int i = 0; i < 4; ++i) p *= std::size_t(q);
  std::size_t dim = 1;
  for (int i = 0; i < n; ++i) {
    if (dim > max_dim / p)
      throw BudgetError("right_minus_vector: q^{4n} exceeds budget");
    dim *= p;
  }
  const Matrix gp = g.pair_swapped();
  const Vector square = folded_square(q).cast<Complex>();
  // D[(a,b), c] = sum_d G[(a,b),(d,c)] square(d): gate with its leg input
  // closed, mapping the incoming aux c to (leg output a, outgoing aux b).
  Matrix dmat = Matrix::Zero(p * p, p);
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t d = 0; d < p; ++d)
      dmat.col(c) += gp.col(d * p + c) * square(d);

  // Grow the open-leg tensor bottom-up: T[(a_i..a_n), aux], a_i slowest.
  Matrix t = dressed_square(sigma_beta).transpose();  // 1 x p, row = empty legs
  for (int i = n; i >= 1; --i) {
    const Eigen::Index rows = t.rows();
    // m[(a,b), r] = sum_c dmat[(a,b), c] * t(r, c)
    Matrix m = dmat * t.transpose();
    t.resize(rows * Eigen::Index(p), Eigen::Index(p));
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        t.block(Eigen::Index(a) * rows, Eigen::Index(b), rows, 1) =
            m.row(Eigen::Index(a * p + b)).transpose();
  }
  Vector out = t * folded_circle(q).cast<Complex>();
  out *= std::pow(double(q), -0.5 * n - 1.0);
  return out;
}

double otoc_exact(const CircuitColumnSpec& spec, const Matrix& sigma_alpha,
                  const Matrix& sigma_beta, int n, int m, Parity parity,
                  std::size_t max_dim) {
  if (m < 1) throw DomainError("otoc_exact: m must be >= 1");
  if (n < 1) throw DomainError("otoc_exact: n must be >= 1");
  const int q = spec.column_gate(1).q;

  // Folded gates and column operators are built once per distinct gate.
  std::vector<FoldedGate> folded;
  folded.reserve(spec.gates.size());
  for (const Gate& g : spec.gates) folded.push_back(fold(g));
  std::vector<FoldedColumnOperator> ops;
  ops.reserve(folded.size());
  for (const FoldedGate& f : folded)
    ops.emplace_back(f, n, max_dim);

  int first_column;
  Vector v;
  if (parity == Parity::plus) {
    v = right_plus_vector(n, sigma_beta, q);
    first_column = 1;
  } else {
    const int idx = spec.pattern[0];
    v = right_minus_vector(n, sigma_beta, folded[std::size_t(idx)], max_dim);
    first_column = 2;  // the partial column consumed slot j = 1
  }
  for (int j = first_column; j <= m; ++j) {
    const std::size_t idx =
        std::size_t(spec.pattern[std::size_t(j - 1) % spec.pattern.size()]);
    v = ops[idx].apply(v);
  }
  const Complex c = left_vector(n, sigma_alpha, q).transpose() * v;
  if (std::abs(c.imag()) > 1e-10)
    throw DomainError("otoc_exact: imaginary part " +
                      std::to_string(c.imag()));
  return c.real();
}

std::vector<double> lightcone_floquet(const Gate& g, const Matrix& sigma_alpha,
                                      const Matrix& sigma_beta, int m_max) {
  if (m_max < 1) throw DomainError("lightcone_floquet: m_max must be >= 1");
  const FoldedGate f = fold(g);
  const FoldedColumnOperator op(f, 1);
  Vector v = right_plus_vector(1, sigma_beta, g.q);
  const Vector l = left_vector(1, sigma_alpha, g.q);
  std::vector<double> out;
  out.reserve(std::size_t(m_max));
  for (int m = 1; m <= m_max; ++m) {
    v = op.apply(v);
    const Complex c = l.transpose() * v;
    if (std::abs(c.imag()) > 1e-10)
      throw DomainError("lightcone_floquet: imaginary part " +
                        std::to_string(c.imag()));
    out.push_back(c.real());
  }
  return out;
}

}  // namespace otoc
