#include "otoc/path_integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "otoc/errors.hpp"

namespace otoc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k * logv with the 0 * (-inf) = 0 convention for vanishing exponents.
inline double xlogy(long long k, double logv) {
  return k == 0 ? 0.0 : double(k) * logv;
}

inline double logsumexp(const std::vector<double>& logs) {
  double mx = kNegInf;
  for (double v : logs) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - mx);
  return mx + std::log(s);
}

// Lentz continued fraction for the incomplete beta (the standard form).
double betacf(double a, double b, double x) {
  constexpr int kMaxIt = 1000;
  constexpr double kEps = 3e-16, kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIt; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw DomainError("regularized_incomplete_beta: continued fraction stalled");
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log of b_t * cf / a on the direct branch (x below the CF switch point).
double log_ibeta_direct(double x, double a, double b) {
  return a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b) -
         std::log(a) + std::log(betacf(a, b, x));
}

// Difference of two exponentials, exp(la) - exp(lb), stable near crossings.
double exp_diff(double la, double lb) {
  if (la == kNegInf && lb == kNegInf) return 0.0;
  if (la >= lb) return std::exp(la) * -std::expm1(lb - la);
  return -std::exp(lb) * -std::expm1(la - lb);
}

}  // namespace

double log_binomial(long long m, long long n) {
  if (n < 0 || m < 0 || n > m) throw DomainError("log_binomial: need 0 <= n <= m");
  if (n == 0 || n == m) return 0.0;
  return std::lgamma(double(m) + 1.0) - std::lgamma(double(n) + 1.0) -
         std::lgamma(double(m - n) + 1.0);
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("regularized_incomplete_beta: need a, b > 0");
  if (!(x >= 0.0) || !(x <= 1.0))
    throw DomainError("regularized_incomplete_beta: need x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_ibeta_direct(x, a, b));
  return 1.0 - std::exp(log_ibeta_direct(1.0 - x, b, a));
}

double log_regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("log_regularized_incomplete_beta: need a, b > 0");
  if (!(x >= 0.0) || !(x <= 1.0))
    throw DomainError("log_regularized_incomplete_beta: need x in [0,1]");
  if (x == 0.0) return kNegInf;
  if (x == 1.0) return 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return log_ibeta_direct(x, a, b);
  // On this branch I is order one, so log1p of the complement is safe.
  return std::log1p(-std::exp(log_ibeta_direct(1.0 - x, b, a)));
}

double log_p_poly(int m, int nu, double x) {
  if (m < 1 || nu < 1) throw DomainError("log_p_poly: need m, nu >= 1");
  if (!(x >= 0.0)) throw DomainError("log_p_poly: need x >= 0");
  if (m < nu) return kNegInf;
  if (x == 0.0) return log_binomial(m - 1, nu - 1);
  const double lx = std::log(x);
  std::vector<double> terms;
  terms.reserve(std::size_t(m - nu) + 1);
  for (int k = 0; k <= m - nu; ++k)
    terms.push_back(log_binomial(m - k - 1, nu - 1) + xlogy(k, lx));
  return logsumexp(terms);
}

double log_front_profile_F(double z1, int n, int m) {
  if (!(z1 >= 0.0) || !(z1 <= 1.0))
    throw DomainError("front_profile_F: need z1 in [0,1]");
  if (n <= 0) return 0.0;  // log 1
  if (m < n) return kNegInf;
  if (z1 == 0.0) return kNegInf;
  if (z1 == 1.0) return 0.0;
  return log_regularized_incomplete_beta(z1, double(n), double(m - n + 1));
}

double front_profile_F(double z1, int n, int m) {
  const double lf = log_front_profile_F(z1, n, m);
  return lf == kNegInf ? 0.0 : std::exp(lf);
}

double otoc_lightcone(double z1, int q, int m) {
  if (m < 0) throw DomainError("otoc_lightcone: need m >= 0");
  if (!(z1 >= 0.0) || !(z1 <= 1.0))
    throw DomainError("otoc_lightcone: need z1 in [0,1]");
  const double qq = double(q) * q;
  return 1.0 - qq / (qq - 1.0) * std::pow(1.0 - z1, m);
}

double otoc_1step(double z1, int q, int n, int m) {
  if (n < 1) throw DomainError("otoc_1step: need n >= 1");
  if (m < n - 1 || m < 1) throw DomainError("otoc_1step: need m >= max(n-1, 1)");
  if (!(z1 >= 0.0) || !(z1 <= 1.0))
    throw DomainError("otoc_1step: need z1 in [0,1]");
  if (n == 1) return otoc_lightcone(z1, q, m);
  const double qq = double(q) * q;
  // First path: the front profile. Second path: starts one row inside,
  // P_{m,n-1}(1) = C(m,n-1).
  const double lf = log_front_profile_F(z1, n, m);
  double lt2 = kNegInf;
  if (z1 > 0.0) {
    const double l1z = std::log1p(-z1);
    lt2 = xlogy(n - 1, std::log(z1)) + xlogy(m - n + 1, l1z) +
          log_binomial(m, n - 1) - std::log(qq - 1.0);
  }
  return exp_diff(lf, lt2);
}

double otoc_1step_asymptotic(double z1, int q, int n, int m) {
  if (n < 1) throw DomainError("otoc_1step_asymptotic: need n >= 1");
  const double qq = double(q) * q;
  const double la = std::log(qq) + log_front_profile_F(z1, n, m);
  const double lb = log_front_profile_F(z1, n - 1, m);
  return exp_diff(la, lb) / (qq - 1.0);
}

double otoc_2step(double z1, double z2, int q, int n, int m) {
  if (n < 1) throw DomainError("otoc_2step: need n >= 1");
  if (m < n - 1 || m < 1) throw DomainError("otoc_2step: need m >= max(n-1, 1)");
  if (!(z1 >= 0.0) || !(z1 <= 1.0))
    throw DomainError("otoc_2step: need z1 in [0,1]");
  if (!(z2 >= 0.0)) throw DomainError("otoc_2step: need z2 >= 0");
  if (z1 == 0.0 && z2 > 0.0)
    throw InfeasibleError("otoc_2step: z1 = 0 forces z2 = 0");
  if (n == 1) return otoc_lightcone(z1, q, m);
  if (z1 == 0.0) return 0.0;

  const double qq = double(q) * q;
  const double zt1 = z1 - z2 / qq;
  if (!(zt1 > 0.0))
    throw InfeasibleError("otoc_2step: z1 - z2/q^2 must be positive");
  const double l1z = std::log1p(-z1);
  const double lz1 = std::log(z1);
  const double lzt = std::log(zt1);
  const double lratio = lzt - lz1;               // log(zt1/z1)
  const double lw1 = (z2 > 0.0) ? std::log(z2) + lz1 - std::log(qq) - 2.0 * lzt
                                : kNegInf;       // log(z2 z1 / (q^2 zt1^2))
  const double lw2 = (z2 > 0.0) ? std::log(z2) - std::log(qq) - 2.0 * lzt
                                : kNegInf;       // log(z2 / (q^2 zt1^2))

  std::vector<double> pos, neg;

  // Start at row 1: h2 double steps among n-1 upward moves.
  for (int h2 = 0; 2 * h2 <= n - 1; ++h2) {
    if (h2 > 0 && z2 == 0.0) break;
    pos.push_back(xlogy(n - 1, lratio) + log_binomial(n - 1 - h2, h2) +
                  xlogy(h2, lw1) + log_front_profile_F(z1, n - h2, m));
  }
  if (n >= 2 && z2 > 0.0) {
    // Start at row 2, first piece (front-profile type).
    const double pre = std::log(z2) - std::log(qq) - lz1;
    for (int h2 = 0; 2 * h2 <= n - 2; ++h2)
      pos.push_back(pre + xlogy(n - 2, lratio) + log_binomial(n - 2 - h2, h2) +
                    xlogy(h2, lw1) + log_front_profile_F(z1, n - 1 - h2, m));
  }
  if (n >= 2) {
    // Start at row 2, second piece (enters with a minus sign).
    for (int h2 = 0; 2 * h2 <= n - 2; ++h2) {
      if (h2 > 0 && z2 == 0.0) break;
      const int nu = n - 1 - h2;
      if (m < nu) continue;  // P_{m,nu}(1) = C(m,nu) vanishes
      neg.push_back(xlogy(n - 1, lzt) - std::log(qq - 1.0) +
                    log_binomial(n - 2 - h2, h2) + xlogy(h2, lw2) +
                    xlogy(m - n + 1 + h2, l1z) + log_binomial(m, nu));
    }
  }
  if (n >= 3 && z2 > 0.0) {
    // Start at row 3 (minus sign). The boundary contraction carries the same
    // 1/(q^2-1) factor as the row-2 piece: both enter through the second left
    // component.
    for (int h2 = 0; 2 * h2 <= n - 3; ++h2) {
      const int nu = n - 2 - h2;
      if (m < nu) continue;
      neg.push_back(std::log(z2) + xlogy(n - 3, lzt) - std::log(qq) -
                    std::log(qq - 1.0) + log_binomial(n - 3 - h2, h2) +
                    xlogy(h2, lw2) + xlogy(m - n + 2 + h2, l1z) +
                    log_binomial(m, nu));
    }
  }
  return exp_diff(logsumexp(pos), logsumexp(neg));
}

FrontParams front_params(double z1, double z2, int q) {
  if (!(z1 >= 0.0) || !(z1 < 1.0))
    throw DomainError("front_params: need z1 in [0,1)");
  if (!(z2 >= 0.0)) throw DomainError("front_params: need z2 >= 0");
  if (z1 == 0.0 && z2 > 0.0)
    throw InfeasibleError("front_params: z1 = 0 forces z2 = 0");
  FrontParams p;
  p.z1 = z1;
  p.z2 = z2;
  p.q = q;
  p.v_b1 = (1.0 - z1) / (1.0 + z1);
  p.d1 = p.v_b1 * (1.0 - p.v_b1 * p.v_b1);
  const double qq = double(q) * q;
  p.xi = (z1 > 0.0) ? z2 / (qq * z1) : 0.0;
  if (p.xi == 0.0) {
    p.h_max = 0.0;
  } else {
    const double om = 1.0 - p.xi;
    p.h_max = 0.5 * (1.0 - 1.0 / std::sqrt(1.0 + 4.0 * p.xi / (om * om)));
  }
  if (!(p.h_max >= 0.0 && p.h_max < 0.5))
    throw DomainError("front_params: h_max outside [0, 1/2)");
  const double g = 1.0 - (1.0 + p.v_b1) * p.h_max / 2.0;
  p.v_b2 = (p.v_b1 - (1.0 + p.v_b1) * p.h_max / 2.0) / g;
  p.d2 = p.d1 * (1.0 - (1.0 - p.v_b2) * p.h_max / 2.0) / (g * g);
  p.v_b2_series = p.v_b1 - 0.5 * (1.0 - p.v_b1 * p.v_b1) * p.h_max;
  p.d2_series = p.d1 * (1.0 + 0.5 * (1.0 + 3.0 * p.v_b1) * p.h_max);
  return p;
}

double erf_front(double x, double t, double v_b, double d) {
  if (!(t > 0.0) || !(d > 0.0))
    throw DomainError("erf_front: need t > 0 and D > 0");
  return 0.5 * (1.0 + std::erf((x - v_b * t) / std::sqrt(2.0 * d * t)));
}

double log_zeta(double v) {
  if (!(v > 0.0) || !(v < 1.0)) throw DomainError("log_zeta: need v in (0,1)");
  const double p = (1.0 + v) / 2.0, mlt = (1.0 - v) / 2.0;
  return p * std::log(p) - mlt * std::log(mlt) - v * std::log(v);
}

double gamma_decay(double v, double z1) {
  if (!(z1 > 0.0) || !(z1 < 1.0))
    throw DomainError("gamma_decay: need z1 in (0,1)");
  return std::exp(log_zeta(v) + v * std::log1p(-z1) +
                  (1.0 - v) / 2.0 * std::log(z1));
}

ScramblingReport scrambling_report(double v, double z1) {
  if (!(v > 0.0) || !(v < 1.0))
    throw DomainError("scrambling_report: need v in (0,1)");
  const double v_b1 = (1.0 - z1) / (1.0 + z1);
  // Band around the front so a caller-side rounding of v_B1 still lands on
  // the front branch; the regimes are open sets anyway.
  const double band = 64.0 * std::numeric_limits<double>::epsilon() * v_b1;
  ScramblingReport r;
  if (v > v_b1 + band) {
    r.regime = FrontRegime::outside_cone;
    return r;
  }
  if (v >= v_b1 - band) {
    r.regime = FrontRegime::front;
    r.gamma = 1.0;
    r.t_star = std::numeric_limits<double>::infinity();
    return r;
  }
  r.regime = FrontRegime::inside_cone;
  r.gamma = gamma_decay(v, z1);
  r.t_star = -1.0 / std::log(r.gamma);
  return r;
}

}  // namespace otoc
