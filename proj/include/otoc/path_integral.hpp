#pragma once

#include <string>

namespace otoc {

// log C(m, n); exact 0 for n = 0 or n = m; DomainError outside 0 <= n <= m.
double log_binomial(long long m, long long n);

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction with the
// symmetry I_x(a,b) = 1 - I_{1-x}(b,a). a, b > 0, x in [0,1].
double regularized_incomplete_beta(double x, double a, double b);
// log I_x(a,b), stable when I underflows (deep binomial tails).
double log_regularized_incomplete_beta(double x, double a, double b);

// log of P_{m,nu}(x) = sum_{k=0}^{m-nu} C(m-k-1, nu-1) x^k  (all terms >= 0).
// Requires m >= 1, nu >= 1, x >= 0; returns -inf for m < nu.
double log_p_poly(int m, int nu, double x);

// Front profile F_{z1}(n,m) = n C(m,n) B_{z1}(n, m-n+1), evaluated as the
// regularized incomplete beta I_{z1}(n, m-n+1) = P[Bin(m,z1) >= n].
// F = 1 for n <= 0; F = 0 for m < n.
double front_profile_F(double z1, int n, int m);
double log_front_profile_F(double z1, int n, int m);

// Exact light-cone value C+(1,m) = 1 - q^2 (1-z1)^m / (q^2-1), m >= 0.
double otoc_lightcone(double z1, int q, int m);

// 1-step closed form (exact resummation of the z1-only transfer matrix):
//   C+(n,m) = F-type term - q^... second path, n >= 2; n = 1 delegates to
// otoc_lightcone. Assembled in log space, signs tracked.
double otoc_1step(double z1, int q, int n, int m);
// Large-(n,m) variant (q^2 F(n,m) - F(n-1,m))/(q^2-1).
double otoc_1step_asymptotic(double z1, int q, int n, int m);

// 2-step closed form: sum of the three starting-point contributions, exact
// resummation of the (z1, z2)-truncated transfer matrix.
double otoc_2step(double z1, double z2, int q, int n, int m);

// Asymptotic front parameters.
struct FrontParams {
  double z1 = 0, z2 = 0;
  int q = 2;
  double v_b1 = 0, d1 = 0;    // 1-step butterfly velocity, diffusion constant
  double xi = 0, h_max = 0;   // 2-step saddle data
  double v_b2 = 0, d2 = 0;    // renormalized values (exact h_max expressions)
  double v_b2_series = 0, d2_series = 0;  // leading-order expansions in xi
};
FrontParams front_params(double z1, double z2, int q);

// Diffusive front profile (1/2)(1 + erf((x - v_B t)/sqrt(2 D t))).
double erf_front(double x, double t, double v_b, double d);

// Entropic rate log zeta(v) and the decay exponent
// gamma(v, z1) = zeta(v) (1-z1)^v z1^{(1-v)/2}; gamma(v_B1, z1) = 1.
double log_zeta(double v);
double gamma_decay(double v, double z1);

// Velocity regime relative to the 1-step front.
enum class FrontRegime { inside_cone, front, outside_cone };
struct ScramblingReport {
  FrontRegime regime = FrontRegime::front;
  double gamma = 1.0;    // only meaningful inside the cone
  double t_star = 0.0;   // -1/log gamma, scrambling onset; inf at the front
};
// Classifies v against v_B1(z1); gamma/t_star filled only inside the cone.
ScramblingReport scrambling_report(double v, double z1);

}  // namespace otoc
