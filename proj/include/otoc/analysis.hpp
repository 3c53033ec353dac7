#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otoc/amplitudes.hpp"
#include "otoc/brute_force.hpp"
#include "otoc/mcs.hpp"
#include "otoc/path_integral.hpp"

namespace otoc {

enum class Engine { brute, mcs, closed1, closed2 };

Engine engine_from_string(const std::string& s);
std::string to_string(Engine e);
std::string to_string(Parity p);

// Deterministic index-sharded parallel loop: body(i) for i in [0, count).
// Results must go to preallocated slots; shard assignment is independent of
// thread scheduling. threads <= 0 picks hardware concurrency.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads = 0);

struct OtocPoint {
  int x = 0;
  int t = 0;
  double value = 0.0;
};

// Rectangular spacetime window; only (x,t) with the grid's (t-x) parity and
// 0 <= x are evaluated. Points beyond the light cone (x > t) are exactly 1.
struct GridWindow {
  int x0 = 0, x1 = 0, t0 = 0, t1 = 0;
};
GridWindow parse_grid_window(const std::string& text);  // "x0:x1,t0:t1"

struct OtocGrid {
  Parity parity = Parity::plus;
  Engine engine = Engine::closed1;
  int q = 2;
  std::vector<OtocPoint> points;  // sorted by (t, x)

  // Re-asserts the parity tag and the value bounds
  // [-1/(q^2-1) - tol, 1 + tol]; throws DomainError on violation.
  void validate(double tol = 1e-9) const;
  std::vector<OtocPoint> slice_t(int t) const;
};

// Engine-specific grid builders. Closed-form engines are plus-parity only.
OtocGrid grid_closed1(double z1, int q, const GridWindow& w, int threads = 0);
OtocGrid grid_closed2(double z1, double z2, int q, const GridWindow& w,
                      int threads = 0);
// gate is only needed for parity minus (right boundary); z may come from
// compute_amplitudes or be synthetic.
OtocGrid grid_mcs(const std::vector<double>& z, int q, const Matrix& sigma_alpha,
                  const Matrix& sigma_beta, const GridWindow& w,
                  Parity parity = Parity::plus,
                  const Gate* gate = nullptr, int threads = 0);
OtocGrid grid_brute(const CircuitColumnSpec& spec, const Matrix& sigma_alpha,
                    const Matrix& sigma_beta, const GridWindow& w,
                    Parity parity = Parity::plus,
                    std::size_t max_dim = kDefaultFoldedBudget,
                    int threads = 0);

struct FrontFit {
  double v_b_hat = 0.0, d_hat = 0.0;
  double v_b_se = 0.0, d_se = 0.0;   // from (J^T J)^{-1} * residual variance
  double residual_rms = 0.0;
  double x_half = 0.0;               // interpolated half-height point
  double d_var = 0.0;                // variance-based cross-estimate of D
  double window_c = 3.0;
  int t = 0;
  int points_used = 0;
  bool converged = false;
};

// Least-squares fit of (1/2)(1 + erf((x - v_B t)/sqrt(2 D t))) on the fixed-t
// slice, restricted to |x - x_half| <= window_c sqrt(t); Levenberg-damped
// Gauss-Newton, deterministic. Throws InsufficientDataError below 8 points.
FrontFit fit_front(const OtocGrid& grid, int t, double window_c = 3.0);

struct ScanRow {
  double eps = 0.0;
  double z1 = 0.0, z2 = 0.0;
  double v_b_hat = 0.0, d_hat = 0.0;
  double v_b1 = 0.0, v_b2 = 0.0, d1 = 0.0, d2 = 0.0;
  std::string status;  // "ok", "dual-unitary: no front fit (v_B = 1)", ...
};

struct ScanSettings {
  double J = 0.5;                 // base-gate coupling
  std::uint64_t gate_seed = 11;   // one-site dressings of the base gate
  std::uint64_t w_seed = 7;       // GUE perturbation direction
  int t_fit = 512;
  int k_max = 12;
  double window_c = 3.0;
  int threads = 0;
};
// One row per eps: perturb the base gate, compute amplitudes, evaluate the
// mcs grid at t_fit, fit the front, tabulate against 1- and 2-step analytics.
// A failed row is flagged in status, not fatal.
std::vector<ScanRow> scan_epsilon(const std::vector<double>& eps,
                                  const ScanSettings& s = {});

struct EarlyTimeRow {
  int t = 0;
  double c_plus = 0.0;      // exact Floquet C+(t,t)
  double deviation = 0.0;   // |C+(t,t) + 1/(q^2-1)|
  double t_over_tau = 0.0;
  double tau = 0.0;
};
// Exact light-cone series plus the relaxation timescale of the gate's z1.
// For a dual-unitary gate tau is infinite and t_over_tau is 0.
std::vector<EarlyTimeRow> early_time_report(const Gate& g, int m_max);

// 17-significant-digit formatting (round-trip exact for doubles).
std::string format_g17(double v);

// CSV emitters; deterministic row order, header first.
std::string csv_grid(const OtocGrid& grid);
std::string csv_fit(const FrontFit& fit, const FrontParams& reference);
std::string csv_scan(const std::vector<ScanRow>& rows);
std::string csv_early_time(const std::vector<EarlyTimeRow>& rows);

}  // namespace otoc
