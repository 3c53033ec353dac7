#include "otoc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace otoc {

Engine engine_from_string(const std::string& s) {
  if (s == "brute") return Engine::brute;
  if (s == "mcs") return Engine::mcs;
  if (s == "closed1") return Engine::closed1;
  if (s == "closed2") return Engine::closed2;
  throw ParseError("unknown engine '" + s +
                   "' (expected brute|mcs|closed1|closed2)");
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::brute: return "brute";
    case Engine::mcs: return "mcs";
    case Engine::closed1: return "closed1";
    case Engine::closed2: return "closed2";
  }
  return "?";
}

std::string to_string(Parity p) {
  return p == Parity::plus ? "plus" : "minus";
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body, int threads) {
  if (count == 0) return;
  std::size_t n = threads > 0 ? std::size_t(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, count);
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  // Contiguous index shards; results land in preallocated slots, so the
  // outcome is independent of scheduling.
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = count * k / n;
    const std::size_t hi = count * (k + 1) / n;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

GridWindow parse_grid_window(const std::string& text) {
  GridWindow w;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d:%d,%d:%d%c", &w.x0, &w.x1, &w.t0, &w.t1,
                  &tail) != 4)
    throw ParseError("grid window must be x0:x1,t0:t1, got '" + text + "'");
  if (w.x1 < w.x0 || w.t1 < w.t0)
    throw ParseError("grid window bounds must be non-decreasing");
  return w;
}

void OtocGrid::validate(double tol) const {
  const double lo = -1.0 / (double(q) * q - 1.0) - tol;
  const double hi = 1.0 + tol;
  for (const OtocPoint& p : points) {
    const bool even = ((p.t - p.x) & 1) == 0;
    if (even != (parity == Parity::plus))
      throw DomainError("OtocGrid: point parity does not match tag");
    if (!(p.value >= lo && p.value <= hi))
      throw DomainError("OtocGrid: value " + std::to_string(p.value) +
                        " at (x=" + std::to_string(p.x) +
                        ",t=" + std::to_string(p.t) + ") outside bounds");
  }
}

std::vector<OtocPoint> OtocGrid::slice_t(int t) const {
  std::vector<OtocPoint> out;
  for (const OtocPoint& p : points)
    if (p.t == t) out.push_back(p);
  return out;
}

namespace {

// Lattice points of the window with the requested (t-x) parity, sorted by
// (t, x). Points require x >= 0 and t >= 1.
std::vector<OtocPoint> lattice_points(const GridWindow& w, Parity parity) {
  std::vector<OtocPoint> pts;
  for (int t = std::max(1, w.t0); t <= w.t1; ++t)
    for (int x = std::max(0, w.x0); x <= w.x1; ++x) {
      const bool even = ((t - x) & 1) == 0;
      if (even != (parity == Parity::plus)) continue;
      pts.push_back({x, t, 0.0});
    }
  return pts;
}

}  // namespace

OtocGrid grid_closed1(double z1, int q, const GridWindow& w, int threads) {
  OtocGrid g;
  g.parity = Parity::plus;
  g.engine = Engine::closed1;
  g.q = q;
  g.points = lattice_points(w, Parity::plus);
  parallel_for(
      g.points.size(),
      [&](std::size_t i) {
        OtocPoint& p = g.points[i];
        if (p.x > p.t) {
          p.value = 1.0;  // outside the light cone operators commute
          return;
        }
        const LightconeCoords c = to_lightcone(p.x, p.t);
        p.value = otoc_1step(z1, q, c.n, c.m);
      },
      threads);
  g.validate();
  return g;
}

OtocGrid grid_closed2(double z1, double z2, int q, const GridWindow& w,
                      int threads) {
  OtocGrid g;
  g.parity = Parity::plus;
  g.engine = Engine::closed2;
  g.q = q;
  g.points = lattice_points(w, Parity::plus);
  parallel_for(
      g.points.size(),
      [&](std::size_t i) {
        OtocPoint& p = g.points[i];
        if (p.x > p.t) {
          p.value = 1.0;
          return;
        }
        const LightconeCoords c = to_lightcone(p.x, p.t);
        p.value = otoc_2step(z1, z2, q, c.n, c.m);
      },
      threads);
  g.validate();
  return g;
}

OtocGrid grid_mcs(const std::vector<double>& z, int q,
                  const Matrix& sigma_alpha, const Matrix& sigma_beta,
                  const GridWindow& w, Parity parity, const Gate* gate,
                  int threads) {
  OtocGrid g;
  g.parity = parity;
  g.engine = Engine::mcs;
  g.q = q;
  g.points = lattice_points(w, parity);

  // Group points by n; within a group one sweep of T-applications serves all
  // m values in ascending order.
  std::map<int, std::vector<std::size_t>> by_n;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    OtocPoint& p = g.points[i];
    if (p.x > p.t) {
      p.value = 1.0;
      continue;
    }
    by_n[to_lightcone(p.x, p.t).n].push_back(i);
  }
  std::vector<std::pair<int, std::vector<std::size_t>>> groups(by_n.begin(),
                                                               by_n.end());
  parallel_for(
      groups.size(),
      [&](std::size_t gi) {
        const int n = groups[gi].first;
        std::vector<std::size_t>& idx = groups[gi].second;
        const McsTransferMatrix t = projected_transfer(z, n, q);
        const McsBoundary b =
            gate ? boundaries(n, q, sigma_alpha, sigma_beta, *gate)
                 : boundaries(n, q, sigma_alpha, sigma_beta);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t c) {
          return g.points[a].t < g.points[c].t ||
                 (g.points[a].t == g.points[c].t &&
                  g.points[a].x < g.points[c].x);
        });
        Eigen::VectorXd v;
        int done = 0;
        if (parity == Parity::plus) {
          v = b.right_plus;
        } else {
          if (!b.right_minus)
            throw DomainError("grid_mcs: minus parity needs the gate");
          v = *b.right_minus;
        }
        for (std::size_t i : idx) {
          const LightconeCoords c = to_lightcone(g.points[i].x, g.points[i].t);
          const int target = parity == Parity::plus ? c.m : c.m - 1;
          while (done < target) {
            v = t.m * v;
            ++done;
          }
          g.points[i].value = b.left.dot(v);
        }
      },
      threads);
  g.validate();
  return g;
}

OtocGrid grid_brute(const CircuitColumnSpec& spec, const Matrix& sigma_alpha,
                    const Matrix& sigma_beta, const GridWindow& w,
                    Parity parity, std::size_t max_dim, int threads) {
  OtocGrid g;
  g.parity = parity;
  g.engine = Engine::brute;
  g.q = spec.column_gate(1).q;
  g.points = lattice_points(w, parity);
  parallel_for(
      g.points.size(),
      [&](std::size_t i) {
        OtocPoint& p = g.points[i];
        if (p.x > p.t) {
          p.value = 1.0;
          return;
        }
        const LightconeCoords c = to_lightcone(p.x, p.t);
        p.value = otoc_exact(spec, sigma_alpha, sigma_beta, c.n, c.m,
                             c.parity, max_dim);
      },
      threads);
  g.validate();
  return g;
}

namespace {

// First upward crossing of `level` along x; linear interpolation.
double crossing_x(const std::vector<OtocPoint>& pts, double level) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].value, b = pts[i + 1].value;
    if (a < level && b >= level) {
      const double f = (level - a) / (b - a);
      return pts[i].x + f * (pts[i + 1].x - pts[i].x);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FrontFit fit_front(const OtocGrid& grid, int t, double window_c) {
  std::vector<OtocPoint> slice = grid.slice_t(t);
  std::sort(slice.begin(), slice.end(),
            [](const OtocPoint& a, const OtocPoint& b) { return a.x < b.x; });
  if (slice.size() < 3)
    throw InsufficientDataError("fit_front: slice at t = " + std::to_string(t) +
                                " has too few points");
  const double x_half = crossing_x(slice, 0.5);
  if (!std::isfinite(x_half))
    throw InsufficientDataError("fit_front: no half-height crossing at t = " +
                                std::to_string(t));
  const double half_width = window_c * std::sqrt(double(t));
  std::vector<OtocPoint> win;
  for (const OtocPoint& p : slice)
    if (std::abs(p.x - x_half) <= half_width) win.push_back(p);
  if (win.size() < 8)
    throw InsufficientDataError("fit_front: only " +
                                std::to_string(win.size()) +
                                " points in the fit window (need 8)");

  FrontFit fit;
  fit.t = t;
  fit.window_c = window_c;
  fit.x_half = x_half;
  fit.points_used = int(win.size());

  // Initial guesses: center from the half-height point, width from the
  // 16th/84th percentile crossings (one erf sigma each side).
  double v = x_half / t;
  const double x16 = crossing_x(slice, 0.158655);
  const double x84 = crossing_x(slice, 0.841345);
  double d = 0.0;
  if (std::isfinite(x16) && std::isfinite(x84) && x84 > x16) {
    const double s = 0.5 * (x84 - x16);
    d = s * s / (2.0 * t);
  }
  d = std::max(d, 1e-4);

  const int nw = int(win.size());
  auto cost_of = [&](double vv, double dd, Eigen::VectorXd* r) {
    double c = 0.0;
    for (int i = 0; i < nw; ++i) {
      const double res = win[std::size_t(i)].value -
                         erf_front(win[std::size_t(i)].x, t, vv, dd);
      if (r) (*r)(i) = res;
      c += res * res;
    }
    return c;
  };

  Eigen::VectorXd r(nw);
  double cost = cost_of(v, d, &r);
  double lambda = 1e-3;
  bool converged = false;
  Eigen::MatrixXd j(nw, 2);
  for (int it = 0; it < 200; ++it) {
    for (int i = 0; i < nw; ++i) {
      const double u =
          (win[std::size_t(i)].x - v * t) / std::sqrt(2.0 * d * t);
      const double dmdu = std::exp(-u * u) / std::sqrt(M_PI);
      // residual = y - model, so J = -d(model)/d(theta)
      j(i, 0) = dmdu * std::sqrt(t / (2.0 * d));  // -d/dv
      j(i, 1) = dmdu * u / (2.0 * d);             // -d/dD
    }
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd jtr = -j.transpose() * r;
    Eigen::MatrixXd a = jtj;
    a(0, 0) += lambda * jtj(0, 0);
    a(1, 1) += lambda * jtj(1, 1);
    const Eigen::VectorXd step = a.ldlt().solve(jtr);
    if (!step.allFinite()) break;
    const double v2 = v + step(0);
    const double d2 = d + step(1);
    if (d2 <= 1e-10) {
      lambda *= 10.0;
      if (lambda > 1e12) break;
      continue;
    }
    Eigen::VectorXd r2(nw);
    const double cost2 = cost_of(v2, d2, &r2);
    if (cost2 < cost) {
      const double rel = std::abs(cost - cost2) / std::max(cost, 1e-300);
      v = v2;
      d = d2;
      r = r2;
      cost = cost2;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (rel < 1e-14 || step.norm() < 1e-12) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        converged = true;  // stuck at a minimum within damping range
        break;
      }
    }
  }
  fit.v_b_hat = v;
  fit.d_hat = d;
  fit.converged = converged;
  fit.residual_rms = std::sqrt(cost / nw);
  if (nw > 2) {
    const Eigen::MatrixXd cov =
        (j.transpose() * j).inverse() * (cost / (nw - 2));
    fit.v_b_se = std::sqrt(std::max(0.0, cov(0, 0)));
    fit.d_se = std::sqrt(std::max(0.0, cov(1, 1)));
  }

  // Variance-based cross-estimate of D from the discrete front derivative.
  double wsum = 0.0, mean = 0.0;
  std::vector<double> wts(win.size(), 0.0);
  for (std::size_t i = 1; i + 1 < win.size(); ++i) {
    const double wt = std::max(0.0, 0.5 * (win[i + 1].value - win[i - 1].value));
    wts[i] = wt;
    wsum += wt;
    mean += wt * win[i].x;
  }
  if (wsum > 0.0) {
    mean /= wsum;
    double var = 0.0;
    for (std::size_t i = 1; i + 1 < win.size(); ++i)
      var += wts[i] * (win[i].x - mean) * (win[i].x - mean);
    fit.d_var = var / wsum / t;
  }
  return fit;
}

std::vector<ScanRow> scan_epsilon(const std::vector<double>& eps,
                                  const ScanSettings& s) {
  const Gate base = du_gate_q2_random(s.J, s.gate_seed);
  const Matrix w = gue_hermitian(4, s.w_seed);
  const Matrix sigma = pauli(3);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ScanRow> rows(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    ScanRow& row = rows[i];
    row.eps = eps[i];
    try {
      if (!(eps[i] >= 0.0) || !(eps[i] < 1.0))
        throw DomainError("scan_epsilon: eps must be in [0, 1)");
      const Gate g = perturb(base, w, eps[i]);
      const ScatteringAmplitudes amps = compute_amplitudes(g, s.k_max);
      row.z1 = amps.z[0];
      row.z2 = amps.z.size() > 1 ? amps.z[1] : 0.0;
      if (row.z1 <= 1e-12) {
        row.v_b1 = 1.0;
        row.v_b2 = 1.0;
        row.d1 = 0.0;
        row.d2 = 0.0;
        row.v_b_hat = nan;
        row.d_hat = nan;
        row.status = "dual-unitary: no front fit (v_B = 1)";
        continue;
      }
      const FrontParams fp = front_params(row.z1, row.z2, 2);
      row.v_b1 = fp.v_b1;
      row.v_b2 = fp.v_b2;
      row.d1 = fp.d1;
      row.d2 = fp.d2;

      const int t = s.t_fit;
      const double spread_lo = 6.0 * std::sqrt(2.0 * fp.d2 * t);
      const double spread_hi = 6.0 * std::sqrt(2.0 * fp.d1 * t);
      GridWindow win;
      win.x0 = std::max(0, int(std::floor(fp.v_b2 * t - spread_lo)));
      win.x1 = std::min(t, int(std::ceil(fp.v_b1 * t + spread_hi)));
      win.t0 = t;
      win.t1 = t;
      const OtocGrid grid =
          grid_mcs(amps.z, 2, sigma, sigma, win, Parity::plus, nullptr,
                   s.threads);
      // Pipeline-level re-assertion of the amplitude bounds.
      for (std::size_t k = 0; k < amps.z.size(); ++k)
        if (!(amps.z[k] >= -1e-9 &&
              amps.z[k] <= std::pow(1.0 - row.z1, double(k)) + 1e-9))
          throw DomainError("scan_epsilon: z_k bound violated");
      const FrontFit fit = fit_front(grid, t, s.window_c);
      row.v_b_hat = fit.v_b_hat;
      row.d_hat = fit.d_hat;
      row.status = fit.converged ? "ok" : "fit: not converged";
    } catch (const OtocError& e) {
      row.v_b_hat = nan;
      row.d_hat = nan;
      row.status = e.what();
    }
  }
  return rows;
}

std::vector<EarlyTimeRow> early_time_report(const Gate& g, int m_max) {
  if (g.q != 2)
    throw DomainError("early_time_report: implemented for q = 2");
  const Matrix sigma = pauli(3);
  const std::vector<double> series = lightcone_floquet(g, sigma, sigma, m_max);
  const double z1 = compute_amplitudes(g, 1).z[0];
  const double qq = double(g.q) * g.q;
  const bool relaxing = z1 > 1e-12 && z1 < 1.0;
  const double tau = relaxing ? relaxation_timescale(z1)
                              : std::numeric_limits<double>::infinity();
  std::vector<EarlyTimeRow> rows(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    rows[i].t = int(i) + 1;
    rows[i].c_plus = series[i];
    rows[i].deviation = std::abs(series[i] + 1.0 / (qq - 1.0));
    rows[i].tau = tau;
    rows[i].t_over_tau = relaxing ? rows[i].t / tau : 0.0;
  }
  return rows;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_grid(const OtocGrid& grid) {
  std::ostringstream os;
  os << "# engine=" << to_string(grid.engine) << " parity="
     << to_string(grid.parity) << " q=" << grid.q << "\n";
  os << "x,t,value\n";
  for (const OtocPoint& p : grid.points)
    os << p.x << "," << p.t << "," << format_g17(p.value) << "\n";
  return os.str();
}

std::string csv_fit(const FrontFit& fit, const FrontParams& reference) {
  std::ostringstream os;
  os << "t,v_B_hat,D_hat,v_B_se,D_se,residual_rms,points_used,x_half,D_var,"
        "window_c,converged,v_B1,D1,v_B2,D2\n";
  os << fit.t << "," << format_g17(fit.v_b_hat) << "," << format_g17(fit.d_hat)
     << "," << format_g17(fit.v_b_se) << "," << format_g17(fit.d_se) << ","
     << format_g17(fit.residual_rms) << "," << fit.points_used << ","
     << format_g17(fit.x_half) << "," << format_g17(fit.d_var) << ","
     << format_g17(fit.window_c) << "," << (fit.converged ? 1 : 0) << ","
     << format_g17(reference.v_b1) << "," << format_g17(reference.d1) << ","
     << format_g17(reference.v_b2) << "," << format_g17(reference.d2) << "\n";
  return os.str();
}

std::string csv_scan(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "eps,z1,z2,v_B_hat,D_hat,v_B1,v_B2,D1,D2,status\n";
  for (const ScanRow& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << format_g17(r.eps) << "," << format_g17(r.z1) << ","
       << format_g17(r.z2) << "," << format_g17(r.v_b_hat) << ","
       << format_g17(r.d_hat) << "," << format_g17(r.v_b1) << ","
       << format_g17(r.v_b2) << "," << format_g17(r.d1) << ","
       << format_g17(r.d2) << "," << status << "\n";
  }
  return os.str();
}

std::string csv_early_time(const std::vector<EarlyTimeRow>& rows) {
  std::ostringstream os;
  os << "t,C_plus,deviation,t_over_tau,tau\n";
  for (const EarlyTimeRow& r : rows)
    os << r.t << "," << format_g17(r.c_plus) << "," << format_g17(r.deviation)
       << "," << format_g17(r.t_over_tau) << "," << format_g17(r.tau) << "\n";
  return os.str();
}

}  // namespace otoc
