// Command-line front end for the brickwork-circuit OTOC library.
//
// Subcommands: gate, amplitudes, otoc, fit, scan, early-time. Every run is
// deterministic given its flags and seeds; numeric output is CSV (17
// significant digits) or the library's JSON schemas. A single JSON config
// file (--config) can supply any option, with command-line flags taking
// precedence; sections named after subcommands hold their options.
//
// Exit code 0 only if the requested computation finished AND the library's
// invariant re-assertions passed (grid value bounds, amplitude bounds, fit
// convergence, per-row scan status).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "otoc/amplitudes.hpp"
#include "otoc/analysis.hpp"
#include "otoc/brute_force.hpp"
#include "otoc/errors.hpp"
#include "otoc/gate.hpp"
#include "otoc/mcs.hpp"
#include "otoc/path_integral.hpp"

namespace {

using nlohmann::json;
using namespace otoc;

// ---------------------------------------------------------------------------
// JSON config support: maps a JSON object onto CLI11 options, one section per
// subcommand. Command-line values win over config values (CLI11 default).
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    return dump_app(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    input >> j;
    return items_from(j, "", {});
  }

 private:
  static json dump_app(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames()[0];
      if (opt->get_type_size() != 0) {
        if (opt->count() == 1)
          j[name] = opt->results().at(0);
        else if (opt->count() > 1)
          j[name] = opt->results();
        else if (default_also && !opt->get_default_str().empty())
          j[name] = opt->get_default_str();
      } else if (opt->count() > 0) {
        j[name] = true;
      } else if (default_also) {
        j[name] = false;
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      json s = dump_app(sub, default_also);
      if (!s.empty()) j[sub->get_name()] = std::move(s);
    }
    return j;
  }

  std::vector<CLI::ConfigItem> items_from(
      const json& j, const std::string& name,
      std::vector<std::string> prefix) const {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
      if (!name.empty()) prefix.push_back(name);
      for (auto it = j.cbegin(); it != j.cend(); ++it) {
        auto sub = items_from(*it, it.key(), prefix);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    if (name.empty())
      throw CLI::ConversionError(
          "config: top level must be a JSON object of options");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = std::move(prefix);
    if (j.is_boolean()) {
      item.inputs = {j.get<bool>() ? "true" : "false"};
    } else if (j.is_number()) {
      item.inputs = {j.dump()};  // exact literal, no quotes
    } else if (j.is_string()) {
      item.inputs = {j.get<std::string>()};
    } else if (j.is_array()) {
      for (const auto& e : j)
        item.inputs.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      throw CLI::ConversionError("config: cannot convert key '" + name + "'");
    }
    out.push_back(std::move(item));
    return out;
  }
};

// ---------------------------------------------------------------------------
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << text;
}

Matrix sigma_from_name(const std::string& s) {
  if (s == "X" || s == "x") return pauli(1);
  if (s == "Y" || s == "y") return pauli(2);
  if (s == "Z" || s == "z") return pauli(3);
  throw DomainError("operator must be one of X, Y, Z (got '" + s + "')");
}

Parity parity_from_name(const std::string& s) {
  if (s == "plus" || s == "+") return Parity::plus;
  if (s == "minus" || s == "-") return Parity::minus;
  throw DomainError("parity must be 'plus' or 'minus' (got '" + s + "')");
}

// Common gate source: an explicit JSON file, or the built-in perturbed
// dual-unitary family (J, seed for the one-site dressings; eps, w-seed for
// the fixed GUE direction). eps = 0 keeps the gate dual-unitary.
struct GateSource {
  std::string path;
  double j = 0.5;
  std::uint64_t seed = 11;
  double eps = 0.0;
  std::uint64_t w_seed = 7;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--gate", path, "Gate JSON file; overrides --j/--seed");
    cmd->add_option("--j", j, "Coupling of the generated dual-unitary gate")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Seed of the one-site dressings")
        ->capture_default_str();
    cmd->add_option("--eps", eps, "Perturbation strength (0 = dual-unitary)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--w-seed", w_seed, "Seed of the GUE perturbation direction")
        ->capture_default_str();
  }

  Gate resolve() const {
    if (!path.empty()) return gate_from_json(read_file(path));
    const Gate base = du_gate_q2_random(j, seed);
    if (eps == 0.0) return base;
    return perturb(base, gue_hermitian(4, w_seed), eps);
  }
};

// Re-assert the amplitude bounds at the pipeline level; message on failure.
void assert_amplitude_bounds(const ScatteringAmplitudes& a) {
  const double qq = double(a.q) * a.q;
  const double z1 = a.z.empty() ? 0.0 : a.z[0];
  double prev = 1.0 - 1e-10;
  for (std::size_t k = 0; k < a.B.size(); ++k) {
    if (!(a.B[k] >= 1.0 - 1e-10 && a.B[k] <= qq + 1e-10))
      throw DomainError("B_" + std::to_string(k + 1) + " outside [1, q^2]");
    if (!(a.B[k] >= prev - 1e-10))
      throw DomainError("B_k not nondecreasing at k = " + std::to_string(k + 1));
    prev = a.B[k];
  }
  for (std::size_t k = 0; k < a.z.size(); ++k) {
    if (!(a.z[k] >= -1e-12))
      throw DomainError("z_" + std::to_string(k + 1) + " negative");
    if (!(a.z[k] <= std::pow(1.0 - z1, double(k)) + 1e-9))
      throw DomainError("z_" + std::to_string(k + 1) +
                        " above the geometric bound (1 - z1)^{k-1}");
  }
}

// ---------------------------------------------------------------------------
struct CliState {
  // gate
  GateSource gate_src;
  std::string gate_in, gate_out;
  // amplitudes
  GateSource amp_src;
  int amp_kmax = 12;
  std::string amp_out;
  // otoc
  GateSource otoc_src;
  std::string otoc_engine = "mcs";
  std::string otoc_grid;
  int otoc_n = 0, otoc_m = 0;
  std::string otoc_parity = "plus";
  double otoc_z1 = -1.0, otoc_z2 = -1.0;
  int otoc_q = 2, otoc_kmax = 12, otoc_threads = 0;
  std::string otoc_sa = "Z", otoc_sb = "Z", otoc_out;
  // fit
  GateSource fit_src;
  std::string fit_engine = "mcs";
  double fit_z1 = -1.0, fit_z2 = -1.0;
  int fit_t = 512, fit_kmax = 12, fit_threads = 0;
  double fit_window_c = 3.0;
  std::string fit_grid, fit_out;
  // scan
  std::vector<double> scan_eps;
  ScanSettings scan_settings;
  std::string scan_out;
  // early-time
  GateSource early_src;
  int early_m_max = 0;
  std::string early_out;
};

int run_gate(const CliState& st) {
  const Gate g = st.gate_in.empty() ? st.gate_src.resolve()
                                    : gate_from_json(read_file(st.gate_in));
  const SchmidtSpectrum spec = schmidt_spectrum(g);
  json report = {
      {"q", g.q},
      {"dual_unitary", is_dual_unitary(g)},
      {"e_lin", spec.e_lin},
      {"z1", z1_from_entanglement(spec.e_lin, g.q)},
  };
  std::cerr << report.dump() << "\n";
  write_output(st.gate_out, gate_to_json(g));
  return 0;
}

int run_amplitudes(const CliState& st) {
  const Gate g = st.amp_src.resolve();
  const ScatteringAmplitudes a = compute_amplitudes(g, st.amp_kmax);
  assert_amplitude_bounds(a);
  write_output(st.amp_out, amplitudes_to_json(a));
  return 0;
}

GridWindow resolve_window(const std::string& grid_flag, int n, int m,
                          Parity parity) {
  if (!grid_flag.empty()) return parse_grid_window(grid_flag);
  if (n < 1 || m < 1)
    throw DomainError("need either --grid x0:x1,t0:t1 or --n and --m");
  LightconeCoords c;
  c.n = n;
  c.m = m;
  c.parity = parity;
  const auto [x, t] = to_spacetime(c);
  GridWindow w;
  w.x0 = w.x1 = x;
  w.t0 = w.t1 = t;
  return w;
}

int run_otoc(const CliState& st) {
  const Engine engine = engine_from_string(st.otoc_engine);
  const Parity parity = parity_from_name(st.otoc_parity);
  const Matrix sa = sigma_from_name(st.otoc_sa);
  const Matrix sb = sigma_from_name(st.otoc_sb);
  const GridWindow w =
      resolve_window(st.otoc_grid, st.otoc_n, st.otoc_m, parity);

  const bool have_gate =
      !st.otoc_src.path.empty() || st.otoc_src.eps > 0.0;
  std::optional<Gate> gate;
  std::vector<double> z;
  int q = st.otoc_q;
  if (st.otoc_z1 >= 0.0) {
    z.push_back(st.otoc_z1);
    if (st.otoc_z2 >= 0.0) z.push_back(st.otoc_z2);
  } else if (have_gate || engine == Engine::brute || engine == Engine::mcs) {
    gate = st.otoc_src.resolve();
    q = gate->q;
    if (engine != Engine::brute) {
      const ScatteringAmplitudes a = compute_amplitudes(*gate, st.otoc_kmax);
      assert_amplitude_bounds(a);
      z = a.z;
    }
  }

  if (engine != Engine::mcs && engine != Engine::brute &&
      parity == Parity::minus)
    throw DomainError("closed engines evaluate the plus-parity correlator "
                      "only; use --engine mcs or brute for parity minus");

  OtocGrid grid;
  switch (engine) {
    case Engine::closed1:
      if (z.empty()) throw DomainError("closed1 needs --z1 or a gate");
      grid = grid_closed1(z[0], q, w, st.otoc_threads);
      break;
    case Engine::closed2:
      if (z.size() < 2)
        throw DomainError("closed2 needs --z1 and --z2 (or a gate)");
      grid = grid_closed2(z[0], z[1], q, w, st.otoc_threads);
      break;
    case Engine::mcs: {
      if (z.empty()) throw DomainError("mcs needs --z1[, --z2] or a gate");
      if (parity == Parity::minus && !gate.has_value())
        gate = st.otoc_src.resolve();
      grid = grid_mcs(z, q, sa, sb, w, parity,
                      gate.has_value() ? &*gate : nullptr, st.otoc_threads);
      break;
    }
    case Engine::brute: {
      if (!gate.has_value()) gate = st.otoc_src.resolve();
      grid = grid_brute(CircuitColumnSpec::homogeneous(*gate), sa, sb, w,
                        parity, kDefaultFoldedBudget, st.otoc_threads);
      break;
    }
  }
  grid.validate();
  write_output(st.otoc_out, csv_grid(grid));
  return 0;
}

int run_fit(const CliState& st) {
  const Engine engine = engine_from_string(st.fit_engine);
  if (engine == Engine::brute)
    throw DomainError("fit supports engines mcs, closed1, closed2");
  const Matrix sz = pauli(3);

  std::vector<double> z;
  int q = 2;
  std::optional<Gate> gate;
  if (st.fit_z1 >= 0.0) {
    z.push_back(st.fit_z1);
    if (st.fit_z2 >= 0.0) z.push_back(st.fit_z2);
  } else {
    gate = st.fit_src.resolve();
    q = gate->q;
    const ScatteringAmplitudes a = compute_amplitudes(*gate, st.fit_kmax);
    assert_amplitude_bounds(a);
    z = a.z;
  }
  const double z1 = z.empty() ? 0.0 : z[0];
  const double z2 = z.size() > 1 ? z[1] : 0.0;
  if (z1 <= 1e-12)
    throw DomainError("dual-unitary: no front fit (v_B = 1)");
  const FrontParams fp = front_params(z1, z2, q);

  const int t = st.fit_t;
  GridWindow w;
  if (!st.fit_grid.empty()) {
    w = parse_grid_window(st.fit_grid);
  } else {
    w.x0 = std::max(0, int(fp.v_b2 * t - 6.0 * std::sqrt(2.0 * fp.d2 * t)));
    w.x1 = std::min(t, int(fp.v_b1 * t + 6.0 * std::sqrt(2.0 * fp.d1 * t)) + 1);
    w.t0 = w.t1 = t;
  }

  OtocGrid grid;
  switch (engine) {
    case Engine::closed1:
      grid = grid_closed1(z1, q, w, st.fit_threads);
      break;
    case Engine::closed2:
      grid = grid_closed2(z1, z2, q, w, st.fit_threads);
      break;
    default:
      grid = grid_mcs(z, q, sz, sz, w, Parity::plus, nullptr, st.fit_threads);
      break;
  }
  grid.validate();
  const FrontFit fit = fit_front(grid, t, st.fit_window_c);
  write_output(st.fit_out, csv_fit(fit, fp));
  if (!fit.converged) {
    std::cerr << "fit did not converge (residual RMS "
              << format_g17(fit.residual_rms) << ")\n";
    return 1;
  }
  return 0;
}

int run_scan(const CliState& st) {
  const std::vector<ScanRow> rows = scan_epsilon(st.scan_eps, st.scan_settings);
  write_output(st.scan_out, csv_scan(rows));
  int bad = 0;
  for (const ScanRow& r : rows)
    if (r.status != "ok" && r.status.rfind("dual-unitary", 0) != 0) {
      std::cerr << "eps = " << format_g17(r.eps) << ": " << r.status << "\n";
      ++bad;
    }
  return bad == 0 ? 0 : 1;
}

int run_early_time(const CliState& st) {
  const Gate g = st.early_src.resolve();
  int m_max = st.early_m_max;
  if (m_max <= 0) {
    const double z1 = compute_amplitudes(g, 1).z[0];
    const double tau = relaxation_timescale(z1);
    m_max = std::isfinite(tau) ? std::max(40, int(3.2 * tau) + 10) : 60;
  }
  const std::vector<EarlyTimeRow> rows = early_time_report(g, m_max);
  const double floor = -1.0 / (double(g.q) * g.q - 1.0) - 1e-9;
  for (const EarlyTimeRow& r : rows)
    if (!std::isfinite(r.c_plus) || r.c_plus < floor || r.c_plus > 1.0 + 1e-9)
      throw DomainError("C+(t,t) out of range at t = " + std::to_string(r.t));
  write_output(st.early_out, csv_early_time(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Out-of-time-order correlators in brickwork circuits of perturbed "
      "dual-unitary gates"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (sections per subcommand)");

  CliState st;

  CLI::App* gate = app.add_subcommand(
      "gate", "Generate, validate, and serialize gates as JSON");
  gate->configurable();
  st.gate_src.add_options(gate);
  gate->add_option("--in", st.gate_in,
                   "Validate and re-serialize this gate JSON instead of "
                   "generating one");
  gate->add_option("--out", st.gate_out, "Output path (default stdout)");

  CLI::App* amp = app.add_subcommand(
      "amplitudes", "Scattering amplitudes B_k, z_k of a gate");
  amp->configurable();
  st.amp_src.add_options(amp);
  amp->add_option("--kmax", st.amp_kmax, "Number of amplitudes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  amp->add_option("--out", st.amp_out, "Output path (default stdout)");

  CLI::App* otoc = app.add_subcommand(
      "otoc", "Evaluate the OTOC on a space-time window");
  otoc->configurable();
  st.otoc_src.add_options(otoc);
  otoc->add_option("--engine", st.otoc_engine,
                   "brute | mcs | closed1 | closed2")
      ->capture_default_str();
  otoc->add_option("--grid", st.otoc_grid, "Window x0:x1,t0:t1 (inclusive)");
  otoc->add_option("--n", st.otoc_n, "Light-cone row index (single point)");
  otoc->add_option("--m", st.otoc_m, "Light-cone column index (single point)");
  otoc->add_option("--parity", st.otoc_parity, "plus | minus")
      ->capture_default_str();
  otoc->add_option("--z1", st.otoc_z1, "First amplitude (synthetic dynamics)");
  otoc->add_option("--z2", st.otoc_z2, "Second amplitude");
  otoc->add_option("--q", st.otoc_q, "Local dimension for synthetic dynamics")
      ->capture_default_str();
  otoc->add_option("--kmax", st.otoc_kmax, "Amplitudes kept from a gate")
      ->capture_default_str();
  otoc->add_option("--sigma-alpha", st.otoc_sa, "Spreading operator: X|Y|Z")
      ->capture_default_str();
  otoc->add_option("--sigma-beta", st.otoc_sb, "Probe operator: X|Y|Z")
      ->capture_default_str();
  otoc->add_option("--threads", st.otoc_threads,
                   "Worker threads (0 = hardware)")
      ->capture_default_str();
  otoc->add_option("--out", st.otoc_out, "CSV output path (default stdout)");

  CLI::App* fit = app.add_subcommand(
      "fit", "Fit the diffusive front profile at fixed t");
  fit->configurable();
  st.fit_src.add_options(fit);
  fit->add_option("--engine", st.fit_engine, "mcs | closed1 | closed2")
      ->capture_default_str();
  fit->add_option("--z1", st.fit_z1, "First amplitude (synthetic dynamics)");
  fit->add_option("--z2", st.fit_z2, "Second amplitude");
  fit->add_option("--t", st.fit_t, "Time slice")->capture_default_str();
  fit->add_option("--kmax", st.fit_kmax, "Amplitudes kept from a gate")
      ->capture_default_str();
  fit->add_option("--window-c", st.fit_window_c,
                  "Fit window half-width in units of sqrt(t)")
      ->capture_default_str();
  fit->add_option("--grid", st.fit_grid,
                  "Evaluation window override, x0:x1,t0:t1");
  fit->add_option("--threads", st.fit_threads, "Worker threads")
      ->capture_default_str();
  fit->add_option("--out", st.fit_out, "CSV output path (default stdout)");

  CLI::App* scan = app.add_subcommand(
      "scan", "Front parameters across a perturbation-strength sweep");
  scan->configurable();
  scan->add_option("--eps", st.scan_eps, "Perturbation strengths")
      ->required()
      ->delimiter(',');
  scan->add_option("--j", st.scan_settings.J, "Base-gate coupling")
      ->capture_default_str();
  scan->add_option("--gate-seed", st.scan_settings.gate_seed,
                   "Seed of the one-site dressings")
      ->capture_default_str();
  scan->add_option("--w-seed", st.scan_settings.w_seed,
                   "Seed of the GUE perturbation direction")
      ->capture_default_str();
  scan->add_option("--t-fit", st.scan_settings.t_fit, "Fit time slice")
      ->capture_default_str();
  scan->add_option("--kmax", st.scan_settings.k_max, "Amplitudes per gate")
      ->capture_default_str();
  scan->add_option("--window-c", st.scan_settings.window_c,
                   "Fit window half-width in units of sqrt(t)")
      ->capture_default_str();
  scan->add_option("--threads", st.scan_settings.threads, "Worker threads")
      ->capture_default_str();
  scan->add_option("--out", st.scan_out, "CSV output path (default stdout)");

  CLI::App* early = app.add_subcommand(
      "early-time", "Relaxation of the light-cone correlator C+(t,t)");
  early->configurable();
  st.early_src.add_options(early);
  early->add_option("--m-max", st.early_m_max,
                    "Number of time steps (0 = auto from the relaxation "
                    "timescale)")
      ->capture_default_str();
  early->add_option("--out", st.early_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(gate)) return run_gate(st);
    if (app.got_subcommand(amp)) return run_amplitudes(st);
    if (app.got_subcommand(otoc)) return run_otoc(st);
    if (app.got_subcommand(fit)) return run_fit(st);
    if (app.got_subcommand(scan)) return run_scan(st);
    if (app.got_subcommand(early)) return run_early_time(st);
  } catch (const OtocError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
