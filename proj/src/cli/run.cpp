#include <gsl/gsl_version.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>

#include "tcl/acceptance.hpp"
#include "tcl/cli.hpp"
#include "tcl/cycles.hpp"
#include "tcl/fp.hpp"
#include "tcl/mc.hpp"
#include "tcl/spectrum.hpp"
#include "tcl/steady.hpp"

#ifndef TCL_LAB_VERSION
#define TCL_LAB_VERSION "unknown"
#endif

namespace tcl::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::pair<std::string, std::string>> schemas = {
    {"on_fraction.csv", "t,on_fraction"},
    {"histogram.csv", "t,x,p_up,p_down"},
    {"cycle_counts.csv", "t,n,probability"},
    {"out_times.csv", "t_lo,t_hi,density_below,density_above"},
    {"relaxation.csv", "t,on_fraction,flux_up,flux_down"},
    {"density.csv", "t,x,p_up,p_down"},
    {"steady.csv", "x,p_up,p_down"},
    {"scan.csv", "re,im,det_re,det_im"},
    {"roots.csv", "index,re,im,residual"},
    {"soft_roots.csv", "method,index,re,im,residual"},
    {"toy_roots.csv", "re,im"},
    {"toy_real_roots.csv", "s"},
    {"toy_family.csv", "n,re,im,asymptotic_re,asymptotic_im"},
    {"out_time_law.csv", "t,p_out_alpha,p_out_beta,cdf_alpha,cdf_beta"},
    {"cycle_laws.csv", "t,n,p_index,p_count"},
    {"return_probability.csv", "t,n_sum"},
    {"ld.csv", "omega,S,s_star"},
    {"validate.csv", "criterion,name,measured,relation,target,pass,note"},
};

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& name) : out_(path / name) {
    for (const auto& [file, header] : schemas)
      if (file == name) {
        out_ << header << '\n';
        return;
      }
    throw std::logic_error("no schema for " + name);
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& s) {
    return s.find_first_of(",\"\n") == std::string::npos ? s : quoted(s);
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }
  std::ofstream out_;
};

struct Context {
  const ExperimentConfig& cfg;
  TclParams p;
  std::uint64_t seed;
  fs::path dir;
  bool echo;
  std::vector<std::string> files;
  std::vector<std::pair<std::string, std::string>> scalars;
  int exit_code = 0;

  Csv csv(const std::string& name) {
    files.push_back(name);
    return Csv(dir, name);
  }
  void scalar(const std::string& k, double v) { scalars.emplace_back(k, num(v)); }
  void scalar(const std::string& k, const std::string& v) { scalars.emplace_back(k, v); }
  void say(const std::string& s) const {
    if (echo) std::cout << s << '\n';
  }
};

void need(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Grid1D working_grid(const Context& c) { return Grid1D::aligned(c.p, c.cfg.grid.cells_per_deadband); }

void write_field(Csv& csv, const FieldPair& f) {
  for (int i = 0; i < f.grid.n_cells; ++i) csv.row(f.time, f.grid.center(i), f.up[i], f.down[i]);
}

// ---------------------------------------------------------------------------

void cmd_simulate(Context& c) {
  const auto& m = c.cfg.mc;
  mc::EnsembleOptions o;
  o.snapshot_times = m.snapshots;
  o.record_events = true;
  o.n_threads = m.threads;
  if (m.start == "gaussian") {
    const auto& i = c.cfg.fp.initial;
    o.initial = mc::gaussian_start(i.x0, i.width, i.up_fraction);
  }
  const auto tr = mc::simulate_ensemble(c.p, m.n_devices, m.t_end, m.dt, c.seed, o);

  auto on = c.csv("on_fraction.csv");
  for (std::size_t k = 0; k < tr.times.size(); ++k) on.row(tr.times[k], tr.on_fraction[k]);

  auto hist = c.csv("histogram.csv");
  const auto g = Grid1D::aligned(c.p, m.histogram_cells);
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    auto f = mc::empirical_distribution(tr.snapshots[k], g);
    f.time = tr.snapshot_times[k];
    write_field(hist, f);
  }

  auto counts = c.csv("cycle_counts.csv");
  std::vector<double> stat_times = tr.snapshot_times;
  if (stat_times.empty() || stat_times.back() != m.t_end) stat_times.push_back(m.t_end);
  for (double t : stat_times) {
    const auto fs = mc::flux_statistics(tr, t);
    for (std::size_t n = 0; n < fs.p.size(); ++n) counts.row(t, n, fs.p[n]);
    if (t == m.t_end) {
      c.scalar("mean_omega", fs.mean_omega);
      c.scalar("var_omega", fs.var_omega);
    }
  }

  // Only excursions that started at least the histogram range before the end are complete for sure.
  const double hi = c.cfg.cycles.out_time_max;
  const int bins = c.cfg.cycles.out_time_points - 1;
  auto started_early = [&](const std::vector<double>& d, const std::vector<double>& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (s[i] <= m.t_end - hi) out.push_back(d[i]);
    return out;
  };
  const auto below = started_early(tr.out_below, tr.out_below_start);
  const auto above = started_early(tr.out_above, tr.out_above_start);
  const auto hb = mc::histogram_density(below, 0.0, hi, bins);
  const auto ha = mc::histogram_density(above, 0.0, hi, bins);
  auto out = c.csv("out_times.csv");
  for (int i = 0; i < bins; ++i) out.row(i * hi / bins, (i + 1) * hi / bins, hb[i], ha[i]);

  c.scalar("final_on_fraction", tr.on_fraction.back());
  c.scalar("n_completions", static_cast<double>(tr.completions.size()));
  c.say("simulated " + std::to_string(m.n_devices) + " devices to t = " + num(m.t_end));
}

void cmd_fp_evolve(Context& c) {
  const auto& f = c.cfg.fp;
  const auto g = working_grid(c);
  fp::EvolveOptions o;
  o.dt = f.dt;
  o.n_steps = static_cast<int>(std::lround(f.t_end / f.dt));
  o.output_every = f.output_every;
  o.scheme = f.scheme == "bdf2" ? fp::Scheme::bdf2 : fp::Scheme::backward_euler;
  o.mass_tol = f.mass_tol;
  const auto init = fp::gaussian_initial(g, f.initial.x0, f.initial.width, f.initial.up_fraction);
  const auto ev = c.p.hard ? fp::hard_evolve(c.p, g, init, o) : fp::evolve(fp::build_soft_operator(c.p, g), init, o);

  auto rel = c.csv("relaxation.csv");
  for (std::size_t k = 0; k < ev.t.size(); ++k) rel.row(ev.t[k], ev.on_fraction[k], ev.flux_up[k], ev.flux_down[k]);
  auto dens = c.csv("density.csv");
  for (const auto& fr : ev.frames) write_field(dens, fr);

  const auto osc = fp::measure_relaxation(ev.t, ev.on_fraction, fp::RelaxModel::damped_oscillation, f.fit_start, f.t_end);
  const auto dec = fp::measure_relaxation(ev.t, ev.on_fraction, fp::RelaxModel::pure_decay, f.fit_start, f.t_end);
  c.scalar("fit_oscillation_gamma", osc.gamma);
  c.scalar("fit_oscillation_omega", osc.omega);
  c.scalar("fit_oscillation_residual", osc.residual);
  c.scalar("fit_decay_gamma", dec.gamma);
  c.scalar("fit_decay_residual", dec.residual);
  c.scalar("max_mass_error", ev.max_mass_error);
  c.scalar("max_clip", ev.max_clip);
  c.say("evolved " + std::to_string(o.n_steps) + " steps; damped-oscillation fit " + num(osc.gamma) + " +- " +
        num(osc.omega) + "i");
}

void cmd_steady(Context& c) {
  const auto g = working_grid(c);
  FieldPair field;
  double J = 0.0;
  if (c.p.hard) {
    const auto st = c.p.kappa > 0.0 ? steady::stationary_hard(c.p, g) : steady::stationary_diffusionless_hard(c.p, g);
    field = st.field;
    J = st.J;
  } else {
    field = fp::solve_stationary(fp::build_soft_operator(c.p, g));
    // Up-to-Down switches per unit time: r times the Up mass below x_down.
    double up_to_down = 0.0;
    for (int i = 0; i < g.n_cells; ++i)
      if (g.center(i) < c.p.x_down) up_to_down += field.up[i] * g.dx();
    J = c.p.rate * up_to_down;
  }
  auto out = c.csv("steady.csv");
  for (int i = 0; i < g.n_cells; ++i) out.row(g.center(i), field.up[i], field.down[i]);
  c.scalar("J", J);
  c.scalar("up_mass", field.up_mass());
  c.say("stationary flux J = " + num(J));
}

void cmd_spectrum_hard(Context& c) {
  need(c.p.hard && c.p.kappa > 0.0, "spectrum-hard needs the hard model with kappa > 0");
  const auto hs = spectrum::hard_eigenvalues(c.p, c.cfg.spectrum.hard.region());
  auto scan = c.csv("scan.csv");
  for (int j = 0; j < hs.scan.ny; ++j)
    for (int i = 0; i < hs.scan.nx; ++i) {
      const auto v = hs.scan.value[j * hs.scan.nx + i];
      scan.row(hs.scan.re[i], hs.scan.im[j], v.real(), v.imag());
    }
  auto roots = c.csv("roots.csv");
  for (const auto& e : hs.eigenvalues) roots.row(e.index, e.lambda.real(), e.lambda.imag(), e.residual);
  c.scalar("n_roots", static_cast<double>(hs.eigenvalues.size()));
  c.scalar("window_scale", hs.window_scale);
  c.say("found " + std::to_string(hs.eigenvalues.size()) + " eigenvalues");
}

void cmd_spectrum_soft(Context& c) {
  need(!c.p.hard && c.p.kappa == 0.0, "spectrum-soft needs the soft model with kappa = 0");
  const auto region = c.cfg.spectrum.soft.region();
  const auto poles = spectrum::soft_poles(c.p, region);
  const auto roots = spectrum::zero_diff_roots(c.p, region);
  auto out = c.csv("soft_roots.csv");
  for (const auto& e : poles) out.row(spectrum::to_string(e.method), e.index, e.lambda.real(), e.lambda.imag(), e.residual);
  for (const auto& e : roots) out.row(spectrum::to_string(e.method), e.index, e.lambda.real(), e.lambda.imag(), e.residual);
  double diff = poles.size() == roots.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(poles.size(), roots.size()); ++i)
    diff = std::max(diff, std::abs(poles[i].lambda - roots[i].lambda));
  c.scalar("n_roots", static_cast<double>(poles.size()));
  c.scalar("max_method_difference", diff);
  c.scalar("switching_edge", c.p.rate);
  c.say("found " + std::to_string(poles.size()) + " eigenvalues; methods differ by " + num(diff));
}

void cmd_toy(Context& c) {
  const double t_dc = geometry(c.p).t_dc;
  const auto& s = c.cfg.spectrum;
  const auto ts = spectrum::toy_spectrum(s.toy_rate, t_dc, s.toy.region(), s.toy_family);
  auto roots = c.csv("toy_roots.csv");
  for (auto z : ts.roots) roots.row(z.real(), z.imag());
  auto real = c.csv("toy_real_roots.csv");
  for (double z : ts.real_roots) real.row(z);
  auto fam = c.csv("toy_family.csv");
  for (std::size_t i = 0; i < ts.family.size(); ++i) {
    const auto a = spectrum::toy_asymptotic_root(ts.n[i], ts.r, t_dc);
    fam.row(ts.n[i], ts.family[i].real(), ts.family[i].imag(), a.real(), a.imag());
  }
  c.scalar("r", ts.r);
  c.scalar("t_dc", t_dc);
  c.scalar("r_cr", ts.r_cr);
  c.scalar("r_cr_t_dc", spectrum::toy_critical_product());
  c.scalar("n_real_roots", static_cast<double>(ts.real_roots.size()));
  c.say("r_cr t_dc = " + num(spectrum::toy_critical_product()));
}

void cmd_cycles(Context& c) {
  need(!c.p.hard && c.p.kappa == 0.0, "cycles needs the soft model with kappa = 0");
  const auto& y = c.cfg.cycles;
  const auto g = geometry(c.p);
  auto law = c.csv("out_time_law.csv");
  for (int i = 0; i < y.out_time_points; ++i) {
    const double t = y.out_time_max * i / (y.out_time_points - 1);
    law.row(t, cycles::p_out(t, g.alpha, c.p.rate, c.p.tau), cycles::p_out(t, g.beta, c.p.rate, c.p.tau),
            cycles::p_out_cdf(t, g.alpha, c.p.rate, c.p.tau), cycles::p_out_cdf(t, g.beta, c.p.rate, c.p.tau));
  }
  auto counts = c.csv("cycle_laws.csv");
  auto ret = c.csv("return_probability.csv");
  for (int i = 1; i < y.t_points; ++i) {
    const double t = y.t_max * g.t_dc * i / (y.t_points - 1);
    const auto index = cycles::cycles_given_time(t, c.p, y.n_max);
    const auto count = cycles::cycle_count_law(t, c.p, y.n_max);
    for (int n = 0; n <= y.n_max; ++n) counts.row(t, n, index.p[n], count.p[n]);
    ret.row(t, cycles::return_probability(t, c.p, cycles::ReturnMethod::n_sum));
  }
  c.scalar("t_dc", g.t_dc);
  c.scalar("mean_out_alpha", cycles::out_time_mean(g.alpha, c.p.rate, c.p.tau));
  c.scalar("mean_out_beta", cycles::out_time_mean(g.beta, c.p.rate, c.p.tau));
  c.scalar("mean_cycle", cycles::mean_cycle_time(c.p));
  c.say("mean cycle time " + num(cycles::mean_cycle_time(c.p)));
}

void cmd_ld(Context& c) {
  const int n = c.cfg.cycles.omega_points;
  cycles::CycleTransform ct;
  double omega_min = 0.0, omega_max;
  if (!c.p.hard && c.p.kappa == 0.0) {
    ct = cycles::soft_cycle_transform(c.p);
    omega_max = 1.0 / geometry(c.p).t_dc;
  } else {
    need(c.p.hard && c.p.kappa > 0.0, "ld needs the diffusionless soft model or the hard model with kappa > 0");
    const auto fpl = cycles::hard_first_passage(c.p, working_grid(c), c.cfg.fp.dt, c.cfg.fp.t_end);
    ct = fpl.transform();
    // The measured transform is only known right of s_min, which bounds the reachable slow fluxes.
    omega_min = -1.0 / ct.dlog_g(0.95 * ct.s_min);
    omega_max = 2.0 / ct.mean;
  }
  auto out = c.csv("ld.csv");
  for (int i = 1; i <= n; ++i) {
    const auto pt = cycles::ld_function(omega_min + (omega_max - omega_min) * i / (n + 1), ct);
    out.row(pt.omega, pt.S, pt.s_star);
  }
  c.scalar("mean_cycle", ct.mean);
  c.scalar("mean_omega", 1.0 / ct.mean);
  c.say("large-deviation function on " + std::to_string(n) + " points");
}

void cmd_validate(Context& c) {
  acceptance::SuiteOptions o;
  o.seed = c.seed;
  o.n_threads = c.cfg.mc.threads;
  o.only = c.cfg.validate_criteria;
  int shown = 0;
  o.on_result = [&](const acceptance::CheckResult& r) {
    if (r.criterion != shown && c.echo) {
      std::cout << "== " << r.criterion << ". " << acceptance::criterion_title(r.criterion) << '\n';
      shown = r.criterion;
    }
    c.say("  " + acceptance::format_result(r));
    std::cout.flush();
  };
  const auto results = acceptance::run_suite(o);
  auto out = c.csv("validate.csv");
  int failed = 0;
  for (const auto& r : results) {
    out.row(r.criterion, r.name, r.measured, r.relation, r.target, r.pass ? "pass" : "fail", r.note);
    failed += !r.pass;
  }
  c.scalar("checks", static_cast<double>(results.size()));
  c.scalar("failed", static_cast<double>(failed));
  c.say(std::to_string(results.size()) + " checks, " + std::to_string(failed) + " failed");
  if (failed) c.exit_code = 1;
}

const std::map<std::string, std::function<void(Context&)>>& table() {
  static const std::map<std::string, std::function<void(Context&)>> t = {
      {"simulate", cmd_simulate},         {"fp-evolve", cmd_fp_evolve},
      {"steady", cmd_steady},             {"spectrum-hard", cmd_spectrum_hard},
      {"spectrum-soft", cmd_spectrum_soft}, {"toy", cmd_toy},
      {"cycles", cmd_cycles},             {"ld", cmd_ld},
      {"validate", cmd_validate},
  };
  return t;
}

void write_manifest(const Context& c, const std::string& sub, const std::string& status, const std::string& error) {
  std::ofstream m(c.dir / "manifest.txt");
  m << "subcommand=" << sub << '\n';
  m << "status=" << status << '\n';
  if (!error.empty()) m << "error=" << error << '\n';
  m << "exit_code=" << c.exit_code << '\n';
  m << "config_hash=sha256:" << config_hash(c.cfg) << '\n';
  m << "seed=" << c.seed << '\n';
  m << "tcl_lab_version=" << TCL_LAB_VERSION << '\n';
  m << "compiler=" << __VERSION__ << '\n';
  m << "eigen_version=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
  m << "boost_version=" << BOOST_LIB_VERSION << '\n';
  m << "gsl_version=" << GSL_VERSION << '\n';
  std::string list;
  for (const auto& f : c.files) list += (list.empty() ? "" : ",") + f;
  m << "outputs=" << list << '\n';
  for (const auto& [k, v] : c.scalars) m << k << '=' << v << '\n';
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "fp-evolve", "steady", "spectrum-hard", "spectrum-soft",
                                                 "toy",      "cycles",    "ld",     "validate"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& csv_schemas() { return schemas; }

RunResult run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto it = table().find(subcommand);
  if (it == table().end()) throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
  cfg.validate();

  fs::path base = cfg.output_dir;
  if (const char* env = std::getenv("TCL_LAB_OUT_DIR"); env && *env) base = env;
  if (opt.out_dir) base = *opt.out_dir;

  Context c{cfg, cfg.params, opt.seed.value_or(cfg.mc.seed), base / subcommand, opt.echo, {}, {}, 0};
  fs::create_directories(c.dir);
  {
    std::ofstream(c.dir / "config.yaml") << serialize_config(cfg);
  }
  std::string status = "complete", error;
  try {
    it->second(c);
  } catch (const std::exception& e) {
    status = c.files.empty() ? "failed" : "partial";
    error = e.what();
    c.exit_code = 2;
    if (opt.echo) std::cerr << "tcl-lab " << subcommand << ": " << e.what() << '\n';
  }
  write_manifest(c, subcommand, status, error);
  return {c.exit_code, c.dir, c.files};
}

}  // namespace tcl::cli
