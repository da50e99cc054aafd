#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "esr/bounds_harness.hpp"
#include "esr/cli_support.hpp"
#include "esr/polar_fourier.hpp"
#include "esr/resolvent.hpp"
#include "esr/semigroup.hpp"
#include "esr/spectral_scan.hpp"

using namespace esr;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 0;
};

class Runner {
 public:
  Runner(const Globals& g, const CLI::App& sub) : g_(g) {
    meta_.command = sub.get_name();
    meta_.timestamp = utc_timestamp();
    meta_.config.emplace_back("seed", std::to_string(g.seed));
    meta_.config.emplace_back("threads", std::to_string(g.threads));
    for (const CLI::Option* o : sub.get_options()) {
      if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
      std::string v;
      for (const auto& r : o->reduced_results()) v += (v.empty() ? "" : ",") + r;
      if (o->count() == 0) v = o->get_default_str();
      meta_.config.emplace_back(o->get_lnames()[0], v);
    }
    std::error_code ec;
    std::filesystem::create_directories(g.out_dir, ec);
    if (ec || !std::filesystem::is_directory(g.out_dir))
      throw ValidationError("output directory not writable: " + g.out_dir);
  }

  void csv(const std::string& name, const std::string& body) { write(name, with_csv_header(meta_, body)); }
  void json(const std::string& name, const std::string& body) { write(name, with_json_meta(meta_, body)); }

  ordered_json summary(ordered_json extra = ordered_json::object()) const {
    ordered_json s;
    s["command"] = meta_.command;
    s["files"] = files_;
    for (auto& [k, v] : extra.items()) s[k] = v;
    return s;
  }

 private:
  void write(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path(g_.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw ValidationError("cannot write " + path.string());
    files_.push_back(name);
  }

  const Globals& g_;
  RunMeta meta_;
  std::vector<std::string> files_;
};

std::string velocity_csv(const ModeField& v) {
  std::string s = "r,vr_re,vr_im,vtheta_re,vtheta_im\n";
  char buf[160];
  const auto& r = v.vr.grid->nodes();
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r[k], v.vr.values[k].real(),
                  v.vr.values[k].imag(), v.vtheta.values[k].real(), v.vtheta.values[k].imag());
    s += buf;
  }
  return s;
}

int emit_error(const char* kind, const std::string& msg, int code) {
  ordered_json e;
  e["error"] = kind;
  e["message"] = msg;
  e["exit_code"] = code;
  std::cout << e.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior-disk resolvent, spectral scans, semigroup and bound checks"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--out", g.out_dir, "output directory")->envname("ESR_OUTPUT_DIR")->capture_default_str();
  app.add_option("--seed", g.seed, "seed of every random draw")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber)->capture_default_str();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "one resolvent query");
  double s_beta = 0.1;
  std::string s_lambda;
  int s_n = 1;
  std::string s_force = "gaussian:center=3,width=0.5";
  solve_cmd->add_option("--beta", s_beta)->capture_default_str();
  solve_cmd->add_option("--lambda", s_lambda, "complex, e.g. 0.01+0.01i")->required();
  solve_cmd->add_option("--n", s_n)->capture_default_str();
  solve_cmd->add_option("--force", s_force)->capture_default_str();

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "F_n scan over rays of the sector");
  std::string sc_betas = "0.2", sc_rays;
  int sc_ray_count = 9, sc_per_decade = 8, sc_n = 1;
  double sc_eps = pi / 4, sc_lmin = -12.0;
  std::optional<double> sc_lmax;
  scan_cmd->add_option("--beta", sc_betas, "comma separated")->capture_default_str();
  auto* rays_opt = scan_cmd->add_option("--rays", sc_rays, "comma separated arg(lambda); empty for none");
  scan_cmd->add_option("--ray-count", sc_ray_count, "evenly spread rays when --rays is absent")->capture_default_str();
  scan_cmd->add_option("--epsilon", sc_eps)->capture_default_str();
  scan_cmd->add_option("--log10-min", sc_lmin)->capture_default_str();
  scan_cmd->add_option("--log10-max", sc_lmax, "default log10(beta^4)");
  scan_cmd->add_option("--per-decade", sc_per_decade)->capture_default_str();
  scan_cmd->add_option("--n", sc_n)->capture_default_str();

  // resonance
  auto* res_cmd = app.add_subcommand("resonance", "nearly-resonant lambda per beta");
  std::string r_betas = "0.15,0.2,0.3";
  int r_rays = 9, r_per_decade = 2;
  res_cmd->add_option("--beta", r_betas, "comma separated")->capture_default_str();
  res_cmd->add_option("--heat-rays", r_rays)->capture_default_str();
  res_cmd->add_option("--heat-per-decade", r_per_decade)->capture_default_str();

  // evolve
  auto* ev_cmd = app.add_subcommand("evolve", "semigroup applied to one datum");
  double e_beta = 0.0, e_t = 1.0, e_phi = 5.0 * pi / 8.0, e_b = 0.0;
  int e_n = 1;
  std::string e_force = "gaussian:center=3,width=0.5";
  bool e_no_doubling = false;
  ev_cmd->add_option("--beta", e_beta)->capture_default_str();
  ev_cmd->add_option("--t", e_t)->capture_default_str();
  ev_cmd->add_option("--n", e_n)->capture_default_str();
  ev_cmd->add_option("--force", e_force)->capture_default_str();
  ev_cmd->add_option("--phi", e_phi, "contour ray angle")->capture_default_str();
  ev_cmd->add_option("--arc", e_b, "contour arc radius; 0 for the default")->capture_default_str();
  ev_cmd->add_flag("--no-doubling", e_no_doubling, "skip the node-doubling check");

  // decay-fit
  auto* df_cmd = app.add_subcommand("decay-fit", "fit L2 and gradient decay slopes");
  double d_beta = 0.0, d_q = 2.0;
  std::string d_ts = "10,31.6227766,100,316.227766,1000", d_force;
  df_cmd->add_option("--beta", d_beta)->capture_default_str();
  df_cmd->add_option("--q", d_q)->capture_default_str();
  df_cmd->add_option("--t", d_ts, "comma separated times")->capture_default_str();
  df_cmd->add_option("--force", d_force, "default powerlaw:q=<q>,rfar=3000");

  // verify-bounds
  auto* vb_cmd = app.add_subcommand("verify-bounds", "Bessel-integral, energy and beta-audit checks");
  std::string b_family = "all";
  int b_samples = 40, b_energy = 100;
  bool b_audit = false;
  vb_cmd->add_option("--family", b_family)->check(CLI::IsMember({"all", "B2", "B3", "B4", "energy"}))->capture_default_str();
  vb_cmd->add_option("--samples", b_samples, "samples per estimate")->check(CLI::PositiveNumber)->capture_default_str();
  vb_cmd->add_option("--energy-samples", b_energy)->check(CLI::PositiveNumber)->capture_default_str();
  vb_cmd->add_flag("--audit", b_audit, "run the beta-singularity audit");

  // verify-theta
  auto* vt_cmd = app.add_subcommand("verify-theta", "bounds of Theta(T)");
  std::string t_values = "10";
  vt_cmd->add_option("--T", t_values, "comma separated, each > e")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("validation", e.what(), 2);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Runner run(g, *sub);
    ordered_json extra = ordered_json::object();
    int status = 0;

    if (sub == solve_cmd) {
      const ModeSolution s = solve(make_query(parse_complex(s_lambda), s_beta, s_n), parse_force(s_force, s_n));
      run.json("solve.json", to_json(s));
      extra["residual_ode"] = s.residuals.ode;
      extra["residual_div"] = s.residuals.div;
      extra["residual_trace"] = s.residuals.trace;
    } else if (sub == scan_cmd) {
      ScanSpec spec;
      spec.betas = parse_list(sc_betas);
      spec.sector_epsilon = sc_eps;
      spec.log10_min = sc_lmin;
      spec.log10_max = sc_lmax;
      spec.points_per_decade = sc_per_decade;
      spec.n = sc_n;
      spec.threads = g.threads;
      if (sc_ray_count < 0) throw ValidationError("scan: negative ray count");
      spec.rays = rays_opt->count() ? parse_list(sc_rays) : sector_rays(sc_ray_count, sc_eps);
      const ScanReport r = scan_fn(spec);
      run.csv("scan.csv", scan_csv(r));
      extra["rows"] = r.rows.size();
      extra["c0"] = r.c0;
      extra["zero_flags"] = r.zero_flags;
    } else if (sub == res_cmd) {
      const auto s = resonance_report(parse_list(r_betas), 1, g.threads, r_rays, r_per_decade);
      run.json("resonance.json", resonance_json(s));
      extra["exponent"] = s.exponent;
      extra["monotone"] = s.monotone;
    } else if (sub == ev_cmd) {
      ContourSpec c;
      c.phi = e_phi;
      c.b = e_b;
      EvolveOptions o;
      o.check_doubling = !e_no_doubling;
      o.threads = g.threads;
      const EvolveResult r = evolve(parse_force(e_force, e_n), e_beta, c, e_t, o);
      ordered_json j;
      j["t"] = r.t;
      j["nodes"] = r.nodes;
      j["l2_norm"] = r.velocity.l2_norm();
      j["grad_norm"] = std::sqrt(grad_energy(r.velocity));
      j["vorticity_l2"] = r.vorticity.l2_norm();
      j["norm_shift"] = r.norm_shift;
      j["field_shift"] = r.field_shift;
      run.json("evolve.json", j.dump());
      run.csv("evolve_velocity.csv", velocity_csv(r.velocity));
      extra["l2_norm"] = j["l2_norm"];
    } else if (sub == df_cmd) {
      const std::string spec = d_force.empty() ? "powerlaw:q=" + std::to_string(d_q) + ",rfar=3000" : d_force;
      EvolveOptions o;
      o.threads = g.threads;
      const DecayFit f = decay_fit(parse_force(spec, 1), d_beta, d_q, parse_list(d_ts), ContourSpec{}, o);
      run.csv("decay.csv", decay_csv(f));
      run.json("decay_fit.json", fit_json(f));
      extra["slope_l2"] = f.slope_l2;
      extra["slope_grad"] = f.slope_grad;
    } else if (sub == vb_cmd) {
      std::vector<BoundCheck> checks;
      for (auto fam : {BesselFamily::B2, BesselFamily::B3, BesselFamily::B4})
        if (b_family == "all" || b_family == to_string(fam)) {
          auto c = check_bessel_integral_bounds(fam, {}, g.seed, b_samples, g.threads);
          checks.insert(checks.end(), c.begin(), c.end());
        }
      if (b_family == "all" || b_family == "energy") {
        EnergySampleSpec es;
        es.count = b_energy;
        es.seed = g.seed;
        auto c = check_energy_ingredients(es, g.threads);
        checks.insert(checks.end(), c.begin(), c.end());
      }
      std::vector<AuditEntry> audit;
      if (b_audit) {
        AuditSpec as;
        as.threads = g.threads;
        audit = beta_audit(as);
      }
      run.json("bounds.json", report_json(g.seed, checks, audit));
      bool held = true;
      for (const auto& c : checks) held = held && c.max_violation_ratio <= 1.0 + 1e-6;
      extra["checks"] = checks.size();
      extra["all_held"] = held;
      if (!held) status = 1;
    } else if (sub == vt_cmd) {
      ordered_json rows = ordered_json::array();
      bool all = true;
      const auto ts = parse_list(t_values);
      for (double T : ts)
        if (!(T > std::exp(1.0)) || !std::isfinite(T)) throw ValidationError("verify-theta: need finite T > e");
      for (double T : ts) {
        const ThetaCheck c = theta_bounds(T);
        rows.push_back({{"T", c.T}, {"theta", c.theta}, {"lower", c.lower}, {"upper", c.upper}, {"holds", c.holds}});
        all = all && c.holds;
      }
      run.json("theta.json", rows.dump());
      extra["pass"] = all;
      if (!all) status = 1;
    }
    std::cout << run.summary(extra).dump() << std::endl;
    return status;
  } catch (const ValidationError& e) {
    return emit_error("validation", e.what(), 2);
  } catch (const NumericalError& e) {
    return emit_error("numerical", e.what(), 3);
  } catch (const std::exception& e) {
    return emit_error("numerical", e.what(), 3);
  }
}
