#include "swipt/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>

#include "swipt/capacity.hpp"
#include "swipt/io.hpp"
#include "swipt/modulation.hpp"
#include "swipt/regions.hpp"
#include "swipt/simkit.hpp"

namespace swipt::cli {

namespace {

using io::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

REBoundary labelled(REBoundary b, const std::string& label) {
  b.scheme += "[" + label + "]";
  return b;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

capacity::MiConfig mi_config(std::uint64_t samples, std::uint64_t seed, unsigned workers,
                             double quad_tol = 1e-10) {
  capacity::MiConfig mc;
  mc.n_samples = samples;
  mc.seed = seed;
  mc.workers = workers;
  mc.quad_tol = quad_tol;
  return mc;
}

std::function<double(double)> adc_cap(const LinkParams& lp, const capacity::MiConfig& mc) {
  return [lp, mc](double rho) {
    const auto eff = capacity::effective_proc_noise(lp.sigma2_rec, lp.sigma2_adc, rho);
    return capacity::cnl_lower_chi2(lp.received_power(), lp.sigma2_a, eff.sigma2_eff, mc).value;
  };
}

LinkParams base(double zeta, double sa2) {
  LinkParams lp;
  lp.h = 1.0;
  lp.p = 100.0;
  lp.zeta = zeta;
  lp.sigma2_a = sa2;
  return lp;
}

std::vector<io::ModulationRow> distance_sweep() {
  constexpr double kPs = 5e-4;
  constexpr double kPi = 2e-4;
  constexpr double kTarget = 1e-5;
  std::vector<io::ModulationRow> rows;
  for (int i = 0; i <= 30; ++i) {
    modulation::LinkBudget lb;
    lb.distance_m = std::pow(10.0, 0.05 * i);
    const LinkParams lp = modulation::link_budget_to_params(lb);
    rows.push_back({lb.distance_m, "separated", modulation::solve_p1(lp, kPs, 0.0, kTarget)});
    rows.push_back({lb.distance_m, "integrated", modulation::solve_p2(lp, kPi, 0.0, kTarget)});
  }
  return rows;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    io::write_atomic(out_path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct LinkOpts {
  LinkParams lp;
  void add(CLI::App* app) {
    lp.p = 100.0;
    app->add_option("--h", lp.h, "channel power gain")->capture_default_str();
    app->add_option("--p", lp.p, "transmit power")->capture_default_str();
    app->add_option("--zeta", lp.zeta, "energy conversion efficiency")->capture_default_str();
    app->add_option("--theta", lp.theta, "channel phase (rad)")->capture_default_str();
    app->add_option("--sa2", lp.sigma2_a, "antenna noise power")->capture_default_str();
    app->add_option("--scov2", lp.sigma2_cov, "conversion noise power")->capture_default_str();
    app->add_option("--srec2", lp.sigma2_rec, "rectifier noise variance")->capture_default_str();
    app->add_option("--sadc2", lp.sigma2_adc, "ADC noise power")->capture_default_str();
  }
};

struct MiOpts {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double quad_tol = 1e-10;
  void add(CLI::App* app) {
    app->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
    app->add_option("--workers", workers, "worker threads")->capture_default_str();
    app->add_option("--quad-tol", quad_tol, "quadrature absolute tolerance")
        ->capture_default_str();
  }
  capacity::MiConfig config() const { return mi_config(samples, seed, workers, quad_tol); }
};

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InfeasibleTarget: return kExitInfeasible;
    case ErrorKind::QuadratureFailure: return kExitNumerical;
    default: return kExitInvalid;
  }
}

std::vector<std::pair<std::string, std::string>> render_figure(const std::string& id,
                                                               const FigureOptions& o) {
  const auto mc = mi_config(o.mi_samples, o.seed, o.workers);
  std::vector<REBoundary> curves;

  if (id == "fig5") {
    LinkParams lp = base(1.0, 1.0);
    curves.push_back(upper_bound_region(lp, o.points));
    for (double scov2 : {1.0, 10.0}) {
      lp.sigma2_cov = scov2;
      const std::string tag = "scov2=" + fmt(scov2);
      curves.push_back(labelled(regions::region_ts(lp, o.points), tag));
      curves.push_back(labelled(regions::region_sps(lp, o.points), tag));
    }
  } else if (id == "fig7") {
    LinkParams lp = base(0.6, 1.0);
    for (double noise : {1.0, 100.0}) {
      lp.sigma2_cov = noise;
      lp.sigma2_rec = 0.0;
      curves.push_back(labelled(regions::region_sps(lp, o.points), "scov2=" + fmt(noise)));
      lp.sigma2_cov = 0.0;
      lp.sigma2_rec = noise * noise;
      const double cap = capacity::cnl_lower_chi2(lp.received_power(), lp.sigma2_a,
                                                  lp.sigma2_rec, mc).value;
      curves.push_back(labelled(regions::region_int_ideal(lp, cap), "srec=" + fmt(noise)));
    }
  } else if (id == "fig8") {
    LinkParams lp = base(0.6, 1.0);
    lp.sigma2_adc = 1.0;
    for (double noise : {1.0, 100.0}) {
      // The separated chain sees the ADC noise as extra processing noise.
      LinkParams sep = lp;
      sep.sigma2_cov = noise + lp.sigma2_adc;
      curves.push_back(labelled(regions::region_sps(sep, o.points), "scov2=" + fmt(noise)));
      LinkParams in = lp;
      in.sigma2_rec = noise * noise;
      curves.push_back(labelled(regions::region_int_adc(in, o.adc_points, adc_cap(in, mc)),
                                "srec=" + fmt(noise)));
    }
  } else if (id == "fig9") {
    LinkParams lp = base(0.6, 1.0);
    lp.sigma2_cov = 10.0;
    constexpr double kPs = 25.0;
    curves.push_back(regions::region_sep_circuit(lp, kPs, o.points));
    curves.push_back(regions::region_ts_circuit(lp, kPs, o.points));
    curves.push_back(regions::region_sps_circuit(lp, kPs, o.points));
  } else if (id == "fig10") {
    LinkParams lp = base(0.6, 0.01);
    lp.sigma2_cov = 1.0;
    lp.sigma2_rec = 100.0;
    const double cap =
        capacity::cnl_lower_chi2(lp.received_power(), lp.sigma2_a, lp.sigma2_rec, mc).value;
    for (auto [ps, pi] : {std::pair{25.0, 10.0}, std::pair{200.0, 80.0}}) {
      curves.push_back(labelled(regions::region_sep_circuit(lp, ps, o.points), "ps=" + fmt(ps)));
      curves.push_back(labelled(regions::region_int_circuit(lp, pi, cap), "pi=" + fmt(pi)));
    }
  } else if (id == "fig11" || id == "fig12") {
    return {{id + ".csv", io::modulation_csv(distance_sweep())}};
  } else {
    throw Error(ErrorKind::InvalidParams, "unknown figure id '" + id + "'");
  }
  return {{id + ".csv", io::boundary_csv(curves)}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SWIPT rate-energy regions, capacity bounds and modulation design"};
  // --h is the channel gain, so help is long-form only.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_config("--config", "", "key-value config file; command-line flags take precedence");
  app.require_subcommand(1);
  bool wall_clock = false;
  app.add_flag("--timestamp", wall_clock, "stamp provenance with the wall clock");

  // region
  auto* region = app.add_subcommand("region", "sample a rate-energy region boundary");
  LinkOpts region_link;
  region_link.add(region);
  MiOpts region_mi;
  region_mi.add(region);
  std::string scheme;
  double ps = 0.0;
  double pi = 0.0;
  int points = 512;
  std::optional<double> cap;
  std::string region_out;
  std::string format = "csv";
  region->add_option("--scheme", scheme, "boundary to sample")
      ->required()
      ->check(CLI::IsMember({"ub", "ts", "sps", "ops-circuit", "ts-circuit", "sps-circuit",
                             "int-ideal", "int-adc", "int-circuit"}));
  region->add_option("--ps", ps, "separated decoder circuit power")->capture_default_str();
  region->add_option("--pi", pi, "integrated decoder circuit power")->capture_default_str();
  region->add_option("--points", points, "boundary samples")->capture_default_str();
  region->add_option("--cap", cap, "IntRx rate in bits (default: chi-square MI estimate)");
  region->add_option("--out", region_out, "output file (default: stdout)");
  region->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "nonlinear channel capacity bounds");
  double hp = 100.0;
  double sa2 = 0.0;
  double srec2 = 0.0;
  bool lower = false;
  std::string cap_out;
  MiOpts cap_mi;
  cap_cmd->add_option("--hp", hp, "received power hP")->capture_default_str();
  cap_cmd->add_option("--sa2", sa2, "antenna noise power")->capture_default_str();
  cap_cmd->add_option("--srec2", srec2, "rectifier noise variance")->capture_default_str();
  cap_cmd->add_flag("--lower", lower, "estimate the chi-square-input lower bound");
  cap_cmd->add_option("--out", cap_out, "output file (default: stdout)");
  cap_mi.add(cap_cmd);

  // solve
  auto* solve = app.add_subcommand("solve", "solve P0, P1, P2 or check the alpha ordering");
  LinkOpts solve_link;
  solve_link.add(solve);
  std::string problem;
  double q = 0.0;
  double solve_ps = 0.0;
  double solve_pi = 0.0;
  double ser_target = 1e-5;
  std::string solve_out;
  solve->add_option("--problem", problem, "p0, p1, p2 or ordering")
      ->required()
      ->check(CLI::IsMember({"p0", "p1", "p2", "ordering"}));
  solve->add_option("--q,--qreq", q, "net energy target")->capture_default_str();
  solve->add_option("--ps", solve_ps, "separated decoder circuit power")->capture_default_str();
  solve->add_option("--pi", solve_pi, "integrated decoder circuit power")->capture_default_str();
  solve->add_option("--ser-target", ser_target, "symbol error rate target")
      ->capture_default_str();
  solve->add_option("--out", solve_out, "output file (default: stdout)");

  // link
  auto* link = app.add_subcommand("link", "convert a distance link budget to link parameters");
  modulation::LinkBudget lb;
  std::optional<double> link_ps;
  std::optional<double> link_pi;
  double link_q = 0.0;
  double link_target = 1e-5;
  std::string link_out;
  link->add_option("--distance", lb.distance_m, "meters, >= 1")->capture_default_str();
  link->add_option("--tx-power", lb.tx_power_w, "watts")->capture_default_str();
  link->add_option("--carrier", lb.carrier_hz, "Hz")->capture_default_str();
  link->add_option("--bandwidth", lb.bandwidth_hz, "Hz")->capture_default_str();
  link->add_option("--antenna-dbm", lb.antenna_noise_dbm, "antenna noise power")
      ->capture_default_str();
  link->add_option("--conv-dbm", lb.conv_noise_dbm, "conversion noise power")
      ->capture_default_str();
  link->add_option("--rec-dbm", lb.rec_noise_dbm, "rectifier noise standard deviation")
      ->capture_default_str();
  link->add_option("--zeta", lb.zeta, "energy conversion efficiency")->capture_default_str();
  link->add_option("--ps", link_ps, "also solve P1 with this circuit power");
  link->add_option("--pi", link_pi, "also solve P2 with this circuit power");
  link->add_option("--qreq", link_q, "net energy target")->capture_default_str();
  link->add_option("--ser-target", link_target, "symbol error rate target")
      ->capture_default_str();
  link->add_option("--out", link_out, "output file (default: stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo receiver and rectifier simulation");
  LinkOpts sim_link;
  sim_link.add(sim);
  std::string mode;
  int m = 4;
  double rho = 0.0;
  simkit::SimConfig cfg;
  simkit::DiodeModel diode;
  std::string signaling = "gaussian";
  std::string sim_out;
  sim->add_option("--mode", mode, "qam, pem or rectifier")
      ->required()
      ->check(CLI::IsMember({"qam", "pem", "rectifier"}));
  sim->add_option("--m", m, "constellation size")->capture_default_str();
  sim->add_option("--rho", rho, "power split ratio (qam)")->capture_default_str();
  sim->add_option("--symbols", cfg.n_symbols, "symbols to simulate")->capture_default_str();
  sim->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  sim->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
  sim->add_option("--is-scale", cfg.is_noise_scale, "importance-sampling noise scale")
      ->capture_default_str();
  sim->add_option("--oversampling", cfg.oversampling, "samples per carrier period")
      ->capture_default_str();
  sim->add_option("--carrier", cfg.carrier_hz, "Hz")->capture_default_str();
  sim->add_option("--bandwidth", cfg.bandwidth_hz, "Hz")->capture_default_str();
  sim->add_option("--order", diode.truncation_order, "diode polynomial order")
      ->capture_default_str();
  sim->add_option("--i-s", diode.i_s, "diode saturation current")->capture_default_str();
  sim->add_option("--gamma", diode.gamma, "diode reciprocal thermal voltage")
      ->capture_default_str();
  sim->add_option("--signaling", signaling, "gaussian or constant (rectifier)")
      ->check(CLI::IsMember({"gaussian", "constant"}));
  sim->add_option("--out", sim_out, "output file (default: stdout)");

  // figure
  auto* figure = app.add_subcommand("figure", "write every curve of a figure as CSV");
  std::string fig_id;
  std::string out_dir = ".";
  FigureOptions fig_opts;
  figure->add_option("id", fig_id, "fig5, fig7, fig8, fig9, fig10, fig11 or fig12")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"}));
  figure->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  figure->add_option("--samples", fig_opts.mi_samples, "MI Monte Carlo samples")
      ->capture_default_str();
  figure->add_option("--seed", fig_opts.seed, "RNG seed")->capture_default_str();
  figure->add_option("--workers", fig_opts.workers, "worker threads")->capture_default_str();
  figure->add_option("--points", fig_opts.points, "boundary samples")->capture_default_str();
  figure->add_option("--adc-points", fig_opts.adc_points, "rho samples for ADC-noise regions")
      ->capture_default_str();

  auto report = [&](std::string_view kind, const std::string& message, int code) {
    err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump()
        << "\n";
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report("InvalidParams", e.what(), kExitInvalid);
  }

  try {
    const auto stamp = io::provenance_timestamp(wall_clock);

    if (*region) {
      const LinkParams& lp = region_link.lp;
      lp.validate();
      const auto mc = region_mi.config();
      auto int_cap = [&](const LinkParams& l) {
        if (cap) return *cap;
        return capacity::cnl_lower_chi2(l.received_power(), l.sigma2_a, l.sigma2_rec, mc).value;
      };
      REBoundary b;
      if (scheme == "ub") {
        b = upper_bound_region(lp, points);
      } else if (scheme == "ts") {
        b = regions::region_ts(lp, points);
      } else if (scheme == "sps") {
        b = regions::region_sps(lp, points);
      } else if (scheme == "ops-circuit") {
        b = regions::region_sep_circuit(lp, ps, points);
      } else if (scheme == "ts-circuit") {
        b = regions::region_ts_circuit(lp, ps, points);
      } else if (scheme == "sps-circuit") {
        b = regions::region_sps_circuit(lp, ps, points);
      } else if (scheme == "int-ideal") {
        b = regions::region_int_ideal(lp, int_cap(lp));
      } else if (scheme == "int-adc") {
        b = cap ? regions::region_int_adc(lp, points, [c = *cap](double) { return c; })
                : regions::region_int_adc(lp, points, adc_cap(lp, mc));
      } else {
        b = regions::region_int_circuit(lp, pi, int_cap(lp));
      }
      if (format == "csv") {
        emit(io::boundary_csv({b}), region_out, out);
      } else {
        json inputs = {{"scheme", scheme}, {"link", io::to_json(lp)}, {"p_s", ps},
                       {"p_i", pi},        {"points", points}};
        if (cap) inputs["cap_bits"] = *cap;
        const bool mi = !cap && scheme.starts_with("int-") ;
        io::Provenance prov{mi ? std::optional(region_mi.seed) : std::nullopt, stamp};
        emit(dump(io::document(inputs, io::to_json(b), prov)), region_out, out);
      }
    } else if (*cap_cmd) {
      require(hp >= 0.0 && sa2 >= 0.0 && srec2 >= 0.0, "capacity: parameters must be >= 0");
      const double sr = std::sqrt(srec2);
      json outputs;
      if (sr > 0.0) {
        const auto opt = capacity::c1_upper_optimized(hp, sr);
        outputs["c1_upper"] = {{"bits", opt.bits},
                               {"beta", opt.params.beta},
                               {"delta", opt.params.delta}};
        if (hp > 0.0) outputs["c1_asymptotic"] = capacity::c1_asymptotic(hp, sr);
      }
      if (sa2 > 0.0) {
        outputs["c2_upper"] = capacity::c2_upper(hp, sa2);
        outputs["c2_asymptotic"] = capacity::c2_asymptotic(hp, sa2);
      }
      if (sr > 0.0 || sa2 > 0.0) outputs["cnl_upper"] = io::to_json(capacity::cnl_upper(hp, sa2, sr));
      if (lower) outputs["cnl_lower_chi2"] = io::to_json(capacity::cnl_lower_chi2(hp, sa2, srec2, cap_mi.config()));
      json inputs = {{"hp", hp}, {"sigma2_a", sa2}, {"sigma2_rec", srec2}, {"lower", lower}};
      if (lower) {
        inputs["samples"] = cap_mi.samples;
        inputs["quad_tol"] = cap_mi.quad_tol;
      }
      io::Provenance prov{lower ? std::optional(cap_mi.seed) : std::nullopt, stamp};
      emit(dump(io::document(inputs, outputs, prov)), cap_out, out);
    } else if (*solve) {
      const LinkParams& lp = solve_link.lp;
      json outputs;
      if (problem == "p0") {
        outputs = io::to_json(regions::solve_p0(lp, solve_ps, q));
      } else if (problem == "p1") {
        outputs = io::to_json(modulation::solve_p1(lp, solve_ps, q, ser_target));
      } else if (problem == "p2") {
        outputs = io::to_json(modulation::solve_p2(lp, solve_pi, q, ser_target));
      } else {
        const auto rep = modulation::check_alpha_ordering(lp, solve_ps, solve_pi, q, ser_target);
        outputs = {{"separated", io::to_json(rep.separated)},
                   {"integrated", io::to_json(rep.integrated)},
                   {"alpha_ordered", rep.alpha_ordered},
                   {"rate_implication", rep.rate_implication}};
      }
      json inputs = {{"problem", problem}, {"link", io::to_json(lp)}, {"q", q},
                     {"p_s", solve_ps},    {"p_i", solve_pi},       {"ser_target", ser_target}};
      emit(dump(io::document(inputs, outputs, {std::nullopt, stamp})), solve_out, out);
    } else if (*link) {
      const LinkParams lp = modulation::link_budget_to_params(lb);
      json outputs = {{"link", io::to_json(lp)},
                      {"received_power_w", lp.received_power()},
                      {"received_power_dbm", lp.received_power() > 0.0
                                                 ? json(watts_to_dbm(lp.received_power()))
                                                 : json(nullptr)}};
      if (link_ps) outputs["separated"] = io::to_json(modulation::solve_p1(lp, *link_ps, link_q, link_target));
      if (link_pi) outputs["integrated"] = io::to_json(modulation::solve_p2(lp, *link_pi, link_q, link_target));
      json inputs = {{"distance_m", lb.distance_m},
                     {"tx_power_w", lb.tx_power_w},
                     {"carrier_hz", lb.carrier_hz},
                     {"bandwidth_hz", lb.bandwidth_hz},
                     {"antenna_noise_dbm", lb.antenna_noise_dbm},
                     {"conv_noise_dbm", lb.conv_noise_dbm},
                     {"rec_noise_dbm", lb.rec_noise_dbm},
                     {"zeta", lb.zeta}};
      emit(dump(io::document(inputs, outputs, {std::nullopt, stamp})), link_out, out);
    } else if (*sim) {
      const LinkParams& lp = sim_link.lp;
      cfg.signaling = signaling == "constant" ? simkit::Signaling::Constant
                                              : simkit::Signaling::Gaussian;
      json outputs;
      json inputs = {{"mode", mode}, {"link", io::to_json(lp)}, {"n_symbols", cfg.n_symbols},
                     {"is_noise_scale", cfg.is_noise_scale}};
      if (mode == "qam") {
        inputs["m"] = m;
        inputs["rho"] = rho;
        outputs = io::to_json(simkit::simulate_qam_separated(lp, rho, m, cfg));
      } else if (mode == "pem") {
        inputs["m"] = m;
        outputs = io::to_json(simkit::simulate_pem_integrated(lp, m, cfg));
      } else {
        inputs["oversampling"] = cfg.oversampling;
        inputs["carrier_hz"] = cfg.carrier_hz;
        inputs["bandwidth_hz"] = cfg.bandwidth_hz;
        inputs["diode"] = {{"i_s", diode.i_s},
                           {"gamma", diode.gamma},
                           {"truncation_order", diode.truncation_order}};
        inputs["signaling"] = signaling;
        outputs = io::to_json(simkit::simulate_rectifier_waveform(lp, diode, cfg));
      }
      emit(dump(io::document(inputs, outputs, {cfg.seed, stamp})), sim_out, out);
    } else if (*figure) {
      for (const auto& [name, text] : render_figure(fig_id, fig_opts)) {
        const auto path = std::filesystem::path(out_dir) / name;
        io::write_atomic(path, text);
        out << path.string() << "\n";
      }
    }
  } catch (const Error& e) {
    return report(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return report("InternalError", e.what(), kExitNumerical);
  }
  return kExitOk;
}

}  // namespace swipt::cli
