#pragma once

// Command-line front end: solve / eigen / radial / flow / cheeger / check /
// sweep / reproduce / replay, each writing CSV and JSON artifacts plus a run
// manifest.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/dirichlet.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/fields.hpp"
#include "plap/flow.hpp"
#include "plap/geometry.hpp"
#include "plap/io.hpp"
#include "plap/radial.hpp"
#include "plap/viscosity.hpp"

namespace plap::cli {

inline constexpr const char* version = "1.0.0";

using nlohmann::json;

namespace detail {

struct Context {
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> artifacts;
  json inputs = json::array();

  void input(const std::string& path) {
    inputs.push_back({{"path", path}, {"sha256", io::sha256_hex(io::read_file(path))}});
  }
  void artifact(const std::string& path) { artifacts.push_back(path); }
};

inline std::vector<double> parse_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

inline Boundary parse_bc(const std::string& s) { return s == "neumann" ? Boundary::neumann : Boundary::dirichlet; }

inline json sweep_json(const SweepReport& rep, const Domain& d) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json j = {{"p", e.p},           {"root", e.root},         {"raw", e.raw},
              {"target", e.target}, {"relativeGap", e.relative_gap}, {"iterations", e.iterations},
              {"residual", e.residual}};
    if (!e.error.empty()) j["error"] = e.error;
    entries.push_back(j);
  }
  return {{"problem", to_string(rep.problem)}, {"domain", io::domain_to_json(d)}, {"entries", entries}};
}

inline EigenConfig eigen_config(const Context& ctx) {
  EigenConfig c;
  c.seed = ctx.seed;
  return c;
}

inline std::vector<std::vector<double>> profile_rows(const DiagonalProfile& dp) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : dp.samples) rows.push_back({s.t, s.value});
  return rows;
}

// A field CSV, profile CSV and summary for the p = 15 Neumann eigenfunction.
inline json reproduce(const std::string& tag, int n, const std::string& dir, Context& ctx) {
  if (tag != "fig4" && tag != "fig5") throw ConfigError("figure: unknown tag '" + tag + "' (expected fig4 or fig5)");
  std::filesystem::create_directories(dir);
  auto grid = build_grid(Domain::unit_square(), n);
  const EigenResult r = neumann_eigen_first(grid, 15.0, eigen_config(ctx));
  const DiagonalProfile dp = diagonal_profile(r.eigenfunction);
  json summary = {{"figure", tag},       {"p", 15.0},
                  {"grid", n},           {"root", r.root_eigenvalue},
                  {"target", std::sqrt(2.0)}, {"maxDeviationFromLinear", dp.max_deviation}};
  if (tag == "fig4") {
    const std::string field = dir + "/u15_field.csv", side = dir + "/u15_diagonal_side.csv";
    io::write_field_csv(field, r.eigenfunction);
    const Grid& g = *grid;
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < g.size(); ++k)
      if (g.active(k)) {
        const Point x = g.node(k);
        rows.push_back({(x.x + x.y - 1.0) / std::numbers::sqrt2, r.eigenfunction[k]});
      }
    io::write_csv(side, {"s", "value"}, rows);
    ctx.artifact(field);
    ctx.artifact(side);
  } else {
    const std::string prof = dir + "/u15_diagonal_profile.csv";
    io::write_csv(prof, {"t", "normalizedValue"}, profile_rows(dp));
    ctx.artifact(prof);
  }
  const std::string sum = dir + "/" + tag + "_summary.json";
  io::write_json(sum, summary);
  ctx.artifact(sum);
  return summary;
}

}  // namespace detail

/// Runs the tool; returns the process exit code (0 ok, 1 numerical failure, 2
/// configuration error).
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"plap: p-Laplacian eigenvalue, torsion, and limit experiments"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("plap ") + version);
  detail::Context ctx;
  std::string manifest_path = "run_manifest.json";
  app.add_option("--seed", ctx.seed, "seed for the Neumann symmetry-breaking perturbation");
  app.add_option("--threads", ctx.threads, "workers for independent sweep entries")->check(CLI::PositiveNumber);
  app.add_option("--manifest", manifest_path, "run manifest path");

  // solve
  auto* solve = app.add_subcommand("solve", "p-harmonic or p-torsion Dirichlet problem");
  std::string problem = "torsion", domain_file, out_csv, report_file, data = "linear";
  double p = 2.0;
  int grid_n = 64;
  solve->add_option("--problem", problem)->check(CLI::IsMember({"harmonic", "torsion"}));
  solve->add_option("--p", p);
  solve->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  solve->add_option("--grid", grid_n);
  solve->add_option("--out", out_csv)->required();
  solve->add_option("--report", report_file);
  solve->add_option("--data", data, "harmonic boundary data")->check(CLI::IsMember({"linear", "aronsson", "zero"}));

  // eigen
  auto* eigen = app.add_subcommand("eigen", "first Dirichlet or Neumann eigenpair of -Delta_p");
  std::string type = "dirichlet", p_sweep_list, profile_csv;
  bool independent = false;
  eigen->add_option("--type", type)->check(CLI::IsMember({"dirichlet", "neumann"}));
  auto* eig_p = eigen->add_option("--p", p);
  auto* eig_sweep = eigen->add_option("--p-sweep", p_sweep_list, "comma-separated increasing p values");
  eig_p->excludes(eig_sweep);
  eigen->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  eigen->add_option("--grid", grid_n);
  eigen->add_option("--out", out_csv);
  eigen->add_option("--report", report_file);
  eigen->add_option("--profile", profile_csv, "diagonal profile CSV (square domains)");
  eigen->add_flag("--no-continuation", independent, "solve sweep entries independently");

  // radial
  auto* radial = app.add_subcommand("radial", "radial normalized p-Laplacian problems");
  std::string task = "torsion", p_list = "1.5,1.2,1.1";
  int dim = 2, k_index = 1, samples = 201;
  double R = 1.0, rho = 0.5;
  radial->add_option("--task", task)->check(CLI::IsMember({"torsion", "eigen", "gaussian", "plateau"}));
  radial->add_option("--p", p);
  radial->add_option("--n", dim);
  radial->add_option("--R", R);
  radial->add_option("--k", k_index);
  radial->add_option("--rho", rho);
  radial->add_option("--p-list", p_list, "gaussian task: decreasing p values");
  radial->add_option("--samples", samples);
  radial->add_option("--out", out_csv)->required();
  radial->add_option("--report", report_file);

  // flow
  auto* flow = app.add_subcommand("flow", "explicit normalized p-Laplacian flow");
  std::string bc = "dirichlet", init = "eigen", init_file, trace_csv;
  double t_end = 0.5, dt = 0.0;
  flow->add_option("--p", p);
  flow->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  flow->add_option("--grid", grid_n);
  flow->add_option("--bc", bc)->check(CLI::IsMember({"dirichlet", "neumann"}));
  flow->add_option("--tEnd", t_end);
  flow->add_option("--dt", dt, "0 selects the largest stable step");
  flow->add_option("--init", init)->check(CLI::IsMember({"eigen", "bump", "file"}));
  flow->add_option("--init-file", init_file);
  flow->add_option("--trace", trace_csv)->required();
  flow->add_option("--out", out_csv);
  flow->add_option("--report", report_file);

  // cheeger
  auto* cheeger = app.add_subcommand("cheeger", "Cheeger constant and set of a convex domain");
  cheeger->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  cheeger->add_option("--report", report_file)->required();

  // check
  auto* check = app.add_subcommand("check", "residuals of the limit equations and 1-D viscosity checks");
  std::string check_case;
  double lambda = 1.0;
  check->add_option("--case", check_case)
      ->required()
      ->check(CLI::IsMember({"aronsson", "torsion-limit", "eigen-limit-1d", "neumann-limit", "kink", "neumann-bc"}));
  check->add_option("--lambda", lambda);
  check->add_option("--grid", grid_n);
  check->add_option("--p", p, "aronsson case: p of the p-harmonic comparison");
  check->add_option("--report", report_file)->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "limit sweeps over p");
  std::string sweep_problem = "dirichlet";
  sweep->add_option("--problem", sweep_problem)->check(CLI::IsMember({"dirichlet", "neumann", "torsion"}));
  sweep->add_option("--p-list", p_list)->required();
  sweep->add_option("--domain", domain_file)->required()->check(CLI::ExistingFile);
  sweep->add_option("--grid", grid_n);
  sweep->add_option("--report", report_file)->required();
  sweep->add_flag("--no-continuation", independent);

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "canonical p = 15 Neumann figure pipelines");
  std::string figure, out_dir = ".";
  repro->add_option("--figure", figure)->required();
  repro->add_option("--grid", grid_n);
  repro->add_option("--out-dir", out_dir);

  // replay
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  std::string replay_file;
  replay->add_option("manifest", replay_file)->required()->check(CLI::ExistingFile);

  CLI::App* active = nullptr;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    for (auto* s : app.get_subcommands()) err << s->help();
    if (app.get_subcommands().empty()) err << app.help();
    return 2;
  }
  active = app.get_subcommands().front();

  if (active == replay) {
    json m;
    try {
      m = json::parse(io::read_file(replay_file));
    } catch (const std::exception& e) {
      err << "error: manifest: " << e.what() << "\n";
      return 2;
    }
    if (!m.contains("argv") || !m["argv"].is_array()) {
      err << "error: manifest.argv: missing\n";
      return 2;
    }
    std::vector<std::string> args;
    for (const auto& a : m["argv"]) args.push_back(a.get<std::string>());
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    return run(static_cast<int>(cargs.size()), cargs.data(), out, err);
  }

  const auto t0 = std::chrono::steady_clock::now();
  json report;
  int code = 0;
  auto emit_report = [&](const json& j) {
    if (!report_file.empty()) {
      io::write_json(report_file, j);
      ctx.artifact(report_file);
    }
  };
  try {
    if (!domain_file.empty()) ctx.input(domain_file);
    if (active == solve) {
      auto grid = build_grid(io::load_domain(domain_file), grid_n);
      SolverConfig cfg;
      cfg.p = p;
      SolveResult r;
      std::optional<double> gap;
      if (problem == "torsion") {
        auto tg = torsion_infinity_gap(grid, p, cfg);
        gap = tg.sup_gap;
        r = std::move(tg.solve);
      } else {
        auto g = ScalarField::sample(grid, [&](Point x) {
          if (data == "zero") return 0.0;
          if (data == "aronsson") return std::cbrt(x.x * x.x * x.x * x.x) - std::cbrt(x.y * x.y * x.y * x.y);
          return x.x;
        });
        r = solve_p_harmonic(g, cfg);
      }
      io::write_field_csv(out_csv, r.u);
      ctx.artifact(out_csv);
      report = {{"p", r.p},
                {"iterations", r.iterations},
                {"finalEnergy", r.final_energy},
                {"optimalityResidual", r.optimality_residual}};
      if (gap) report["supGap"] = *gap;
    } else if (active == eigen) {
      const Domain d = io::load_domain(domain_file);
      auto grid = build_grid(d, grid_n);
      const Boundary b = detail::parse_bc(type);
      const EigenConfig cfg = detail::eigen_config(ctx);
      const EigenResult* last = nullptr;
      SweepReport rep;
      EigenResult single;
      if (!p_sweep_list.empty()) {
        rep = p_sweep(b, grid, detail::parse_list(p_sweep_list, "p-sweep"), cfg, !independent, ctx.threads);
        report = detail::sweep_json(rep, d);
        for (std::size_t i = rep.results.size(); i-- > 0;)
          if (rep.entries[i].error.empty()) {
            last = &rep.results[i];
            break;
          }
      } else {
        single = plap::detail::solve_eigen(grid, b, p, cfg, nullptr);
        last = &single;
        const double target = limit_target(b, d);
        report = {{"type", type},
                  {"p", p},
                  {"raw", single.raw_eigenvalue},
                  {"root", single.root_eigenvalue},
                  {"target", target},
                  {"relativeGap", std::abs(single.root_eigenvalue - target) / target},
                  {"iterations", single.iterations},
                  {"residual", single.residual}};
      }
      if (last && !out_csv.empty()) {
        io::write_field_csv(out_csv, last->eigenfunction);
        ctx.artifact(out_csv);
      }
      if (last && !profile_csv.empty()) {
        const auto dp = diagonal_profile(last->eigenfunction);
        io::write_csv(profile_csv, {"t", "normalizedValue"}, detail::profile_rows(dp));
        ctx.artifact(profile_csv);
        report["maxDeviationFromLinear"] = dp.max_deviation;
      }
      if (!last) code = 1;
    } else if (active == radial) {
      std::vector<std::vector<double>> rows;
      std::vector<std::string> header = {"r", "value", "residual"};
      if (task == "torsion") {
        const auto prof = normalized_torsion_radial(p, dim, R, samples);
        double sup = 0.0;
        for (std::size_t i = 0; i < prof.r.size(); ++i) {
          rows.push_back({prof.r[i], prof.v[i], prof.residual[i]});
          sup = std::max(sup, std::abs(prof.residual[i]));
        }
        report = {{"task", task}, {"p", p}, {"n", dim}, {"R", R}, {"c", torsion_constant(p, dim)}, {"supResidual", sup}};
      } else if (task == "eigen") {
        const auto s = radial_eigen_shoot(p, dim, R, k_index);
        header = {"r", "value"};
        const std::size_t stride = std::max<std::size_t>(1, s.profile.r.size() / static_cast<std::size_t>(samples));
        for (std::size_t i = 0; i < s.profile.r.size(); i += stride) rows.push_back({s.profile.r[i], s.profile.v[i]});
        if ((s.profile.r.size() - 1) % stride != 0) rows.push_back({s.profile.r.back(), s.profile.v.back()});
        report = {{"task", task}, {"p", p}, {"n", dim}, {"R", R}, {"k", k_index}, {"lambda", s.lambda},
                  {"mismatch", s.mismatch}, {"signChanges", s.sign_changes}};
        out << io::fmt(s.lambda) << "\n";
      } else if (task == "gaussian") {
        const auto cmp = gaussian_limit_p1(dim, R, detail::parse_list(p_list, "p-list"));
        header = {"p", "lambda", "supDistance", "layerWidth", "boundaryRatio"};
        json entries = json::array();
        for (const auto& c : cmp) {
          rows.push_back({c.p, c.lambda, c.sup_distance, c.layer_width, c.boundary_ratio});
          entries.push_back({{"p", c.p}, {"lambda", c.lambda}, {"supDistance", c.sup_distance},
                             {"layerWidth", c.layer_width}, {"boundaryRatio", c.boundary_ratio}});
        }
        report = {{"task", task}, {"n", dim}, {"R", R}, {"entries", entries}};
      } else {
        const auto pl = plateau_family(p, dim, R, rho, samples);
        for (std::size_t i = 0; i < pl.profile.r.size(); ++i)
          rows.push_back({pl.profile.r[i], pl.profile.v[i], pl.profile.residual[i]});
        report = {{"task", task}, {"p", p}, {"n", dim}, {"R", R}, {"rho", rho},
                  {"residualA", pl.residual_a}, {"residualPlateau", pl.residual_plateau}, {"gapToB", pl.gap_to_b}};
      }
      io::write_csv(out_csv, header, rows);
      ctx.artifact(out_csv);
    } else if (active == flow) {
      const Domain d = io::load_domain(domain_file);
      auto grid = build_grid(d, grid_n);
      const Boundary b = detail::parse_bc(bc);
      ScalarField u0;
      if (init == "file") {
        if (init_file.empty()) throw ConfigError("init-file: required with --init file");
        ctx.input(init_file);
        u0 = io::read_field_csv(init_file, grid);
      } else if (init == "bump") {
        const double scale = std::max(inradius(d), 1e-300);
        u0 = ScalarField::sample(grid, [&](Point x) {
          const double t = std::max(distance_to_boundary(d, x), 0.0) / scale;
          return b == Boundary::dirichlet ? t * t * (3.0 - 2.0 * std::min(t, 1.0)) : std::cos(std::numbers::pi * t);
        });
      } else {
        u0 = plap::detail::solve_eigen(grid, b, p, detail::eigen_config(ctx), nullptr).eigenfunction;
      }
      FlowConfig fc;
      fc.p = p;
      fc.dt = dt;
      fc.bc = b;
      fc.t_end = t_end;
      const FlowRun fr = run_flow(u0, fc);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < fr.times.size(); ++i) rows.push_back({fr.times[i], fr.sup_norms[i]});
      io::write_csv(trace_csv, {"t", "supNorm"}, rows);
      ctx.artifact(trace_csv);
      if (!out_csv.empty()) {
        io::write_field_csv(out_csv, fr.final_state);
        ctx.artifact(out_csv);
      }
      report = {{"p", p}, {"dt", fr.dt}, {"delta", fr.delta}, {"bc", bc}, {"snapshots", fr.times.size()}};
      if (b == Boundary::dirichlet) {
        const DecayFit fit = decay_rate(fr);
        report["rate"] = fit.rate;
        report["rSquared"] = fit.r_squared;
        report["fitResidual"] = fit.fit_residual;
      }
    } else if (active == cheeger) {
      const Domain d = io::load_domain(domain_file);
      const CheegerResult c = cheeger_convex(d);
      json inner = nullptr;
      if (c.inner_set) inner = io::domain_to_json(*c.inner_set);
      report = {{"h", c.h},       {"r", c.r},
                {"innerPolygon", inner}, {"area", c.area},
                {"perimeter", c.perimeter}, {"verificationRatio", c.verification_ratio}};
    } else if (active == check) {
      report = {{"case", check_case}};
      auto residual_json = [&](const LimitResidualReport& r) {
        report["equation"] = r.equation;
        report["convention"] = r.convention;
        report["supResidual"] = r.sup_residual;
        report["flaggedCount"] = r.flagged_count;
        report["evaluatedCount"] = r.evaluated_count;
        report["witnesses"] = json::array();
      };
      if (check_case == "aronsson") {
        auto grid = build_grid(Domain::rectangle({0.2, 0.2}, {1.2, 1.2}), grid_n);
        auto f = [](Point x) { return std::cbrt(x.x * x.x * x.x * x.x) - std::cbrt(x.y * x.y * x.y * x.y); };
        const auto a = ScalarField::sample(grid, f);
        const auto dl = infinity_laplacian(a);
        residual_json(LimitResidualReport{"-Delta_inf u = 0", "unnormalized", dl.sup_abs(), dl.flagged_count(),
                                          grid->interior_count() - dl.flagged_count(), {}, {}, 0.0, 0.0});
        SolverConfig cfg;
        cfg.p = p;
        const auto r = solve_p_harmonic(a, cfg);
        double dev = 0.0;
        for (int k = 0; k < grid->size(); ++k)
          if (grid->active(k)) dev = std::max(dev, std::abs(r.u[k] - a[k]));
        report["p"] = p;
        report["supDeviationFromAronsson"] = dev;
      } else if (check_case == "torsion-limit") {
        auto grid = build_grid(Domain::unit_square(), grid_n);
        const Domain& d = grid->domain();
        const auto u = ScalarField::sample(grid, [&](Point x) { return std::max(distance_to_boundary(d, x), 0.0); });
        const auto mask = ridge_mask(*grid, 2.0 * grid->spacing());
        residual_json(residual_limit_torsion(u, -1.0, &mask));
      } else if (check_case == "eigen-limit-1d") {
        auto grid = build_grid(Domain::interval(-1.0, 1.0), grid_n);
        const auto u = ScalarField::sample(grid, [](Point x) { return 1.0 - std::abs(x.x); });
        std::vector<std::uint8_t> kink(static_cast<std::size_t>(grid->size()), 0);
        for (int k = 0; k < grid->size(); ++k)
          if (std::abs(grid->node(k).x) < 0.5 * grid->spacing()) kink[static_cast<std::size_t>(k)] = 1;
        residual_json(residual_limit_eigen(u, lambda, -1.0, &kink));
        report["lambda"] = lambda;
      } else if (check_case == "neumann-limit") {
        auto grid = build_grid(Domain::rectangle({-1.0, -1.0}, {1.0, 1.0}), grid_n);
        const auto u = ScalarField::sample(grid, [](Point x) { return x.x; });
        const auto r = residual_neumann_system(u, lambda);
        residual_json(r);
        json regions = json::array();
        for (const auto& g : r.regions)
          regions.push_back({{"region", g.region}, {"supResidual", g.sup_residual}, {"nodes", g.nodes}});
        report["regions"] = regions;
        report["band"] = r.band;
        report["boundaryEikonal"] = r.boundary_eikonal;
        report["fits"] = r.sup_residual <= 1e-9 && r.boundary_eikonal <= r.band;
        report["lambda"] = lambda;
      } else {
        const ViscosityCheck c = check_case == "kink" ? check_1d_kink(lambda) : check_1d_neumann_bc(lambda);
        json w = json::array();
        for (const auto& t : c.witnesses) w.push_back({{"b", t.b}, {"c", t.c}});
        report["pass"] = c.pass;
        report["witnesses"] = w;
        report["touchingAbove"] = c.touching_above;
        report["touchingBelow"] = c.touching_below;
        report["activeBranch"] = c.active_branch;
        report["lambda"] = lambda;
      }
    } else if (active == sweep) {
      const Domain d = io::load_domain(domain_file);
      auto grid = build_grid(d, grid_n);
      const auto ps = detail::parse_list(p_list, "p-list");
      if (sweep_problem == "torsion") {
        json entries = json::array();
        for (double q : ps) {
          const auto tg = torsion_infinity_gap(grid, q);
          entries.push_back({{"p", q}, {"supGap", tg.sup_gap}, {"iterations", tg.solve.iterations},
                             {"optimalityResidual", tg.solve.optimality_residual}});
        }
        report = {{"problem", "torsion"}, {"domain", io::domain_to_json(d)}, {"entries", entries}};
      } else {
        const auto rep = p_sweep(detail::parse_bc(sweep_problem), grid, ps, detail::eigen_config(ctx), !independent,
                                 ctx.threads);
        report = detail::sweep_json(rep, d);
      }
    } else if (active == repro) {
      report = detail::reproduce(figure, grid_n, out_dir, ctx);
    }
    emit_report(report);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n" << active->help();
    return 2;
  } catch (const NumericalError& e) {
    json diag = {{"error", e.what()}, {"lastResidual", e.last_residual()}, {"iterations", e.iterations()}};
    err << diag.dump(2) << "\n";
    try {
      emit_report(diag);
    } catch (const ConfigError&) {
    }
    code = 1;
  }

  // Manifest: resolved options of the active subcommand (defaults included).
  json config = json::object();
  for (const CLI::Option* o : active->get_options()) {
    if (o->get_name() == "--help" || o->get_name().empty()) continue;
    std::string name = o->get_name();
    while (!name.empty() && name.front() == '-') name.erase(0, 1);
    config[name] = o->count() > 0 ? o->as<std::string>() : o->get_default_str();
  }
  json argv_json = json::array();
  for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = {{"tool", "plap"},
                   {"version", version},
                   {"subcommand", active->get_name()},
                   {"config", config},
                   {"global", {{"seed", ctx.seed}, {"threads", ctx.threads}}},
                   {"argv", argv_json},
                   {"inputs", ctx.inputs},
                   {"artifacts", ctx.artifacts},
                   {"exitCode", code},
                   {"durationSeconds", seconds}};
  try {
    io::write_json(manifest_path, manifest);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}

}  // namespace plap::cli
