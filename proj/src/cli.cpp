#include "vortexlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>
#include <ostream>

#include "vortexlab/errors.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/parallel.hpp"
#include "vortexlab/planar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/verify.hpp"

namespace vortexlab {

namespace {

struct ParamOptions {
  ModelParams params;
  bool no_theorem_mode = false;

  void add(CLI::App& app) {
    app.add_option("--N", params.N, "gauge-group rank (>= 2)")->capture_default_str();
    app.add_option("--n1", params.n1, "multiplicity of u1")->capture_default_str();
    app.add_option("--n2", params.n2, "multiplicity of u2")->capture_default_str();
    app.add_option("--tau", params.tau, "background scale")->capture_default_str();
    app.add_flag("--no-theorem-mode", no_theorem_mode,
                 "allow non-integer or zero multiplicities");
  }

  ModelParams resolve() const {
    ModelParams p = params;
    p.theorem_mode = !no_theorem_mode;
    p.validate();
    return p;
  }
};

struct RadialOptions {
  double r_min = 1e-4;
  double r_max = 30.0;
  int nodes = 4000;
  double tol = 1e-10;
  int max_iter = 200;

  void add(CLI::App& app) {
    app.add_option("--rmin", r_min, "innermost radius")->capture_default_str();
    app.add_option("--rmax", r_max, "outer radius (>= 20)")->capture_default_str();
    app.add_option("--nodes", nodes, "radial node count (>= 1000)")->capture_default_str();
    app.add_option("--tol", tol, "sup of the cell flux imbalance")->capture_default_str();
    app.add_option("--max-iter", max_iter, "Newton iteration limit")->capture_default_str();
  }

  RadialSolution solve(const ModelParams& p) const {
    if (!(tol > 0.0)) throw InvalidParameter("--tol must be positive");
    const RadialMesh mesh = make_radial_mesh(r_min, r_max, nodes);
    return solve_radial_P(p, coupling_matrix(p), BackgroundField(p), mesh, tol, max_iter);
  }
};

struct PlanarCliOptions {
  double box = 15.0;
  int grid = 512;
  double tol = 1e-8;
  int max_iter = 100;
  std::string init = "zero";
  std::uint64_t seed = PlanarOptions{}.seed;
  std::string boundary = "topological";

  void add(CLI::App& app) {
    app.add_option("--box", box, "half width L of the box [-L, L]^2")->capture_default_str();
    app.add_option("--grid", grid, "points per side (>= 16)")->capture_default_str();
    app.add_option("--tol", tol, "sup of the Euler-Lagrange residual")->capture_default_str();
    app.add_option("--max-iter", max_iter, "outer Newton iteration limit")->capture_default_str();
    app.add_option("--init", init, "initial field: zero or random")
        ->check(CLI::IsMember({"zero", "random"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for --init random")->capture_default_str();
    app.add_option("--boundary", boundary, "box boundary data: topological (u = 0) or zero (w = 0)")
        ->check(CLI::IsMember({"topological", "zero"}))
        ->capture_default_str();
  }

  PlanarOptions options() const {
    PlanarOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.init = init == "random" ? InitialGuess::Random : InitialGuess::Zero;
    o.seed = seed;
    o.functional.boundary =
        boundary == "zero" ? BoundaryCondition::Zero : BoundaryCondition::Topological;
    return o;
  }

  PlanarSolution solve(const ModelParams& p) const {
    return solve_planar(p, PlanarGrid::make(box, grid), options());
  }
};

void print_constants_text(std::ostream& out, const CouplingData& cd, const SpectralConstants& sc) {
  auto line = [&](const char* name, double v) { out << name << " = " << format_real(v) << "\n"; };
  auto mat = [&](const char* name, const Mat2& m) {
    out << name << " = [[" << format_real(m.a11) << ", " << format_real(m.a12) << "], ["
        << format_real(m.a21) << ", " << format_real(m.a22) << "]]\n";
  };
  out << "N = " << cd.N << "\n";
  line("alpha", cd.alpha);
  line("beta", cd.beta);
  line("gamma", cd.gamma);
  mat("A", cd.A);
  mat("L", cd.L);
  mat("R", cd.R);
  mat("B", cd.B);
  mat("M", cd.M);
  line("lambda1", sc.lambda1);
  line("lambda2", sc.lambda2);
  line("lambda0", sc.lambda0);
  line("lambda3", sc.lambda3);
  line("lambda4", sc.lambda4);
  line("lambda", sc.lambda);
  line("m", sc.m);
  line("p", sc.p);
  line("q", sc.q);
}

void emit_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvers and checks for the coupled non-Abelian vortex equations", "vortexlab"};
  app.require_subcommand(1);

  // constants
  CLI::App* constants = app.add_subcommand("constants", "print coupling matrices and spectral constants");
  int constants_N = 2;
  bool constants_json = false;
  constants->add_option("--N", constants_N, "gauge-group rank (>= 2)")->capture_default_str();
  constants->add_flag("--json", constants_json, "emit JSON");

  // solve-radial
  CLI::App* radial = app.add_subcommand("solve-radial", "solve the radial P-system");
  ParamOptions radial_params;
  RadialOptions radial_opts;
  std::string radial_out;
  radial_params.add(*radial);
  radial_opts.add(*radial);
  radial->add_option("--out", radial_out, "CSV output path (default stdout)");

  // solve-profile
  CLI::App* profile = app.add_subcommand("solve-profile", "solve the first-order profile system");
  ProfileParams profile_opts;
  std::string profile_out;
  profile->add_option("--N", profile_opts.N, "gauge-group rank (>= 2)")->capture_default_str();
  profile->add_option("--rmin", profile_opts.r_min, "innermost radius")->capture_default_str();
  profile->add_option("--rmax", profile_opts.r_max, "outer radius (>= 20)")->capture_default_str();
  profile->add_option("--nodes", profile_opts.nodes, "starting node count")->capture_default_str();
  profile->add_option("--tol", profile_opts.tol, "sup of the profile equation residual")
      ->capture_default_str();
  profile->add_option("--max-iter", profile_opts.max_iter, "Newton iteration limit")
      ->capture_default_str();
  profile->add_option("--out", profile_out, "CSV output path (default stdout)");

  // solve-planar
  CLI::App* planar = app.add_subcommand("solve-planar", "minimize the discrete action on a grid");
  ParamOptions planar_params;
  PlanarCliOptions planar_opts;
  std::string planar_out;
  planar_params.add(*planar);
  planar_opts.add(*planar);
  planar->add_option("--out", planar_out, "CSV output path (default stdout)");

  // verify
  CLI::App* verify = app.add_subcommand("verify", "check a solution file and print a report");
  ParamOptions verify_params;
  std::string verify_input;
  std::string verify_out;
  DecayWindow verify_window;
  verify_params.add(*verify);
  verify->add_option("--input", verify_input, "radial or planar solution CSV")->required();
  verify->add_option("--window-a", verify_window.r_a, "decay fit window start")->capture_default_str();
  verify->add_option("--window-b", verify_window.r_b, "decay fit window end")->capture_default_str();
  verify->add_option("--out", verify_out, "JSON report path (default stdout)");

  // report
  CLI::App* report = app.add_subcommand("report", "solve, cross-check and print a full report");
  ParamOptions report_params;
  RadialOptions report_radial;
  std::string report_out;
  std::string report_source = "radial";
  bool report_skip_planar = false;
  bool report_uniqueness = false;
  DecayWindow report_window;
  PlanarCliOptions report_planar;
  report_params.add(*report);
  report->add_option("--rmin", report_radial.r_min, "innermost radius")->capture_default_str();
  report->add_option("--rmax", report_radial.r_max, "outer radius (>= 20)")->capture_default_str();
  report->add_option("--nodes", report_radial.nodes, "radial node count")->capture_default_str();
  report->add_option("--radial-tol", report_radial.tol, "radial tolerance")->capture_default_str();
  report->add_option("--box", report_planar.box, "planar half width")->capture_default_str();
  report->add_option("--grid", report_planar.grid, "planar points per side")->capture_default_str();
  report->add_option("--planar-tol", report_planar.tol, "planar tolerance")->capture_default_str();
  report->add_option("--max-iter", report_planar.max_iter, "planar outer iteration limit")
      ->capture_default_str();
  report->add_option("--source", report_source, "solution for flux, decay and residual: radial or planar")
      ->check(CLI::IsMember({"radial", "planar"}))
      ->capture_default_str();
  report->add_flag("--skip-planar", report_skip_planar, "radial only; no cross validation");
  report->add_flag("--uniqueness", report_uniqueness, "also solve from a random start and compare");
  report->add_option("--window-a", report_window.r_a, "decay fit window start")->capture_default_str();
  report->add_option("--window-b", report_window.r_b, "decay fit window end")->capture_default_str();
  report->add_option("--out", report_out, "JSON report path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidParameter;
  }

  try {
    configure_threads_from_env();

    if (*constants) {
      const CouplingData cd = coupling_matrix(constants_N);
      const SpectralConstants sc = spectral_constants(cd);
      if (constants_json)
        out << constants_to_json(cd, sc);
      else
        print_constants_text(out, cd, sc);
      return kExitOk;
    }

    if (*radial) {
      const ModelParams p = radial_params.resolve();
      const RadialSolution sol = radial_opts.solve(p);
      if (radial_out.empty()) {
        write_radial_csv(out, sol, radial_opts.tol);
      } else {
        write_radial_csv(radial_out, sol, radial_opts.tol);
        err << "solve-radial: " << sol.iterations << " Newton iterations, residual "
            << format_real(sol.final_residual) << ", wrote " << radial_out << "\n";
      }
      return kExitOk;
    }

    if (*profile) {
      const ProfileSet ps = solve_profile_bps(profile_opts);
      if (profile_out.empty()) {
        write_profile_csv(out, ps, profile_opts.N, profile_opts.tol);
      } else {
        write_profile_csv(profile_out, ps, profile_opts.N, profile_opts.tol);
        err << "solve-profile: " << ps.mesh.count() << " nodes, residual "
            << format_real(ode_residual(ps, profile_opts.N)) << ", Q2(r_min) = "
            << format_real(ps.Q2.front()) << ", wrote " << profile_out << "\n";
      }
      return kExitOk;
    }

    if (*planar) {
      const ModelParams p = planar_params.resolve();
      const PlanarSolution sol = planar_opts.solve(p);
      if (planar_out.empty()) {
        write_planar_csv(out, sol, planar_opts.tol);
      } else {
        write_planar_csv(planar_out, sol, planar_opts.tol);
        err << "solve-planar: " << sol.iterations << " Newton steps (" << sol.cg_iterations
            << " CG), residual " << format_real(sol.final_gradient_norm) << ", wrote " << planar_out
            << "\n";
      }
      return kExitOk;
    }

    if (*verify) {
      const CsvMetadata meta = read_csv_metadata(verify_input);
      const std::string kind = meta.text("kind");
      VerificationReport rep;
      if (kind == "radial")
        rep = verify_radial(read_radial_csv(verify_input), verify_window);
      else if (kind == "planar")
        rep = verify_planar(read_planar_csv(verify_input), verify_window);
      else
        throw InvalidParameter("verify accepts radial or planar solution files, got kind=" + kind);
      // Parameters given on the command line must agree with the file.
      const bool given = verify->count("--N") + verify->count("--n1") + verify->count("--n2") +
                             verify->count("--tau") >
                         0;
      if (given) {
        ModelParams expected = verify_params.params;
        expected.theorem_mode = rep.params.theorem_mode;
        if (!(expected == rep.params))
          throw InvalidParameter("command-line parameters do not match the solution file");
      }
      emit_text(report_to_json(rep), verify_out, out);
      return kExitOk;
    }

    if (*report) {
      const ModelParams p = report_params.resolve();
      if (report_source == "planar" && report_skip_planar)
        throw InvalidParameter("--source planar cannot be combined with --skip-planar");
      const RadialSolution rsol = report_radial.solve(p);
      VerificationReport rep;
      if (report_skip_planar) {
        rep = verify_radial(rsol, report_window);
      } else {
        const PlanarSolution psol = report_planar.solve(p);
        rep = report_source == "planar" ? verify_planar(psol, report_window)
                                        : verify_radial(rsol, report_window);
        rep.cross_validation = cross_validate(rsol, psol);
        if (report_uniqueness) {
          PlanarCliOptions random_start = report_planar;
          random_start.init = "random";
          rep.uniqueness.sup_difference = uniqueness_difference(psol, random_start.solve(p));
        }
      }
      ProfileParams pp;
      pp.N = p.N;
      rep.residuals.ode_sup = ode_residual(solve_profile_bps(pp), p.N);
      emit_text(report_to_json(rep), report_out, out);
      return kExitOk;
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidParameter;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << " (iterations " << e.iterations() << ", last residual "
        << format_real(e.last_residual()) << ")\n";
    return kExitNonConvergence;
  } catch (const ExponentOverflow& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoFailure;
  }
  return kExitOk;
}

}  // namespace vortexlab
