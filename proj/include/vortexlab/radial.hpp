#pragma once

// Radially symmetric solvers: the regularized P-system on a graded 1D mesh, the
// first-order profile system for (f, f_NA, Q1, Q2), and the map between them.

#include <vector>

#include "vortexlab/model.hpp"

namespace vortexlab {

/// Strictly increasing radii: geometric from r_min up to r = 2, uniform beyond.
struct RadialMesh {
  double r_min = 1e-4;
  double r_max = 30.0;
  std::vector<double> nodes;

  std::size_t count() const { return nodes.size(); }
};

/// Radius where the grading switches from geometric to uniform.
inline constexpr double kRadialSwitch = 2.0;

/// Geometric ratio chosen so the spacing is continuous at the switch radius.
/// Requires count >= 1000, 0 < r_min < 2, r_max >= 20.
RadialMesh make_radial_mesh(double r_min, double r_max, int count);

/// First derivative by three-point nonuniform differences; second-order
/// one-sided stencils at the two ends.
std::vector<double> mesh_derivative(const std::vector<double>& r, const std::vector<double>& y);

struct RadialSolution {
  ModelParams params;
  RadialMesh mesh;
  std::vector<double> P1, P2;  ///< regular parts, u = u0 + P
  std::vector<double> u1, u2;
  std::vector<double> E1, E2;  ///< e^{2u} - 1
  int iterations = 0;
  /// Largest cell flux imbalance |F_out - F_in - V (A E)| over the unknowns.
  double final_residual = 0.0;
  bool converged = false;
};

/// Damped Newton for the conservative finite-volume form of
///   (r u')' = r A (e^{2u} - 1),  u = u0 + P,
/// with u(r_max) = 0. The innermost cell extends to the origin, where r P' = 0
/// and the background supplies the point-source flux. Throws NonConvergence after
/// max_iter steps.
RadialSolution solve_radial_P(const ModelParams& params, const CouplingData& cd,
                              const BackgroundField& bg, const RadialMesh& mesh, double tol,
                              int max_iter = 200);

/// Cell flux imbalances of a radial field (two per unknown node, interleaved).
std::vector<double> radial_cell_residual(const CouplingData& cd, const BackgroundField& bg,
                                         const RadialMesh& mesh,
                                         const std::vector<double>& P1,
                                         const std::vector<double>& P2);

struct ProfileSet {
  RadialMesh mesh;
  std::vector<double> f, f_NA, Q1, Q2;
  int iterations = 0;
};

ProfileSet reconstruct_profiles(const RadialSolution& sol, const ModelParams& params);

/// Sup over interior nodes of the four first-order profile equations, with
/// derivatives from central differences.
double ode_residual(const ProfileSet& ps, int N);

struct ProfileParams {
  int N = 2;
  double r_max = 30.0;
  double tol = 1e-6;
  double r_min = 1e-2;
  int nodes = 20000;     ///< starting node count, doubled until ode_residual < tol
  int max_doublings = 3;
  int max_iter = 100;
};

/// Trapezoidal collocation of the profile system solved by damped Newton.
/// Inner data: f = 1 + a r^2, f_NA = 1 - (Q2(0)^2/4) r^2 at r_min; outer data
/// Q1 = Q2 = 1 at r_max. Throws NonConvergence if the tolerance is not reached.
ProfileSet solve_profile_bps(const ProfileParams& pp);

}  // namespace vortexlab
