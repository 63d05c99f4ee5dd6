#pragma once

// Planar solver: Newton-CG minimization of the discrete functional.

#include <cstdint>
#include <memory>
#include <vector>

#include "vortexlab/errors.hpp"
#include "vortexlab/functional.hpp"

namespace vortexlab {

enum class InitialGuess { Zero, Random };

struct PlanarOptions {
  double tol = 1e-8;  ///< sup of the per-node Euler-Lagrange residual
  int max_iter = 100;
  InitialGuess init = InitialGuess::Zero;
  std::uint64_t seed = 20240607;
  double random_amplitude = 0.5;  ///< random interior values are uniform in [-a, a]
  int max_cg_iter = 20000;
  FunctionalOptions functional;
};

struct PlanarSolution {
  ModelParams params;
  PlanarGrid grid;
  FieldPair w;
  std::vector<double> P1, P2;  ///< P = L w
  std::vector<double> u1, u2;  ///< u0 + P; -inf at a node on the origin
  std::vector<double> E1, E2;  ///< e^{2u} - 1
  bool converged = false;
  int iterations = 0;
  int cg_iterations = 0;
  double final_gradient_norm = 0.0;
  double final_energy = 0.0;
  std::vector<double> energy_history;  ///< energy after each outer step, starting value first
};

/// Thrown when the outer iteration limit is reached; carries the last iterate.
class PlanarNonConvergence : public NonConvergence {
public:
  PlanarNonConvergence(const std::string& what, std::shared_ptr<const PlanarSolution> last)
      : NonConvergence(what, last->iterations, last->final_gradient_norm), last_(std::move(last)) {}
  const PlanarSolution& last_iterate() const { return *last_; }

private:
  std::shared_ptr<const PlanarSolution> last_;
};

PlanarSolution solve_planar(const ModelParams& params, const PlanarGrid& grid,
                            const PlanarOptions& options = {});

/// Derived fields (P, u, E) for given Crout variables.
PlanarSolution make_planar_solution(const ModelParams& params, const PlanarGrid& grid, FieldPair w);

struct RadialSample {
  double r = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

/// u along the positive x-axis at node abscissae. With an even node count the
/// axis lies between two rows and the regular part P is averaged across them.
std::vector<RadialSample> extract_radial_slice(const PlanarSolution& sol);

}  // namespace vortexlab
