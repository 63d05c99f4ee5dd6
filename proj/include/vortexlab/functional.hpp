#pragma once

// Discrete action functional on a uniform planar grid.
//
// Unknowns are the Crout variables (w1, w2) = L^{-1} P at grid nodes. The energy is
//
//   sum over edges   c_grad1 (w1_a - w1_b)^2 + c_grad2 (w2_a - w2_b)^2
// + sum over nodes   h^2 [ e^{2u0_2} (e^{2 s} - 1) + c_exp1 e^{2u0_1} (e^{2 w1} - 1)
//                          + c_psi1 psi1 w1 - c_lin1 w1 + c_psi2 psi2 w2 - 2 w2 ],
//
// with s = a_mix w1 + w2. Edges with at least one interior endpoint and interior
// nodes contribute; boundary node values act as Dirichlet data. The gradient and
// Hessian are exact derivatives of this sum.

#include <cstddef>
#include <vector>

#include "vortexlab/model.hpp"

namespace vortexlab {

/// Uniform grid on [-L, L]^2 with spacing h = 2L/(n-1).
/// With an even node count the origin falls between nodes (origin_offset).
struct PlanarGrid {
  double half_width = 15.0;
  int points_per_side = 512;
  double h = 0.0;
  bool origin_offset = true;

  /// Throws InvalidParameter for half_width <= 0 or fewer than 16 points.
  static PlanarGrid make(double half_width, int points_per_side);

  std::size_t size() const {
    return static_cast<std::size_t>(points_per_side) * static_cast<std::size_t>(points_per_side);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(points_per_side) +
           static_cast<std::size_t>(i);
  }
  double coord(int i) const { return -half_width + i * h; }
  bool is_interior(int i, int j) const {
    return i > 0 && j > 0 && i < points_per_side - 1 && j < points_per_side - 1;
  }
  double cell_area() const { return h * h; }
  std::size_t interior_count() const {
    const auto m = static_cast<std::size_t>(points_per_side - 2);
    return m * m;
  }

  friend bool operator==(const PlanarGrid&, const PlanarGrid&) = default;
};

/// Node values of w1, w2 on a grid, row-major with x fastest.
struct FieldPair {
  std::vector<double> w1;
  std::vector<double> w2;

  static FieldPair zeros(const PlanarGrid& grid) {
    return {std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
  }
};

enum class BoundaryCondition {
  Zero,         ///< w = 0 on the box boundary
  Topological,  ///< u = 0 on the box boundary, i.e. P = -u0 there
};

struct FunctionalOptions {
  double exponent_cap = 300.0;
  BoundaryCondition boundary = BoundaryCondition::Topological;
};

/// Background quantities sampled at grid nodes.
struct SampledBackground {
  std::vector<double> u0_1, u0_2;              ///< -inf at an origin node
  std::vector<double> e2u0_1, e2u0_2;          ///< e^{2 u0}
  std::vector<double> e2u0m1_1, e2u0m1_2;      ///< e^{2 u0} - 1
  std::vector<double> psi1, psi2;
  std::vector<double> phi1, phi2;

  static SampledBackground sample(const PlanarGrid& grid, const BackgroundField& bg);
};

/// Per-node 2x2 Hessian of the potential part, without the h^2 factor.
struct LocalHessian {
  std::vector<double> h11, h12, h22;
};

class DiscreteFunctional {
public:
  DiscreteFunctional(const PlanarGrid& grid, const BackgroundField& bg,
                     const CouplingData& cd, FunctionalOptions options = {});

  const PlanarGrid& grid() const { return grid_; }
  const SampledBackground& background() const { return sampled_; }
  const FunctionalCoefficients& coefficients() const { return fc_; }
  const CouplingData& coupling() const { return cd_; }
  const FunctionalOptions& options() const { return options_; }

  /// Zero interior with the configured Dirichlet data on the boundary.
  FieldPair initial_field() const;
  /// Overwrites boundary nodes of fp with the configured Dirichlet data.
  void apply_boundary(FieldPair& fp) const;

  double energy(const FieldPair& fp) const;
  /// Boundary entries of the result are zero.
  FieldPair gradient(const FieldPair& fp) const;
  /// Hessian at fp applied to direction (boundary entries of direction are ignored).
  FieldPair hessian_apply(const FieldPair& fp, const FieldPair& direction) const;

  /// energy(fp + t d) - energy(fp), evaluated term by term without cancellation.
  double energy_change(const FieldPair& fp, const FieldPair& direction, double t) const;
  /// energy(fp + t d) - energy(fp) - t gradient(fp).d; always >= 0 by convexity.
  double energy_change_remainder(const FieldPair& fp, const FieldPair& direction, double t) const;

  LocalHessian local_hessian(const FieldPair& fp) const;
  void hessian_apply(const LocalHessian& lh, const FieldPair& direction, FieldPair& out) const;
  /// Diagonal of the full Hessian, for Jacobi preconditioning.
  FieldPair hessian_diagonal(const LocalHessian& lh) const;

  /// Largest |gradient| / h^2 over interior nodes.
  double residual_sup(const FieldPair& gradient) const;

private:
  void check_exponent(double max_arg) const;

  PlanarGrid grid_;
  CouplingData cd_;
  FunctionalCoefficients fc_;
  FunctionalOptions options_;
  SampledBackground sampled_;
};

// Free-function forms. The field's boundary values are used as given.
double energy(const FieldPair& fp, const PlanarGrid& grid, const BackgroundField& bg,
              const FunctionalCoefficients& fc);
FieldPair gradient(const FieldPair& fp, const PlanarGrid& grid, const BackgroundField& bg,
                   const FunctionalCoefficients& fc);
FieldPair hessian_apply(const FieldPair& fp, const FieldPair& direction, const PlanarGrid& grid,
                        const BackgroundField& bg, const FunctionalCoefficients& fc);

/// Potential density at one node (no h^2 factor); used for scalar checks.
double potential_density(double w1, double w2, double e2u0_1, double e2u0_2, double psi1,
                         double psi2, const FunctionalCoefficients& fc);

namespace reference {

// Serial edge-by-edge implementations kept as an oracle for the parallel kernels.
double energy(const DiscreteFunctional& f, const FieldPair& fp);
FieldPair gradient(const DiscreteFunctional& f, const FieldPair& fp);
FieldPair hessian_apply(const DiscreteFunctional& f, const FieldPair& fp,
                        const FieldPair& direction);

}  // namespace reference

}  // namespace vortexlab
