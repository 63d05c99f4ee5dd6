#pragma once

// Executable checks of the quantized fluxes, decay rates and residuals.

#include <optional>
#include <string>
#include <vector>

#include "vortexlab/planar.hpp"
#include "vortexlab/radial.hpp"

namespace vortexlab {

struct FluxRecord {
  double value = 0.0;
  double target = 0.0;
  double abs_error = 0.0;
  /// abs_error / |target|; for a zero target the larger |target| of the pair
  /// is used as scale (1 if both vanish).
  double rel_error = 0.0;

  friend bool operator==(const FluxRecord&, const FluxRecord&) = default;
};

struct FluxReport {
  FluxRecord first;
  FluxRecord second;

  friend bool operator==(const FluxReport&, const FluxReport&) = default;
};

struct ComponentFluxReport {
  FluxRecord e1;  ///< integral of E1 against A^{-1}(-4 pi n)
  FluxRecord e2;

  friend bool operator==(const ComponentFluxReport&, const ComponentFluxReport&) = default;
};

struct DecayWindow {
  double r_a = 10.0;
  double r_b = 14.0;

  friend bool operator==(const DecayWindow&, const DecayWindow&) = default;
};

struct DecayRecord {
  std::string quantity;
  DecayWindow window;
  std::optional<double> fitted_rate;  ///< empty when too few samples lie above the floor
  double paper_bound = 0.0;
  double linearized_rate = 0.0;       ///< slowest linear mode, sqrt(2 lambda_min(A)) = 1
  double linearized_rate_fast = 0.0;  ///< fastest linear mode, sqrt(2 N)
  int samples = 0;
  std::string warning;

  friend bool operator==(const DecayRecord&, const DecayRecord&) = default;
};

struct ResidualReport {
  std::optional<double> pde_sup;
  std::optional<double> ode_sup;

  friend bool operator==(const ResidualReport&, const ResidualReport&) = default;
};

struct UniquenessReport {
  std::optional<double> sup_difference;

  friend bool operator==(const UniquenessReport&, const UniquenessReport&) = default;
};

struct CrossValidationRecord {
  std::optional<double> sup_difference;
  DecayWindow window{0.5, 10.0};

  friend bool operator==(const CrossValidationRecord&, const CrossValidationRecord&) = default;
};

struct ConstantsRecord {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double lambda0 = 0.0, lambda1 = 0.0, lambda2 = 0.0;
  double lambda3 = 0.0, lambda4 = 0.0, lambda = 0.0;
  double m = 0.0, p = 0.0, q = 0.0;

  static ConstantsRecord from(const CouplingData& cd, const SpectralConstants& sc);
  friend bool operator==(const ConstantsRecord&, const ConstantsRecord&) = default;
};

struct VerificationReport {
  ModelParams params;
  ConstantsRecord constants;
  FluxReport flux;
  ComponentFluxReport component_flux;
  std::vector<DecayRecord> decay;
  ResidualReport residuals;
  UniquenessReport uniqueness;
  CrossValidationRecord cross_validation;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Values below this are treated as the floating-point floor by decay fits.
inline constexpr double kDecayFloor = 1e-13;

/// Integral of E_i over the plane: trapezoid in r dr plus the innermost disc.
Vec2 radial_component_integrals(const RadialSolution& sol);
/// Cell sum h^2 sum E_i over all nodes.
Vec2 planar_component_integrals(const PlanarSolution& sol);

FluxReport flux_integrals(const RadialSolution& sol, const SpectralConstants& sc);
FluxReport flux_integrals(const PlanarSolution& sol, const SpectralConstants& sc);
FluxReport flux_report_from_components(const ModelParams& params, const CouplingData& cd,
                                       const SpectralConstants& sc, Vec2 components);

ComponentFluxReport component_flux(const ModelParams& params, const CouplingData& cd,
                                   Vec2 components);

/// Least-squares slope of ln|y| against r on the window, returned as a positive
/// rate. Samples below kDecayFloor end the window early; fewer than five usable
/// samples give an empty result.
struct SlopeFit {
  std::optional<double> rate;
  DecayWindow window;
  int samples = 0;
  bool shrunk = false;
};
SlopeFit fit_decay_rate(const std::vector<double>& r, const std::vector<double>& y,
                        DecayWindow window);

std::vector<DecayRecord> decay_fit(const RadialSolution& sol, const SpectralConstants& sc,
                                   DecayWindow window = {});
std::vector<DecayRecord> decay_fit(const PlanarSolution& sol, const SpectralConstants& sc,
                                   DecayWindow window = {});

/// Radial: largest cell flux imbalance. Planar: largest |Lap_h P - A E - phi|
/// over interior nodes with the 5-point Laplacian.
double pde_residual(const RadialSolution& sol, const CouplingData& cd, const BackgroundField& bg);
double pde_residual(const PlanarSolution& sol, const CouplingData& cd, const BackgroundField& bg);

/// Sup difference of u1, u2 between the planar slice and the radial solution on
/// r in [0.5, min(10, L - 5)]. Throws InvalidParameter when parameters differ.
CrossValidationRecord cross_validate(const RadialSolution& radial, const PlanarSolution& planar);

/// Sup difference of the regular parts P of two solutions on the same grid.
double uniqueness_difference(const PlanarSolution& a, const PlanarSolution& b);

/// Flux, component flux, decay and residuals of a radial solution.
VerificationReport verify_radial(const RadialSolution& sol, DecayWindow window = {});
VerificationReport verify_planar(const PlanarSolution& sol, DecayWindow window = {});

}  // namespace vortexlab
