#pragma once

// Problem parameters, coupling matrices, spectral constants and background fields
// for the coupled vortex system  Lap u_i = sum_j A_ij (e^{2u_j} - 1) + 4 pi n_i delta.

#include <array>
#include <numbers>
#include <utility>

#include "vortexlab/mat2.hpp"

namespace vortexlab {

inline constexpr double kPi = std::numbers::pi;

/// One problem instance. Couplings g0, g', xi are fixed to 1.
struct ModelParams {
  int N = 2;             ///< gauge-group rank, >= 2
  double n1 = 1.0;       ///< vortex multiplicity of u1
  double n2 = 1.0;       ///< vortex multiplicity of u2
  double tau = 1.0;      ///< background scale
  bool theorem_mode = true;  ///< require positive integer multiplicities

  /// Throws InvalidParameter when an invariant is broken.
  void validate() const;

  std::array<double, 2> multiplicities() const { return {n1, n2}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct CouplingData {
  int N = 2;
  double alpha = 0.0;  ///< 3/2 - 1/(2N)
  double beta = 0.0;   ///< N - 3/2 + 1/(2N)
  double gamma = 0.0;  ///< L21 = (2N-1)/(3N-1)
  Mat2 A;              ///< coupling matrix
  Mat2 L;              ///< unit lower triangular Crout factor
  Mat2 R;              ///< upper triangular Crout factor, A = L R
  Mat2 B;              ///< diagonal symmetrizer
  Mat2 M;              ///< B A, symmetric positive definite
};

struct SpectralConstants {
  double lambda1 = 0.0;  ///< larger eigenvalue of M
  double lambda2 = 0.0;  ///< smaller eigenvalue of M
  double lambda0 = 0.0;  ///< min(lambda1, lambda2)
  Mat2 O;                ///< orthogonal, O^T M O = diag(lambda1, lambda2)
  Mat2 D;                ///< M B^{-1}
  double lambda3 = 0.0;  ///< larger eigenvalue of D
  double lambda4 = 0.0;  ///< smaller eigenvalue of D
  double lambda = 0.0;   ///< min(lambda3, lambda4)
  Mat2 T;                ///< closed-form eigenvector matrix: T^{-1} D T = diag(lambda3, lambda4)
  double m = 0.0;
  double p = 0.0;
  double q = 0.0;
};

/// Coefficients of the action functional in the Crout variables w = L^{-1} P.
struct FunctionalCoefficients {
  double a_mix = 0.0;    ///< 1 - 1/(2 alpha), equals gamma
  double c_grad1 = 0.0;  ///< (2a-1)/(2ab)
  double c_grad2 = 0.0;  ///< 2a/(a+b)
  double c_exp1 = 0.0;   ///< (2a-1)/(2b)
  double c_psi1 = 0.0;   ///< (2a-1)/(ab)
  double c_lin1 = 0.0;   ///< (2a-1)(a+b)/(ab)
  double c_psi2 = 0.0;   ///< 4a/(a+b)
};

/// Two quantized flux integrals; see flux_targets().
struct FluxPair {
  double first = 0.0;
  double second = 0.0;
};

/// Coefficient rows (m,2)A and (p,q)A of the two quantized integrands.
struct FluxIntegrandRows {
  Vec2 first;
  Vec2 second;
};

CouplingData coupling_matrix(const ModelParams& params);
CouplingData coupling_matrix(int N);

SpectralConstants spectral_constants(const CouplingData& cd);

/// m, p, q evaluated from their defining expressions in alpha, beta, lambda3, lambda4.
struct DecayCoefficients {
  double m, p, q;
};
DecayCoefficients decay_coefficients_literal(double alpha, double beta, double lambda3,
                                             double lambda4);

/// lambda3, lambda4 from the square-root formula in N.
std::pair<double, double> derivative_eigenvalues_literal(int N);

FunctionalCoefficients functional_coefficients(const CouplingData& cd);

/// -4 pi (m n1 + 2 n2) and -4 pi (p n1 + q n2).
FluxPair flux_targets(const ModelParams& params, const SpectralConstants& sc);

FluxIntegrandRows flux_integrand_rows(const CouplingData& cd, const SpectralConstants& sc);

/// A^{-1} (-4 pi n1, -4 pi n2): the integrals of E1, E2 over the plane.
Vec2 component_flux_targets(const ModelParams& params, const CouplingData& cd);

/// Smooth background u^0_i = -n_i ln(1 + tau/|x|^2) and its sources.
/// Every evaluator takes the squared radius r2 = |x|^2.
class BackgroundField {
public:
  explicit BackgroundField(const ModelParams& params);

  const ModelParams& params() const { return params_; }

  /// u^0_i; -infinity at the origin when n_i > 0.
  double u0(int i, double r2) const;
  /// e^{2 u^0_i} = (r2/(r2+tau))^{2 n_i}.
  double exp_two_u0(int i, double r2) const;
  /// e^{2 u^0_i} - 1 without cancellation for large r2.
  double exp_two_u0_minus_one(int i, double r2) const;
  /// (r2/(r2+tau))^{n_i} = e^{u^0_i}.
  double exp_u0(int i, double r2) const;
  /// r d/dr u^0_i = 2 n_i tau / (r2 + tau).
  double r_du0_dr(int i, double r2) const;
  /// phi_i = 4 n_i tau / (tau + r2)^2, so Lap u^0_i = -phi_i + 4 pi n_i delta.
  double phi(int i, double r2) const;
  double psi1(double r2) const { return phi(0, r2); }
  /// (1/(2 alpha) - 1) phi_1 + phi_2.
  double psi2(double r2) const;
  /// Closed-form integral of phi_i over the disc of radius R.
  double phi_disc_integral(int i, double R) const;

private:
  ModelParams params_;
  double alpha_;
};

BackgroundField background(const ModelParams& params);

}  // namespace vortexlab
