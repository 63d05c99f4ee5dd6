#include "vortexlab/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

bool is_positive_integer(double x) { return x > 0.0 && std::floor(x) == x; }

}  // namespace

void ModelParams::validate() const {
  if (N < 2) throw InvalidParameter("N must be an integer >= 2, got " + std::to_string(N));
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive");
  if (!std::isfinite(n1) || !std::isfinite(n2)) throw InvalidParameter("multiplicities must be finite");
  if (theorem_mode) {
    if (!is_positive_integer(n1) || !is_positive_integer(n2))
      throw InvalidParameter("theorem mode requires positive integer multiplicities n1, n2");
  } else if (n1 < 0.0 || n2 < 0.0) {
    throw InvalidParameter("multiplicities must be non-negative");
  }
}

CouplingData coupling_matrix(int N) {
  if (N < 2) throw InvalidParameter("N must be an integer >= 2, got " + std::to_string(N));
  const double n = N;
  CouplingData cd;
  cd.N = N;
  cd.alpha = 1.5 - 1.0 / (2.0 * n);
  cd.beta = n - 1.5 + 1.0 / (2.0 * n);
  cd.gamma = (2.0 * n - 1.0) / (3.0 * n - 1.0);
  const double a = cd.alpha;
  const double b = cd.beta;
  cd.A = {a, b, a - 0.5, b + 0.5};
  // Crout factors in closed form, not from a generic factorization.
  cd.L = {1.0, 0.0, cd.gamma, 1.0};
  cd.R = {a, b, 0.0, n * n / (3.0 * n - 1.0)};
  cd.B = Mat2::diag((2.0 * a - 1.0) / b, 2.0);
  // M = B A written out entrywise so that it is exactly symmetric.
  cd.M = {(2.0 * a * a - a) / b, 2.0 * a - 1.0, 2.0 * a - 1.0, 2.0 * b + 1.0};
  return cd;
}

CouplingData coupling_matrix(const ModelParams& params) { return coupling_matrix(params.N); }

std::pair<double, double> derivative_eigenvalues_literal(int N) {
  const double n = N;
  const double root = std::sqrt(n * n - n + 0.25);
  return {(2.0 * n + 1.0 + 2.0 * root) / 4.0, (2.0 * n + 1.0 - 2.0 * root) / 4.0};
}

DecayCoefficients decay_coefficients_literal(double alpha, double beta, double lambda3,
                                             double lambda4) {
  const double t = 2.0 * alpha - 1.0;
  return {t * t / (2.0 * beta * (lambda3 - alpha)), t / beta, 4.0 * (lambda4 - alpha) / t};
}

SpectralConstants spectral_constants(const CouplingData& cd) {
  SpectralConstants sc;
  const auto eig = symmetric_eigen(cd.M);
  sc.lambda1 = eig.lambda1;
  sc.lambda2 = eig.lambda2;
  sc.lambda0 = std::min(sc.lambda1, sc.lambda2);
  sc.O = eig.vectors;

  const Mat2 b_inv = Mat2::diag(1.0 / cd.B.a11, 1.0 / cd.B.a22);
  sc.D = cd.M * b_inv;
  const auto [l3, l4] = real_eigenvalues(sc.D);
  sc.lambda3 = l3;
  sc.lambda4 = l4;
  sc.lambda = std::min(l3, l4);

  const double a = cd.alpha;
  const double t = 2.0 * a - 1.0;
  sc.T = {t / (2.0 * (sc.lambda3 - a)), 1.0, 1.0, 2.0 * (sc.lambda4 - a) / t};

  const auto mpq = decay_coefficients_literal(cd.alpha, cd.beta, sc.lambda3, sc.lambda4);
  sc.m = mpq.m;
  sc.p = mpq.p;
  sc.q = mpq.q;
  return sc;
}

FunctionalCoefficients functional_coefficients(const CouplingData& cd) {
  const double a = cd.alpha;
  const double b = cd.beta;
  FunctionalCoefficients fc;
  fc.a_mix = 1.0 - 1.0 / (2.0 * a);
  fc.c_grad1 = (2.0 * a - 1.0) / (2.0 * a * b);
  fc.c_grad2 = 2.0 * a / (a + b);
  fc.c_exp1 = (2.0 * a - 1.0) / (2.0 * b);
  fc.c_psi1 = (2.0 * a - 1.0) / (a * b);
  fc.c_lin1 = (2.0 * a - 1.0) * (a + b) / (a * b);
  fc.c_psi2 = 4.0 * a / (a + b);
  return fc;
}

FluxPair flux_targets(const ModelParams& params, const SpectralConstants& sc) {
  // 0.0 - x keeps a vanishing target at +0 rather than -0.
  return {0.0 - 4.0 * kPi * (sc.m * params.n1 + 2.0 * params.n2),
          0.0 - 4.0 * kPi * (sc.p * params.n1 + sc.q * params.n2)};
}

FluxIntegrandRows flux_integrand_rows(const CouplingData& cd, const SpectralConstants& sc) {
  const double a = cd.alpha;
  const double b = cd.beta;
  const double m = sc.m;
  const double p = sc.p;
  const double q = sc.q;
  return {{(m + 2.0) * a - 1.0, (m + 2.0) * b + 1.0},
          {(p + q) * a - 0.5 * q, (p + q) * b + 0.5 * q}};
}

Vec2 component_flux_targets(const ModelParams& params, const CouplingData& cd) {
  return cd.A.inverse() * Vec2{-4.0 * kPi * params.n1, -4.0 * kPi * params.n2};
}

BackgroundField::BackgroundField(const ModelParams& params)
    : params_(params), alpha_(1.5 - 1.0 / (2.0 * params.N)) {
  if (!(params.tau > 0.0)) throw InvalidParameter("tau must be positive");
}

BackgroundField background(const ModelParams& params) { return BackgroundField(params); }

namespace {
double mult(const ModelParams& p, int i) { return i == 0 ? p.n1 : p.n2; }
}  // namespace

double BackgroundField::u0(int i, double r2) const {
  const double n = mult(params_, i);
  if (n == 0.0) return 0.0;
  if (r2 == 0.0) return -std::numeric_limits<double>::infinity();
  return -n * std::log1p(params_.tau / r2);
}

double BackgroundField::exp_two_u0(int i, double r2) const {
  return std::pow(r2 / (r2 + params_.tau), 2.0 * mult(params_, i));
}

double BackgroundField::exp_two_u0_minus_one(int i, double r2) const {
  const double n = mult(params_, i);
  if (n == 0.0) return 0.0;
  if (r2 == 0.0) return -1.0;
  return std::expm1(-2.0 * n * std::log1p(params_.tau / r2));
}

double BackgroundField::exp_u0(int i, double r2) const {
  return std::pow(r2 / (r2 + params_.tau), mult(params_, i));
}

double BackgroundField::r_du0_dr(int i, double r2) const {
  return 2.0 * mult(params_, i) * params_.tau / (r2 + params_.tau);
}

double BackgroundField::phi(int i, double r2) const {
  const double s = params_.tau + r2;
  return 4.0 * mult(params_, i) * params_.tau / (s * s);
}

double BackgroundField::psi2(double r2) const {
  return (1.0 / (2.0 * alpha_) - 1.0) * phi(0, r2) + phi(1, r2);
}

double BackgroundField::phi_disc_integral(int i, double R) const {
  const double R2 = R * R;
  return 4.0 * kPi * mult(params_, i) * R2 / (R2 + params_.tau);
}

}  // namespace vortexlab
