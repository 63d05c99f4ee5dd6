#include "vortexlab/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vortexlab/errors.hpp"
#include "vortexlab/parallel.hpp"

namespace vortexlab {

namespace {

/// e^x - 1 - x, accurate for small |x|.
inline double expm1_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    // Horner form of x^2/2! + ... + x^9/9!
    double s = 1.0 / 362880.0;
    s = s * x + 1.0 / 40320.0;
    s = s * x + 1.0 / 5040.0;
    s = s * x + 1.0 / 720.0;
    s = s * x + 1.0 / 120.0;
    s = s * x + 1.0 / 24.0;
    s = s * x + 1.0 / 6.0;
    s = s * x + 0.5;
    return s * x * x;
  }
  return std::expm1(x) - x;
}

using Index = std::ptrdiff_t;

}  // namespace

PlanarGrid PlanarGrid::make(double half_width, int points_per_side) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidParameter("grid half width must be positive");
  if (points_per_side < 16)
    throw InvalidParameter("grid needs at least 16 points per side, got " +
                           std::to_string(points_per_side));
  PlanarGrid g;
  g.half_width = half_width;
  g.points_per_side = points_per_side;
  g.h = 2.0 * half_width / (points_per_side - 1);
  g.origin_offset = points_per_side % 2 == 0;
  return g;
}

SampledBackground SampledBackground::sample(const PlanarGrid& grid, const BackgroundField& bg) {
  const std::size_t size = grid.size();
  SampledBackground s;
  for (auto* v : {&s.u0_1, &s.u0_2, &s.e2u0_1, &s.e2u0_2, &s.e2u0m1_1, &s.e2u0m1_2, &s.psi1,
                  &s.psi2, &s.phi1, &s.phi2})
    v->assign(size, 0.0);
  const int n = grid.points_per_side;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    const double y = grid.coord(j);
    for (int i = 0; i < n; ++i) {
      const double x = grid.coord(i);
      const double r2 = x * x + y * y;
      const std::size_t k = grid.index(i, j);
      s.u0_1[k] = bg.u0(0, r2);
      s.u0_2[k] = bg.u0(1, r2);
      s.e2u0_1[k] = bg.exp_two_u0(0, r2);
      s.e2u0_2[k] = bg.exp_two_u0(1, r2);
      s.e2u0m1_1[k] = bg.exp_two_u0_minus_one(0, r2);
      s.e2u0m1_2[k] = bg.exp_two_u0_minus_one(1, r2);
      s.phi1[k] = bg.phi(0, r2);
      s.phi2[k] = bg.phi(1, r2);
      s.psi1[k] = bg.psi1(r2);
      s.psi2[k] = bg.psi2(r2);
    }
  }
  return s;
}

DiscreteFunctional::DiscreteFunctional(const PlanarGrid& grid, const BackgroundField& bg,
                                       const CouplingData& cd, FunctionalOptions options)
    : grid_(grid),
      cd_(cd),
      fc_(functional_coefficients(cd)),
      options_(options),
      sampled_(SampledBackground::sample(grid, bg)) {
  if (cd.N != bg.params().N) throw InvalidParameter("coupling data and background disagree on N");
  if (!(options_.exponent_cap > 0.0)) throw InvalidParameter("exponent cap must be positive");
}

FieldPair DiscreteFunctional::initial_field() const {
  FieldPair fp = FieldPair::zeros(grid_);
  apply_boundary(fp);
  return fp;
}

void DiscreteFunctional::apply_boundary(FieldPair& fp) const {
  const int n = grid_.points_per_side;
  const double gamma = cd_.gamma;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (grid_.is_interior(i, j)) continue;
      const std::size_t k = grid_.index(i, j);
      if (options_.boundary == BoundaryCondition::Zero) {
        fp.w1[k] = 0.0;
        fp.w2[k] = 0.0;
      } else {
        // P = -u0 so that u = u0 + P vanishes; w = L^{-1} P.
        const double p1 = -sampled_.u0_1[k];
        const double p2 = -sampled_.u0_2[k];
        fp.w1[k] = p1;
        fp.w2[k] = p2 - gamma * p1;
      }
    }
  }
}

void DiscreteFunctional::check_exponent(double max_arg) const {
  if (max_arg > options_.exponent_cap)
    throw ExponentOverflow("exponent argument " + std::to_string(max_arg) + " exceeds cap " +
                               std::to_string(options_.exponent_cap) +
                               "; the outer iteration is diverging",
                           max_arg);
}

double DiscreteFunctional::energy(const FieldPair& fp) const {
  const int n = grid_.points_per_side;
  const double h2 = grid_.cell_area();
  const auto& b = sampled_;
  const auto& c = fc_;
  std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
  std::vector<double> max_arg(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double edges = 0.0;
    double nodes = 0.0;
    double marg = -std::numeric_limits<double>::infinity();
    const bool interior_row = j > 0 && j < n - 1;
    if (interior_row) {
      for (int i = 0; i < n - 1; ++i) {
        const std::size_t k = grid_.index(i, j);
        const double d1 = fp.w1[k + 1] - fp.w1[k];
        const double d2 = fp.w2[k + 1] - fp.w2[k];
        edges += c.c_grad1 * d1 * d1 + c.c_grad2 * d2 * d2;
      }
    }
    if (j < n - 1) {
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t k = grid_.index(i, j);
        const std::size_t up = k + static_cast<std::size_t>(n);
        const double d1 = fp.w1[up] - fp.w1[k];
        const double d2 = fp.w2[up] - fp.w2[k];
        edges += c.c_grad1 * d1 * d1 + c.c_grad2 * d2 * d2;
      }
    }
    if (interior_row) {
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t k = grid_.index(i, j);
        const double w1 = fp.w1[k];
        const double w2 = fp.w2[k];
        const double two_s = 2.0 * (c.a_mix * w1 + w2);
        marg = std::max({marg, two_s, 2.0 * w1});
        nodes += b.e2u0_2[k] * std::expm1(two_s) + c.c_exp1 * b.e2u0_1[k] * std::expm1(2.0 * w1) +
                 (c.c_psi1 * b.psi1[k] - c.c_lin1) * w1 + (c.c_psi2 * b.psi2[k] - 2.0) * w2;
      }
    }
    partial[static_cast<std::size_t>(j)] = edges + h2 * nodes;
    max_arg[static_cast<std::size_t>(j)] = marg;
  }
  check_exponent(*std::max_element(max_arg.begin(), max_arg.end()));
  return ordered_sum(partial);
}

FieldPair DiscreteFunctional::gradient(const FieldPair& fp) const {
  const int n = grid_.points_per_side;
  const double h2 = grid_.cell_area();
  const auto& b = sampled_;
  const auto& c = fc_;
  const double slope0 = 2.0 * c.a_mix + 2.0 * c.c_exp1 - c.c_lin1;
  FieldPair g = FieldPair::zeros(grid_);
  std::vector<double> max_arg(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  const auto stride = static_cast<std::size_t>(n);

#pragma omp parallel for schedule(static)
  for (int j = 1; j < n - 1; ++j) {
    double marg = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = grid_.index(i, j);
      const double w1 = fp.w1[k];
      const double w2 = fp.w2[k];
      const double lap1 = 4.0 * w1 - fp.w1[k - 1] - fp.w1[k + 1] - fp.w1[k - stride] - fp.w1[k + stride];
      const double lap2 = 4.0 * w2 - fp.w2[k - 1] - fp.w2[k + 1] - fp.w2[k - stride] - fp.w2[k + stride];
      const double two_s = 2.0 * (c.a_mix * w1 + w2);
      marg = std::max({marg, two_s, 2.0 * w1});
      // e^{2u} - 1 for each component, formed without cancellation.
      const double x2 = b.e2u0_2[k] * std::expm1(two_s) + b.e2u0m1_2[k];
      const double x1 = b.e2u0_1[k] * std::expm1(2.0 * w1) + b.e2u0m1_1[k];
      const double f1 = 2.0 * c.a_mix * x2 + 2.0 * c.c_exp1 * x1 + c.c_psi1 * b.psi1[k] + slope0;
      const double f2 = 2.0 * x2 + c.c_psi2 * b.psi2[k];
      g.w1[k] = 2.0 * c.c_grad1 * lap1 + h2 * f1;
      g.w2[k] = 2.0 * c.c_grad2 * lap2 + h2 * f2;
    }
    max_arg[static_cast<std::size_t>(j)] = marg;
  }
  check_exponent(*std::max_element(max_arg.begin(), max_arg.end()));
  return g;
}

LocalHessian DiscreteFunctional::local_hessian(const FieldPair& fp) const {
  const int n = grid_.points_per_side;
  const auto& b = sampled_;
  const auto& c = fc_;
  LocalHessian lh;
  lh.h11.assign(grid_.size(), 0.0);
  lh.h12.assign(grid_.size(), 0.0);
  lh.h22.assign(grid_.size(), 0.0);
  std::vector<double> max_arg(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (int j = 1; j < n - 1; ++j) {
    double marg = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = grid_.index(i, j);
      const double w1 = fp.w1[k];
      const double two_s = 2.0 * (c.a_mix * fp.w1[k] + fp.w2[k]);
      marg = std::max({marg, two_s, 2.0 * w1});
      const double s = 4.0 * b.e2u0_2[k] * std::exp(two_s);
      const double t = 4.0 * c.c_exp1 * b.e2u0_1[k] * std::exp(2.0 * w1);
      lh.h11[k] = c.a_mix * c.a_mix * s + t;
      lh.h12[k] = c.a_mix * s;
      lh.h22[k] = s;
    }
    max_arg[static_cast<std::size_t>(j)] = marg;
  }
  check_exponent(*std::max_element(max_arg.begin(), max_arg.end()));
  return lh;
}

void DiscreteFunctional::hessian_apply(const LocalHessian& lh, const FieldPair& d,
                                       FieldPair& out) const {
  const int n = grid_.points_per_side;
  const double h2 = grid_.cell_area();
  const double k1 = 2.0 * fc_.c_grad1;
  const double k2 = 2.0 * fc_.c_grad2;
  const auto stride = static_cast<std::size_t>(n);
  if (out.w1.size() != grid_.size()) out = FieldPair::zeros(grid_);
  // Boundary entries of d are treated as zero.
  auto at = [&](const std::vector<double>& v, int i, int j) {
    return grid_.is_interior(i, j) ? v[grid_.index(i, j)] : 0.0;
  };
#pragma omp parallel for schedule(static)
  for (int j = 1; j < n - 1; ++j) {
    const bool edge_row = j == 1 || j == n - 2;
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = grid_.index(i, j);
      double nb1, nb2;
      if (edge_row || i == 1 || i == n - 2) {
        nb1 = at(d.w1, i - 1, j) + at(d.w1, i + 1, j) + at(d.w1, i, j - 1) + at(d.w1, i, j + 1);
        nb2 = at(d.w2, i - 1, j) + at(d.w2, i + 1, j) + at(d.w2, i, j - 1) + at(d.w2, i, j + 1);
      } else {
        nb1 = d.w1[k - 1] + d.w1[k + 1] + d.w1[k - stride] + d.w1[k + stride];
        nb2 = d.w2[k - 1] + d.w2[k + 1] + d.w2[k - stride] + d.w2[k + stride];
      }
      const double d1 = d.w1[k];
      const double d2 = d.w2[k];
      out.w1[k] = k1 * (4.0 * d1 - nb1) + h2 * (lh.h11[k] * d1 + lh.h12[k] * d2);
      out.w2[k] = k2 * (4.0 * d2 - nb2) + h2 * (lh.h12[k] * d1 + lh.h22[k] * d2);
    }
  }
}

FieldPair DiscreteFunctional::hessian_apply(const FieldPair& fp, const FieldPair& direction) const {
  FieldPair out = FieldPair::zeros(grid_);
  hessian_apply(local_hessian(fp), direction, out);
  return out;
}

FieldPair DiscreteFunctional::hessian_diagonal(const LocalHessian& lh) const {
  const int n = grid_.points_per_side;
  const double h2 = grid_.cell_area();
  FieldPair diag = FieldPair::zeros(grid_);
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = grid_.index(i, j);
      diag.w1[k] = 8.0 * fc_.c_grad1 + h2 * lh.h11[k];
      diag.w2[k] = 8.0 * fc_.c_grad2 + h2 * lh.h22[k];
    }
  }
  return diag;
}

double DiscreteFunctional::energy_change(const FieldPair& fp, const FieldPair& d, double t) const {
  // Split into t * (gradient . d) plus a nonnegative second-order remainder so the
  // difference keeps full relative accuracy near a minimizer.
  const FieldPair g = gradient(fp);
  const double gd = stable_dot(g.w1, d.w1) + stable_dot(g.w2, d.w2);
  return t * gd + energy_change_remainder(fp, d, t);
}

double DiscreteFunctional::energy_change_remainder(const FieldPair& fp, const FieldPair& d,
                                                   double t) const {
  const int n = grid_.points_per_side;
  const double h2 = grid_.cell_area();
  const auto& b = sampled_;
  const auto& c = fc_;

  std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
  std::vector<double> max_arg(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  auto dir = [&](const std::vector<double>& v, int i, int j) {
    return grid_.is_interior(i, j) ? v[grid_.index(i, j)] : 0.0;
  };
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double q = 0.0;
    double marg = -std::numeric_limits<double>::infinity();
    const bool interior_row = j > 0 && j < n - 1;
    if (interior_row) {
      for (int i = 0; i < n - 1; ++i) {
        const double b1 = t * (dir(d.w1, i + 1, j) - dir(d.w1, i, j));
        const double b2 = t * (dir(d.w2, i + 1, j) - dir(d.w2, i, j));
        q += c.c_grad1 * b1 * b1 + c.c_grad2 * b2 * b2;
      }
    }
    if (j < n - 1) {
      for (int i = 1; i < n - 1; ++i) {
        const double b1 = t * (dir(d.w1, i, j + 1) - dir(d.w1, i, j));
        const double b2 = t * (dir(d.w2, i, j + 1) - dir(d.w2, i, j));
        q += c.c_grad1 * b1 * b1 + c.c_grad2 * b2 * b2;
      }
    }
    if (interior_row) {
      double nodes = 0.0;
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t k = grid_.index(i, j);
        const double w1 = fp.w1[k] + t * d.w1[k];
        const double w2 = fp.w2[k] + t * d.w2[k];
        marg = std::max({marg, 2.0 * (c.a_mix * w1 + w2), 2.0 * w1});
        const double e2 = b.e2u0_2[k] * std::exp(2.0 * (c.a_mix * fp.w1[k] + fp.w2[k]));
        const double e1 = b.e2u0_1[k] * std::exp(2.0 * fp.w1[k]);
        const double sigma = c.a_mix * d.w1[k] + d.w2[k];
        nodes += e2 * expm1_minus_x(2.0 * t * sigma) + c.c_exp1 * e1 * expm1_minus_x(2.0 * t * d.w1[k]);
      }
      q += h2 * nodes;
    }
    partial[static_cast<std::size_t>(j)] = q;
    max_arg[static_cast<std::size_t>(j)] = marg;
  }
  check_exponent(*std::max_element(max_arg.begin(), max_arg.end()));
  return ordered_sum(partial);
}

double DiscreteFunctional::residual_sup(const FieldPair& g) const {
  return std::max(max_abs(g.w1), max_abs(g.w2)) / grid_.cell_area();
}

double potential_density(double w1, double w2, double e2u0_1, double e2u0_2, double psi1,
                         double psi2, const FunctionalCoefficients& c) {
  return e2u0_2 * std::expm1(2.0 * (c.a_mix * w1 + w2)) + c.c_exp1 * e2u0_1 * std::expm1(2.0 * w1) +
         (c.c_psi1 * psi1 - c.c_lin1) * w1 + (c.c_psi2 * psi2 - 2.0) * w2;
}

double energy(const FieldPair& fp, const PlanarGrid& grid, const BackgroundField& bg,
              const FunctionalCoefficients&) {
  return DiscreteFunctional(grid, bg, coupling_matrix(bg.params())).energy(fp);
}

FieldPair gradient(const FieldPair& fp, const PlanarGrid& grid, const BackgroundField& bg,
                   const FunctionalCoefficients&) {
  return DiscreteFunctional(grid, bg, coupling_matrix(bg.params())).gradient(fp);
}

FieldPair hessian_apply(const FieldPair& fp, const FieldPair& direction, const PlanarGrid& grid,
                        const BackgroundField& bg, const FunctionalCoefficients&) {
  return DiscreteFunctional(grid, bg, coupling_matrix(bg.params())).hessian_apply(fp, direction);
}

}  // namespace vortexlab
