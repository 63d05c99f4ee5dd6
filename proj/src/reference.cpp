// Serial reference kernels: plain loops over edges and nodes, no OpenMP, no
// cancellation-avoiding rewrites. Tests and benchmarks compare the parallel
// kernels against these.

#include <cmath>

#include "vortexlab/functional.hpp"

namespace vortexlab::reference {

namespace {

template <typename EdgeFn>
void for_each_edge(const PlanarGrid& g, EdgeFn&& fn) {
  const int n = g.points_per_side;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n && (g.is_interior(i, j) || g.is_interior(i + 1, j)))
        fn(g.index(i, j), g.index(i + 1, j), g.is_interior(i, j), g.is_interior(i + 1, j));
      if (j + 1 < n && (g.is_interior(i, j) || g.is_interior(i, j + 1)))
        fn(g.index(i, j), g.index(i, j + 1), g.is_interior(i, j), g.is_interior(i, j + 1));
    }
  }
}

}  // namespace

double energy(const DiscreteFunctional& f, const FieldPair& fp) {
  const auto& g = f.grid();
  const auto& c = f.coefficients();
  const auto& b = f.background();
  double e = 0.0;
  for_each_edge(g, [&](std::size_t a, std::size_t z, bool, bool) {
    const double d1 = fp.w1[z] - fp.w1[a];
    const double d2 = fp.w2[z] - fp.w2[a];
    e += c.c_grad1 * d1 * d1 + c.c_grad2 * d2 * d2;
  });
  const int n = g.points_per_side;
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double w1 = fp.w1[k];
      const double w2 = fp.w2[k];
      const double pot = b.e2u0_2[k] * (std::exp(2.0 * (c.a_mix * w1 + w2)) - 1.0) +
                         c.c_exp1 * b.e2u0_1[k] * (std::exp(2.0 * w1) - 1.0) +
                         c.c_psi1 * b.psi1[k] * w1 - c.c_lin1 * w1 + c.c_psi2 * b.psi2[k] * w2 -
                         2.0 * w2;
      e += g.cell_area() * pot;
    }
  }
  return e;
}

FieldPair gradient(const DiscreteFunctional& f, const FieldPair& fp) {
  const auto& g = f.grid();
  const auto& c = f.coefficients();
  const auto& b = f.background();
  FieldPair out = FieldPair::zeros(g);
  for_each_edge(g, [&](std::size_t a, std::size_t z, bool a_in, bool z_in) {
    const double d1 = 2.0 * c.c_grad1 * (fp.w1[z] - fp.w1[a]);
    const double d2 = 2.0 * c.c_grad2 * (fp.w2[z] - fp.w2[a]);
    if (a_in) {
      out.w1[a] -= d1;
      out.w2[a] -= d2;
    }
    if (z_in) {
      out.w1[z] += d1;
      out.w2[z] += d2;
    }
  });
  const int n = g.points_per_side;
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double es = b.e2u0_2[k] * std::exp(2.0 * (c.a_mix * fp.w1[k] + fp.w2[k]));
      const double e1 = b.e2u0_1[k] * std::exp(2.0 * fp.w1[k]);
      out.w1[k] += g.cell_area() *
                   (2.0 * c.a_mix * es + 2.0 * c.c_exp1 * e1 + c.c_psi1 * b.psi1[k] - c.c_lin1);
      out.w2[k] += g.cell_area() * (2.0 * es + c.c_psi2 * b.psi2[k] - 2.0);
    }
  }
  return out;
}

FieldPair hessian_apply(const DiscreteFunctional& f, const FieldPair& fp,
                        const FieldPair& direction) {
  const auto& g = f.grid();
  const auto& c = f.coefficients();
  const auto& b = f.background();
  FieldPair out = FieldPair::zeros(g);
  auto dir1 = [&](std::size_t k, bool in) { return in ? direction.w1[k] : 0.0; };
  auto dir2 = [&](std::size_t k, bool in) { return in ? direction.w2[k] : 0.0; };
  for_each_edge(g, [&](std::size_t a, std::size_t z, bool a_in, bool z_in) {
    const double d1 = 2.0 * c.c_grad1 * (dir1(z, z_in) - dir1(a, a_in));
    const double d2 = 2.0 * c.c_grad2 * (dir2(z, z_in) - dir2(a, a_in));
    if (a_in) {
      out.w1[a] -= d1;
      out.w2[a] -= d2;
    }
    if (z_in) {
      out.w1[z] += d1;
      out.w2[z] += d2;
    }
  });
  const int n = g.points_per_side;
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double s = 4.0 * b.e2u0_2[k] * std::exp(2.0 * (c.a_mix * fp.w1[k] + fp.w2[k]));
      const double t = 4.0 * c.c_exp1 * b.e2u0_1[k] * std::exp(2.0 * fp.w1[k]);
      const double d1 = direction.w1[k];
      const double d2 = direction.w2[k];
      out.w1[k] += g.cell_area() * ((c.a_mix * c.a_mix * s + t) * d1 + c.a_mix * s * d2);
      out.w2[k] += g.cell_area() * (c.a_mix * s * d1 + s * d2);
    }
  }
  return out;
}

}  // namespace vortexlab::reference
