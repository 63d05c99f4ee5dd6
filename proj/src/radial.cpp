#include "vortexlab/radial.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vortexlab/errors.hpp"

namespace vortexlab {

RadialMesh make_radial_mesh(double r_min, double r_max, int count) {
  if (count < 1000) throw InvalidParameter("radial mesh needs at least 1000 nodes");
  if (!(r_min > 0.0) || !(r_min < kRadialSwitch))
    throw InvalidParameter("r_min must lie in (0, 2)");
  if (!(r_max >= 20.0) || !std::isfinite(r_max)) throw InvalidParameter("r_max must be >= 20");

  // Split the intervals between the geometric and uniform parts so that the last
  // geometric step matches the uniform step as closely as possible.
  const double span = std::log(kRadialSwitch / r_min);
  int best_m = 1;
  double best_mismatch = std::numeric_limits<double>::infinity();
  for (int m = 1; m < count - 2; ++m) {
    const int k = count - 1 - m;
    const double q = std::exp(span / k);
    const double last_geometric = kRadialSwitch * (1.0 - 1.0 / q);
    const double uniform = (r_max - kRadialSwitch) / m;
    const double mismatch = std::abs(std::log(last_geometric / uniform));
    if (mismatch < best_mismatch) {
      best_mismatch = mismatch;
      best_m = m;
    }
  }
  const int m = best_m;
  const int k = count - 1 - m;
  RadialMesh mesh;
  mesh.r_min = r_min;
  mesh.r_max = r_max;
  mesh.nodes.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < k; ++i) mesh.nodes[static_cast<std::size_t>(i)] = r_min * std::exp(span * i / k);
  const double h = (r_max - kRadialSwitch) / m;
  for (int j = 0; j < m; ++j)
    mesh.nodes[static_cast<std::size_t>(k + j)] = kRadialSwitch + h * j;
  mesh.nodes.back() = r_max;
  return mesh;
}

std::vector<double> mesh_derivative(const std::vector<double>& r, const std::vector<double>& y) {
  const std::size_t n = r.size();
  if (n < 3 || y.size() != n) throw InvalidParameter("mesh_derivative needs matching arrays of size >= 3");
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] +
           h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    const double h1 = r[1] - r[0];
    const double h2 = r[2] - r[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
           h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = r[n - 2] - r[n - 3];
    const double h2 = r[n - 1] - r[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2] +
               (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
  }
  return d;
}

namespace {

// Mesh-dependent pieces of the finite-volume operator.
struct RadialStencil {
  std::vector<double> conductance;  ///< r_{i+1/2} / (r_{i+1} - r_i), one per interval
  std::vector<double> volume;       ///< (r_{i+1/2}^2 - r_{i-1/2}^2) / 2, one per node
  std::vector<double> du0_1, du0_2; ///< u0_{i+1} - u0_i per interval
  std::vector<double> e2u0_1, e2u0_2, e2u0m1_1, e2u0m1_2, u0_1, u0_2;
  double inner_flux1 = 0.0, inner_flux2 = 0.0;  ///< r u0' at the origin
};

// u0(b) - u0(a) = -n ln[(1 + tau/b^2)/(1 + tau/a^2)], formed without cancellation.
double background_difference(double n, double tau, double a, double b) {
  if (n == 0.0) return 0.0;
  return -n * std::log1p(tau * (a - b) * (a + b) / ((a * a + tau) * b * b));
}

RadialStencil make_stencil(const RadialMesh& mesh, const BackgroundField& bg) {
  const auto& r = mesh.nodes;
  const std::size_t k = r.size();
  const double tau = bg.params().tau;
  RadialStencil s;
  s.conductance.resize(k - 1);
  s.du0_1.resize(k - 1);
  s.du0_2.resize(k - 1);
  s.volume.resize(k);
  std::vector<double> face(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    face[i] = 0.5 * (r[i] + r[i + 1]);
    s.conductance[i] = face[i] / (r[i + 1] - r[i]);
    s.du0_1[i] = background_difference(bg.params().n1, tau, r[i], r[i + 1]);
    s.du0_2[i] = background_difference(bg.params().n2, tau, r[i], r[i + 1]);
  }
  // The innermost cell reaches the origin, where r P' = 0 by regularity and the
  // background carries the whole delta flux 2 n.
  const double inner_face = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = i == 0 ? inner_face : face[i - 1];
    const double hi = i + 1 == k ? r[k - 1] : face[i];
    s.volume[i] = 0.5 * (hi - lo) * (hi + lo);
  }
  for (auto* v : {&s.e2u0_1, &s.e2u0_2, &s.e2u0m1_1, &s.e2u0m1_2, &s.u0_1, &s.u0_2}) v->resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double r2 = r[i] * r[i];
    s.u0_1[i] = bg.u0(0, r2);
    s.u0_2[i] = bg.u0(1, r2);
    s.e2u0_1[i] = bg.exp_two_u0(0, r2);
    s.e2u0_2[i] = bg.exp_two_u0(1, r2);
    s.e2u0m1_1[i] = bg.exp_two_u0_minus_one(0, r2);
    s.e2u0m1_2[i] = bg.exp_two_u0_minus_one(1, r2);
  }
  s.inner_flux1 = bg.r_du0_dr(0, inner_face * inner_face);
  s.inner_flux2 = bg.r_du0_dr(1, inner_face * inner_face);
  return s;
}

void check_exponent(double x) {
  if (x > 300.0)
    throw ExponentOverflow("radial Newton iterate exponent " + std::to_string(x) +
                               " exceeds cap 300",
                           x);
}

// Residual per unknown node (all but the last), interleaved (component 1, component 2).
std::vector<double> cell_residual(const RadialStencil& s, const Mat2& A, const std::vector<double>& P1,
                                  const std::vector<double>& P2) {
  const std::size_t k = P1.size();
  std::vector<double> res(2 * (k - 1));
  double prev1 = s.inner_flux1;
  double prev2 = s.inner_flux2;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double f1 = s.conductance[i] * ((P1[i + 1] - P1[i]) + s.du0_1[i]);
    const double f2 = s.conductance[i] * ((P2[i + 1] - P2[i]) + s.du0_2[i]);
    check_exponent(2.0 * std::max(P1[i], P2[i]));
    const double e1 = s.e2u0_1[i] * std::expm1(2.0 * P1[i]) + s.e2u0m1_1[i];
    const double e2 = s.e2u0_2[i] * std::expm1(2.0 * P2[i]) + s.e2u0m1_2[i];
    const double v = s.volume[i];
    res[2 * i] = f1 - prev1 - v * (A.a11 * e1 + A.a12 * e2);
    res[2 * i + 1] = f2 - prev2 - v * (A.a21 * e1 + A.a22 * e2);
    prev1 = f1;
    prev2 = f2;
  }
  return res;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Solves the block tridiagonal Newton system J d = rhs with scalar off-diagonal
// blocks: lower[i] d_{i-1} + diag[i] d_i + upper[i] d_{i+1} = rhs_i.
std::vector<Vec2> block_thomas(const std::vector<double>& lower, std::vector<Mat2> diag,
                               const std::vector<double>& upper, std::vector<Vec2> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const Mat2 m = diag[i - 1].inverse() * Mat2::diag(lower[i], lower[i]);
    // m = D'^{-1} lower commutes with scalars, so lower D'^{-1} = m.
    diag[i] = diag[i] - m * Mat2::diag(upper[i - 1], upper[i - 1]);
    const Vec2 y = m * rhs[i - 1];
    rhs[i] = {rhs[i].x1 - y.x1, rhs[i].x2 - y.x2};
  }
  std::vector<Vec2> x(n);
  x[n - 1] = diag[n - 1].inverse() * rhs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const Vec2 t{rhs[i].x1 - upper[i] * x[i + 1].x1, rhs[i].x2 - upper[i] * x[i + 1].x2};
    x[i] = diag[i].inverse() * t;
  }
  return x;
}

}  // namespace

std::vector<double> radial_cell_residual(const CouplingData& cd, const BackgroundField& bg,
                                         const RadialMesh& mesh,
                                         const std::vector<double>& P1,
                                         const std::vector<double>& P2) {
  if (P1.size() != mesh.count() || P2.size() != mesh.count())
    throw InvalidParameter("field size does not match the radial mesh");
  return cell_residual(make_stencil(mesh, bg), cd.A, P1, P2);
}

RadialSolution solve_radial_P(const ModelParams& params, const CouplingData& cd,
                              const BackgroundField& bg, const RadialMesh& mesh, double tol,
                              int max_iter) {
  params.validate();
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
  if (cd.N != params.N || !(bg.params() == params))
    throw InvalidParameter("coupling data or background built for different parameters");
  if (mesh.count() < 3) throw InvalidParameter("radial mesh is too small");

  const std::size_t k = mesh.count();
  const RadialStencil s = make_stencil(mesh, bg);
  const Mat2& A = cd.A;

  // Start from P = 0 with the Dirichlet value u(r_max) = 0 imposed.
  std::vector<double> P1(k, 0.0), P2(k, 0.0);
  P1[k - 1] = -s.u0_1[k - 1];
  P2[k - 1] = -s.u0_2[k - 1];

  std::vector<double> res = cell_residual(s, A, P1, P2);
  double sup = sup_norm(res);
  double merit = l2_norm(res);
  int it = 0;
  const std::size_t n = k - 1;
  std::vector<double> lower(n), upper(n);
  std::vector<Mat2> diag(n);
  std::vector<Vec2> rhs(n);

  while (sup >= tol) {
    if (it >= max_iter)
      throw NonConvergence("radial Newton did not reach tolerance after " +
                               std::to_string(max_iter) + " iterations",
                           it, sup);
    for (std::size_t i = 0; i < n; ++i) {
      const double cl = i == 0 ? 0.0 : s.conductance[i - 1];
      const double cr = s.conductance[i];
      const double d1 = 2.0 * s.e2u0_1[i] * std::exp(2.0 * P1[i]);
      const double d2 = 2.0 * s.e2u0_2[i] * std::exp(2.0 * P2[i]);
      const double v = s.volume[i];
      diag[i] = {-(cl + cr) - v * A.a11 * d1, -v * A.a12 * d2, -v * A.a21 * d1,
                 -(cl + cr) - v * A.a22 * d2};
      lower[i] = cl;
      upper[i] = i + 1 < n ? cr : 0.0;
      rhs[i] = {-res[2 * i], -res[2 * i + 1]};
    }
    const std::vector<Vec2> step = block_thomas(lower, diag, upper, rhs);

    double t = 1.0;
    bool accepted = false;
    std::vector<double> T1(P1), T2(P2), trial_res;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) {
        T1[i] = P1[i] + t * step[i].x1;
        T2[i] = P2[i] + t * step[i].x2;
      }
      try {
        trial_res = cell_residual(s, A, T1, T2);
      } catch (const ExponentOverflow&) {
        t *= 0.5;
        continue;
      }
      const double trial = l2_norm(trial_res);
      if (trial <= (1.0 - 1e-4 * t) * merit || sup_norm(trial_res) < tol) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++it;
    if (!accepted)
      throw NonConvergence("radial Newton line search stalled", it, sup);
    P1.swap(T1);
    P2.swap(T2);
    res.swap(trial_res);
    sup = sup_norm(res);
    merit = l2_norm(res);
  }

  RadialSolution sol;
  sol.params = params;
  sol.mesh = mesh;
  sol.iterations = it;
  sol.final_residual = sup;
  sol.converged = true;
  sol.u1.resize(k);
  sol.u2.resize(k);
  sol.E1.resize(k);
  sol.E2.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    sol.u1[i] = s.u0_1[i] + P1[i];
    sol.u2[i] = s.u0_2[i] + P2[i];
    sol.E1[i] = s.e2u0_1[i] * std::expm1(2.0 * P1[i]) + s.e2u0m1_1[i];
    sol.E2[i] = s.e2u0_2[i] * std::expm1(2.0 * P2[i]) + s.e2u0m1_2[i];
  }
  sol.u1[k - 1] = 0.0;
  sol.u2[k - 1] = 0.0;
  sol.P1 = std::move(P1);
  sol.P2 = std::move(P2);
  return sol;
}

ProfileSet reconstruct_profiles(const RadialSolution& sol, const ModelParams& params) {
  if (!(sol.params == params)) throw InvalidParameter("solution was computed for different parameters");
  const BackgroundField bg(params);
  const auto& r = sol.mesh.nodes;
  const std::size_t k = r.size();
  const std::vector<double> dP1 = mesh_derivative(r, sol.P1);
  const std::vector<double> dP2 = mesh_derivative(r, sol.P2);
  const double N = params.N;
  ProfileSet ps;
  ps.mesh = sol.mesh;
  ps.f.resize(k);
  ps.f_NA.resize(k);
  ps.Q1.resize(k);
  ps.Q2.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double r2 = r[i] * r[i];
    const double ru1 = bg.r_du0_dr(0, r2) + r[i] * dP1[i];
    const double ru2 = bg.r_du0_dr(1, r2) + r[i] * dP2[i];
    ps.f_NA[i] = ru1 - ru2;
    ps.f[i] = ru1 + (N - 1.0) * ru2;
    ps.Q1[i] = bg.exp_u0(0, r2) * std::exp(sol.P1[i]);
    ps.Q2[i] = bg.exp_u0(1, r2) * std::exp(sol.P2[i]);
  }
  ps.iterations = sol.iterations;
  return ps;
}

double ode_residual(const ProfileSet& ps, int N) {
  const auto& r = ps.mesh.nodes;
  const std::size_t k = r.size();
  if (k < 3) return 0.0;
  const std::vector<double> df = mesh_derivative(r, ps.f);
  const std::vector<double> dfna = mesh_derivative(r, ps.f_NA);
  const std::vector<double> dq1 = mesh_derivative(r, ps.Q1);
  const std::vector<double> dq2 = mesh_derivative(r, ps.Q2);
  const double n = N;
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const double q1 = ps.Q1[i];
    const double q2 = ps.Q2[i];
    const double f = ps.f[i];
    const double fna = ps.f_NA[i];
    const double r1 = df[i] / r[i] - n * (q1 * q1 + (n - 1.0) * q2 * q2 - n);
    const double r2 = dfna[i] / r[i] - 0.5 * (q1 * q1 - q2 * q2);
    const double r3 = r[i] * dq1[i] - q1 * ((n - 1.0) * fna + f) / n;
    const double r4 = r[i] * dq2[i] - q2 * (f - fna) / n;
    sup = std::max({sup, std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
  }
  return sup;
}

namespace {

std::vector<double> interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                                const std::vector<double>& at) {
  std::vector<double> out(at.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double x = at[i];
    while (j + 2 < xs.size() && xs[j + 1] < x) ++j;
    const double t = (x - xs[j]) / (xs[j + 1] - xs[j]);
    out[i] = ys[j] + t * (ys[j + 1] - ys[j]);
  }
  return out;
}

// Unknown layout: 4 per node (f, f_NA, Q1, Q2).
struct ProfileSystem {
  const std::vector<double>& r;
  double N;

  std::size_t size() const { return 4 * r.size(); }

  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& res,
                std::vector<Eigen::Triplet<double>>* jac) const {
    const std::size_t k = r.size();
    const double n = N;
    res.resize(static_cast<Eigen::Index>(size()));
    auto idx = [](std::size_t node, int c) { return static_cast<int>(4 * node) + c; };
    if (jac) jac->clear();
    auto put = [&](int row, int col, double v) {
      if (jac) jac->emplace_back(row, col, v);
    };

    const double r0 = r[0];
    const double c2 = x[idx(0, 3)];
    res[0] = x[idx(0, 0)] - 1.0 - 0.5 * n * ((n - 1.0) * c2 * c2 - n) * r0 * r0;
    put(0, idx(0, 0), 1.0);
    put(0, idx(0, 3), -n * (n - 1.0) * c2 * r0 * r0);
    res[1] = x[idx(0, 1)] - 1.0 + 0.25 * c2 * c2 * r0 * r0;
    put(1, idx(0, 1), 1.0);
    put(1, idx(0, 3), 0.5 * c2 * r0 * r0);

    struct Rates {
      double g[4];
      double d[4][4];  // d[eq][var]
    };
    auto rates = [&](std::size_t i) {
      const double ri = r[i];
      const double f = x[idx(i, 0)], fna = x[idx(i, 1)], q1 = x[idx(i, 2)], q2 = x[idx(i, 3)];
      Rates out{};
      out.g[0] = ri * n * (q1 * q1 + (n - 1.0) * q2 * q2 - n);
      out.d[0][2] = 2.0 * ri * n * q1;
      out.d[0][3] = 2.0 * ri * n * (n - 1.0) * q2;
      out.g[1] = 0.5 * ri * (q1 * q1 - q2 * q2);
      out.d[1][2] = ri * q1;
      out.d[1][3] = -ri * q2;
      const double inv = 1.0 / (n * ri);
      out.g[2] = q1 * ((n - 1.0) * fna + f) * inv;
      out.d[2][0] = q1 * inv;
      out.d[2][1] = (n - 1.0) * q1 * inv;
      out.d[2][2] = ((n - 1.0) * fna + f) * inv;
      out.g[3] = q2 * (f - fna) * inv;
      out.d[3][0] = q2 * inv;
      out.d[3][1] = -q2 * inv;
      out.d[3][3] = (f - fna) * inv;
      return out;
    };

    Rates left = rates(0);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const Rates right = rates(i + 1);
      const double half = 0.5 * (r[i + 1] - r[i]);
      for (int e = 0; e < 4; ++e) {
        const int row = 2 + static_cast<int>(4 * i) + e;
        res[row] = x[idx(i + 1, e)] - x[idx(i, e)] - half * (left.g[e] + right.g[e]);
        for (int v = 0; v < 4; ++v) {
          const double dl = -half * left.d[e][v] - (v == e ? 1.0 : 0.0);
          const double dr = -half * right.d[e][v] + (v == e ? 1.0 : 0.0);
          if (dl != 0.0) put(row, idx(i, v), dl);
          if (dr != 0.0) put(row, idx(i + 1, v), dr);
        }
      }
      left = right;
    }
    const int last = static_cast<int>(size()) - 2;
    res[last] = x[idx(k - 1, 2)] - 1.0;
    put(last, idx(k - 1, 2), 1.0);
    res[last + 1] = x[idx(k - 1, 3)] - 1.0;
    put(last + 1, idx(k - 1, 3), 1.0);
  }
};

void newton_profile(const std::vector<double>& r, int N, Eigen::VectorXd& x, int max_iter,
                    int& iterations) {
  const ProfileSystem sys{r, static_cast<double>(N)};
  const auto dim = static_cast<Eigen::Index>(sys.size());
  Eigen::VectorXd res, trial_res;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::SparseMatrix<double> J(dim, dim);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  constexpr double kNewtonTol = 1e-12;
  sys.evaluate(x, res, &trip);
  bool analyzed = false;
  while (res.lpNorm<Eigen::Infinity>() >= kNewtonTol) {
    if (iterations >= max_iter)
      throw NonConvergence("profile Newton did not converge", iterations,
                           res.lpNorm<Eigen::Infinity>());
    J.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw NonConvergence("profile Newton Jacobian is singular", iterations,
                           res.lpNorm<Eigen::Infinity>());
    const Eigen::VectorXd step = lu.solve(-res);
    const double merit = res.norm();
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int ls = 0; ls < 40; ++ls) {
      trial = x + t * step;
      sys.evaluate(trial, trial_res, nullptr);
      if (trial_res.allFinite() && trial_res.norm() <= (1.0 - 1e-4 * t) * merit) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++iterations;
    if (!accepted) {
      // Accept a full step once the residual is at rounding level.
      if (res.lpNorm<Eigen::Infinity>() < 1e3 * kNewtonTol) break;
      throw NonConvergence("profile Newton line search stalled", iterations,
                           res.lpNorm<Eigen::Infinity>());
    }
    x = trial;
    sys.evaluate(x, res, &trip);
  }
}

}  // namespace

ProfileSet solve_profile_bps(const ProfileParams& pp) {
  if (pp.N < 2) throw InvalidParameter("N must be an integer >= 2");
  if (!(pp.tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (pp.max_doublings < 0 || pp.max_iter < 1) throw InvalidParameter("invalid iteration limits");

  // Initial guess: the (1/2, 0) radial solution, whose reconstruction carries the
  // profile boundary data f(0) = f_NA(0) = 1.
  ModelParams guess_params;
  guess_params.N = pp.N;
  guess_params.n1 = 0.5;
  guess_params.n2 = 0.0;
  guess_params.tau = 1.0;
  guess_params.theorem_mode = false;
  const CouplingData cd = coupling_matrix(guess_params);
  const BackgroundField bg(guess_params);
  RadialMesh mesh = make_radial_mesh(pp.r_min, pp.r_max, pp.nodes);
  const RadialSolution radial = solve_radial_P(guess_params, cd, bg, mesh, 1e-11);
  const ProfileSet guess = reconstruct_profiles(radial, guess_params);

  Eigen::VectorXd x(static_cast<Eigen::Index>(4 * mesh.count()));
  for (std::size_t i = 0; i < mesh.count(); ++i) {
    const auto b = static_cast<Eigen::Index>(4 * i);
    x[b] = guess.f[i];
    x[b + 1] = guess.f_NA[i];
    x[b + 2] = guess.Q1[i];
    x[b + 3] = guess.Q2[i];
  }

  int iterations = 0;
  for (int level = 0;; ++level) {
    newton_profile(mesh.nodes, pp.N, x, pp.max_iter, iterations);
    ProfileSet ps;
    ps.mesh = mesh;
    ps.iterations = iterations;
    const std::size_t k = mesh.count();
    ps.f.resize(k);
    ps.f_NA.resize(k);
    ps.Q1.resize(k);
    ps.Q2.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto b = static_cast<Eigen::Index>(4 * i);
      ps.f[i] = x[b];
      ps.f_NA[i] = x[b + 1];
      ps.Q1[i] = x[b + 2];
      ps.Q2[i] = x[b + 3];
    }
    const double residual = ode_residual(ps, pp.N);
    if (residual < pp.tol) return ps;
    if (level >= pp.max_doublings)
      throw NonConvergence("profile residual " + std::to_string(residual) +
                               " above tolerance after mesh refinement",
                           iterations, residual);
    RadialMesh finer =
        make_radial_mesh(pp.r_min, pp.r_max, 2 * static_cast<int>(mesh.count()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(4 * finer.count()));
    const std::vector<double>* fields[4] = {&ps.f, &ps.f_NA, &ps.Q1, &ps.Q2};
    for (int c = 0; c < 4; ++c) {
      const std::vector<double> v = interpolate(mesh.nodes, *fields[c], finer.nodes);
      for (std::size_t i = 0; i < finer.count(); ++i) y[static_cast<Eigen::Index>(4 * i) + c] = v[i];
    }
    mesh = std::move(finer);
    x = std::move(y);
  }
}

}  // namespace vortexlab
