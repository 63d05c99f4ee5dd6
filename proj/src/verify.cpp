#include "vortexlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

FluxRecord make_record(double value, double target, double scale) {
  FluxRecord rec;
  rec.value = value;
  rec.target = target;
  rec.abs_error = std::abs(value - target);
  rec.rel_error = rec.abs_error / scale;
  return rec;
}

std::pair<FluxRecord, FluxRecord> record_pair(Vec2 values, Vec2 targets) {
  const double fallback = std::max(std::abs(targets.x1), std::abs(targets.x2));
  const double pair_scale = fallback > 0.0 ? fallback : 1.0;
  auto scale = [&](double t) { return t != 0.0 ? std::abs(t) : pair_scale; };
  return {make_record(values.x1, targets.x1, scale(targets.x1)),
          make_record(values.x2, targets.x2, scale(targets.x2))};
}

double interpolate_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

std::vector<DecayRecord> decay_records(const std::vector<double>& r, const std::vector<double>& u1,
                                       const std::vector<double>& u2, const SpectralConstants& sc,
                                       DecayWindow window) {
  const std::size_t k = r.size();
  std::vector<double> field(k), field_alt(k), comb_m(k), comb_pq(k);
  for (std::size_t i = 0; i < k; ++i) {
    field[i] = std::hypot(sc.p * u1[i], 2.0 * u2[i]);
    comb_m[i] = sc.m * u1[i] + 2.0 * u2[i];
    comb_pq[i] = sc.p * u1[i] + sc.q * u2[i];
    field_alt[i] = std::hypot(comb_m[i], comb_pq[i]);
  }
  const std::vector<double> grad_m = mesh_derivative(r, comb_m);
  const std::vector<double> grad_pq = mesh_derivative(r, comb_pq);

  const double slow = std::sqrt(2.0 * sc.lambda4);
  const double fast = std::sqrt(2.0 * sc.lambda3);
  struct Item {
    const char* name;
    const std::vector<double>* values;
    double bound;
  };
  const Item items[] = {
      {"field", &field, std::sqrt(sc.lambda0)},
      {"grad_m2", &grad_m, std::sqrt(sc.lambda)},
      {"grad_pq", &grad_pq, std::sqrt(sc.lambda)},
      {"field_alt", &field_alt, std::sqrt(sc.lambda0)},
  };
  std::vector<DecayRecord> out;
  for (const Item& item : items) {
    const SlopeFit fit = fit_decay_rate(r, *item.values, window);
    DecayRecord rec;
    rec.quantity = item.name;
    rec.window = fit.window;
    rec.fitted_rate = fit.rate;
    rec.paper_bound = item.bound;
    rec.linearized_rate = slow;
    rec.linearized_rate_fast = fast;
    rec.samples = fit.samples;
    if (!fit.rate)
      rec.warning = "fewer than 5 samples above the floating-point floor; no rate fitted";
    else if (fit.shrunk)
      rec.warning = "window shrunk to stay above the floating-point floor";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

ConstantsRecord ConstantsRecord::from(const CouplingData& cd, const SpectralConstants& sc) {
  return {cd.alpha,     cd.beta,      cd.gamma,    sc.lambda0, sc.lambda1, sc.lambda2,
          sc.lambda3,   sc.lambda4,   sc.lambda,   sc.m,       sc.p,       sc.q};
}

Vec2 radial_component_integrals(const RadialSolution& sol) {
  const auto& r = sol.mesh.nodes;
  // The innermost cell reaches the origin; E is taken constant across it.
  double i1 = kPi * r[0] * r[0] * sol.E1[0];
  double i2 = kPi * r[0] * r[0] * sol.E2[0];
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double w = kPi * (r[i + 1] - r[i]);
    i1 += w * (r[i] * sol.E1[i] + r[i + 1] * sol.E1[i + 1]);
    i2 += w * (r[i] * sol.E2[i] + r[i + 1] * sol.E2[i + 1]);
  }
  return {i1, i2};
}

Vec2 planar_component_integrals(const PlanarSolution& sol) {
  std::vector<double> row1(static_cast<std::size_t>(sol.grid.points_per_side), 0.0);
  std::vector<double> row2(row1.size(), 0.0);
  const int n = sol.grid.points_per_side;
  for (int j = 0; j < n; ++j) {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t k = sol.grid.index(i, j);
      s1 += sol.E1[k];
      s2 += sol.E2[k];
    }
    row1[static_cast<std::size_t>(j)] = s1;
    row2[static_cast<std::size_t>(j)] = s2;
  }
  double t1 = 0.0, t2 = 0.0;
  for (std::size_t j = 0; j < row1.size(); ++j) {
    t1 += row1[j];
    t2 += row2[j];
  }
  const double area = sol.grid.cell_area();
  return {area * t1, area * t2};
}

FluxReport flux_report_from_components(const ModelParams& params, const CouplingData& cd,
                                       const SpectralConstants& sc, Vec2 c) {
  const FluxIntegrandRows rows = flux_integrand_rows(cd, sc);
  const FluxPair targets = flux_targets(params, sc);
  const Vec2 values{rows.first.x1 * c.x1 + rows.first.x2 * c.x2,
                    rows.second.x1 * c.x1 + rows.second.x2 * c.x2};
  auto [a, b] = record_pair(values, {targets.first, targets.second});
  return {a, b};
}

ComponentFluxReport component_flux(const ModelParams& params, const CouplingData& cd, Vec2 c) {
  auto [a, b] = record_pair(c, component_flux_targets(params, cd));
  return {a, b};
}

FluxReport flux_integrals(const RadialSolution& sol, const SpectralConstants& sc) {
  return flux_report_from_components(sol.params, coupling_matrix(sol.params), sc,
                                     radial_component_integrals(sol));
}

FluxReport flux_integrals(const PlanarSolution& sol, const SpectralConstants& sc) {
  return flux_report_from_components(sol.params, coupling_matrix(sol.params), sc,
                                     planar_component_integrals(sol));
}

SlopeFit fit_decay_rate(const std::vector<double>& r, const std::vector<double>& y,
                        DecayWindow window) {
  if (r.size() != y.size()) throw InvalidParameter("decay fit needs matching arrays");
  if (!(window.r_a < window.r_b)) throw InvalidParameter("decay window must satisfy r_a < r_b");
  SlopeFit fit;
  fit.window = window;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  double last_r = window.r_a;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < window.r_a) continue;
    if (r[i] > window.r_b) break;
    const double v = std::abs(y[i]);
    if (!(v >= kDecayFloor) || !std::isfinite(v)) {
      fit.shrunk = true;
      break;
    }
    const double ly = std::log(v);
    sx += r[i];
    sy += ly;
    sxx += r[i] * r[i];
    sxy += r[i] * ly;
    ++count;
    last_r = r[i];
  }
  if (fit.shrunk) fit.window.r_b = last_r;
  fit.samples = count;
  if (count < 5) return fit;
  const double n = count;
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) return fit;
  fit.rate = -(n * sxy - sx * sy) / denom;
  return fit;
}

std::vector<DecayRecord> decay_fit(const RadialSolution& sol, const SpectralConstants& sc,
                                   DecayWindow window) {
  if (sol.mesh.r_max < 20.0) throw InvalidParameter("decay fit needs r_max >= 20");
  return decay_records(sol.mesh.nodes, sol.u1, sol.u2, sc, window);
}

std::vector<DecayRecord> decay_fit(const PlanarSolution& sol, const SpectralConstants& sc,
                                   DecayWindow window) {
  const std::vector<RadialSample> slice = extract_radial_slice(sol);
  std::vector<double> r, u1, u2;
  for (const auto& s : slice) {
    r.push_back(s.r);
    u1.push_back(s.u1);
    u2.push_back(s.u2);
  }
  if (r.size() < 3) throw InvalidParameter("planar slice too short for a decay fit");
  return decay_records(r, u1, u2, sc, window);
}

double pde_residual(const RadialSolution& sol, const CouplingData& cd, const BackgroundField& bg) {
  const std::vector<double> res = radial_cell_residual(cd, bg, sol.mesh, sol.P1, sol.P2);
  double sup = 0.0;
  for (double x : res) sup = std::max(sup, std::abs(x));
  return sup;
}

double pde_residual(const PlanarSolution& sol, const CouplingData& cd, const BackgroundField& bg) {
  const PlanarGrid& g = sol.grid;
  const int n = g.points_per_side;
  const double inv_h2 = 1.0 / g.cell_area();
  const auto stride = static_cast<std::size_t>(n);
  const Mat2& A = cd.A;
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 1; j < n - 1; ++j) {
    double m = 0.0;
    const double y = g.coord(j);
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double x = g.coord(i);
      const double r2 = x * x + y * y;
      const auto& P1 = sol.P1;
      const auto& P2 = sol.P2;
      const double lap1 = (P1[k - 1] + P1[k + 1] + P1[k - stride] + P1[k + stride] - 4.0 * P1[k]) * inv_h2;
      const double lap2 = (P2[k - 1] + P2[k + 1] + P2[k - stride] + P2[k + stride] - 4.0 * P2[k]) * inv_h2;
      const double r1 = lap1 - (A.a11 * sol.E1[k] + A.a12 * sol.E2[k]) - bg.phi(0, r2);
      const double rr2 = lap2 - (A.a21 * sol.E1[k] + A.a22 * sol.E2[k]) - bg.phi(1, r2);
      m = std::max({m, std::abs(r1), std::abs(rr2)});
    }
    rows[static_cast<std::size_t>(j)] = m;
  }
  return *std::max_element(rows.begin(), rows.end());
}

CrossValidationRecord cross_validate(const RadialSolution& radial, const PlanarSolution& planar) {
  if (!(radial.params == planar.params))
    throw InvalidParameter("cross validation needs radial and planar solutions for the same parameters");
  CrossValidationRecord rec;
  rec.window = {0.5, std::min(10.0, planar.grid.half_width - 5.0)};
  if (!(rec.window.r_a < rec.window.r_b))
    throw InvalidParameter("planar box too small for the cross-validation window");
  const BackgroundField bg(radial.params);
  double sup = 0.0;
  for (const RadialSample& s : extract_radial_slice(planar)) {
    if (s.r < rec.window.r_a || s.r > rec.window.r_b) continue;
    const double r2 = s.r * s.r;
    const double ru1 = bg.u0(0, r2) + interpolate_linear(radial.mesh.nodes, radial.P1, s.r);
    const double ru2 = bg.u0(1, r2) + interpolate_linear(radial.mesh.nodes, radial.P2, s.r);
    sup = std::max({sup, std::abs(s.u1 - ru1), std::abs(s.u2 - ru2)});
  }
  rec.sup_difference = sup;
  return rec;
}

double uniqueness_difference(const PlanarSolution& a, const PlanarSolution& b) {
  if (!(a.grid == b.grid)) throw InvalidParameter("uniqueness check needs identical grids");
  double sup = 0.0;
  for (std::size_t k = 0; k < a.P1.size(); ++k)
    sup = std::max({sup, std::abs(a.P1[k] - b.P1[k]), std::abs(a.P2[k] - b.P2[k])});
  return sup;
}

VerificationReport verify_radial(const RadialSolution& sol, DecayWindow window) {
  const CouplingData cd = coupling_matrix(sol.params);
  const SpectralConstants sc = spectral_constants(cd);
  const BackgroundField bg(sol.params);
  VerificationReport rep;
  rep.params = sol.params;
  rep.constants = ConstantsRecord::from(cd, sc);
  const Vec2 c = radial_component_integrals(sol);
  rep.flux = flux_report_from_components(sol.params, cd, sc, c);
  rep.component_flux = component_flux(sol.params, cd, c);
  rep.decay = decay_fit(sol, sc, window);
  rep.residuals.pde_sup = pde_residual(sol, cd, bg);
  return rep;
}

VerificationReport verify_planar(const PlanarSolution& sol, DecayWindow window) {
  const CouplingData cd = coupling_matrix(sol.params);
  const SpectralConstants sc = spectral_constants(cd);
  const BackgroundField bg(sol.params);
  VerificationReport rep;
  rep.params = sol.params;
  rep.constants = ConstantsRecord::from(cd, sc);
  const Vec2 c = planar_component_integrals(sol);
  rep.flux = flux_report_from_components(sol.params, cd, sc, c);
  rep.component_flux = component_flux(sol.params, cd, c);
  rep.decay = decay_fit(sol, sc, window);
  rep.residuals.pde_sup = pde_residual(sol, cd, bg);
  return rep;
}

}  // namespace vortexlab
