#include <doctest.h>

#include <cmath>

#include "vortexlab/errors.hpp"
#include "vortexlab/model.hpp"

using namespace vortexlab;

TEST_CASE("coupling data for N = 2 has the exact quarter coefficients") {
  const CouplingData cd = coupling_matrix(2);
  CHECK(cd.alpha == 1.25);
  CHECK(cd.beta == 0.75);
  CHECK(cd.A == Mat2{1.25, 0.75, 0.75, 1.25});
  CHECK(cd.gamma == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("coupling matrix eigenvalues are N and 1/2") {
  for (int N = 2; N <= 64; ++N) {
    const auto [big, small] = real_eigenvalues(coupling_matrix(N).A);
    CHECK(big == doctest::Approx(N).epsilon(1e-13));
    CHECK(small == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("Crout factors and the symmetrizer") {
  for (int N : {2, 3, 5, 17, 64}) {
    const CouplingData cd = coupling_matrix(N);
    CHECK(cd.L.a11 == 1.0);
    CHECK(cd.L.a12 == 0.0);
    CHECK(cd.L.a22 == 1.0);
    CHECK(cd.R.a21 == 0.0);
    CHECK(max_abs(cd.L * cd.R - cd.A) < 1e-12);
    CHECK(max_abs(cd.B * cd.A - cd.M) < 1e-12);
    CHECK(cd.M.a12 == doctest::Approx(cd.M.a21).epsilon(1e-14));
    const double det_m = cd.M.det();
    CHECK(det_m > 0.0);
    CHECK(cd.M.a11 > 0.0);
    // R22 = det(A) / A11 = (N/2) / alpha
    CHECK(cd.R.a22 == doctest::Approx(0.5 * N / cd.alpha).epsilon(1e-13));
  }
}

TEST_CASE("spectral constants diagonalize M and D") {
  for (int N : {2, 4, 9, 33}) {
    const CouplingData cd = coupling_matrix(N);
    const SpectralConstants sc = spectral_constants(cd);
    const Mat2 diagM = sc.O.transpose() * cd.M * sc.O;
    CHECK(std::abs(diagM.a11 - sc.lambda1) < 1e-11 * sc.lambda1);
    CHECK(std::abs(diagM.a22 - sc.lambda2) < 1e-11 * sc.lambda1);
    CHECK(std::abs(diagM.a12) < 1e-11 * sc.lambda1);
    CHECK(max_abs(sc.O.transpose() * sc.O - Mat2::identity()) < 1e-14);
    CHECK(sc.lambda0 == std::min(sc.lambda1, sc.lambda2));
    CHECK(max_abs(sc.D - cd.M * cd.B.inverse()) < 1e-12);
    // The columns of T are eigenvectors of D, so T^{-1} D T is diagonal.
    const Mat2 diagD = sc.T.inverse() * sc.D * sc.T;
    CHECK(std::abs(diagD.a11 - sc.lambda3) < 1e-11 * N);
    CHECK(std::abs(diagD.a22 - sc.lambda4) < 1e-11 * N);
    CHECK(std::abs(diagD.a12) < 1e-11 * N);
    CHECK(std::abs(diagD.a21) < 1e-11 * N);
    CHECK(sc.lambda == doctest::Approx(0.5));
  }
}

TEST_CASE("flux targets follow from the component targets") {
  // A (I1, I2) = -4 pi n, and the quantized combinations are rows (m, 2) A and (p, q) A.
  for (int N : {2, 3, 7}) {
    for (auto [n1, n2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {3.0, 1.0}}) {
      const ModelParams p{N, n1, n2, 1.0, true};
      const CouplingData cd = coupling_matrix(p);
      const SpectralConstants sc = spectral_constants(cd);
      const Vec2 I = component_flux_targets(p, cd);
      const Vec2 back = cd.A * I;
      CHECK(back.x1 == doctest::Approx(-4.0 * kPi * n1).epsilon(1e-13));
      CHECK(back.x2 == doctest::Approx(-4.0 * kPi * n2).epsilon(1e-13));
      const FluxPair t = flux_targets(p, sc);
      const Vec2 AI = cd.A * I;
      CHECK(std::abs(sc.m * AI.x1 + 2.0 * AI.x2 - t.first) < 1e-10);
      CHECK(std::abs(sc.p * AI.x1 + sc.q * AI.x2 - t.second) < 1e-10);
    }
  }
}

TEST_CASE("flux targets for the worked cases") {
  const ModelParams sym{2, 1.0, 1.0, 1.0, true};
  const FluxPair a = flux_targets(sym, spectral_constants(coupling_matrix(2)));
  CHECK(a.first == doctest::Approx(-16.0 * kPi));
  CHECK(a.second == 0.0);
  CHECK_FALSE(std::signbit(a.second));
  const ModelParams mixed{3, 1.0, 2.0, 1.0, true};
  const FluxPair b = flux_targets(mixed, spectral_constants(coupling_matrix(3)));
  CHECK(b.first == doctest::Approx(-18.0 * kPi).epsilon(1e-14));
  CHECK(b.second == doctest::Approx(12.0 * kPi).epsilon(1e-14));
  const Vec2 c = component_flux_targets(sym, coupling_matrix(2));
  CHECK(c.x1 == doctest::Approx(-2.0 * kPi).epsilon(1e-15));
  CHECK(c.x2 == doctest::Approx(-2.0 * kPi).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ModelParams{1, 1, 1, 1, true}.validate()), InvalidParameter);
  CHECK_THROWS_AS((ModelParams{2, 0.5, 1, 1, true}.validate()), InvalidParameter);
  CHECK_THROWS_AS((ModelParams{2, 0, 1, 1, true}.validate()), InvalidParameter);
  CHECK_THROWS_AS((ModelParams{2, 1, 1, 0.0, true}.validate()), InvalidParameter);
  CHECK_THROWS_AS((ModelParams{2, -1, 1, 1, false}.validate()), InvalidParameter);
  CHECK_NOTHROW((ModelParams{2, 0.5, 0, 1, false}.validate()));
  CHECK_NOTHROW((ModelParams{5, 2, 3, 0.25, true}.validate()));
}

TEST_CASE("background field against direct evaluation") {
  const ModelParams p{2, 1.0, 2.0, 0.7, true};
  const BackgroundField bg(p);
  for (double r : {0.05, 0.3, 1.0, 2.5, 8.0}) {
    const double r2 = r * r;
    for (int i = 0; i < 2; ++i) {
      const double n = i == 0 ? p.n1 : p.n2;
      const double u0 = -n * std::log(1.0 + p.tau / r2);
      CHECK(bg.u0(i, r2) == doctest::Approx(u0).epsilon(1e-14));
      CHECK(bg.exp_two_u0(i, r2) == doctest::Approx(std::exp(2.0 * u0)).epsilon(1e-13));
      CHECK(bg.exp_two_u0_minus_one(i, r2) ==
            doctest::Approx(std::exp(2.0 * u0) - 1.0).epsilon(1e-12));
      CHECK(bg.exp_u0(i, r2) == doctest::Approx(std::exp(u0)).epsilon(1e-13));
      // r d/dr by central differences in r.
      const double dr = 1e-6 * r;
      const double fd = r * (bg.u0(i, (r + dr) * (r + dr)) - bg.u0(i, (r - dr) * (r - dr))) / (2 * dr);
      CHECK(bg.r_du0_dr(i, r2) == doctest::Approx(fd).epsilon(1e-7));
      // -Lap u0 = phi away from the origin: Lap = (1/r) d/dr (r d/dr).
      const auto rdu = [&](double s) { return bg.r_du0_dr(i, s * s); };
      const double lap = (rdu(r + dr) - rdu(r - dr)) / (2 * dr) / r;
      CHECK(-lap == doctest::Approx(bg.phi(i, r2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("background at the origin and far away") {
  const BackgroundField bg(ModelParams{3, 2.0, 1.0, 1.0, true});
  CHECK(std::isinf(bg.u0(0, 0.0)));
  CHECK(bg.exp_two_u0(0, 0.0) == 0.0);
  CHECK(bg.exp_two_u0_minus_one(1, 0.0) == -1.0);
  CHECK(bg.r_du0_dr(0, 0.0) == doctest::Approx(4.0));
  // expm1 form keeps full relative accuracy where 1 - tiny cancels.
  const double r2 = 1e12;
  CHECK(bg.exp_two_u0_minus_one(1, r2) == doctest::Approx(-2.0 / r2).epsilon(1e-10));
}

TEST_CASE("closed-form disc integral of the source") {
  const ModelParams p{2, 1.0, 3.0, 0.4, true};
  const BackgroundField bg(p);
  for (double R : {0.5, 2.0, 10.0}) {
    for (int i = 0; i < 2; ++i) {
      // Composite Simpson in r of 2 pi r phi.
      const int n = 20000;
      const double h = R / n;
      double s = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double r = k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += w * 2.0 * kPi * r * bg.phi(i, r * r);
      }
      s *= h / 3.0;
      CHECK(bg.phi_disc_integral(i, R) == doctest::Approx(s).epsilon(1e-10));
    }
  }
}
