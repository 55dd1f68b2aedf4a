#include <doctest.h>

#include <cmath>
#include <vector>

#include "mcap/errors.hpp"
#include "mcap/miso.hpp"
#include "mcap/soft_coverage.hpp"
#include "oracles.hpp"

using namespace mcap;
using doctest::Approx;

namespace {

// mu(h) as displayed with unnormalized incomplete gamma functions.
double mu_display(double h, double gamma, int m, int n) {
  const double big = oracle::upper_gamma(m, m * h);
  const double gm = oracle::factorial(m - 1);
  const double num = big + gamma * std::pow(big, n) / std::pow(gm, n - 1);
  const double den = std::pow(m, m) * std::pow(h, m + 1) * std::exp(-m * h) *
                     (1.0 + gamma * n * std::pow(big / gm, n - 1));
  return num / den - 1.0 / h;
}

}  // namespace

TEST_SUITE("miso") {

TEST_CASE("weight function") {
  for (int m : {1, 2, 4}) CHECK(w_fun(0.0, 0.7, m, 5) == Approx(1.7).epsilon(1e-15));
  for (double x : {0.1, 0.5, 2.0}) {
    CHECK(w_fun(x, 0.3, 1, 5) == Approx(std::exp(-x) + 0.3 * std::exp(-5.0 * x)).epsilon(1e-14));
  }
  CHECK(w_fun(1.0, 0.0, 2, 5) == Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(w_fun(1.0, 0.0, 2, 5) == Approx(0.406006).epsilon(1e-6));
  for (int m : {1, 3}) {
    for (double x : {0.2, 0.9}) {
      const double g = oracle::chi_survival(m, x);
      CHECK(w_fun(x, 2.0, m, 4) == Approx(g + 2.0 * std::pow(g, 4)).epsilon(1e-13));
    }
  }
}

TEST_CASE("weight derivative") {
  for (double x : {0.1, 1.0, 3.0}) CHECK(w_prime(x, 0.0, 1, 5) == Approx(-std::exp(-x)).epsilon(1e-14));
  for (double gamma : {0.0, 1.0, 5.0}) {
    for (int m : {1, 2, 4, 8}) {
      for (double x : {0.2, 0.7, 1.3}) {
        const double fd = oracle::derivative([&](double t) { return w_fun(t, gamma, m, 5); }, x, 1e-5);
        CAPTURE(gamma);
        CAPTURE(m);
        CAPTURE(x);
        CHECK(std::fabs(w_prime(x, gamma, m, 5) - fd) <= 1e-6 * std::fabs(fd) + 1e-12);
        CHECK(w_prime(x, gamma, m, 5) <= 0.0);
      }
    }
  }
  for (int m : {2, 4}) CHECK(std::fabs(w_prime(1e-12, 1.0, m, 5)) < 1e-10);
}

TEST_CASE("stationary interference") {
  for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
    for (double h : {0.1, 0.5, 0.9}) {
      CHECK(mu_interference(h, gamma, 1, 5) == Approx(i_gamma_sc(h, gamma, 5)).epsilon(1e-10));
    }
  }
  CHECK(mu_interference(0.5, 0.0, 1, 5) == Approx(2.0).epsilon(1e-14));
  CHECK(mu_interference(0.5, 0.0, 2, 5) == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(mu_interference(0.0, 1.0, 2, 5), DomainError);
}

TEST_CASE("w-form interference equals the displayed form") {
  for (int m : {1, 2, 3, 6}) {
    for (int n : {1, 4, 10}) {
      for (double gamma : {0.0, 0.5, 3.0}) {
        for (double h : {0.15, 0.6, 1.1}) {
          CAPTURE(m);
          CAPTURE(n);
          CAPTURE(gamma);
          CAPTURE(h);
          CHECK(mu_interference(h, gamma, m, n) == Approx(mu_display(h, gamma, m, n)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("density matches a finite difference of mu") {
  for (int m : {1, 2, 4}) {
    for (double gamma : {0.0, 1.0}) {
      const auto th = solve_thresholds_miso(gamma, m, 5, 100.0);
      for (int i = 1; i < 10; ++i) {
        const double h = th.h0 + (th.h1 - th.h0) * i / 10.0;
        const double fd = -oracle::derivative([&](double x) { return mu_interference(x, gamma, m, 5); }, h, 1e-6 * h);
        CHECK(rho_miso(h, gamma, m, 5) == Approx(fd).epsilon(1e-6));
        CHECK(rho_miso(h, gamma, m, 5) >= 0.0);
      }
    }
  }
}

TEST_CASE("thresholds") {
  for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
    const auto a = solve_thresholds_miso(gamma, 1, 5, 100.0);
    const auto b = solve_thresholds_sc(gamma, 5, 100.0);
    CHECK(std::fabs(a.h0 - b.h0) <= 1e-9);
    CHECK(std::fabs(a.h1 - b.h1) <= 1e-9);
  }
  CHECK(solve_thresholds_miso(0.0, 2, 5, 2.0).h0 == Approx(0.5).epsilon(1e-12));
  for (int m : {2, 4, 16}) {
    for (double gamma : {0.0, 2.0}) {
      const auto t = solve_thresholds_miso(gamma, m, 5, 100.0);
      CHECK(std::fabs(mu_interference(t.h0, gamma, m, 5) - 100.0) <= 1e-8 * 100.0);
      CHECK(std::fabs(mu_interference(t.h1, gamma, m, 5)) <= 1e-8);
      CHECK(t.h0 < t.h1);
    }
  }
}

TEST_CASE("single antenna reduces to the SISO region") {
  const NetworkConfig cfg{5, 100.0, 0.01, 1};
  for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
    const auto a = region_point_miso(gamma, cfg);
    const auto b = region_point_soft(gamma, cfg);
    CHECK(std::fabs(a.point.coverage - b.point.coverage) <= 1e-6);
    CHECK(std::fabs(a.point.average - b.point.average) <= 1e-6);
  }
}

TEST_CASE("single user: average equals multicast") {
  for (int m : {2, 4}) {
    const NetworkConfig cfg{1, 100.0, 0.01, m};
    const auto s = region_point_miso(1.0, cfg);
    CHECK(s.point.average == Approx(s.point.coverage).epsilon(1e-12));
  }
}

TEST_CASE("more antennas raise the multicast rate") {
  double prev = 0.0;
  for (int m : {1, 2, 4}) {
    const auto s = region_point_miso(1.0, {5, 100.0, 0.01, m});
    CHECK(s.point.coverage > prev);
    CHECK(validate(s.allocation).ok());
    prev = s.point.coverage;
  }
}

TEST_CASE("Euler-Lagrange residual vanishes") {
  struct Case {
    int m, n;
    double gamma;
  };
  for (const Case c : {Case{2, 5, 1.0}, Case{4, 10, 0.5}}) {
    const auto th = solve_thresholds_miso(c.gamma, c.m, c.n, 100.0);
    for (int i = 1; i <= 20; ++i) {
      const double x = th.h0 + (th.h1 - th.h0) * i / 21.0;
      const double d = 1.0 + x * mu_interference(x, c.gamma, c.m, c.n);
      const double a = x * w_prime(x, c.gamma, c.m, c.n) / d;
      const double b = w_fun(x, c.gamma, c.m, c.n) / (d * d);
      CHECK(std::fabs(a + b) <= 1e-8 * (std::fabs(a) + std::fabs(b)));
    }
  }
}

TEST_CASE("antenna requirement") {
  const auto b = required_antennas(100, 10.0, 0.3, 5.0);
  CHECK(b.sigma_prime == Approx(0.33).epsilon(1e-14));
  CHECK(b.required_m == 131);
  CHECK(b.required_m == static_cast<int>(std::ceil((2.0 * std::log(100.0) + 5.0) / (0.33 * 0.33))));
  const auto small = required_antennas(3, 10.0, 0.3, 1e-9);
  CHECK(small.required_m == static_cast<int>(std::ceil(2.0 * std::log(3.0) / (0.33 * 0.33))));
  CHECK_THROWS_AS(required_antennas(100, 10.0, 0.95, 5.0), DomainError);
  CHECK_THROWS_AS(required_antennas(100, 10.0, 10.0 / 11.0, 5.0), DomainError);
}

TEST_CASE("single-layer scheme") {
  const auto s = single_layer_scheme(10.0, 0.3);
  CHECK(s.rate == Approx(std::log(7.7)).epsilon(1e-14));
  CHECK(s.rate == Approx(2.04122).epsilon(1e-5));
  CHECK(s.threshold == Approx(0.67).epsilon(1e-14));
  CHECK(single_layer_scheme(10.0, 1e-12).rate == Approx(std::log(11.0)).epsilon(1e-10));
  CHECK_THROWS_AS(single_layer_scheme(10.0, 10.0 / 11.0), DomainError);
}

TEST_CASE("predicted multicast rate") {
  const double r = std::log(7.7);
  const double ref = std::pow(1.0 - oracle::q(std::sqrt(131.0) * 0.33), 100) * r;
  CHECK(predicted_rmul_single_layer(100, 131, 10.0, 0.3) == Approx(ref).epsilon(1e-9));
  CHECK(predicted_rmul_single_layer(100, 131, 10.0, 0.3) == Approx(2.02509).epsilon(1e-5));
  CHECK(predicted_rmul_single_layer(1, 1, 10.0, 0.3) == Approx((1.0 - oracle::q(0.33)) * r).epsilon(1e-9));
  CHECK(predicted_rmul_single_layer(100, 100000, 10.0, 0.3) == Approx(r).epsilon(1e-12));
  double prev = 0.0;
  for (int m = 1; m <= 400; m += 7) {
    const double v = predicted_rmul_single_layer(100, m, 10.0, 0.3);
    CHECK(v <= r);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("exact multicast rate of the single layer") {
  for (int m : {1, 8, 131}) {
    const double ref = std::pow(oracle::chi_survival(m, 0.67), 100) * std::log(7.7);
    CHECK(exact_rmul_single_layer(100, m, 10.0, 0.3) == Approx(ref).epsilon(1e-9));
  }
  CHECK(exact_rmul_single_layer(100, 131, 10.0, 0.3) >= 0.99 * std::log(7.7));
}

TEST_CASE("Gaussian approximation of the worst-user CDF is conservative") {
  // The normal approximation ignores the right skew of the chi-square law, so
  // it overstates the lower tail: exact <= approximate at h = 1 - sigma'.
  for (int m : {16, 64, 131, 256}) {
    const double h = 1.0 - 0.33;
    const double exact = 1.0 - std::pow(oracle::chi_survival(m, h), 100);
    const double approx = gaussian_multicast_cdf(m, 100, h);
    CAPTURE(m);
    CHECK(exact <= approx);
    CHECK(approx == Approx(1.0 - std::pow(oracle::q(-std::sqrt(m) * 0.33), 100)).epsilon(1e-9));
  }
  CHECK(gaussian_multicast_cdf(1000, 1, 1.0) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("ergodic bound") {
  CHECK(ergodic_upper_bound(100.0) == Approx(std::log(101.0)).epsilon(1e-15));
  CHECK(std::fabs(ergodic_upper_bound(100.0) - 4.61512) <= 1e-5);
  CHECK(std::fabs(ergodic_upper_bound(10.0) - 2.39790) <= 1e-5);
  CHECK(ergodic_upper_bound(0.0) == 0.0);
}

}
