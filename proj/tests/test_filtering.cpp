#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "doctest.h"

#include "floq/errors.hpp"
#include "floq/filtering.hpp"
#include "floq/lattice.hpp"

using namespace floq;

namespace {

ChainSpec chain_of(int L) {
  ChainSpec c;
  c.L = L;
  return c;
}

DriveProtocol fig1_drive(double a2) { return DriveProtocol::step(0.0, a2, 0.1 * pi, 0.25 * pi); }
DriveProtocol cdt_drive(double a2) { return DriveProtocol::step(-a2, a2, 0.2 * pi, 0.4 * pi); }

}  // namespace

TEST_SUITE("filtering") {
  TEST_CASE("spectral density support, normalization and centre value") {
    const ChainSpec c = chain_of(800);
    CHECK(spectral_density(c, c.lambda - 2.0001) == 0.0);
    CHECK(spectral_density(c, c.lambda + 2.0001) == 0.0);
    CHECK(spectral_density(c, c.lambda + 1.999) > 0.0);
    CHECK(spectral_density(c, c.lambda) == doctest::Approx(1.0 / (2.0 * pi)));
    // omega = lambda + 2J sin(phi) removes the edge singularities.
    const double total = boost::math::quadrature::gauss<double, 30>::integrate(
        [&](double phi) { return spectral_density(c, c.lambda + 2.0 * std::sin(phi)) * 2.0 * std::cos(phi); },
        -0.5 * pi, 0.5 * pi);
    CHECK(total == doctest::Approx(c.g * c.g).epsilon(1e-8));

    ChainSpec ring = chain_of(10000);
    ring.kernel_mode = KernelMode::PaperPlaneWave;
    const auto binned = binned_spectral_density(ring, 0.01);
    CHECK(binned.at(c.lambda) == doctest::Approx(spectral_density(c, c.lambda)).epsilon(0.02));
  }

  TEST_CASE("binned density transforms back to the discrete kernel") {
    const ChainSpec c = chain_of(10000);
    const auto binned = binned_spectral_density(c, 0.01);
    std::vector<double> x;
    for (int i = 0; i <= 200; ++i) x.push_back(0.1 * i);
    const auto f = density_inverse_transform(binned, x);
    const auto k = kernel(c, TimeGrid{0.1, 201});
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(f[i] - k.values[i]));
    CHECK(worst < 1e-3);
  }

  TEST_CASE("constant drive has a sinc-squared control spectrum") {
    const auto d = DriveProtocol::step(1.3, 1.3, 0.3, 1.0);
    const double t = 7.0;
    for (double w : {-3.0, -0.4, 0.2, 1.1, 5.0}) {
      const double expected = std::pow(std::sin(0.5 * w * t), 2) / (2.0 * pi * 0.25 * w * w);
      CHECK(control_spectrum(d, t, {w})[0] == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("control spectrum obeys Parseval") {
    const auto d = fig1_drive(3.2);
    const double t = 5.0;
    const double W = 2000.0, dw = 0.004;
    double s = 0.0;
    for (double w = -W; w <= W; w += dw) s += std::norm(control_amplitude(d, t, w)) * dw;
    CHECK(s == doctest::Approx(t).epsilon(2e-3));
  }

  TEST_CASE("undriven filtering reduces to the golden rule") {
    const ChainSpec c = chain_of(800);
    const auto d = DriveProtocol::step(0.0, 0.0, 0.1 * pi, 0.25 * pi);
    const auto rep = filtered_population(c, d, {60.0});
    const double gamma = 2.0 * pi * spectral_density(c, rep.omega_a);
    CHECK(rep.R.back() == doctest::Approx(gamma).epsilon(0.02));
    CHECK(rep.Q.back() == 60.0);
  }

  TEST_CASE("out-of-band splitting gives bounded decay") {
    const ChainSpec c = chain_of(800);
    const auto d = DriveProtocol::step(5.0, 5.0, 0.1 * pi, 0.25 * pi);
    const auto rep = filtered_population(c, d, {20.0, 40.0, 80.0});
    CHECK(rep.c0_abs[2] > 0.5);
    CHECK(std::abs(rep.c0_abs[2] - rep.c0_abs[1]) < 0.05);
    for (double v : rep.c0_abs) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("filtering fails where a bound mode stabilizes the exact dynamics") {
    const ChainSpec c = chain_of(800);
    const auto d = fig1_drive(3.2);
    const auto rep = filtered_population(c, d, {100.0});
    const double filtered = rep.c0_abs.back() * rep.c0_abs.back();
    const auto exact = propagate_lattice(c, d, 100.0).trajectory;
    CHECK(filtered < 0.05);
    CHECK(exact.p.back() > 10.0 * 0.05);

    // Most of the control weight sits inside the noise band.
    const double t = 100.0;
    double inside = 0.0, total = 0.0;
    const double centre = -d.mean();
    for (double w = centre - 30.0; w <= centre + 30.0; w += 0.01) {
      const double s = std::norm(control_amplitude(d, t, w));
      total += s;
      if (std::abs(w - centre) < 2.0) inside += s;
    }
    CHECK(inside / total > 0.5);
  }

  TEST_CASE("renormalization factors") {
    const auto flat = DriveProtocol::step(2.0, 2.0, 0.3, 1.0);
    CHECK(std::abs(renorm_factor(flat, 0) - 1.0) < 1e-14);
    for (int n = 1; n < 5; ++n) CHECK(std::abs(renorm_factor(flat, n)) < 1e-14);

    const double T = 0.4 * pi;
    for (double a2 : {3.0, 7.5, 10.5, 25.0}) {
      const cplx expected = 2.0 * (std::polar(1.0, a2 * T / 2.0) - 1.0) / (cplx(0.0, 1.0) * a2 * T);
      CHECK(std::abs(renorm_factor(cdt_drive(a2), 0) - expected) < 1e-12);
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0), frac(0.1, 0.9);
    for (int trial = 0; trial < 10; ++trial) {
      const double period = 0.3 + frac(rng);
      const auto d = DriveProtocol::step(u(rng), u(rng), frac(rng) * period, period);
      double parseval = 0.0;
      for (int n = -400; n <= 400; ++n) {
        const cplx f = renorm_factor(d, n);
        CHECK(std::abs(f) <= 1.0 + 1e-12);
        parseval += std::norm(f);
      }
      CHECK(parseval == doctest::Approx(1.0).epsilon(1e-3));
      // Quadrature cross-check of the closed form.
      for (int n : {-2, 0, 3}) {
        const int m = 20000;
        cplx s = 0.0;
        for (int i = 0; i < m; ++i) {
          const double t = (i + 0.5) * period / m;
          s += std::polar(1.0, -d.detuning_phase(t) - n * d.omega() * t);
        }
        CHECK(std::abs(s / static_cast<double>(m) - renorm_factor(d, n)) < 1e-6);
      }
    }
  }

  TEST_CASE("F0 zeros of the symmetric drive") {
    const double T = 0.4 * pi;
    const auto roots = find_f0_zeros(T, 0.5 * T, 5.0, 35.0);
    REQUIRE(roots.size() == 3);
    const double expected[] = {10.0, 20.0, 30.0};
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(roots[i].a2 - expected[i]) < 1e-6);
      CHECK(roots[i].residual < 1e-6);
      const double f = std::abs(renorm_factor(cdt_drive(roots[i].a2), 0));
      CHECK(std::abs(renorm_factor(cdt_drive(roots[i].a2 + 1e-6), 0)) > f);
      CHECK(std::abs(renorm_factor(cdt_drive(roots[i].a2 - 1e-6), 0)) > f);
    }
    CHECK(find_f0_zeros(T, 0.5 * T, 1.0, 9.0).empty());
    CHECK_THROWS_AS(find_f0_zeros(T, 0.5 * T, 9.0, 1.0), Error);
  }

  TEST_CASE("renormalized dynamics") {
    const ChainSpec c = chain_of(400);
    const auto zero = renormalized_dynamics(c, cdt_drive(10.0), 30.0);
    CHECK(zero.approximate);
    for (double p : zero.p) CHECK(p == doctest::Approx(1.0).epsilon(1e-9));

    const auto flat = DriveProtocol::step(1.0, 1.0, 0.1 * pi, 0.25 * pi);
    const auto r = renormalized_dynamics(c, flat, 20.0);
    const auto e = propagate_lattice(c, flat, 20.0).trajectory;
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r.p[i] - e.p[i]) < 1e-12);

    const auto off = renormalized_dynamics(chain_of(800), cdt_drive(10.5), 50.0);
    const auto exact_off = propagate_lattice(chain_of(800), cdt_drive(10.5), 50.0).trajectory;
    const auto exact_on = propagate_lattice(chain_of(800), cdt_drive(10.0), 50.0).trajectory;
    CHECK(off.p.back() < 0.9);
    CHECK(exact_off.p.back() < exact_on.p.back() - 0.1);
  }
}
