#include <cmath>
#include <random>

#include "doctest.h"

#include "floq/errors.hpp"
#include "floq/model.hpp"

using namespace floq;

namespace {

ChainSpec small_chain(int L, double g = 0.5, double lambda = 3.0) {
  ChainSpec c;
  c.L = L;
  c.J = 1.0;
  c.g = g;
  c.lambda = lambda;
  return c;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("effective hamiltonian transcribes the single-excitation matrix") {
    const auto h = build_effective_hamiltonian(small_chain(2), 2.0);
    REQUIRE(h.size() == 3);
    CHECK(h.diag(0) == 5.0);
    CHECK(h.diag(1) == 3.0);
    CHECK(h.diag(2) == 3.0);
    CHECK(h.offdiag(0) == 0.5);
    CHECK(h.offdiag(1) == 1.0);
    const Eigen::MatrixXd d = h.dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("g = 0 decouples the impurity") {
    const Eigen::MatrixXd d = build_effective_hamiltonian(small_chain(10, 0.0), 1.0).dense();
    CHECK(d.row(0).tail(10).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.col(0).tail(10).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("open chain block fills the band") {
    ChainSpec c = small_chain(400, 0.0, 20.0);
    const Eigen::MatrixXd d = build_effective_hamiltonian(c, 0.0).dense().bottomRightCorner(400, 400);
    const Eigen::VectorXd e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d).eigenvalues();
    CHECK(e.minCoeff() > 18.0);
    CHECK(e.maxCoeff() < 22.0);
    CHECK(e.minCoeff() == doctest::Approx(18.0).epsilon(1e-4));
    CHECK(e.maxCoeff() == doctest::Approx(22.0).epsilon(1e-4));
  }

  TEST_CASE("chain spectrum conventions") {
    ChainSpec c = small_chain(800, 1.0, 20.0);
    c.kernel_mode = KernelMode::PaperPlaneWave;
    auto modes = chain_spectrum(c);
    CHECK(modes.front().n == 0);
    CHECK(modes.front().energy == doctest::Approx(22.0));

    ChainSpec c4 = small_chain(4, 1.0, 0.0);
    c4.kernel_mode = KernelMode::PaperPlaneWave;
    modes = chain_spectrum(c4);
    REQUIRE(modes.size() == 4);
    const double expected[] = {2.0, 0.0, -2.0, 0.0};
    for (int i = 0; i < 4; ++i) CHECK(modes[i].energy == doctest::Approx(expected[i]).epsilon(1e-12));

    for (auto mode : {KernelMode::PaperPlaneWave, KernelMode::OpenChainExact}) {
      ChainSpec s = small_chain(37, 0.7);
      s.kernel_mode = mode;
      double total = 0.0;
      for (const auto& m : chain_spectrum(s)) total += m.weight;
      CHECK(total == doctest::Approx(0.49).epsilon(1e-12));
    }
  }

  TEST_CASE("kernel values") {
    ChainSpec c = small_chain(200, 0.8, 20.0);
    TimeGrid grid{0.01, 2001};
    const auto k = kernel(c, grid);
    CHECK(std::abs(k.values[0] - cplx(0.64, 0.0)) < 1e-12);
    ChainSpec shifted = c;
    shifted.lambda += 5.0;
    const auto k2 = kernel(shifted, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) worst = std::max(worst, std::abs(std::abs(k.values[i]) - std::abs(k2.values[i])));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("continuum kernel matches a large plane-wave sum") {
    ChainSpec c = small_chain(10000, 1.0, 20.0);
    c.kernel_mode = KernelMode::PaperPlaneWave;
    TimeGrid grid{0.02, 1001};
    const auto d = kernel(c, grid, KernelProvenance::DiscreteSum);
    const auto b = kernel(c, grid, KernelProvenance::ContinuumBessel);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) worst = std::max(worst, std::abs(d.values[i] - b.values[i]));
    CHECK(worst < 1e-3);
  }

  TEST_CASE("plane-wave kernel revives near L / 2J") {
    ChainSpec c = small_chain(100, 1.0, 0.0);
    c.kernel_mode = KernelMode::PaperPlaneWave;
    TimeGrid grid{0.05, 1201};
    const auto k = kernel(c, grid);
    const double trec = recurrence_time(c);
    CHECK(trec == doctest::Approx(50.0));
    double quiet = 0.0, revival = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double t = grid.at(i);
      if (t > 20.0 && t < 40.0) quiet = std::max(quiet, std::abs(k.values[i]));
      if (std::abs(t - trec) < 2.0) revival = std::max(revival, std::abs(k.values[i]));
    }
    CHECK(revival > 2.0 * quiet);
  }

  TEST_CASE("drive harmonics") {
    const auto d = DriveProtocol::step(0.0, 2.0, 0.1 * pi, 0.25 * pi);
    CHECK(drive_fourier(d, 0).real() == doctest::Approx(1.2));
    const auto flat = DriveProtocol::step(1.7, 1.7, 0.3, 1.0);
    CHECK(drive_fourier(flat, 0).real() == doctest::Approx(1.7));
    for (int l = 1; l < 6; ++l) CHECK(std::abs(drive_fourier(flat, l)) < 1e-14);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0), frac(0.05, 0.95), per(0.2, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double T = per(rng);
      const auto r = DriveProtocol::step(u(rng), u(rng), frac(rng) * T, T);
      for (int l = 1; l <= 10; ++l) CHECK(std::abs(drive_fourier(r, -l) - std::conj(drive_fourier(r, l))) < 1e-12);
    }
  }

  TEST_CASE("Parseval for a step drive") {
    const auto d = DriveProtocol::step(-1.0, 3.0, 0.3, 1.0);
    const double mean_sq = (1.0 * 0.3 + 9.0 * 0.7) / 1.0;
    double prev = 0.0;
    for (int M : {10, 100, 1000}) {
      double s = 0.0;
      for (int l = -M; l <= M; ++l) s += std::norm(drive_fourier(d, l));
      CHECK(s >= prev - 1e-12);
      CHECK(s <= mean_sq + 1e-9);
      prev = s;
    }
    CHECK(prev == doctest::Approx(mean_sq).epsilon(2e-3));
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(DriveProtocol::step(0.0, 1.0, 1.0, 1.0).validate(), Error);
    CHECK_THROWS_AS(DriveProtocol::step(0.0, 1.0, 0.5, -1.0).validate(), Error);
    ChainSpec c;
    c.L = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c.L = 10;
    c.g = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(DriveProtocol::harmonics(1.0, {{1, cplx(1.0, 0.5)}, {-1, cplx(1.0, 0.5)}}).validate(), Error);
  }

  TEST_CASE("folding") {
    CHECK(fold(3.5, 2.0) == doctest::Approx(-0.5));
    CHECK(fold(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(fold(-1.0, 2.0) == doctest::Approx(1.0));
    CHECK(circular_distance(0.95, -0.95, 2.0) == doctest::Approx(0.1));
  }
}
