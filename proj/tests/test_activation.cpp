#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "ridgebound/activation.hpp"

using namespace ridgebound;

TEST_CASE("builtin activation values") {
  CHECK(Activation::sigmoid()(0.0) == Catch::Approx(0.5));
  // tanh(ln 3 / 2) = (3 - 1) / (3 + 1) = 0.5
  CHECK(Activation::tanh_act()(std::log(3.0) / 2.0) == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(Activation::relu()(-1.0) == 0.0);
  CHECK(Activation::relu()(2.5) == 2.5);
  CHECK(Activation::gaussian(2.0)(0.0) == 1.0);
}

TEST_CASE("gaussian derivatives match finite differences of the Gaussian") {
  const double tau = 0.8;
  auto g0 = [&](double z) { return std::exp(-0.5 * z * z / (tau * tau)); };
  const double h = 1e-3;
  for (double z : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
    const Activation d1 = Activation::gaussian_derivative(1, tau);
    const double fd1 = (g0(z + h) - g0(z - h)) / (2.0 * h);
    CHECK(d1(z) == Catch::Approx(fd1).margin(1e-5));

    const Activation d2 = Activation::gaussian_derivative(2, tau);
    const double fd2 = (g0(z + h) - 2.0 * g0(z) + g0(z - h)) / (h * h);
    CHECK(d2(z) == Catch::Approx(fd2).margin(1e-4));

    const Activation d4 = Activation::gaussian_derivative(4, tau);
    const double fd4 = (g0(z + 2 * h) - 4 * g0(z + h) + 6 * g0(z) - 4 * g0(z - h) +
                        g0(z - 2 * h)) / (h * h * h * h);
    CHECK(d4(z) == Catch::Approx(fd4).margin(1e-3));
  }
}

TEST_CASE("gaussian derivative Fourier transform matches quadrature") {
  const Activation rho = Activation::gaussian_derivative(2, 1.2, 0.7);
  for (double w : {0.0, 0.4, 1.5, -2.2}) {
    const auto oracle =
        oracles::fourier([&](double z) { return rho(z); }, w, -15.0, 15.0, 400001);
    CHECK(std::abs(rho.fourier(w) - oracle) < 1e-9);
  }
}

TEST_CASE("relu is 1-homogeneous on samples") {
  const Activation relu = Activation::relu();
  REQUIRE(relu.homogeneity().has_value());
  CHECK(*relu.homogeneity() == 1);
  for (double alpha : {0.5, 2.0, 7.3}) {
    for (double z : {-2.0, -0.1, 0.3, 4.0}) {
      CHECK(relu(alpha * z) == Catch::Approx(alpha * relu(z)).margin(1e-14));
    }
  }
}

TEST_CASE("sup norms") {
  CHECK(Activation::sigmoid().sup_norm() == 1.0);
  CHECK(Activation::tanh_act().sup_norm() == 1.0);
  CHECK(Activation::gaussian(1.0).sup_norm() == 1.0);
  // |d/dz e^{-z^2/(2 tau^2)}| peaks at z = tau with value e^{-1/2} / tau
  const double tau = 1.4;
  CHECK(Activation::gaussian_derivative(1, tau).sup_norm() ==
        Catch::Approx(std::exp(-0.5) / tau).epsilon(1e-10));
  CHECK_THROWS_AS(Activation::relu().sup_norm(), PreconditionError);
}

TEST_CASE("gradients match finite differences") {
  const double h = 1e-6;
  for (const Activation& act :
       {Activation::sigmoid(), Activation::tanh_act(), Activation::gaussian(0.9),
        Activation::gaussian_derivative(2, 1.1)}) {
    for (double z : {-1.7, -0.3, 0.4, 2.2}) {
      const double fd = (act(z + h) - act(z - h)) / (2.0 * h);
      CHECK(act.grad(z) == Catch::Approx(fd).margin(1e-6));
    }
  }
  CHECK(Activation::relu().grad(-0.5) == 0.0);
  CHECK(Activation::relu().grad(0.5) == 1.0);
}

TEST_CASE("non-integrable activations have no Fourier evaluator") {
  CHECK_THROWS_AS(Activation::sigmoid().fourier(1.0), PreconditionError);
  CHECK_THROWS_AS(Activation::relu().fourier(1.0), PreconditionError);
  CHECK(Activation::gaussian(1.0).has_fourier());
}

TEST_CASE("descriptor round trip") {
  const Activation rho = Activation::gaussian_derivative(3, 0.7, -2.5);
  const Activation back = Activation::from_descriptor(rho.descriptor());
  CHECK(back.kind() == rho.kind());
  CHECK(back.order() == rho.order());
  CHECK(back.tau() == rho.tau());
  CHECK(back.coeff() == rho.coeff());
  for (double z : {-1.0, 0.3, 2.0}) CHECK(back(z) == rho(z));
}
