#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ridgebound/errors.hpp"
#include "ridgebound/io.hpp"

namespace ridgebound {

enum class ActivationKind { Sigmoid, Tanh, ReLU, Gaussian, GaussianDerivative };

/// Scalar activation / ridgelet-analysis function. GaussianDerivative(n, tau)
/// is coeff * d^n/dz^n exp(-z^2 / (2 tau^2)); its Fourier transform is
/// coeff * (i w)^n * tau * sqrt(2 pi) * exp(-tau^2 w^2 / 2). Immutable.
class Activation {
 public:
  static Activation sigmoid() { return Activation(ActivationKind::Sigmoid); }
  static Activation tanh_act() { return Activation(ActivationKind::Tanh); }
  static Activation relu() {
    Activation a(ActivationKind::ReLU);
    a.homogeneity_ = 1;
    return a;
  }
  static Activation gaussian(double tau = 1.0) {
    Activation a(ActivationKind::Gaussian);
    a.tau_ = check_tau(tau);
    return a;
  }
  static Activation gaussian_derivative(int order, double tau, double coeff = 1.0) {
    if (order < 0) throw UsageError("derivative order must be >= 0");
    if (order == 0) {
      Activation a = gaussian(tau);
      a.coeff_ = coeff;
      return a;
    }
    Activation a(ActivationKind::GaussianDerivative);
    a.tau_ = check_tau(tau);
    a.order_ = order;
    a.coeff_ = coeff;
    return a;
  }

  ActivationKind kind() const { return kind_; }
  int order() const { return order_; }
  double tau() const { return tau_; }
  double coeff() const { return coeff_; }
  std::optional<int> homogeneity() const { return homogeneity_; }

  double operator()(double z) const {
    switch (kind_) {
      case ActivationKind::Sigmoid:
        return 1.0 / (1.0 + std::exp(-z));
      case ActivationKind::Tanh:
        return std::tanh(z);
      case ActivationKind::ReLU:
        return z > 0.0 ? z : 0.0;
      case ActivationKind::Gaussian:
        return coeff_ * std::exp(-0.5 * z * z / (tau_ * tau_));
      case ActivationKind::GaussianDerivative:
        return coeff_ * gaussian_derivative_value(z);
    }
    return 0.0;
  }

  /// d sigma / dz, for gradient-descent training.
  double grad(double z) const {
    switch (kind_) {
      case ActivationKind::Sigmoid: {
        const double s = 1.0 / (1.0 + std::exp(-z));
        return s * (1.0 - s);
      }
      case ActivationKind::Tanh: {
        const double t = std::tanh(z);
        return 1.0 - t * t;
      }
      case ActivationKind::ReLU:
        return z > 0.0 ? 1.0 : 0.0;
      case ActivationKind::Gaussian: {
        const double t2 = tau_ * tau_;
        return -coeff_ * (z / t2) * std::exp(-0.5 * z * z / t2);
      }
      case ActivationKind::GaussianDerivative: {
        Activation up = *this;
        up.order_ += 1;
        return up.coeff_ * up.gaussian_derivative_value(z);
      }
    }
    return 0.0;
  }

  bool has_fourier() const {
    return kind_ == ActivationKind::Gaussian || kind_ == ActivationKind::GaussianDerivative;
  }

  std::complex<double> fourier(double w) const {
    if (!has_fourier()) {
      throw PreconditionError(
          "Fourier evaluator exists only for integrable (Gaussian-family) functions");
    }
    const double mag = tau_ * std::sqrt(2.0 * M_PI) * std::exp(-0.5 * tau_ * tau_ * w * w);
    std::complex<double> iw{0.0, w};
    std::complex<double> p{1.0, 0.0};
    for (int k = 0; k < order_; ++k) p *= iw;
    return coeff_ * p * mag;
  }

  /// |fourier| is negligible (<1e-20 of peak) beyond this frequency.
  double fourier_cutoff() const {
    if (!has_fourier()) throw PreconditionError("no Fourier envelope for this kind");
    return (10.0 + 0.8 * order_) / tau_;
  }

  /// sup |sigma|; exact for the bounded builtins, numeric with local
  /// refinement for Gaussian derivatives. ReLU is unbounded.
  double sup_norm() const {
    switch (kind_) {
      case ActivationKind::Sigmoid:
      case ActivationKind::Tanh:
        return 1.0;
      case ActivationKind::ReLU:
        throw PreconditionError("ReLU has no finite sup norm");
      case ActivationKind::Gaussian:
        return std::abs(coeff_);
      case ActivationKind::GaussianDerivative: {
        // |rho| is even or odd; scan z >= 0 densely, then golden-section.
        const double z_hi = (3.0 + std::sqrt(2.0 * order_)) * tau_ * 2.0;
        const int n = 4096;
        double best_z = 0.0, best = std::abs((*this)(0.0));
        for (int i = 1; i <= n; ++i) {
          const double z = z_hi * i / n;
          const double v = std::abs((*this)(z));
          if (v > best) {
            best = v;
            best_z = z;
          }
        }
        double a = std::max(0.0, best_z - z_hi / n), b = best_z + z_hi / n;
        const double gr = 0.6180339887498949;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 90; ++it) {
          if (std::abs((*this)(c)) > std::abs((*this)(d))) {
            b = d;
          } else {
            a = c;
          }
          c = b - gr * (b - a);
          d = a + gr * (b - a);
        }
        return std::abs((*this)(0.5 * (a + b)));
      }
    }
    return 0.0;
  }

  /// tau of the Gaussian factor bounding |sigma(z)| <= K exp(-z^2/(4 tau^2));
  /// used for window sizing of (a,b) integrals. Gaussian kinds only.
  double envelope_tau() const {
    if (!has_fourier()) throw PreconditionError("no Gaussian envelope for this kind");
    return tau_;
  }

  json descriptor() const {
    json j;
    switch (kind_) {
      case ActivationKind::Sigmoid:
        j["kind"] = "sigmoid";
        break;
      case ActivationKind::Tanh:
        j["kind"] = "tanh";
        break;
      case ActivationKind::ReLU:
        j["kind"] = "relu";
        break;
      case ActivationKind::Gaussian:
        j["kind"] = "gaussian";
        j["tau"] = tau_;
        j["coeff"] = coeff_;
        break;
      case ActivationKind::GaussianDerivative:
        j["kind"] = "gaussian_derivative";
        j["order"] = order_;
        j["tau"] = tau_;
        j["coeff"] = coeff_;
        break;
    }
    return j;
  }

  static Activation from_descriptor(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "sigmoid") return sigmoid();
    if (kind == "tanh") return tanh_act();
    if (kind == "relu") return relu();
    if (kind == "gaussian") {
      Activation a = gaussian(j.value("tau", 1.0));
      a.coeff_ = j.value("coeff", 1.0);
      return a;
    }
    if (kind == "gaussian_derivative") {
      return gaussian_derivative(j.at("order"), j.value("tau", 1.0), j.value("coeff", 1.0));
    }
    throw UsageError("unknown activation kind: " + kind);
  }

 private:
  explicit Activation(ActivationKind k) : kind_(k) {}

  static double check_tau(double tau) {
    if (!(tau > 0.0)) throw UsageError("tau must be positive");
    return tau;
  }

  // d^n/dz^n exp(-z^2/(2 tau^2)) = (-1/(tau sqrt(2)))^n H_n(z/(tau sqrt(2))) exp(...)
  // with physicists' Hermite polynomials H_n.
  double gaussian_derivative_value(double z) const {
    const double root2tau = tau_ * std::sqrt(2.0);
    const double u = z / root2tau;
    double h0 = 1.0, h1 = 2.0 * u;
    double h = (order_ == 0) ? h0 : h1;
    for (int k = 2; k <= order_; ++k) {
      const double hk = 2.0 * u * h1 - 2.0 * (k - 1) * h0;
      h0 = h1;
      h1 = hk;
      h = hk;
    }
    const double sign = (order_ % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(1.0 / root2tau, order_) * h * std::exp(-u * u);
  }

  ActivationKind kind_;
  int order_ = 0;
  double tau_ = 1.0;
  double coeff_ = 1.0;
  std::optional<int> homogeneity_;
};

}  // namespace ridgebound
