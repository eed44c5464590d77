#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "ridgebound/errors.hpp"

namespace ridgebound {

enum class QuadratureRule { GaussLegendre, Trapezoid };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::GaussLegendre;
  int nodes = 32;           // per panel
  double rel_tol = 1e-10;   // relative to max(|value|, L1 mass)
  int initial_panels = 1;
  int max_refinements = 14;  // dyadic panel doublings
};

struct IntegralEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

struct ComplexIntegralEstimate {
  std::complex<double> value{0.0, 0.0};
  double error_estimate = 0.0;
};

/// Nodes and weights of an n-point rule on [-1, 1].
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Gauss-Legendre nodes by Newton iteration on the Legendre polynomial.
inline PanelRule compute_gauss_legendre(int n) {
  PanelRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double eps = 1e-15;
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    rule.nodes[i - 1] = -z;
    rule.nodes[n - i] = z;
    rule.weights[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[n - i] = rule.weights[i - 1];
  }
  return rule;
}

inline PanelRule compute_trapezoid(int n) {
  PanelRule rule;
  if (n < 2) n = 2;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double h = 2.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = -1.0 + i * h;
    rule.weights[i] = (i == 0 || i == n - 1) ? h / 2.0 : h;
  }
  return rule;
}

}  // namespace detail

/// Cached rule lookup; thread-safe.
inline const PanelRule& panel_rule(QuadratureRule rule, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, PanelRule> cache;
  std::scoped_lock lock(mu);
  const auto key = std::make_pair(static_cast<int>(rule), n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, rule == QuadratureRule::GaussLegendre
                                ? detail::compute_gauss_legendre(n)
                                : detail::compute_trapezoid(n))
             .first;
  }
  return it->second;
}

namespace detail {

template <typename T>
struct PassAccum {
  T value{};
  double l1 = 0.0;
};

// One full pass over [a, b] with `panels` equal panels.
template <typename T, typename F>
PassAccum<T> quad_pass(F&& f, double a, double b, const PanelRule& rule, long panels) {
  PassAccum<T> acc{};
  const double h = (b - a) / static_cast<double>(panels);
  for (long p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const T fx = f(x);
      if (!std::isfinite(std::abs(fx))) {
        throw EvalError("integrand is not finite at x = " + std::to_string(x), x);
      }
      const double w = half * rule.weights[i];
      acc.value += w * fx;
      acc.l1 += w * std::abs(fx);
    }
  }
  return acc;
}

template <typename T, typename F>
std::pair<T, double> integrate_impl(F&& f, double a, double b,
                                    const QuadratureSpec& spec) {
  if (!(b > a)) return {T{}, 0.0};
  const PanelRule& rule = panel_rule(spec.rule, spec.nodes);
  long panels = std::max(1, spec.initial_panels);
  auto prev = quad_pass<T>(f, a, b, rule, panels);
  double err = std::abs(prev.value) + prev.l1;  // before any refinement
  for (int level = 0; level < spec.max_refinements; ++level) {
    panels *= 2;
    auto cur = quad_pass<T>(f, a, b, rule, panels);
    err = std::abs(cur.value - prev.value);
    const double scale = std::max(std::abs(cur.value), cur.l1);
    if (err <= spec.rel_tol * scale || (scale == 0.0 && err == 0.0)) {
      return {cur.value, err};
    }
    prev = cur;
  }
  throw ToleranceError("quadrature did not converge to rel tol " +
                           std::to_string(spec.rel_tol),
                       std::abs(prev.value), err);
}

}  // namespace detail

/// Panel-refined estimate of the integral of g over [a, b]. The error
/// estimate is the difference between the two finest refinement levels.
template <typename F>
IntegralEstimate integrate(F&& g, double a, double b,
                           const QuadratureSpec& spec = {}) {
  auto [v, e] = detail::integrate_impl<double>(std::forward<F>(g), a, b, spec);
  return {v, e};
}

template <typename F>
ComplexIntegralEstimate integrate_complex(F&& g, double a, double b,
                                          const QuadratureSpec& spec = {}) {
  auto [v, e] =
      detail::integrate_impl<std::complex<double>>(std::forward<F>(g), a, b, spec);
  return {v, e};
}

/// Panel edges 0, s, 2s, 4s, ... capped at hi. Suits integrands whose
/// variation scale grows linearly with the coordinate (ridgelet spectra).
inline std::vector<double> geometric_edges(double scale, double hi) {
  std::vector<double> edges{0.0};
  double e = std::min(scale, hi);
  while (true) {
    edges.push_back(e);
    if (e >= hi) break;
    e = std::min(e * 2.0, hi);
  }
  return edges;
}

/// Flattened nodes/weights for [lo, hi] split into `panels` equal panels.
inline void panel_nodes(QuadratureRule rule, int nodes_per_panel, double lo,
                        double hi, long panels, std::vector<double>& xs,
                        std::vector<double>& ws) {
  xs.clear();
  ws.clear();
  if (!(hi > lo) || panels < 1) return;
  const PanelRule& r = panel_rule(rule, nodes_per_panel);
  const double h = (hi - lo) / static_cast<double>(panels);
  xs.reserve(panels * r.nodes.size());
  ws.reserve(panels * r.nodes.size());
  for (long p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      xs.push_back(mid + half * r.nodes[i]);
      ws.push_back(half * r.weights[i]);
    }
  }
}

}  // namespace ridgebound
