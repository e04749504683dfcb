#pragma once

#include <vector>

namespace occutime {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1]. Rules are computed once and cached.
const QuadratureRule& gauss_legendre(int n);

// n-point Gauss-Hermite rule for the standard normal law:
// E[g(Z)] ~ sum_i weights[i] * g(nodes[i]), weights summing to one.
const QuadratureRule& gauss_hermite_normal(int n);

// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
template <class F>
auto integrate_gl(F&& f, double a, double b, int n) {
  const QuadratureRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  decltype(f(mid)) sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

}  // namespace occutime
