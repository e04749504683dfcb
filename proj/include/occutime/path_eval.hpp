#pragma once

#include <span>
#include <vector>

#include "occutime/paths.hpp"
#include "occutime/test_function.hpp"

namespace occutime {

enum class NodeSet { kFine, kCoarse };

// f(X_t + xi) at the requested nodes; gradients row-major (nodes x d) when
// requested, empty otherwise.
struct EvaluatedPath {
  std::vector<double> values;
  std::vector<double> gradients;
};

// Applies the path's shift xi when the process spec carries one. Throws
// CapabilityError if a gradient is requested for a gradient-less function.
EvaluatedPath eval_on_path(const TestFunction& f, const Path& path, NodeSet which,
                           bool with_gradient = false);

std::vector<EvaluatedPath> eval_on_bundle(const TestFunction& f, const PathBundle& bundle,
                                          NodeSet which, bool with_gradient = false,
                                          int threads = 1);

// Every m-th entry of fine-node values, i.e. the values at coarse nodes.
std::vector<double> coarse_subsample(std::span<const double> fine_values,
                                     const TimeGrid& grid);

}  // namespace occutime
