#include "occutime/path_eval.hpp"

#include "occutime/errors.hpp"
#include "occutime/parallel.hpp"

namespace occutime {

EvaluatedPath eval_on_path(const TestFunction& f, const Path& path, NodeSet which,
                           bool with_gradient) {
  const int d = path.dim();
  if (f.dim() != d) {
    throw ArgumentError("function dimension " + std::to_string(f.dim()) +
                        " does not match process dimension " + std::to_string(d));
  }
  if (with_gradient && !f.has_gradient()) {
    throw CapabilityError(f.name() + " has no gradient");
  }
  const TimeGrid& grid = path.grid();
  const std::size_t stride = which == NodeSet::kFine ? 1 : grid.refine_factor();
  const std::size_t count = which == NodeSet::kFine ? grid.fine_count() + 1
                                                    : grid.coarse_count() + 1;
  const auto xi = path.shift();

  EvaluatedPath out;
  out.values.resize(count);
  if (with_gradient) out.gradients.resize(count * d);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = path.state(i * stride);
    for (int c = 0; c < d; ++c) y[c] = x[c] + xi[c];
    out.values[i] = f(y);
    if (with_gradient) f.gradient(y, std::span(out.gradients).subspan(i * d, d));
  }
  return out;
}

std::vector<EvaluatedPath> eval_on_bundle(const TestFunction& f, const PathBundle& bundle,
                                          NodeSet which, bool with_gradient,
                                          int threads) {
  std::vector<EvaluatedPath> out(bundle.paths.size());
  parallel_for(out.size(), threads, [&](std::size_t p) {
    out[p] = eval_on_path(f, bundle.paths[p], which, with_gradient);
  });
  return out;
}

std::vector<double> coarse_subsample(std::span<const double> fine_values,
                                     const TimeGrid& grid) {
  if (fine_values.size() != grid.fine_count() + 1) {
    throw ArgumentError("fine values do not match the grid");
  }
  std::vector<double> out(grid.coarse_count() + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fine_values[k * grid.refine_factor()];
  return out;
}

}  // namespace occutime
