#pragma once

#include <algorithm>
#include <cmath>
#include <set>

#include "centaur/rl/transformer.hpp"

namespace centaur::rl {

struct GradCheckReport {
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  std::string worst_block;

  nlohmann::json to_json() const {
    return {{"coordinates", coordinates},
            {"max_rel_error", max_rel_error},
            {"max_abs_error", max_abs_error},
            {"worst_index", worst_index},
            {"worst_block", worst_block}};
  }
};

/// Analytic loss gradient against central differences on a seeded random
/// subset of parameters. Relative error is |a - n| / max(|a|, |n|, abs_floor),
/// so coordinates with vanishing gradients are judged on absolute error.
template <typename T>
GradCheckReport gradient_check(const Transformer<T>& model, const chess::TokenSequence& t, const Target& y,
                               double epsilon = 1e-5, std::size_t coordinates = 256, std::uint64_t seed = 0,
                               double abs_floor = 1e-6) {
  if (model.size() > 100'000) throw PreconditionError("gradient_check: model too large for finite differences");
  coordinates = std::min(coordinates, model.size());

  std::vector<T> grad(model.size(), T(0));
  model.loss_grad(t, y, grad.data());

  Rng rng(seed);
  std::set<std::size_t> picked;
  while (picked.size() < coordinates) picked.insert(uniform_index(rng, model.size()));

  Transformer<T> probe = model;
  GradCheckReport r;
  r.coordinates = picked.size();
  for (std::size_t i : picked) {
    const T orig = probe.params()[i];
    probe.params()[i] = orig + static_cast<T>(epsilon);
    const double up = static_cast<double>(probe.loss(t, y));
    probe.params()[i] = orig - static_cast<T>(epsilon);
    const double down = static_cast<double>(probe.loss(t, y));
    probe.params()[i] = orig;
    const double numeric = (up - down) / (2 * epsilon);
    const double analytic = static_cast<double>(grad[i]);
    const double abs_err = std::abs(analytic - numeric);
    const double rel = abs_err / std::max({std::abs(analytic), std::abs(numeric), abs_floor});
    r.max_abs_error = std::max(r.max_abs_error, abs_err);
    if (rel > r.max_rel_error || r.worst_block.empty()) {
      r.max_rel_error = rel;
      r.worst_index = i;
      r.worst_block = model.layout()[model.layout().block_of(i)].name;
    }
  }
  return r;
}

}  // namespace centaur::rl
