#pragma once

#include <functional>

#include "centaur/rl/manager.hpp"
#include "centaur/rl/train.hpp"

namespace centaur::rl {

struct DistillReport {
  FeatureModel student;
  TrainReport train;
  std::size_t rows = 0;
  std::size_t excluded_indifferent = 0;
  double agreement_train = 0.0;
  double agreement_holdout = 0.0;  // NaN without a held-out split
};

/// Fits a feature-input student to a teacher's hard choices. Positions the
/// teacher is indifferent about are left out.
inline DistillReport distill(const std::function<team::Choice(const chess::Position&)>& teacher,
                             std::span<const chess::Position> positions, FeatureModel::Hyper hyper,
                             const TrainOptions& opt, const chess::FeatureOptions& fopt = {}) {
  if (positions.empty()) throw PreconditionError("distill: no positions");
  std::vector<FeatureModel::Input> x;
  std::vector<Target> y;
  std::size_t excluded = 0;
  for (const auto& p : positions) {
    const team::Choice c = teacher(p);
    if (c == team::Choice::Indifferent) {
      ++excluded;
      continue;
    }
    x.push_back(chess::board_features(p, fopt).values());
    y.push_back({c == team::Choice::First ? 1.0 : 0.0, 1.0});
  }
  if (x.empty()) throw PreconditionError("distill: teacher was indifferent on every position");
  DistillReport r{FeatureModel(std::move(hyper)), {}, x.size(), excluded, 0.0, 0.0};
  r.student.fit_standardization(x);
  r.train = train_classifier(r.student, std::span<const FeatureModel::Input>(x), std::span<const Target>(y), opt);
  const EpochStats& best = r.train.curve[static_cast<std::size_t>(r.train.best_epoch)];
  r.agreement_train = best.train_acc;
  r.agreement_holdout = best.val_acc;
  return r;
}

inline DistillReport distill(const ManagerModel& teacher, std::span<const chess::Position> positions,
                             FeatureModel::Hyper hyper, const TrainOptions& opt, double tau = 0.0,
                             const chess::FeatureOptions& fopt = {}) {
  return distill([&](const chess::Position& p) { return choice_from_logits(teacher.logits(chess::tokenize(p)), tau); },
                 positions, std::move(hyper), opt, fopt);
}

}  // namespace centaur::rl
