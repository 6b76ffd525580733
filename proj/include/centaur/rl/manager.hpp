#pragma once

#include <memory>

#include "centaur/rl/feature_model.hpp"
#include "centaur/rl/transformer.hpp"
#include "centaur/team/manager.hpp"

namespace centaur::rl {

/// pM > pL + tau selects M, pL > pM + tau selects L, anything closer is a tie.
template <typename T>
team::Choice choice_from_logits(const std::array<T, 2>& logits, double tau) {
  const auto p = detail::softmax2(logits);
  const double pm = static_cast<double>(p[0]), pl = static_cast<double>(p[1]);
  if (pm > pl + tau) return team::Choice::First;
  if (pl > pm + tau) return team::Choice::Second;
  return team::Choice::Indifferent;
}

/// Sees only the board; never the recommendations.
class ModelManager final : public team::Manager {
 public:
  ModelManager(std::shared_ptr<const ManagerModel> model, double tau = 0.0, std::string id = "model")
      : model_(std::move(model)), tau_(tau), id_(std::move(id)) {
    if (!model_) throw PreconditionError("model manager: no model");
    if (tau_ < 0) throw PreconditionError("model manager: tau must be >= 0");
  }
  team::Choice decide(const team::DecisionContext& ctx) override { return decide(ctx.position); }
  team::Choice decide(const chess::Position& p) const {
    return choice_from_logits(model_->logits(chess::tokenize(p)), tau_);
  }
  std::string id() const override { return id_; }
  team::InputMode input_mode() const override { return team::InputMode::StateOnly; }
  const ManagerModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const ManagerModel> model_;
  double tau_;
  std::string id_;
};

class FeatureModelManager final : public team::Manager {
 public:
  FeatureModelManager(std::shared_ptr<const FeatureModel> model, double tau = 0.0, std::string id = "feature-model")
      : model_(std::move(model)), tau_(tau), id_(std::move(id)) {
    if (!model_) throw PreconditionError("feature model manager: no model");
  }
  team::Choice decide(const team::DecisionContext& ctx) override { return decide(ctx.position); }
  team::Choice decide(const chess::Position& p) const {
    return choice_from_logits(model_->logits(feature_input(p)), tau_);
  }
  std::string id() const override { return id_; }
  team::InputMode input_mode() const override { return team::InputMode::StateOnly; }

 private:
  std::shared_ptr<const FeatureModel> model_;
  double tau_;
  std::string id_;
};

}  // namespace centaur::rl
