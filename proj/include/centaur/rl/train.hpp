#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "centaur/chess/notation.hpp"
#include "centaur/rl/transformer.hpp"
#include "centaur/team/types.hpp"

namespace centaur::rl {

struct TrainOptions {
  double lr = 1e-4;
  int batch = 256;
  int epochs = 20;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  bool soft_targets = false;   // regress on (qM, qL) instead of the hard label
  bool class_balance = false;  // weight rows inversely to their class frequency
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (!(lr > 0) || batch < 1 || epochs < 0) throw PreconditionError("train: lr, batch must be positive");
    if (!(val_fraction >= 0.0 && val_fraction <= 0.5))
      throw PreconditionError("train: validation fraction must lie in [0, 0.5]");
  }
  nlohmann::json to_json() const {
    return {{"lr", lr},       {"batch", batch}, {"epochs", epochs}, {"val_fraction", val_fraction},
            {"seed", seed},   {"soft_targets", soft_targets}, {"class_balance", class_balance}};
  }
  static TrainOptions from_json(const nlohmann::json& j) {
    TrainOptions o;
    o.lr = j.value("lr", o.lr);
    o.batch = j.value("batch", o.batch);
    o.epochs = j.value("epochs", o.epochs);
    o.val_fraction = j.value("val_fraction", o.val_fraction);
    o.seed = j.value("seed", o.seed);
    o.soft_targets = j.value("soft_targets", o.soft_targets);
    o.class_balance = j.value("class_balance", o.class_balance);
    o.validate();
    return o;
  }
};

struct EpochStats {
  int epoch;  // 0 = before any update
  double train_loss;
  double val_loss;  // NaN without a validation split
  double train_acc;
  double val_acc;
};

struct TrainReport {
  std::vector<EpochStats> curve;
  int best_epoch = 0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;

  std::string csv() const {
    std::ostringstream o;
    o.precision(9);
    o << "epoch,train_loss,val_loss,train_acc,val_acc\n";
    for (const auto& e : curve)
      o << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.train_acc << ',' << e.val_acc << '\n';
    return o.str();
  }
};

template <typename T>
class Adam {
 public:
  Adam(std::size_t n, const TrainOptions& o) : m_(n, 0.0), v_(n, 0.0), o_(o) {}

  void step(std::vector<T>& theta, const std::vector<double>& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(o_.beta1, t_), c2 = 1.0 - std::pow(o_.beta2, t_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m_[i] = o_.beta1 * m_[i] + (1 - o_.beta1) * g[i];
      v_[i] = o_.beta2 * v_[i] + (1 - o_.beta2) * g[i] * g[i];
      theta[i] -= static_cast<T>(o_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + o_.adam_eps));
    }
  }

 private:
  std::vector<double> m_, v_;
  TrainOptions o_;
  int t_ = 0;
};

namespace detail {

template <typename Model>
std::pair<double, double> evaluate(const Model& model, std::span<const typename Model::Input> x,
                                   std::span<const Target> y, std::span<const std::size_t> idx) {
  if (idx.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double loss = 0, correct = 0, counted = 0;
  for (std::size_t i : idx) {
    const auto l = model.logits(x[i]);
    std::array<decltype(l[0] + 0), 2> dl;
    loss += static_cast<double>(softmax_xent(l, Target{y[i].p_m, 1.0}, dl));
    if (y[i].p_m != 0.5) {
      counted += 1;
      if ((l[0] > l[1]) == (y[i].p_m > 0.5)) correct += 1;
    }
  }
  return {loss / static_cast<double>(idx.size()), counted > 0 ? correct / counted : std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace detail

/// Minibatch Adam on weighted cross-entropy. Holds out `val_fraction` of the
/// rows (chosen by seed), reports loss and accuracy per epoch, and leaves
/// the model at the parameters with the lowest validation loss (training
/// loss when there is no validation split).
///
/// Model must provide Input, params(), logits(x) and loss_grad(x, target, grad).
template <typename Model>
TrainReport train_classifier(Model& model, std::span<const typename Model::Input> x, std::span<const Target> y,
                             const TrainOptions& opt) {
  opt.validate();
  if (x.size() != y.size()) throw PreconditionError("train: inputs and targets differ in length");
  if (x.empty()) throw PreconditionError("train: no labeled rows");
  using T = std::decay_t<decltype(model.params()[0])>;

  Rng rng(derive_seed(opt.seed, 0x7a11));
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_in_place(order, rng);
  const auto n_val = static_cast<std::size_t>(std::floor(opt.val_fraction * static_cast<double>(x.size())));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  if (train.empty()) throw PreconditionError("train: validation split leaves no training rows");

  TrainReport rep;
  rep.n_train = train.size();
  rep.n_val = val.size();
  auto record = [&](int epoch) {
    const auto [tl, ta] = detail::evaluate(model, x, y, train);
    const auto [vl, va] = detail::evaluate(model, x, y, val);
    rep.curve.push_back({epoch, tl, vl, ta, va});
    return val.empty() ? tl : vl;
  };

  double best = record(0);
  std::vector<T> best_params = model.params();
  Adam<T> adam(model.params().size(), opt);
  std::vector<T> g(model.params().size());
  std::vector<double> gd(model.params().size());

  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    shuffle_in_place(train, rng);
    for (std::size_t start = 0; start < train.size(); start += static_cast<std::size_t>(opt.batch)) {
      const std::size_t end = std::min(train.size(), start + static_cast<std::size_t>(opt.batch));
      std::fill(g.begin(), g.end(), T(0));
      for (std::size_t k = start; k < end; ++k) model.loss_grad(x[train[k]], y[train[k]], g.data());
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = 0; i < g.size(); ++i) gd[i] = static_cast<double>(g[i]) * inv;
      adam.step(model.params(), gd);
    }
    std::sort(train.begin(), train.end());
    const double score = record(epoch);
    if (score < best) {
      best = score;
      best_params = model.params();
      rep.best_epoch = epoch;
    }
  }
  model.params() = best_params;
  return rep;
}

/// A disagreement state with rollout values for both recommendations.
struct LabeledDecision {
  std::string fen;
  chess::TokenSequence tokens;
  chess::Move rec_m;
  chess::Move rec_l;
  double q_m = 0.0;
  double q_l = 0.0;
  int iteration = 0;
  std::vector<std::uint64_t> seeds_m;
  std::vector<std::uint64_t> seeds_l;

  /// M iff q_m > q_l; ties carry no label.
  std::optional<team::Member> label() const {
    if (q_m > q_l) return team::Member::M;
    if (q_l > q_m) return team::Member::L;
    return std::nullopt;
  }

  Target target(bool soft) const {
    if (soft) return {0.5 + 0.5 * (q_m - q_l), 1.0};
    return {label() == team::Member::M ? 1.0 : 0.0, 1.0};
  }

  nlohmann::json to_json() const {
    const auto l = label();
    return {{"fen", fen},
            {"recM", rec_m.uci()},
            {"recL", rec_l.uci()},
            {"qM", q_m},
            {"qL", q_l},
            {"label", l ? nlohmann::json(team::to_string(*l)) : nlohmann::json(nullptr)},
            {"iteration", iteration},
            {"seedsM", seeds_m},
            {"seedsL", seeds_l}};
  }

  static LabeledDecision from_json(const nlohmann::json& j) {
    LabeledDecision d;
    d.fen = j.at("fen").get<std::string>();
    const auto p = chess::Position::from_fen(d.fen);
    d.tokens = chess::tokenize(p);
    d.rec_m = chess::parse_uci(p, j.at("recM").get<std::string>());
    d.rec_l = chess::parse_uci(p, j.at("recL").get<std::string>());
    d.q_m = j.at("qM").get<double>();
    d.q_l = j.at("qL").get<double>();
    d.iteration = j.value("iteration", 0);
    d.seeds_m = j.value("seedsM", std::vector<std::uint64_t>{});
    d.seeds_l = j.value("seedsL", std::vector<std::uint64_t>{});
    return d;
  }
};

/// Trains on the labeled (non-tie) rows.
template <typename T>
TrainReport train_supervised(Transformer<T>& model, std::span<const LabeledDecision> data, const TrainOptions& opt) {
  std::vector<chess::TokenSequence> x;
  std::vector<Target> y;
  std::size_t n_m = 0;
  for (const auto& d : data) {
    if (!d.label()) continue;
    x.push_back(d.tokens);
    y.push_back(d.target(opt.soft_targets));
    if (d.label() == team::Member::M) ++n_m;
  }
  if (x.empty()) throw PreconditionError("train: no labeled rows");
  if (opt.class_balance) {
    const double n = static_cast<double>(x.size());
    const double n_l = n - static_cast<double>(n_m);
    for (auto& t : y) {
      const bool is_m = t.p_m > 0.5;
      t.weight = n / (2.0 * (is_m ? static_cast<double>(n_m) : n_l));
    }
  }
  return train_classifier(model, std::span<const chess::TokenSequence>(x), std::span<const Target>(y), opt);
}

}  // namespace centaur::rl
