#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "centaur/chess/features.hpp"
#include "centaur/rl/params.hpp"
#include "centaur/rl/transformer.hpp"

namespace centaur::rl {

/// Classifier over the 15 board features: a ReLU network, or with no hidden
/// layers plain logistic regression. Inputs are standardised with a stored
/// per-feature mean and scale.
template <typename T>
class FeatureNet {
 public:
  static constexpr int kInputs = static_cast<int>(chess::BoardFeatures::kCount);
  using Input = std::array<double, chess::BoardFeatures::kCount>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Row = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  using CMap = Eigen::Map<const Mat>;
  using MMap = Eigen::Map<Mat>;

  struct Hyper {
    std::vector<int> hidden = std::vector<int>(20, 256);
    std::uint64_t seed = 0;

    bool logistic() const noexcept { return hidden.empty(); }
    nlohmann::json to_json() const { return {{"hidden", hidden}, {"seed", seed}, {"inputs", kInputs}}; }
    static Hyper from_json(const nlohmann::json& j) {
      if (j.value("inputs", kInputs) != kInputs)
        throw ParseError("feature model expects " + std::to_string(j.value("inputs", 0)) + " inputs, this build has " +
                         std::to_string(kInputs));
      Hyper h;
      h.hidden = j.value("hidden", h.hidden);
      h.seed = j.value("seed", h.seed);
      for (int w : h.hidden)
        if (w < 1) throw ParseError("feature model: hidden widths must be positive");
      return h;
    }
  };

  static Hyper logistic_hyper(std::uint64_t seed = 0) { return Hyper{{}, seed}; }

  explicit FeatureNet(Hyper h) : h_(std::move(h)) {
    mean_ = layout_.add("input.mean", 1, kInputs);
    scale_ = layout_.add("input.scale", 1, kInputs);
    int in = kInputs;
    for (std::size_t i = 0; i <= h_.hidden.size(); ++i) {
      const int out = i < h_.hidden.size() ? h_.hidden[i] : 2;
      const std::string p = "dense" + std::to_string(i) + ".";
      w_.push_back(layout_.add(p + "weight", in, out));
      b_.push_back(layout_.add(p + "bias", 1, out));
      in = out;
    }
    theta_.assign(layout_.total(), T(0));
    Rng rng(derive_seed(h_.seed, 0xfea7));
    for (std::size_t i = 0; i < w_.size(); ++i) {
      const auto& blk = layout_[w_[i]];
      const double sd = std::sqrt(2.0 / blk.rows);
      for (std::size_t k = 0; k < blk.size(); ++k) theta_[blk.offset + k] = static_cast<T>(sd * normal01(rng));
    }
    for (int k = 0; k < kInputs; ++k) theta_[layout_[scale_].offset + static_cast<std::size_t>(k)] = T(1);
  }

  const Hyper& hyper() const noexcept { return h_; }
  std::vector<T>& params() noexcept { return theta_; }
  const std::vector<T>& params() const noexcept { return theta_; }

  /// Sets the standardisation from data (scale 1 for constant features).
  void fit_standardization(std::span<const Input> xs) {
    if (xs.empty()) return;
    for (int k = 0; k < kInputs; ++k) {
      double m = 0, v = 0;
      for (const auto& x : xs) m += x[static_cast<std::size_t>(k)];
      m /= static_cast<double>(xs.size());
      for (const auto& x : xs) v += (x[static_cast<std::size_t>(k)] - m) * (x[static_cast<std::size_t>(k)] - m);
      const double sd = std::sqrt(v / static_cast<double>(xs.size()));
      theta_[layout_[mean_].offset + static_cast<std::size_t>(k)] = static_cast<T>(m);
      theta_[layout_[scale_].offset + static_cast<std::size_t>(k)] = static_cast<T>(sd > 1e-12 ? sd : 1.0);
    }
  }

  std::array<T, 2> logits(const Input& x) const {
    std::vector<Row> acts;
    std::vector<Row> pre;
    return run(x, acts, pre);
  }

  T loss_grad(const Input& x, const Target& y, T* grad) const {
    std::vector<Row> acts, pre;
    const auto l = run(x, acts, pre);
    std::array<T, 2> dl;
    const T loss = detail::softmax_xent(l, y, dl);
    Row d(2);
    d << dl[0], dl[1];
    for (int i = static_cast<int>(w_.size()) - 1; i >= 0; --i) {
      const auto& bw = layout_[w_[static_cast<std::size_t>(i)]];
      const auto& bb = layout_[b_[static_cast<std::size_t>(i)]];
      MMap(grad + bw.offset, bw.rows, bw.cols) += acts[static_cast<std::size_t>(i)].transpose() * d;
      MMap(grad + bb.offset, 1, bb.cols).row(0) += d;
      if (i == 0) break;
      d = d * P(w_[static_cast<std::size_t>(i)]).transpose();
      const Row& z = pre[static_cast<std::size_t>(i - 1)];
      for (Eigen::Index k = 0; k < d.size(); ++k)
        if (!(z(k) > T(0))) d(k) = T(0);
    }
    return loss;
  }

  nlohmann::json header() const {
    return {{"kind", h_.logistic() ? "feature-logistic" : "feature-mlp"}, {"hyper", h_.to_json()}};
  }
  void save(const std::string& path) const { ckpt::write(path, {header(), layout_.to_tensors(theta_)}); }

  static FeatureNet load(const std::string& path) {
    const auto c = ckpt::read(path);
    const std::string kind = c.header.value("kind", std::string());
    if (kind != "feature-mlp" && kind != "feature-logistic")
      throw ParseError("checkpoint " + path + " is not a feature model");
    FeatureNet m(Hyper::from_json(c.header.at("hyper")));
    m.layout_.from_tensors(c, m.theta_);
    return m;
  }

 private:
  CMap P(int b) const {
    const auto& blk = layout_[b];
    return CMap(theta_.data() + blk.offset, blk.rows, blk.cols);
  }

  std::array<T, 2> run(const Input& x, std::vector<Row>& acts, std::vector<Row>& pre) const {
    Row a(kInputs);
    const CMap mean = P(mean_), scale = P(scale_);
    for (int k = 0; k < kInputs; ++k) a(k) = (static_cast<T>(x[static_cast<std::size_t>(k)]) - mean(0, k)) / scale(0, k);
    for (std::size_t i = 0; i < w_.size(); ++i) {
      acts.push_back(a);
      Row z = a * P(w_[i]) + P(b_[i]).row(0);
      if (i + 1 < w_.size()) {
        pre.push_back(z);
        a = z.cwiseMax(T(0));
      } else {
        return {z(0), z(1)};
      }
    }
    return {T(0), T(0)};
  }

  Hyper h_;
  ParamLayout layout_;
  std::vector<T> theta_;
  int mean_ = 0, scale_ = 0;
  std::vector<int> w_, b_;
};

using FeatureModel = FeatureNet<float>;

inline FeatureModel::Input feature_input(const chess::Position& p, const chess::FeatureOptions& opt = {}) {
  return chess::board_features(p, opt).values();
}

}  // namespace centaur::rl
