#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "centaur/chess/tokens.hpp"
#include "centaur/rl/params.hpp"
#include "centaur/util/random.hpp"

namespace centaur::rl {

/// Training target for a two-way classifier: probability that M is the
/// right choice (1 or 0 for hard labels) and a per-row loss weight.
struct Target {
  double p_m = 1.0;
  double weight = 1.0;
};

namespace detail {

template <typename T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(0.70710678118654752440)));
}

template <typename T>
T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(0.70710678118654752440)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(0.39894228040143267794);
  return cdf + x * pdf;
}

/// Softmax cross-entropy against (p_m, 1 - p_m). Writes dloss/dlogits.
template <typename T>
T softmax_xent(const std::array<T, 2>& logits, const Target& y, std::array<T, 2>& dlogits) {
  const T m = std::max(logits[0], logits[1]);
  const T e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
  const T z = e0 + e1;
  const T lz = std::log(z) + m;
  const T pm = static_cast<T>(y.p_m), w = static_cast<T>(y.weight);
  dlogits = {w * (e0 / z - pm), w * (e1 / z - (T(1) - pm))};
  T loss = T(0);
  if (pm > T(0)) loss -= pm * (logits[0] - lz);
  if (pm < T(1)) loss -= (T(1) - pm) * (logits[1] - lz);
  return w * loss;
}

template <typename T>
std::array<T, 2> softmax2(const std::array<T, 2>& l) {
  const T m = std::max(l[0], l[1]);
  const T e0 = std::exp(l[0] - m), e1 = std::exp(l[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace detail

/// Board-token transformer manager: shared token embeddings plus learned
/// positions, pre-norm encoder layers, final norm on the CLS token, and a
/// one-hidden-layer head producing logits (M, L).
template <typename T>
class Transformer {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Row = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  using CMap = Eigen::Map<const Mat>;
  using MMap = Eigen::Map<Mat>;
  using Input = chess::TokenSequence;
  static constexpr int kSeq = chess::TokenSequence::kLength;
  static constexpr int kCls = chess::TokenSequence::kClsSlot;

  struct Hyper {
    int layers = 4;
    int heads = 4;
    int dim = 128;
    int ff = 512;
    int head_hidden = 128;
    double init_std = 0.02;
    bool zero_head = false;  // final classifier layer starts at zero: logits (0, 0)
    std::uint64_t seed = 0;

    void validate() const {
      if (layers < 0 || heads < 1 || dim < 1 || ff < 1 || head_hidden < 1)
        throw PreconditionError("transformer: sizes must be positive");
      if (dim % heads != 0) throw PreconditionError("transformer: dim must be divisible by heads");
    }
    nlohmann::json to_json() const {
      return {{"layers", layers}, {"heads", heads},       {"dim", dim},   {"ff", ff}, {"head_hidden", head_hidden},
              {"init_std", init_std}, {"zero_head", zero_head}, {"seed", seed}};
    }
    static Hyper from_json(const nlohmann::json& j) {
      Hyper h;
      h.layers = j.value("layers", h.layers);
      h.heads = j.value("heads", h.heads);
      h.dim = j.value("dim", h.dim);
      h.ff = j.value("ff", h.ff);
      h.head_hidden = j.value("head_hidden", h.head_hidden);
      h.init_std = j.value("init_std", h.init_std);
      h.zero_head = j.value("zero_head", h.zero_head);
      h.seed = j.value("seed", h.seed);
      h.validate();
      return h;
    }
  };

  struct Output {
    std::array<T, 2> logits;
    std::vector<Mat> attention;  // layer-major: attention[l * heads + h], each 68 x 68
  };

  explicit Transformer(Hyper h) : h_(h) {
    h_.validate();
    build_layout();
    initialize();
  }

  const Hyper& hyper() const noexcept { return h_; }
  const ParamLayout& layout() const noexcept { return layout_; }
  std::vector<T>& params() noexcept { return theta_; }
  const std::vector<T>& params() const noexcept { return theta_; }
  std::size_t size() const noexcept { return theta_.size(); }

  /// Same architecture and values in another scalar type.
  template <typename U>
  Transformer<U> cast() const {
    typename Transformer<U>::Hyper h;
    h.layers = h_.layers;
    h.heads = h_.heads;
    h.dim = h_.dim;
    h.ff = h_.ff;
    h.head_hidden = h_.head_hidden;
    h.init_std = h_.init_std;
    h.zero_head = h_.zero_head;
    h.seed = h_.seed;
    Transformer<U> out(h);
    for (std::size_t i = 0; i < theta_.size(); ++i) out.params()[i] = static_cast<U>(theta_[i]);
    return out;
  }

  Output forward(const Input& t, bool keep_attention = true) const {
    Cache c;
    run(t, c);
    Output o;
    o.logits = c.logits;
    if (keep_attention) {
      for (auto& lc : c.layer)
        for (auto& p : lc.P) o.attention.push_back(std::move(p));
    }
    return o;
  }

  std::array<T, 2> logits(const Input& t) const {
    Cache c;
    run(t, c);
    return c.logits;
  }

  /// Weighted cross-entropy for one row; adds its gradient into `grad`.
  T loss_grad(const Input& t, const Target& y, T* grad) const {
    Cache c;
    run(t, c);
    std::array<T, 2> dl;
    const T loss = detail::softmax_xent(c.logits, y, dl);
    backward(t, c, dl, grad);
    return loss;
  }

  T loss(const Input& t, const Target& y) const {
    std::array<T, 2> dl;
    return detail::softmax_xent(logits(t), y, dl);
  }

  nlohmann::json header() const {
    return {{"kind", "transformer"}, {"hyper", h_.to_json()}, {"parameters", theta_.size()}};
  }

  void save(const std::string& path) const { ckpt::write(path, {header(), layout_.to_tensors(theta_)}); }

  static Transformer load(const std::string& path) { return from_container(ckpt::read(path), path); }

  static Transformer from_container(const ckpt::Container& c, const std::string& path = "<memory>") {
    if (c.header.value("kind", std::string()) != "transformer")
      throw ParseError("checkpoint " + path + " is not a transformer model");
    Transformer m(Hyper::from_json(c.header.at("hyper")));
    m.layout_.from_tensors(c, m.theta_);
    return m;
  }

 private:
  struct LayerIdx {
    int ln1_g, ln1_b, wqkv, bqkv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
  };

  struct LayerCache {
    Mat x_in, xhat1, a1, qkv, O, h, xhat2, a2, z1, g1;
    std::vector<T> rstd1, rstd2;
    std::vector<Mat> P;
  };

  struct Cache {
    std::vector<LayerCache> layer;
    Row cls, chat, cf, u, gu;
    T crstd = T(0);
    std::array<T, 2> logits{};
  };

  void build_layout() {
    const int D = h_.dim;
    tok_ = layout_.add("embed.token", chess::TokenSequence::kGlobalVocab, D);
    pos_ = layout_.add("embed.position", kSeq, D);
    for (int l = 0; l < h_.layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      LayerIdx li;
      li.ln1_g = layout_.add(p + "ln1.gain", 1, D);
      li.ln1_b = layout_.add(p + "ln1.bias", 1, D);
      li.wqkv = layout_.add(p + "attn.qkv.weight", D, 3 * D);
      li.bqkv = layout_.add(p + "attn.qkv.bias", 1, 3 * D);
      li.wo = layout_.add(p + "attn.out.weight", D, D);
      li.bo = layout_.add(p + "attn.out.bias", 1, D);
      li.ln2_g = layout_.add(p + "ln2.gain", 1, D);
      li.ln2_b = layout_.add(p + "ln2.bias", 1, D);
      li.w1 = layout_.add(p + "ff.in.weight", D, h_.ff);
      li.b1 = layout_.add(p + "ff.in.bias", 1, h_.ff);
      li.w2 = layout_.add(p + "ff.out.weight", h_.ff, D);
      li.b2 = layout_.add(p + "ff.out.bias", 1, D);
      layers_.push_back(li);
    }
    lnf_g_ = layout_.add("final_ln.gain", 1, D);
    lnf_b_ = layout_.add("final_ln.bias", 1, D);
    wh1_ = layout_.add("head.hidden.weight", D, h_.head_hidden);
    bh1_ = layout_.add("head.hidden.bias", 1, h_.head_hidden);
    wh2_ = layout_.add("head.out.weight", h_.head_hidden, 2);
    bh2_ = layout_.add("head.out.bias", 1, 2);
  }

  void initialize() {
    theta_.assign(layout_.total(), T(0));
    Rng rng(derive_seed(h_.seed, 0x7f4a));
    for (int b = 0; b < static_cast<int>(layout_.blocks().size()); ++b) {
      const auto& blk = layout_[b];
      const bool is_gain = blk.name.ends_with(".gain");
      const bool is_bias = blk.name.ends_with(".bias");
      const bool zero = h_.zero_head && (b == wh2_ || b == bh2_);
      for (std::size_t i = 0; i < blk.size(); ++i) {
        T v = T(0);
        if (is_gain) v = T(1);
        else if (!is_bias && !zero) v = static_cast<T>(h_.init_std * normal01(rng));
        theta_[blk.offset + i] = v;
      }
    }
  }

  CMap P(int b) const {
    const auto& blk = layout_[b];
    return CMap(theta_.data() + blk.offset, blk.rows, blk.cols);
  }
  static MMap G(T* grad, const ParamLayout::Block& blk) { return MMap(grad + blk.offset, blk.rows, blk.cols); }
  MMap G(T* grad, int b) const { return G(grad, layout_[b]); }

  static constexpr T kEps = T(1e-5);

  static void layer_norm(const Mat& x, const CMap& g, const CMap& b, Mat& xhat, std::vector<T>& rstd, Mat& y) {
    const Eigen::Index n = x.rows(), d = x.cols();
    xhat.resize(n, d);
    y.resize(n, d);
    rstd.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const T mu = x.row(i).mean();
      const T var = (x.row(i).array() - mu).square().mean();
      const T r = T(1) / std::sqrt(var + kEps);
      rstd[static_cast<std::size_t>(i)] = r;
      xhat.row(i) = (x.row(i).array() - mu) * r;
      y.row(i) = xhat.row(i).cwiseProduct(g.row(0)) + b.row(0);
    }
  }

  /// Returns dx; accumulates dgain, dbias.
  static Mat layer_norm_back(const Mat& dy, const Mat& xhat, const std::vector<T>& rstd, const CMap& g, MMap dg,
                             MMap db) {
    const Eigen::Index n = dy.rows(), d = dy.cols();
    Mat dx(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      dg.row(0) += dy.row(i).cwiseProduct(xhat.row(i));
      db.row(0) += dy.row(i);
      const Row dxhat = dy.row(i).cwiseProduct(g.row(0));
      const T m1 = dxhat.mean();
      const T m2 = dxhat.cwiseProduct(xhat.row(i)).mean();
      dx.row(i) = rstd[static_cast<std::size_t>(i)] * (dxhat.array() - m1 - xhat.row(i).array() * m2).matrix();
    }
    return dx;
  }

  void run(const Input& t, Cache& c) const {
    if (!t.valid()) throw PreconditionError("transformer: token id outside its slot vocabulary");
    const int D = h_.dim, H = h_.heads, dh = D / H;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));
    Mat x(kSeq, D);
    const CMap tok = P(tok_), pos = P(pos_);
    for (int i = 0; i < kSeq; ++i) x.row(i) = tok.row(t.global_id(i)) + pos.row(i);

    c.layer.resize(static_cast<std::size_t>(h_.layers));
    for (int l = 0; l < h_.layers; ++l) {
      const LayerIdx& li = layers_[static_cast<std::size_t>(l)];
      LayerCache& lc = c.layer[static_cast<std::size_t>(l)];
      lc.x_in = x;
      layer_norm(lc.x_in, P(li.ln1_g), P(li.ln1_b), lc.xhat1, lc.rstd1, lc.a1);
      lc.qkv = lc.a1 * P(li.wqkv);
      lc.qkv.rowwise() += P(li.bqkv).row(0);
      lc.O.resize(kSeq, D);
      lc.P.resize(static_cast<std::size_t>(H));
      for (int h = 0; h < H; ++h) {
        const auto Q = lc.qkv.middleCols(h * dh, dh);
        const auto K = lc.qkv.middleCols(D + h * dh, dh);
        const auto V = lc.qkv.middleCols(2 * D + h * dh, dh);
        Mat s = (Q * K.transpose()) * scale;
        for (int i = 0; i < kSeq; ++i) {
          const T m = s.row(i).maxCoeff();
          s.row(i) = (s.row(i).array() - m).exp().matrix();
          s.row(i) /= s.row(i).sum();
        }
        lc.O.middleCols(h * dh, dh) = s * V;
        lc.P[static_cast<std::size_t>(h)] = std::move(s);
      }
      lc.h = lc.x_in + lc.O * P(li.wo);
      lc.h.rowwise() += P(li.bo).row(0);
      layer_norm(lc.h, P(li.ln2_g), P(li.ln2_b), lc.xhat2, lc.rstd2, lc.a2);
      lc.z1 = lc.a2 * P(li.w1);
      lc.z1.rowwise() += P(li.b1).row(0);
      lc.g1 = lc.z1.unaryExpr([](T v) { return detail::gelu(v); });
      x = lc.h + lc.g1 * P(li.w2);
      x.rowwise() += P(li.b2).row(0);
    }

    c.cls = x.row(kCls);
    {
      const T mu = c.cls.mean();
      const T var = (c.cls.array() - mu).square().mean();
      c.crstd = T(1) / std::sqrt(var + kEps);
      c.chat = ((c.cls.array() - mu) * c.crstd).matrix();
      c.cf = c.chat.cwiseProduct(P(lnf_g_).row(0)) + P(lnf_b_).row(0);
    }
    c.u = c.cf * P(wh1_) + P(bh1_).row(0);
    c.gu = c.u.unaryExpr([](T v) { return detail::gelu(v); });
    const Row out = c.gu * P(wh2_) + P(bh2_).row(0);
    c.logits = {out(0), out(1)};
  }

  void backward(const Input& t, const Cache& c, const std::array<T, 2>& dlogits, T* grad) const {
    const int D = h_.dim, H = h_.heads, dh = D / H;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    Row dout(2);
    dout << dlogits[0], dlogits[1];
    G(grad, wh2_) += c.gu.transpose() * dout;
    G(grad, bh2_).row(0) += dout;
    const Row dgu = dout * P(wh2_).transpose();
    const Row du = dgu.cwiseProduct(c.u.unaryExpr([](T v) { return detail::gelu_grad(v); }));
    G(grad, wh1_) += c.cf.transpose() * du;
    G(grad, bh1_).row(0) += du;
    const Row dcf = du * P(wh1_).transpose();
    G(grad, lnf_g_).row(0) += dcf.cwiseProduct(c.chat);
    G(grad, lnf_b_).row(0) += dcf;
    const Row dchat = dcf.cwiseProduct(P(lnf_g_).row(0));
    const Row dcls =
        c.crstd * (dchat.array() - dchat.mean() - c.chat.array() * dchat.cwiseProduct(c.chat).mean()).matrix();

    Mat dx = Mat::Zero(kSeq, D);
    dx.row(kCls) = dcls;

    for (int l = h_.layers - 1; l >= 0; --l) {
      const LayerIdx& li = layers_[static_cast<std::size_t>(l)];
      const LayerCache& lc = c.layer[static_cast<std::size_t>(l)];

      // x_out = r + gelu(a2 W1 + b1) W2 + b2
      Mat dr = dx;
      G(grad, li.w2) += lc.g1.transpose() * dx;
      G(grad, li.b2).row(0) += dx.colwise().sum();
      Mat dz1 = (dx * P(li.w2).transpose()).cwiseProduct(lc.z1.unaryExpr([](T v) { return detail::gelu_grad(v); }));
      G(grad, li.w1) += lc.a2.transpose() * dz1;
      G(grad, li.b1).row(0) += dz1.colwise().sum();
      const Mat da2 = dz1 * P(li.w1).transpose();
      dr += layer_norm_back(da2, lc.xhat2, lc.rstd2, P(li.ln2_g), G(grad, li.ln2_g), G(grad, li.ln2_b));

      // r = x_in + O Wo + bo
      Mat dxin = dr;
      G(grad, li.wo) += lc.O.transpose() * dr;
      G(grad, li.bo).row(0) += dr.colwise().sum();
      const Mat dO = dr * P(li.wo).transpose();
      Mat dqkv(kSeq, 3 * D);
      for (int h = 0; h < H; ++h) {
        const Mat& Pm = lc.P[static_cast<std::size_t>(h)];
        const auto Q = lc.qkv.middleCols(h * dh, dh);
        const auto K = lc.qkv.middleCols(D + h * dh, dh);
        const auto V = lc.qkv.middleCols(2 * D + h * dh, dh);
        const auto dOh = dO.middleCols(h * dh, dh);
        const Mat dP = dOh * V.transpose();
        dqkv.middleCols(2 * D + h * dh, dh) = Pm.transpose() * dOh;
        Mat dS = Pm.cwiseProduct(dP);
        const Eigen::Matrix<T, Eigen::Dynamic, 1> rows = dS.rowwise().sum();
        dS = Pm.cwiseProduct(dP.colwise() - rows) * scale;
        dqkv.middleCols(h * dh, dh) = dS * K;
        dqkv.middleCols(D + h * dh, dh) = dS.transpose() * Q;
      }
      G(grad, li.wqkv) += lc.a1.transpose() * dqkv;
      G(grad, li.bqkv).row(0) += dqkv.colwise().sum();
      const Mat da1 = dqkv * P(li.wqkv).transpose();
      dxin += layer_norm_back(da1, lc.xhat1, lc.rstd1, P(li.ln1_g), G(grad, li.ln1_g), G(grad, li.ln1_b));
      dx = std::move(dxin);
    }

    MMap dtok = G(grad, tok_), dpos = G(grad, pos_);
    for (int i = 0; i < kSeq; ++i) {
      dtok.row(t.global_id(i)) += dx.row(i);
      dpos.row(i) += dx.row(i);
    }
  }

  Hyper h_;
  ParamLayout layout_;
  std::vector<T> theta_;
  int tok_ = 0, pos_ = 0, lnf_g_ = 0, lnf_b_ = 0, wh1_ = 0, bh1_ = 0, wh2_ = 0, bh2_ = 0;
  std::vector<LayerIdx> layers_;
};

using ManagerModel = Transformer<float>;

/// Per-square CLS attention: for each of the 64 square tokens, the mean over
/// all layers and heads of the weight in the CLS query row. Metadata tokens
/// (side, castling, check, CLS itself) are reported separately; nothing is
/// renormalised.
struct ClsAttention {
  std::array<double, 64> squares{};
  std::array<double, 4> metadata{};
};

template <typename T>
ClsAttention extract_cls_attention(const Transformer<T>& model, const chess::TokenSequence& t) {
  const auto out = model.forward(t, true);
  ClsAttention a;
  if (out.attention.empty()) return a;
  const double n = static_cast<double>(out.attention.size());
  for (const auto& P : out.attention) {
    for (int j = 0; j < 64; ++j) a.squares[static_cast<std::size_t>(j)] += static_cast<double>(P(67, j));
    for (int j = 0; j < 4; ++j) a.metadata[static_cast<std::size_t>(j)] += static_cast<double>(P(67, 64 + j));
  }
  for (auto& v : a.squares) v /= n;
  for (auto& v : a.metadata) v /= n;
  return a;
}

template <typename T>
ClsAttention extract_cls_attention(const Transformer<T>& model, const chess::Position& p) {
  return extract_cls_attention(model, chess::tokenize(p));
}

}  // namespace centaur::rl
