#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "centaur/rl/checkpoint.hpp"
#include "centaur/util/hash.hpp"

namespace centaur::rl {

/// Named 2-D blocks laid out back to back in one flat parameter vector.
class ParamLayout {
 public:
  struct Block {
    std::string name;
    int rows;
    int cols;
    std::size_t offset;
    std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  };

  int add(std::string name, int rows, int cols) {
    blocks_.push_back({std::move(name), rows, cols, total_});
    total_ += blocks_.back().size();
    return static_cast<int>(blocks_.size()) - 1;
  }

  const Block& operator[](int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::size_t total() const noexcept { return total_; }

  const Block& find(std::string_view name) const {
    for (const auto& b : blocks_)
      if (b.name == name) return b;
    throw PreconditionError("no parameter block named '" + std::string(name) + "'");
  }

  /// Block index containing flat coordinate `i`.
  int block_of(std::size_t i) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (i < blocks_[b].offset + blocks_[b].size()) return static_cast<int>(b);
    return -1;
  }

  template <typename T>
  std::vector<ckpt::Tensor> to_tensors(const std::vector<T>& values) const {
    std::vector<ckpt::Tensor> out;
    for (const auto& b : blocks_)
      out.push_back(ckpt::Tensor::from(b.name, {static_cast<std::uint32_t>(b.rows), static_cast<std::uint32_t>(b.cols)},
                                       values.data() + b.offset));
    return out;
  }

  /// Fills `values` from a container; every block must be present with its exact shape.
  template <typename T>
  void from_tensors(const ckpt::Container& c, std::vector<T>& values) const {
    values.assign(total_, T(0));
    for (const auto& b : blocks_) {
      const ckpt::Tensor& t = c.get(b.name);
      if (t.shape != std::vector<std::uint32_t>{static_cast<std::uint32_t>(b.rows), static_cast<std::uint32_t>(b.cols)})
        throw ParseError("checkpoint: shape mismatch for '" + b.name + "' (expected " + std::to_string(b.rows) + "x" +
                         std::to_string(b.cols) + ")");
      t.copy_to(values.data() + b.offset);
    }
    if (c.tensors.size() != blocks_.size()) throw ParseError("checkpoint: unexpected extra tensors");
  }

 private:
  std::vector<Block> blocks_;
  std::size_t total_ = 0;
};

/// Content hash of a parameter vector, for provenance in reports.
template <typename T>
std::uint64_t fingerprint(const std::vector<T>& values) {
  Fnv1a h;
  h.update(std::as_bytes(std::span<const T>(values)));
  return h.digest();
}

}  // namespace centaur::rl
