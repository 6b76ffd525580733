#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "centaur/error.hpp"
#include "json.hpp"

namespace centaur::rl {

/// Self-describing binary container for model parameters.
///
///   "CNTRCKPT"                      8-byte magic
///   u32 format version              (currently 1)
///   u32 n, n bytes                  JSON header: model kind and hyperparameters
///   u32 tensor count
///   per tensor:
///     u16 n, n bytes                name
///     u8 dtype                      0 = float32, 1 = float64
///     u8 rank, rank x u32           shape
///     product(shape) x dtype        values, little endian
///
/// All integers are little endian.
namespace ckpt {

inline constexpr char kMagic[8] = {'C', 'N', 'T', 'R', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kVersion = 1;

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  DType dtype = DType::F32;
  std::vector<unsigned char> bytes;

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  template <typename T>
  static Tensor from(std::string name, std::vector<std::uint32_t> shape, const T* data) {
    static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
    Tensor t{std::move(name), std::move(shape), std::is_same_v<T, float> ? DType::F32 : DType::F64, {}};
    t.bytes.resize(t.count() * sizeof(T));
    std::memcpy(t.bytes.data(), data, t.bytes.size());
    return t;
  }

  /// Copies values out, converting between float widths if needed.
  template <typename T>
  void copy_to(T* out) const {
    const std::size_t n = count();
    if (dtype == DType::F32) {
      std::vector<float> v(n);
      std::memcpy(v.data(), bytes.data(), n * sizeof(float));
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<T>(v[i]);
    } else {
      std::vector<double> v(n);
      std::memcpy(v.data(), bytes.data(), n * sizeof(double));
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<T>(v[i]);
    }
  }
};

struct Container {
  nlohmann::json header;
  std::vector<Tensor> tensors;

  const Tensor& get(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return t;
    throw ParseError("checkpoint: missing tensor '" + name + "'");
  }
};

namespace detail {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("checkpoint " + path + ": truncated");
  return v;
}

}  // namespace detail

inline void write(const std::string& path, const Container& c) {
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("cannot write checkpoint " + path);
  o.write(kMagic, sizeof kMagic);
  detail::put<std::uint32_t>(o, kVersion);
  const std::string h = c.header.dump();
  detail::put<std::uint32_t>(o, static_cast<std::uint32_t>(h.size()));
  o.write(h.data(), static_cast<std::streamsize>(h.size()));
  detail::put<std::uint32_t>(o, static_cast<std::uint32_t>(c.tensors.size()));
  for (const auto& t : c.tensors) {
    detail::put<std::uint16_t>(o, static_cast<std::uint16_t>(t.name.size()));
    o.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    detail::put<std::uint8_t>(o, static_cast<std::uint8_t>(t.dtype));
    detail::put<std::uint8_t>(o, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) detail::put<std::uint32_t>(o, d);
    o.write(reinterpret_cast<const char*>(t.bytes.data()), static_cast<std::streamsize>(t.bytes.size()));
  }
  if (!o) throw Error("error writing checkpoint " + path);
}

inline Container read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read checkpoint " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("checkpoint " + path + ": bad magic (not a model file)");
  const auto version = detail::get<std::uint32_t>(in, path);
  if (version != kVersion)
    throw ParseError("checkpoint " + path + ": unsupported format version " + std::to_string(version));
  Container c;
  const auto hlen = detail::get<std::uint32_t>(in, path);
  std::string h(hlen, '\0');
  if (!in.read(h.data(), hlen)) throw ParseError("checkpoint " + path + ": truncated header");
  try {
    c.header = nlohmann::json::parse(h);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path + ": bad header: " + e.what());
  }
  const auto n = detail::get<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < n; ++i) {
    Tensor t;
    const auto nl = detail::get<std::uint16_t>(in, path);
    t.name.resize(nl);
    if (!in.read(t.name.data(), nl)) throw ParseError("checkpoint " + path + ": truncated");
    const auto dt = detail::get<std::uint8_t>(in, path);
    if (dt > 1) throw ParseError("checkpoint " + path + ": unknown dtype for '" + t.name + "'");
    t.dtype = static_cast<DType>(dt);
    const auto rank = detail::get<std::uint8_t>(in, path);
    for (int r = 0; r < rank; ++r) t.shape.push_back(detail::get<std::uint32_t>(in, path));
    t.bytes.resize(t.count() * (t.dtype == DType::F32 ? 4 : 8));
    if (!in.read(reinterpret_cast<char*>(t.bytes.data()), static_cast<std::streamsize>(t.bytes.size())))
      throw ParseError("checkpoint " + path + ": truncated tensor '" + t.name + "'");
    c.tensors.push_back(std::move(t));
  }
  return c;
}

}  // namespace ckpt
}  // namespace centaur::rl
