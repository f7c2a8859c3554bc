#pragma once

// Tensor files.
//
// GEOT binary layout (little-endian):
//   bytes 0..3    magic "GEOT"
//   byte  4       rank (1..8)
//   byte  5       dtype, 1 = float32 (the only one defined)
//   bytes 6..15   zero padding
//   rank x u32    dimensions, outermost first
//   payload       row-major float32
//
// JSON tensors are rectangular nested arrays of numbers.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geokit/ingest/jsonl.hpp"
#include "geokit/quantizer.hpp"

namespace geokit::ingest {

struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::size_t rank() const { return shape.size(); }
  bool operator==(const Tensor&) const = default;
};

inline constexpr char kGeotMagic[4] = {'G', 'E', 'O', 'T'};
inline constexpr std::uint8_t kDtypeF32 = 1;
inline constexpr std::size_t kGeotHeaderBytes = 16;
inline constexpr std::size_t kMaxRank = 8;
inline constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

inline std::uint64_t element_count(const std::vector<std::uint32_t>& shape,
                                   const std::string& path) {
  std::uint64_t n = 1;
  for (auto d : shape) {
    if (d != 0 && n > kMaxElements / d) throw IngestError(path, 0, "tensor dimensions overflow");
    n *= d;
  }
  if (n > kMaxElements) throw IngestError(path, 0, "tensor dimensions overflow");
  return n;
}

}  // namespace detail

inline std::string encode_geot(const Tensor& t) {
  if (t.shape.empty() || t.shape.size() > kMaxRank) {
    throw InvalidArgument("GEOT rank must be in [1, 8]");
  }
  if (detail::element_count(t.shape, "<tensor>") != t.data.size()) {
    throw InvalidArgument("tensor data size does not match shape");
  }
  std::string out(kGeotMagic, 4);
  out.push_back(static_cast<char>(t.shape.size()));
  out.push_back(static_cast<char>(kDtypeF32));
  out.append(kGeotHeaderBytes - 6, '\0');
  for (auto d : t.shape) detail::put_u32(out, d);
  for (float f : t.data) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

inline Tensor decode_geot(std::string_view bytes, const std::string& path = "<geot>") {
  if (bytes.size() < kGeotHeaderBytes) {
    throw IngestError(path, 0, "truncated GEOT header: expected " +
                                   std::to_string(kGeotHeaderBytes) + " bytes, got " +
                                   std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kGeotMagic, 4) != 0) throw IngestError(path, 0, "bad magic, not a GEOT file");
  const auto rank = static_cast<std::uint8_t>(bytes[4]);
  const auto dtype = static_cast<std::uint8_t>(bytes[5]);
  if (rank == 0 || rank > kMaxRank) {
    throw IngestError(path, 0, "GEOT rank " + std::to_string(rank) + " outside [1, 8]");
  }
  if (dtype != kDtypeF32) throw IngestError(path, 0, "unsupported GEOT dtype " + std::to_string(dtype));
  const std::size_t dims_end = kGeotHeaderBytes + 4 * std::size_t{rank};
  if (bytes.size() < dims_end) {
    throw IngestError(path, 0, "truncated GEOT dimensions: expected " + std::to_string(dims_end) +
                                   " bytes, got " + std::to_string(bytes.size()));
  }
  Tensor t;
  for (std::size_t i = 0; i < rank; ++i) t.shape.push_back(detail::get_u32(bytes, kGeotHeaderBytes + 4 * i));
  const std::uint64_t n = detail::element_count(t.shape, path);
  const std::uint64_t expected = dims_end + 4 * n;
  if (bytes.size() != expected) {
    throw IngestError(path, 0, std::string(bytes.size() < expected ? "truncated" : "oversized") +
                                   " GEOT payload: expected " + std::to_string(expected) +
                                   " bytes, got " + std::to_string(bytes.size()));
  }
  t.data.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const float f = std::bit_cast<float>(detail::get_u32(bytes, dims_end + 4 * i));
    if (!std::isfinite(f)) {
      throw IngestError(path, 0, "non-finite value at element " + std::to_string(i));
    }
    t.data.push_back(f);
  }
  return t;
}

namespace detail {

inline void flatten_json(const nlohmann::json& j, std::size_t depth, Tensor& t,
                         const std::string& path) {
  if (j.is_array()) {
    if (depth >= kMaxRank) throw IngestError(path, 0, "JSON tensor nested deeper than 8");
    if (j.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw IngestError(path, 0, "tensor dimensions overflow");
    }
    if (depth == t.shape.size()) {
      if (j.empty()) throw IngestError(path, 0, "JSON tensor has an empty axis");
      t.shape.push_back(static_cast<std::uint32_t>(j.size()));
    } else if (t.shape[depth] != j.size()) {
      throw IngestError(path, 0, "JSON tensor is ragged at depth " + std::to_string(depth));
    }
    for (const auto& e : j) flatten_json(e, depth + 1, t, path);
    return;
  }
  if (!j.is_number()) throw IngestError(path, 0, "JSON tensor holds a non-number");
  if (depth != t.shape.size()) {
    throw IngestError(path, 0, "JSON tensor is ragged at depth " + std::to_string(depth));
  }
  const double v = j.get<double>();
  const auto f = static_cast<float>(v);
  if (!std::isfinite(f)) throw IngestError(path, 0, "non-finite value in JSON tensor");
  t.data.push_back(f);
}

inline nlohmann::json nest_json(const Tensor& t, std::size_t depth, std::size_t& cursor) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::uint32_t i = 0; i < t.shape[depth]; ++i) {
    if (depth + 1 == t.shape.size()) {
      arr.push_back(static_cast<double>(t.data[cursor++]));
    } else {
      arr.push_back(nest_json(t, depth + 1, cursor));
    }
  }
  return arr;
}

}  // namespace detail

inline Tensor tensor_from_json(const nlohmann::json& j, const std::string& path = "<json>") {
  if (!j.is_array()) throw IngestError(path, 0, "JSON tensor must be an array");
  Tensor t;
  detail::flatten_json(j, 0, t, path);
  return t;
}

inline nlohmann::json tensor_to_json(const Tensor& t) {
  if (t.shape.empty()) throw InvalidArgument("tensor_to_json: rank 0");
  std::size_t cursor = 0;
  return detail::nest_json(t, 0, cursor);
}

/// GEOT when the file starts with the magic, JSON otherwise.
inline Tensor load_tensor(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kGeotMagic, 4) == 0) {
    return decode_geot(bytes, path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(path, 0, std::string("neither GEOT nor JSON: ") + e.what());
  }
  return tensor_from_json(j, path);
}

inline void write_geot(const std::string& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError(path, 0, "cannot open for writing");
  const auto bytes = encode_geot(t);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Rank 3 is H x W x b; rank 2 is N x b (a column of N cells); rank 1 a
/// single cell. `expected_bits` of 0 accepts any width.
inline quantizer::FeatureGrid to_feature_grid(const Tensor& t, int expected_bits = 0) {
  std::size_t h = 1, w = 1, b = 0;
  switch (t.rank()) {
    case 1: b = t.shape[0]; break;
    case 2: h = t.shape[0]; b = t.shape[1]; break;
    case 3: h = t.shape[0]; w = t.shape[1]; b = t.shape[2]; break;
    default:
      throw InvalidArgument("feature tensor must have rank 1-3, got " + std::to_string(t.rank()));
  }
  if (expected_bits != 0 && b != static_cast<std::size_t>(expected_bits)) {
    throw InvalidArgument("feature tensor innermost dimension " + std::to_string(b) +
                          " does not match bits " + std::to_string(expected_bits));
  }
  if (b == 0 || b > static_cast<std::size_t>(quantizer::kMaxBits)) {
    throw InvalidArgument("feature tensor bit width " + std::to_string(b) + " outside [1, 24]");
  }
  return quantizer::FeatureGrid(h, w, static_cast<int>(b),
                                std::vector<double>(t.data.begin(), t.data.end()));
}

inline quantizer::DistributionBatch to_distribution_batch(const Tensor& t) {
  if (t.rank() != 2) throw InvalidArgument("distribution tensor must have rank 2");
  return quantizer::DistributionBatch(t.shape[0], t.shape[1],
                                      std::vector<double>(t.data.begin(), t.data.end()));
}

}  // namespace geokit::ingest
