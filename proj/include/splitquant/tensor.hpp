#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitquant/errors.hpp"

namespace splitquant {

// Element types of a stored tensor. I4x2 packs two 4-bit two's-complement
// values per byte, I2x4 packs four 2-bit values per byte. Odd tails are
// padded with zero bits.
enum class DType { F32, I8, I4x2, I2x4 };

const char* dtype_name(DType dtype);
std::optional<DType> dtype_from_name(std::string_view name);

// Payload size in bytes for `numel` elements of `dtype`.
std::size_t payload_bytes(DType dtype, std::size_t numel);

// Affine quantization parameters for one tensor: a real range [beta, alpha]
// containing zero, mapped onto signed `bits`-wide integers with scale
// (2^bits - 1) / (alpha - beta) and an integer zero point.
struct QuantParams {
  int bits = 8;
  float beta = 0.0f;
  float alpha = 0.0f;
  double scale = 1.0;
  int zero_point = 0;

  int qmin() const { return -(1 << (bits - 1)); }
  int qmax() const { return (1 << (bits - 1)) - 1; }

  bool operator==(const QuantParams&) const = default;
};

// Dense named tensor. Data is a contiguous little-endian row-major byte
// payload; for packed dtypes `shape` keeps the logical element count and
// `data` holds the packed bytes. Quantized tensors carry their params.
struct Tensor {
  std::string name;
  DType dtype = DType::F32;
  std::vector<std::int64_t> shape;
  std::vector<std::uint8_t> data;
  std::optional<QuantParams> quant;

  std::size_t numel() const;
  std::size_t expected_bytes() const { return payload_bytes(dtype, numel()); }

  std::span<const float> f32() const;
  std::span<float> f32();

  static Tensor zeros_f32(std::string name, std::vector<std::int64_t> shape);
  static Tensor from_values(std::string name, std::vector<std::int64_t> shape,
                            std::span<const float> values);
};

// Tensor table of a model, keyed (and iterated) by tensor name.
using TensorMap = std::map<std::string, Tensor>;

std::size_t shape_numel(std::span<const std::int64_t> shape);

using RowMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Read-only Eigen views over an F32 payload.
Eigen::Map<const RowMatrixXf> matrix_view(const Tensor& t, std::int64_t rows,
                                          std::int64_t cols);
Eigen::Map<const Eigen::ArrayXf> array_view(const Tensor& t);

// Packed signed payloads. Element 2i lives in the low nibble of byte i
// (element 4i in the lowest crumb), two's complement within the field.
std::vector<std::uint8_t> pack_i4(std::span<const std::int8_t> values);
std::vector<std::int8_t> unpack_i4(std::span<const std::uint8_t> bytes,
                                   std::size_t numel);
std::vector<std::uint8_t> pack_i2(std::span<const std::int8_t> values);
std::vector<std::int8_t> unpack_i2(std::span<const std::uint8_t> bytes,
                                   std::size_t numel);

// Shortest decimal strings that parse back to the exact same value.
std::string f32_to_string(float v);
std::string f64_to_string(double v);
float f32_from_string(std::string_view s);
double f64_from_string(std::string_view s);

}  // namespace splitquant
