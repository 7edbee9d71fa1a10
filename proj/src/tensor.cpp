#include "splitquant/tensor.hpp"

#include <charconv>
#include <cstring>

namespace splitquant {

const char* dtype_name(DType dtype) {
  switch (dtype) {
    case DType::F32:
      return "F32";
    case DType::I8:
      return "I8";
    case DType::I4x2:
      return "I4x2";
    case DType::I2x4:
      return "I2x4";
  }
  return "?";
}

std::optional<DType> dtype_from_name(std::string_view name) {
  if (name == "F32") return DType::F32;
  if (name == "I8") return DType::I8;
  if (name == "I4x2") return DType::I4x2;
  if (name == "I2x4") return DType::I2x4;
  return std::nullopt;
}

std::size_t payload_bytes(DType dtype, std::size_t numel) {
  switch (dtype) {
    case DType::F32:
      return numel * 4;
    case DType::I8:
      return numel;
    case DType::I4x2:
      return (numel + 1) / 2;
    case DType::I2x4:
      return (numel + 3) / 4;
  }
  return 0;
}

std::size_t shape_numel(std::span<const std::int64_t> shape) {
  std::size_t n = 1;
  for (std::int64_t e : shape) {
    if (e < 0) throw ArgumentError("negative extent in shape");
    n *= static_cast<std::size_t>(e);
  }
  return n;
}

std::size_t Tensor::numel() const { return shape_numel(shape); }

std::span<const float> Tensor::f32() const {
  if (dtype != DType::F32)
    throw ArgumentError("tensor '" + name + "' is not F32");
  return {reinterpret_cast<const float*>(data.data()), numel()};
}

std::span<float> Tensor::f32() {
  if (dtype != DType::F32)
    throw ArgumentError("tensor '" + name + "' is not F32");
  return {reinterpret_cast<float*>(data.data()), numel()};
}

Tensor Tensor::zeros_f32(std::string name, std::vector<std::int64_t> shape) {
  Tensor t;
  t.name = std::move(name);
  t.dtype = DType::F32;
  t.shape = std::move(shape);
  t.data.assign(t.expected_bytes(), 0);
  return t;
}

Tensor Tensor::from_values(std::string name, std::vector<std::int64_t> shape,
                           std::span<const float> values) {
  Tensor t = zeros_f32(std::move(name), std::move(shape));
  if (values.size() != t.numel())
    throw ArgumentError("value count does not match shape for '" + t.name + "'");
  std::memcpy(t.data.data(), values.data(), values.size() * sizeof(float));
  return t;
}

Eigen::Map<const RowMatrixXf> matrix_view(const Tensor& t, std::int64_t rows,
                                          std::int64_t cols) {
  auto vals = t.f32();
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) !=
      vals.size())
    throw ArgumentError("matrix view shape mismatch for '" + t.name + "'");
  return {vals.data(), rows, cols};
}

Eigen::Map<const Eigen::ArrayXf> array_view(const Tensor& t) {
  auto vals = t.f32();
  return {vals.data(), static_cast<Eigen::Index>(vals.size())};
}

std::vector<std::uint8_t> pack_i4(std::span<const std::int8_t> values) {
  std::vector<std::uint8_t> out((values.size() + 1) / 2, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::int8_t v = values[i];
    if (v < -8 || v > 7) throw ArgumentError("value out of I4 range");
    const std::uint8_t nib = static_cast<std::uint8_t>(v) & 0x0F;
    out[i / 2] |= static_cast<std::uint8_t>(nib << ((i % 2) * 4));
  }
  return out;
}

std::vector<std::int8_t> unpack_i4(std::span<const std::uint8_t> bytes,
                                   std::size_t numel) {
  if (bytes.size() != (numel + 1) / 2)
    throw ArgumentError("I4x2 payload size mismatch");
  std::vector<std::int8_t> out(numel);
  for (std::size_t i = 0; i < numel; ++i) {
    const std::uint8_t nib = (bytes[i / 2] >> ((i % 2) * 4)) & 0x0F;
    out[i] = static_cast<std::int8_t>((nib ^ 0x08) - 0x08);
  }
  return out;
}

std::vector<std::uint8_t> pack_i2(std::span<const std::int8_t> values) {
  std::vector<std::uint8_t> out((values.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::int8_t v = values[i];
    if (v < -2 || v > 1) throw ArgumentError("value out of I2 range");
    const std::uint8_t crumb = static_cast<std::uint8_t>(v) & 0x03;
    out[i / 4] |= static_cast<std::uint8_t>(crumb << ((i % 4) * 2));
  }
  return out;
}

std::vector<std::int8_t> unpack_i2(std::span<const std::uint8_t> bytes,
                                   std::size_t numel) {
  if (bytes.size() != (numel + 3) / 4)
    throw ArgumentError("I2x4 payload size mismatch");
  std::vector<std::int8_t> out(numel);
  for (std::size_t i = 0; i < numel; ++i) {
    const std::uint8_t crumb = (bytes[i / 4] >> ((i % 4) * 2)) & 0x03;
    out[i] = static_cast<std::int8_t>((crumb ^ 0x02) - 0x02);
  }
  return out;
}

std::string f32_to_string(float v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string f64_to_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

float f32_from_string(std::string_view s) {
  float v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw FormatError("bad float literal: '" + std::string(s) + "'");
  return v;
}

double f64_from_string(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw FormatError("bad float literal: '" + std::string(s) + "'");
  return v;
}

}  // namespace splitquant
