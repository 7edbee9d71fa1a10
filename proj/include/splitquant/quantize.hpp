#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "splitquant/graph.hpp"
#include "splitquant/tensor.hpp"

namespace splitquant {

// Real value range of a tensor, always extended to contain zero so that the
// structural zeros produced by splitting stay exactly representable.
struct Range {
  float beta = 0.0f;
  float alpha = 0.0f;

  bool degenerate() const { return beta == 0.0f && alpha == 0.0f; }
  bool operator==(const Range&) const = default;
};

Range compute_range(std::span<const float> values);
Range compute_range(const Tensor& t);  // t must be F32 with >= 1 element

// Scale and zero point for [beta, alpha] at bit width b:
//   S = (2^b - 1) / (alpha - beta)
//   Z = -2^(b-1) - round(S * beta)      round = nearest, ties away from zero
// The degenerate all-zero range maps to S = 1, Z = 0.
QuantParams quant_params(float beta, float alpha, int bits);

// q = clamp(round(S*x) + Z, -2^(b-1), 2^(b-1)-1)
int quantize_value(float x, const QuantParams& p);
float dequantize_value(int q, const QuantParams& p);

// F32 tensor -> packed integer tensor with embedded params (same name/shape).
Tensor quantize_tensor(const Tensor& t, int bits);
// Packed integer tensor -> F32 tensor of the original shape.
Tensor dequantize_tensor(const Tensor& q);

// Quantizes every F32 tensor referenced as a weight or bias by some layer,
// each with its own per-tensor params. Graph structure is unchanged.
Model quantize_model(const Model& model, int bits, int threads = 1);

struct TensorErrorStats {
  std::string tensor;
  double mse = 0.0;
  double max_abs_err = 0.0;
  QuantParams params;

  bool operator==(const TensorErrorStats&) const = default;
};

// Reconstruction error of `quantized` against the F32 `original`.
TensorErrorStats error_stats(const Tensor& original, const Tensor& quantized);

std::string error_stats_to_json(const TensorErrorStats& stats);
TensorErrorStats error_stats_from_json(const std::string& json_text);

}  // namespace splitquant
