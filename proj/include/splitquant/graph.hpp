#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitquant/tensor.hpp"

namespace splitquant {

enum class LayerKind {
  linear,
  conv2d,
  embedding,
  layernorm,
  relu,
  gelu,
  softmax_attention,
  split_sum,
};

const char* kind_name(LayerKind kind);
std::optional<LayerKind> kind_from_name(std::string_view name);

// One node of the forward computation. `children` holds the three masked
// sublayers of a split_sum, and the query/key/value projections of a
// softmax_attention (in that order).
struct LayerSpec {
  LayerKind kind = LayerKind::linear;
  std::string weight_name;  // empty when the layer has no weight
  std::string bias_name;    // empty when the layer has no bias
  std::map<std::string, std::int64_t> attrs;
  std::vector<LayerSpec> children;

  std::int64_t attr_or(const std::string& key, std::int64_t fallback) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second;
  }

  bool operator==(const LayerSpec&) const = default;
};

struct ModelGraph {
  std::vector<LayerSpec> layers;
  std::vector<std::int64_t> input_shape;
  std::map<std::string, std::string> metadata;

  bool operator==(const ModelGraph&) const = default;
};

struct Model {
  ModelGraph graph;
  TensorMap tensors;

  const Tensor* find(const std::string& name) const;
  std::size_t param_count() const;
};

struct Violation {
  std::string where;   // layer or tensor the rule failed on
  std::string rule;
  std::string detail;

  std::string to_string() const;
};

// Checks every structural invariant: payload sizes, tensor references,
// split_sum arity/kinds, attention structure, and shape compatibility of
// consecutive layers. Empty result means the model is executable.
std::vector<Violation> validate(const ModelGraph& graph,
                                const TensorMap& tensors);

inline std::vector<Violation> validate(const Model& model) {
  return validate(model.graph, model.tensors);
}

// Throws ValidationError listing the violations, if any.
void require_valid(const Model& model);

// Output shape of `layer` applied to `input_shape`. Throws ValidationError
// with a message when the layer cannot accept that shape.
std::vector<std::int64_t> infer_output_shape(const LayerSpec& layer,
                                             std::span<const std::int64_t> input_shape,
                                             const TensorMap& tensors);

}  // namespace splitquant
