#include "splitquant/graph.hpp"

#include <sstream>

namespace splitquant {

const char* kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::linear:
      return "linear";
    case LayerKind::conv2d:
      return "conv2d";
    case LayerKind::embedding:
      return "embedding";
    case LayerKind::layernorm:
      return "layernorm";
    case LayerKind::relu:
      return "relu";
    case LayerKind::gelu:
      return "gelu";
    case LayerKind::softmax_attention:
      return "softmax_attention";
    case LayerKind::split_sum:
      return "split_sum";
  }
  return "?";
}

std::optional<LayerKind> kind_from_name(std::string_view name) {
  for (LayerKind k :
       {LayerKind::linear, LayerKind::conv2d, LayerKind::embedding,
        LayerKind::layernorm, LayerKind::relu, LayerKind::gelu,
        LayerKind::softmax_attention, LayerKind::split_sum}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

const Tensor* Model::find(const std::string& name) const {
  auto it = tensors.find(name);
  return it == tensors.end() ? nullptr : &it->second;
}

std::size_t Model::param_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors) n += t.numel();
  return n;
}

std::string Violation::to_string() const {
  return where + ": " + rule + ": " + detail;
}

namespace {

std::string shape_str(std::span<const std::int64_t> shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
    os << (i ? "," : "") << shape[i];
  os << "]";
  return os.str();
}

const Tensor& need_tensor(const TensorMap& tensors, const std::string& name,
                          const std::string& where) {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw ValidationError(where + ": dangling tensor reference '" + name + "'");
  return it->second;
}

bool is_weight_bearing(LayerKind kind) {
  return kind == LayerKind::linear || kind == LayerKind::conv2d ||
         kind == LayerKind::embedding || kind == LayerKind::layernorm;
}

// Shape of the weight matrix of a linear-like layer, ignoring packing.
std::vector<std::int64_t> weight_shape(const TensorMap& tensors,
                                       const LayerSpec& layer,
                                       const std::string& where) {
  return need_tensor(tensors, layer.weight_name, where).shape;
}

std::vector<std::int64_t> infer_linear(const LayerSpec& layer,
                                       std::span<const std::int64_t> in,
                                       const TensorMap& tensors,
                                       const std::string& where) {
  auto w = weight_shape(tensors, layer, where);
  if (w.size() != 2)
    throw ValidationError(where + ": linear weight must be rank 2, got " +
                          shape_str(w));
  if (in.empty())
    throw ValidationError(where + ": linear input must have rank >= 1");
  if (in.back() != w[1])
    throw ValidationError(where + ": input extent " + std::to_string(in.back()) +
                          " does not match weight columns " +
                          std::to_string(w[1]));
  if (!layer.bias_name.empty()) {
    const auto& b = need_tensor(tensors, layer.bias_name, where);
    if (b.shape != std::vector<std::int64_t>{w[0]})
      throw ValidationError(where + ": bias shape " + shape_str(b.shape) +
                            " does not match output extent " +
                            std::to_string(w[0]));
  }
  std::vector<std::int64_t> out(in.begin(), in.end());
  out.back() = w[0];
  return out;
}

std::vector<std::int64_t> infer_conv2d(const LayerSpec& layer,
                                       std::span<const std::int64_t> in,
                                       const TensorMap& tensors,
                                       const std::string& where) {
  auto w = weight_shape(tensors, layer, where);
  if (w.size() != 4)
    throw ValidationError(where + ": conv2d weight must be rank 4, got " +
                          shape_str(w));
  if (in.size() != 3)
    throw ValidationError(where + ": conv2d input must be rank 3 (C,H,W), got " +
                          shape_str(in));
  const std::int64_t stride = layer.attr_or("stride", 1);
  const std::int64_t pad = layer.attr_or("padding", 0);
  if (stride < 1) throw ValidationError(where + ": conv2d stride must be >= 1");
  if (pad < 0) throw ValidationError(where + ": conv2d padding must be >= 0");
  if (in[0] != w[1])
    throw ValidationError(where + ": input channels " + std::to_string(in[0]) +
                          " do not match weight channels " + std::to_string(w[1]));
  const std::int64_t h = in[1] + 2 * pad - w[2];
  const std::int64_t v = in[2] + 2 * pad - w[3];
  if (h < 0 || v < 0)
    throw ValidationError(where + ": kernel larger than padded input");
  if (!layer.bias_name.empty()) {
    const auto& b = need_tensor(tensors, layer.bias_name, where);
    if (b.shape != std::vector<std::int64_t>{w[0]})
      throw ValidationError(where + ": bias shape " + shape_str(b.shape) +
                            " does not match output channels " +
                            std::to_string(w[0]));
  }
  return {w[0], h / stride + 1, v / stride + 1};
}

}  // namespace

std::vector<std::int64_t> infer_output_shape(const LayerSpec& layer,
                                             std::span<const std::int64_t> in,
                                             const TensorMap& tensors) {
  const std::string where = std::string(kind_name(layer.kind));
  switch (layer.kind) {
    case LayerKind::linear:
      return infer_linear(layer, in, tensors, where);
    case LayerKind::conv2d:
      return infer_conv2d(layer, in, tensors, where);
    case LayerKind::embedding: {
      auto w = weight_shape(tensors, layer, where);
      if (w.size() != 2)
        throw ValidationError(where + ": embedding weight must be rank 2");
      if (in.size() != 1)
        throw ValidationError(where + ": embedding input must be rank 1, got " +
                              shape_str(in));
      return {in[0], w[1]};
    }
    case LayerKind::layernorm: {
      auto w = weight_shape(tensors, layer, where);
      if (w.size() != 1)
        throw ValidationError(where + ": layernorm gamma must be rank 1");
      if (in.empty() || in.back() != w[0])
        throw ValidationError(where + ": input extent does not match gamma " +
                              std::to_string(w[0]));
      if (!layer.bias_name.empty()) {
        const auto& b = need_tensor(tensors, layer.bias_name, where);
        if (b.shape != w)
          throw ValidationError(where + ": beta shape does not match gamma");
      }
      return {in.begin(), in.end()};
    }
    case LayerKind::relu:
    case LayerKind::gelu:
      return {in.begin(), in.end()};
    case LayerKind::softmax_attention: {
      if (layer.children.size() != 3)
        throw ValidationError(where + ": needs exactly 3 projections (q,k,v), has " +
                              std::to_string(layer.children.size()));
      if (in.size() != 2)
        throw ValidationError(where + ": input must be rank 2 (seq, d_model), got " +
                              shape_str(in));
      std::vector<std::int64_t> proj;
      for (std::size_t i = 0; i < 3; ++i) {
        const LayerSpec& c = layer.children[i];
        if (c.kind != LayerKind::linear && c.kind != LayerKind::split_sum)
          throw ValidationError(where + ": projection " + std::to_string(i) +
                                " must be linear or split_sum");
        auto out = infer_output_shape(c, in, tensors);
        if (i == 0)
          proj = out;
        else if (out != proj)
          throw ValidationError(where + ": q/k/v projections disagree on output shape");
      }
      const std::int64_t head_dim = layer.attr_or("head_dim", proj[1]);
      if (head_dim != proj[1])
        throw ValidationError(where + ": head_dim attr " + std::to_string(head_dim) +
                              " does not match projection extent " +
                              std::to_string(proj[1]));
      return proj;
    }
    case LayerKind::split_sum: {
      if (layer.children.size() != 3)
        throw ValidationError(where + ": must have exactly 3 children, has " +
                              std::to_string(layer.children.size()));
      const LayerKind child_kind = layer.children[0].kind;
      if (child_kind != LayerKind::linear && child_kind != LayerKind::conv2d)
        throw ValidationError(where + ": children must be linear or conv2d");
      std::vector<std::int64_t> out;
      for (std::size_t i = 0; i < 3; ++i) {
        const LayerSpec& c = layer.children[i];
        if (c.kind != child_kind)
          throw ValidationError(where + ": children must all share one kind");
        auto o = infer_output_shape(c, in, tensors);
        if (i == 0)
          out = o;
        else if (o != out)
          throw ValidationError(where + ": children disagree on output shape");
      }
      return out;
    }
  }
  throw ValidationError("unknown layer kind");
}

namespace {

void check_tensor(const std::string& key, const Tensor& t,
                  std::vector<Violation>& out) {
  const std::string where = "tensor '" + key + "'";
  if (t.name != key)
    out.push_back({where, "name", "table key does not match tensor name '" +
                                      t.name + "'"});
  for (std::int64_t e : t.shape)
    if (e < 0) out.push_back({where, "shape", "negative extent"});
  std::size_t expected = 0;
  try {
    expected = t.expected_bytes();
  } catch (const Error&) {
    return;  // negative extent already reported
  }
  if (t.data.size() != expected)
    out.push_back({where, "payload-size",
                   std::to_string(t.data.size()) + " bytes, expected " +
                       std::to_string(expected)});
  const bool packed = t.dtype == DType::I4x2 || t.dtype == DType::I2x4;
  if (packed && !t.quant)
    out.push_back({where, "quant-params", "packed tensor without quant params"});
  if (t.dtype == DType::F32 && t.quant)
    out.push_back({where, "quant-params", "F32 tensor carries quant params"});
  if (t.quant) {
    const QuantParams& q = *t.quant;
    if (q.bits != 2 && q.bits != 4 && q.bits != 8)
      out.push_back({where, "quant-params", "unsupported bit width " +
                                                std::to_string(q.bits)});
    else {
      const DType want = q.bits == 8   ? DType::I8
                         : q.bits == 4 ? DType::I4x2
                                       : DType::I2x4;
      if (t.dtype != want)
        out.push_back({where, "quant-params", "dtype does not match bit width"});
    }
    const bool degenerate = q.beta == 0.0f && q.alpha == 0.0f;
    if (!degenerate && !(q.beta <= 0.0f && 0.0f <= q.alpha && q.beta < q.alpha))
      out.push_back({where, "quant-params", "range does not satisfy beta <= 0 <= alpha"});
  }
}

void check_layer(const LayerSpec& layer, const std::string& where,
                 const TensorMap& tensors, std::vector<Violation>& out) {
  auto check_ref = [&](const std::string& name, const char* what) {
    if (!name.empty() && !tensors.contains(name))
      out.push_back({where, "reference",
                     std::string(what) + " '" + name + "' not in tensor table"});
  };
  if (is_weight_bearing(layer.kind) && layer.weight_name.empty())
    out.push_back({where, "structure", "missing weight tensor"});
  if (!is_weight_bearing(layer.kind) && !layer.weight_name.empty())
    out.push_back({where, "structure", "layer kind carries no weight"});
  check_ref(layer.weight_name, "weight");
  check_ref(layer.bias_name, "bias");

  if (layer.kind == LayerKind::split_sum) {
    if (layer.children.size() != 3)
      out.push_back({where, "arity", "split_sum must have exactly 3 children, has " +
                                         std::to_string(layer.children.size())});
    for (std::size_t i = 0; i < layer.children.size(); ++i) {
      const LayerSpec& c = layer.children[i];
      const std::string cw = where + ".child" + std::to_string(i);
      if (c.kind != LayerKind::linear && c.kind != LayerKind::conv2d)
        out.push_back({cw, "child-kind",
                       std::string("split_sum child may not be ") + kind_name(c.kind)});
      else
        check_layer(c, cw, tensors, out);
      if (!layer.children.empty() && c.kind != layer.children[0].kind)
        out.push_back({cw, "child-kind", "children must all share one kind"});
    }
  } else if (layer.kind == LayerKind::softmax_attention) {
    if (layer.children.size() != 3)
      out.push_back({where, "arity",
                     "softmax_attention must have exactly 3 projections, has " +
                         std::to_string(layer.children.size())});
    for (std::size_t i = 0; i < layer.children.size(); ++i) {
      const LayerSpec& c = layer.children[i];
      const std::string cw = where + ".proj" + std::to_string(i);
      if (c.kind != LayerKind::linear && c.kind != LayerKind::split_sum)
        out.push_back({cw, "child-kind", "projection must be linear or split_sum"});
      else
        check_layer(c, cw, tensors, out);
    }
  } else if (!layer.children.empty()) {
    out.push_back({where, "structure",
                   std::string(kind_name(layer.kind)) + " may not have children"});
  }
}

}  // namespace

std::vector<Violation> validate(const ModelGraph& graph,
                                const TensorMap& tensors) {
  std::vector<Violation> out;
  for (const auto& [key, t] : tensors) check_tensor(key, t, out);
  for (std::int64_t e : graph.input_shape)
    if (e < 0) out.push_back({"input_shape", "shape", "negative extent"});

  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + " (" +
                              kind_name(graph.layers[i].kind) + ")";
    check_layer(graph.layers[i], where, tensors, out);
  }
  if (!out.empty()) return out;

  // Structure is sound; now walk the shape chain.
  std::vector<std::int64_t> shape = graph.input_shape;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + " (" +
                              kind_name(graph.layers[i].kind) + ")";
    try {
      shape = infer_output_shape(graph.layers[i], shape, tensors);
    } catch (const ValidationError& e) {
      out.push_back({where, "shape", e.what()});
      break;
    }
  }
  return out;
}

void require_valid(const Model& model) {
  auto violations = validate(model);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "model failed validation (" << violations.size() << " violations):";
  for (const auto& v : violations) os << "\n  " << v.to_string();
  throw ValidationError(os.str());
}

}  // namespace splitquant
