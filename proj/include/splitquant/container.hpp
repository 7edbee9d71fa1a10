#pragma once

#include <filesystem>
#include <string>

#include "splitquant/graph.hpp"

namespace splitquant {

// Model container layout:
//   8-byte little-endian manifest length N
//   N bytes of UTF-8 JSON: tensor name -> {dtype, shape, data_offsets},
//     plus "__metadata__" (string -> string)
//   raw payload, row-major little-endian, offsets relative to its start
//
// The layer graph is a JSON document stored under the reserved metadata key
// "graph"; quant params of tensor T live under "quant:T" as decimal strings.
// Payload offsets are ascending, non-overlapping, and exactly cover the
// payload region.

Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

// Graph manifest codec, exposed for tests.
std::string graph_to_json(const ModelGraph& graph);
ModelGraph graph_from_json(const std::string& json_text);

std::string quant_to_json(const QuantParams& params);
QuantParams quant_from_json(const std::string& json_text);

}  // namespace splitquant
