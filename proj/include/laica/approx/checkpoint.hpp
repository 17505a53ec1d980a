#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "laica/approx/param_map.hpp"

namespace laica {

inline nlohmann::json topology_json(const ParamMap& map) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : map.layers()) layers.push_back({{"in", l.in}, {"out", l.out}, {"activation", to_string(l.act)}});
  return {{"layers", layers}, {"n_params", map.size()}};
}

inline ParamMap map_from_topology(const nlohmann::json& j) {
  std::vector<LayerShape> layers;
  for (const auto& l : j.at("layers"))
    layers.push_back({l.at("in").get<int>(), l.at("out").get<int>(), activation_from_string(l.at("activation"))});
  ParamMap map(std::move(layers));
  if (map.size() != j.at("n_params").get<Eigen::Index>()) throw ShapeError("checkpoint: n_params disagrees with layers");
  return map;
}

inline void write_le_doubles(std::ostream& os, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(v[i]);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    os.write(bytes, 8);
  }
}

inline Vec read_le_doubles(std::istream& is, Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw DomainError("checkpoint: truncated parameter file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

// Writes <base>.bin (little-endian float64 parameters) and <base>.json (topology).
inline void save_checkpoint(const ParamMap& map, const std::filesystem::path& base) {
  std::ofstream bin(base.string() + ".bin", std::ios::binary);
  write_le_doubles(bin, map.params());
  std::ofstream js(base.string() + ".json");
  js << topology_json(map).dump(2) << "\n";
}

inline ParamMap load_checkpoint(const std::filesystem::path& base) {
  std::ifstream js(base.string() + ".json");
  if (!js) throw DomainError("checkpoint: missing topology header " + base.string() + ".json");
  ParamMap map = map_from_topology(nlohmann::json::parse(js));
  std::ifstream bin(base.string() + ".bin", std::ios::binary);
  map.set_params(read_le_doubles(bin, map.size()));
  return map;
}

}  // namespace laica
