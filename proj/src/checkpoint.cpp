#include "cdprune/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "cdprune/errors.hpp"

namespace cdprune {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw SchemaError("checkpoint matrix has wrong row count");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError("checkpoint matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

void save_checkpoint(const Network& net, const PruneMask& mask, const std::filesystem::path& path) {
  if (!mask.matches(net)) throw ContractError("mask shape does not match network");
  json doc;
  doc["layer_dims"] = net.layer_dims();
  doc["seed"] = net.seed();
  doc["round"] = mask.round;
  doc["surviving"] = mask.surviving;
  json layers = json::array();
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& layer = net.layers()[l];
    json entry;
    entry["W"] = matrix_to_json(layer.W);
    entry["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
    entry["W0"] = matrix_to_json(layer.W0);
    entry["mask"] = matrix_to_json(mask.layers[l]);
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);

  std::ofstream out(path);
  if (!out) throw FilesystemError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw FilesystemError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FilesystemError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    const auto dims = doc.at("layer_dims").get<std::vector<int>>();
    const auto& layers_json = doc.at("layers");
    if (dims.size() < 2 || layers_json.size() + 1 != dims.size()) {
      throw SchemaError("checkpoint layer count does not match layer_dims");
    }
    std::vector<DenseLayer> layers;
    PruneMask mask;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const auto& entry = layers_json[l];
      DenseLayer layer;
      layer.W = matrix_from_json(entry.at("W"), dims[l], dims[l + 1]);
      layer.W0 = matrix_from_json(entry.at("W0"), dims[l], dims[l + 1]);
      const auto b = entry.at("b").get<std::vector<double>>();
      if (b.size() != static_cast<std::size_t>(dims[l + 1])) throw SchemaError("bias size mismatch");
      layer.b = Eigen::Map<const RowVector>(b.data(), static_cast<Eigen::Index>(b.size()));
      layer.activation = (l + 2 == dims.size()) ? Activation::identity : Activation::relu;
      mask.layers.push_back(matrix_from_json(entry.at("mask"), dims[l], dims[l + 1]));
      layers.push_back(std::move(layer));
    }
    mask.round = doc.value("round", 0);
    mask.recount();
    return {Network(std::move(layers), doc.at("seed").get<std::uint64_t>()), std::move(mask)};
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace cdprune
