#include <fstream>
#include <sstream>

#include <json.hpp>

#include "loadcouple/netmodel.hpp"

namespace loadcouple {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where = "") {
  const std::string name = where.empty() ? key : where + "." + key;
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(name, "required field is missing");
  return *it;
}

double get_number(const json& obj, const std::string& key, const std::string& where = "") {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw SchemaError(where.empty() ? key : where + "." + key, "expected a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const std::string& key, const std::string& where = "") {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) throw SchemaError(where.empty() ? key : where + "." + key, "expected an integer");
  return v.get<long long>();
}

const json& get_array(const json& obj, const std::string& key) {
  const json& v = require(obj, key);
  if (!v.is_array()) throw SchemaError(key, "expected an array");
  return v;
}

// Maps 1-based file ids (any order) onto positions; ids must be a permutation.
std::vector<std::size_t> placement(const json& arr, const std::string& field) {
  const std::size_t count = arr.size();
  std::vector<std::size_t> pos(count);
  std::vector<bool> used(count, false);
  for (std::size_t k = 0; k < count; ++k) {
    const std::string where = field + "[" + std::to_string(k) + "]";
    if (!arr[k].is_object()) throw SchemaError(where, "expected an object");
    const long long id = get_integer(arr[k], "id", where);
    if (id < 1 || id > static_cast<long long>(count) || used[static_cast<std::size_t>(id - 1)]) {
      throw SchemaError(where + ".id", "ids must be a permutation of 1.." + std::to_string(count));
    }
    used[static_cast<std::size_t>(id - 1)] = true;
    pos[k] = static_cast<std::size_t>(id - 1);
  }
  return pos;
}

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

NetworkInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("instance parse error at " + locate(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  const long long version = get_integer(doc, "version");
  if (version != kInstanceFormatVersion) {
    throw VersionError("unsupported instance version " + std::to_string(version) + " (expected " +
                       std::to_string(kInstanceFormatVersion) + ")");
  }

  NetworkInstance inst;
  inst.noise_power_w = get_number(doc, "noise_power_w");
  inst.num_resource_units = get_integer(doc, "num_resource_units");
  inst.rate_scale = get_number(doc, "rate_scale");

  const json& cells = get_array(doc, "cells");
  const auto cell_pos = placement(cells, "cells");
  inst.cells.resize(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string where = "cells[" + std::to_string(k) + "]";
    Cell& c = inst.cells[cell_pos[k]];
    c.id = static_cast<int>(cell_pos[k]);
    c.power_per_ru_w = get_number(cells[k], "power_per_ru_w", where);
    c.x_m = get_number(cells[k], "x_m", where);
    c.y_m = get_number(cells[k], "y_m", where);
    c.azimuth_deg = get_number(cells[k], "azimuth_deg", where);
  }

  const json& pixels = get_array(doc, "pixels");
  const auto pixel_pos = placement(pixels, "pixels");
  inst.pixels.resize(pixels.size());
  for (std::size_t k = 0; k < pixels.size(); ++k) {
    const std::string where = "pixels[" + std::to_string(k) + "]";
    Pixel& p = inst.pixels[pixel_pos[k]];
    p.id = static_cast<int>(pixel_pos[k]);
    p.demand_bits = get_number(pixels[k], "demand_bits", where);
    p.x_m = get_number(pixels[k], "x_m", where);
    p.y_m = get_number(pixels[k], "y_m", where);
  }

  const auto n = static_cast<Eigen::Index>(inst.cells.size());
  const auto m = static_cast<Eigen::Index>(inst.pixels.size());
  const json& rows = get_array(doc, "gains_db");
  if (static_cast<Eigen::Index>(rows.size()) != n) {
    throw SchemaError("gains_db", "expected " + std::to_string(n) + " rows (one per cell)");
  }
  Matrix db(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    const std::string where = "gains_db[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw SchemaError(where, "expected an array of " + std::to_string(m) + " numbers");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw SchemaError(where + "[" + std::to_string(j) + "]", "expected a number");
      db(i, j) = v.get<double>();
    }
  }
  inst.gains = GainMatrix::from_db(std::move(db));

  if (auto it = doc.find("serving"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("serving", "expected an array of [pixel, cell] pairs");
    std::vector<int> server(static_cast<std::size_t>(m), kUnassigned);
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& pair = (*it)[k];
      const std::string where = "serving[" + std::to_string(k) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer()) {
        throw SchemaError(where, "expected [pixel_id, cell_id]");
      }
      const long long pj = pair[0].get<long long>();
      const long long ci = pair[1].get<long long>();
      if (pj < 1 || pj > m) throw SchemaError(where, "pixel id out of range");
      if (ci < 1 || ci > n) throw SchemaError(where, "cell id out of range");
      if (server[static_cast<std::size_t>(pj - 1)] != kUnassigned) throw SchemaError(where, "pixel assigned twice");
      server[static_cast<std::size_t>(pj - 1)] = static_cast<int>(ci - 1);
    }
    inst.serving = ServingAssignment::from_server_of(static_cast<int>(n), std::move(server));
  } else {
    inst.serving = assign_best_server(inst.cells, inst.pixels, inst.gains);
  }

  if (auto it = doc.find("wrap_lattice_m"); it != doc.end()) {
    const json& w = *it;
    auto is_pair = [](const json& p) { return p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(); };
    if (!w.is_array() || w.size() != 2 || !is_pair(w[0]) || !is_pair(w[1])) {
      throw SchemaError("wrap_lattice_m", "expected [[ax, ay], [bx, by]]");
    }
    inst.wrap = WrapLattice{w[0][0].get<double>(), w[0][1].get<double>(), w[1][0].get<double>(),
                            w[1][1].get<double>()};
  }
  return inst;
}

std::string serialize_instance(const NetworkInstance& inst) {
  json doc;
  doc["version"] = kInstanceFormatVersion;
  doc["noise_power_w"] = inst.noise_power_w;
  doc["num_resource_units"] = inst.num_resource_units;
  doc["rate_scale"] = inst.rate_scale;
  json cells = json::array();
  for (const auto& c : inst.cells) {
    cells.push_back({{"id", c.id + 1},
                     {"power_per_ru_w", c.power_per_ru_w},
                     {"x_m", c.x_m},
                     {"y_m", c.y_m},
                     {"azimuth_deg", c.azimuth_deg}});
  }
  doc["cells"] = std::move(cells);
  json pixels = json::array();
  for (const auto& p : inst.pixels) {
    pixels.push_back({{"id", p.id + 1}, {"demand_bits", p.demand_bits}, {"x_m", p.x_m}, {"y_m", p.y_m}});
  }
  doc["pixels"] = std::move(pixels);
  json rows = json::array();
  const Matrix& db = inst.gains.db();
  for (Eigen::Index i = 0; i < db.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < db.cols(); ++j) row.push_back(db(i, j));
    rows.push_back(std::move(row));
  }
  doc["gains_db"] = std::move(rows);
  json serving = json::array();
  for (std::size_t j = 0; j < inst.serving.server_of.size(); ++j) {
    const int c = inst.serving.server_of[j];
    if (c != kUnassigned) serving.push_back({static_cast<int>(j) + 1, c + 1});
  }
  doc["serving"] = std::move(serving);
  if (inst.wrap) {
    doc["wrap_lattice_m"] = {{inst.wrap->ax, inst.wrap->ay}, {inst.wrap->bx, inst.wrap->by}};
  }
  return doc.dump(1) + "\n";
}

NetworkInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void save_instance(const NetworkInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write instance file '" + path + "'");
  out << serialize_instance(instance);
  if (!out) throw InstanceError("write failed for '" + path + "'");
}

}  // namespace loadcouple
