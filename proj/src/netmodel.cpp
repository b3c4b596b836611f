#include "loadcouple/netmodel.hpp"

#include <cmath>
#include <string>

namespace loadcouple {

GainMatrix GainMatrix::from_db(Matrix db) {
  GainMatrix g;
  g.linear_ = db.unaryExpr([](double v) { return std::pow(10.0, v / 10.0); });
  g.db_ = std::move(db);
  return g;
}

void GainMatrix::set_row_db(int cell, const Vector& row_db) {
  db_.row(cell) = row_db.transpose();
  linear_.row(cell) = row_db.unaryExpr([](double v) { return std::pow(10.0, v / 10.0); }).transpose();
}

ServingAssignment ServingAssignment::from_server_of(int num_cells, std::vector<int> server_of) {
  ServingAssignment s;
  s.areas.assign(static_cast<std::size_t>(num_cells), {});
  for (std::size_t j = 0; j < server_of.size(); ++j) {
    const int c = server_of[j];
    if (c >= 0 && c < num_cells) {
      s.areas[static_cast<std::size_t>(c)].push_back(static_cast<int>(j));
    }
  }
  s.server_of = std::move(server_of);
  return s;
}

namespace {

void add(std::vector<Violation>& out, std::string code, std::string message) {
  out.push_back({std::move(code), std::move(message)});
}

void check_serving(const NetworkInstance& inst, std::vector<Violation>& out) {
  const int n = inst.num_cells();
  const int m = inst.num_pixels();
  const auto& s = inst.serving;
  if (static_cast<int>(s.server_of.size()) != m || static_cast<int>(s.areas.size()) != n) {
    add(out, "serving_dimension_mismatch", "serving assignment does not match cell/pixel counts");
    return;
  }
  for (int j = 0; j < m; ++j) {
    const int c = s.server_of[static_cast<std::size_t>(j)];
    if (c == kUnassigned) {
      if (inst.pixels[static_cast<std::size_t>(j)].demand_bits > 0.0) {
        add(out, "unserved_demand_pixel", "unserved demand pixel " + std::to_string(j + 1));
      }
    } else if (c < 0 || c >= n) {
      add(out, "serving_cell_out_of_range",
          "pixel " + std::to_string(j + 1) + " assigned to unknown cell " + std::to_string(c + 1));
    }
  }
  // areas must be the exact inverse of server_of
  std::vector<int> seen(static_cast<std::size_t>(m), 0);
  bool consistent = true;
  for (int i = 0; i < n; ++i) {
    for (int j : s.areas[static_cast<std::size_t>(i)]) {
      if (j < 0 || j >= m) {
        consistent = false;
        continue;
      }
      ++seen[static_cast<std::size_t>(j)];
      if (s.server_of[static_cast<std::size_t>(j)] != i) consistent = false;
    }
  }
  for (int j = 0; j < m; ++j) {
    const int c = s.server_of[static_cast<std::size_t>(j)];
    const int expected = (c >= 0 && c < n) ? 1 : 0;
    if (seen[static_cast<std::size_t>(j)] != expected) consistent = false;
  }
  if (!consistent) {
    add(out, "serving_areas_inconsistent", "serving areas are not the inverse of the pixel-to-cell map");
  }
}

}  // namespace

std::vector<Violation> validate(const NetworkInstance& inst) {
  std::vector<Violation> out;
  const int n = inst.num_cells();
  const int m = inst.num_pixels();
  if (n < 1) add(out, "no_cells", "instance must have at least one cell");
  if (!(inst.noise_power_w > 0.0) || !std::isfinite(inst.noise_power_w)) {
    add(out, "noise_power_nonpositive", "noise_power must be positive");
  }
  if (inst.num_resource_units < 1) {
    add(out, "resource_units_nonpositive", "num_resource_units must be a positive integer");
  }
  if (!(inst.rate_scale > 0.0) || !std::isfinite(inst.rate_scale)) {
    add(out, "rate_scale_nonpositive", "rate_scale must be positive");
  }
  for (int i = 0; i < n; ++i) {
    const auto& c = inst.cells[static_cast<std::size_t>(i)];
    if (!(c.power_per_ru_w > 0.0) || !std::isfinite(c.power_per_ru_w)) {
      add(out, "power_nonpositive", "cell " + std::to_string(i + 1) + " power_per_ru must be positive");
    }
  }
  for (int j = 0; j < m; ++j) {
    const double d = inst.pixels[static_cast<std::size_t>(j)].demand_bits;
    if (!(d >= 0.0) || !std::isfinite(d)) {
      add(out, "demand_negative", "pixel " + std::to_string(j + 1) + " demand_bits must be nonnegative");
    }
  }
  if (inst.gains.num_cells() != n || inst.gains.num_pixels() != m) {
    add(out, "gain_dimension_mismatch", "gain matrix must be cells x pixels");
  } else {
    const Matrix& g = inst.gains.linear();
    if (!g.allFinite() || !inst.gains.db().allFinite()) {
      add(out, "gain_nonfinite", "gain matrix has non-finite entries");
    } else if (m > 0 && n > 0 && g.minCoeff() <= 0.0) {
      add(out, "gain_nonpositive", "gain matrix has non-positive entries");
    }
  }
  check_serving(inst, out);
  return out;
}

ServingAssignment assign_best_server(const std::vector<Cell>& cells, const std::vector<Pixel>& pixels,
                                     const GainMatrix& gains) {
  const int n = static_cast<int>(cells.size());
  const int m = static_cast<int>(pixels.size());
  std::vector<int> server(static_cast<std::size_t>(m), kUnassigned);
  for (int j = 0; j < m; ++j) {
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double rx = cells[static_cast<std::size_t>(i)].power_per_ru_w * gains(i, j);
      if (rx > best) {
        best = rx;
        server[static_cast<std::size_t>(j)] = i;
      }
    }
  }
  return ServingAssignment::from_server_of(n, std::move(server));
}

NetworkInstance scale_demand(const NetworkInstance& instance, double scale) {
  NetworkInstance out = instance;
  for (auto& p : out.pixels) p.demand_bits *= scale;
  return out;
}

}  // namespace loadcouple
