#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loadcouple/types.hpp"

namespace loadcouple {

struct Cell {
  int id = 0;  // 0-based
  double power_per_ru_w = 1.0;
  double x_m = 0.0;
  double y_m = 0.0;
  double azimuth_deg = 0.0;
};

struct Pixel {
  int id = 0;  // 0-based
  double demand_bits = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
};

/// Cell-to-pixel power gains. The dB table is the stored form; the linear
/// table is derived from it once so that file round trips are bit-exact.
class GainMatrix {
 public:
  GainMatrix() = default;

  static GainMatrix from_db(Matrix db);

  const Matrix& db() const { return db_; }
  const Matrix& linear() const { return linear_; }
  double operator()(int cell, int pixel) const { return linear_(cell, pixel); }

  Eigen::Index num_cells() const { return db_.rows(); }
  Eigen::Index num_pixels() const { return db_.cols(); }

  /// Replaces one cell's row (dB), refreshing the linear row only.
  void set_row_db(int cell, const Vector& row_db);

 private:
  Matrix db_;
  Matrix linear_;
};

inline constexpr int kUnassigned = -1;

struct ServingAssignment {
  std::vector<int> server_of;           // pixel -> cell, kUnassigned if none
  std::vector<std::vector<int>> areas;  // cell -> ascending pixel list

  static ServingAssignment from_server_of(int num_cells, std::vector<int> server_of);
};

/// Optional torus used by wrap-around scenarios: displacements are reduced
/// to their minimum image over the lattice spanned by the two vectors.
struct WrapLattice {
  double ax = 0.0, ay = 0.0;
  double bx = 0.0, by = 0.0;
};

struct NetworkInstance {
  std::vector<Cell> cells;
  std::vector<Pixel> pixels;
  GainMatrix gains;
  ServingAssignment serving;
  double noise_power_w = 0.0;
  long long num_resource_units = 1;
  double rate_scale = 1.0;
  std::optional<WrapLattice> wrap;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_pixels() const { return static_cast<int>(pixels.size()); }
};

struct Violation {
  std::string code;
  std::string message;
};

std::vector<Violation> validate(const NetworkInstance& instance);

/// Best server by received power P_i * g_ij; ties go to the lowest cell id.
/// Every pixel is assigned, including zero-demand ones.
ServingAssignment assign_best_server(const std::vector<Cell>& cells,
                                     const std::vector<Pixel>& pixels,
                                     const GainMatrix& gains);

/// Copy of the instance with every pixel demand multiplied by `scale`.
NetworkInstance scale_demand(const NetworkInstance& instance, double scale);

/// Thrown by loaders on malformed input; `what()` carries the context.
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public InstanceError {
 public:
  using InstanceError::InstanceError;
};
class SchemaError : public InstanceError {
 public:
  SchemaError(const std::string& field, const std::string& message)
      : InstanceError("field '" + field + "': " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};
class VersionError : public InstanceError {
 public:
  using InstanceError::InstanceError;
};

inline constexpr int kInstanceFormatVersion = 1;

NetworkInstance load_instance(const std::string& path);
void save_instance(const NetworkInstance& instance, const std::string& path);

NetworkInstance parse_instance(const std::string& text);
std::string serialize_instance(const NetworkInstance& instance);

}  // namespace loadcouple
