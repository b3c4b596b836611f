#include "loadcouple/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace loadcouple {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResourceBlockHz = 180e3;
constexpr double kResourceUnitSeconds = 1e-3;  // one resource-block pair
constexpr double kThermalNoiseDbmPerHz = -174.0;

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

// Signed difference in (-180, 180].
double angle_difference(double a_deg, double b_deg) {
  double d = std::fmod(a_deg - b_deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

double bearing_deg(double dx, double dy) { return std::atan2(dy, dx) * 180.0 / kPi; }

using FieldSetter = std::function<void(ScenarioSpec&, const json&, const std::string&)>;

FieldSetter real(double ScenarioSpec::*member) {
  return [member](ScenarioSpec& s, const json& v, const std::string& name) {
    if (!v.is_number()) throw SchemaError(name, "expected a number");
    s.*member = v.get<double>();
  };
}

FieldSetter integer(int ScenarioSpec::*member) {
  return [member](ScenarioSpec& s, const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw SchemaError(name, "expected an integer");
    s.*member = v.get<int>();
  };
}

const std::map<std::string, FieldSetter>& spec_fields() {
  static const std::map<std::string, FieldSetter> fields = {
      {"num_sites", integer(&ScenarioSpec::num_sites)},
      {"sectors_per_site", integer(&ScenarioSpec::sectors_per_site)},
      {"inter_site_distance_m", real(&ScenarioSpec::inter_site_distance_m)},
      {"carrier_ghz", real(&ScenarioSpec::carrier_ghz)},
      {"bandwidth_mhz", real(&ScenarioSpec::bandwidth_mhz)},
      {"antenna_gain_dbi", real(&ScenarioSpec::antenna_gain_dbi)},
      {"ue_gain_dbi", real(&ScenarioSpec::ue_gain_dbi)},
      {"shadow_sigma_db", real(&ScenarioSpec::shadow_sigma_db)},
      {"users_per_cell_area", integer(&ScenarioSpec::users_per_cell_area)},
      {"hotspot_fraction", real(&ScenarioSpec::hotspot_fraction)},
      {"hotspot_radius_m", real(&ScenarioSpec::hotspot_radius_m)},
      {"demand_bits_per_user", real(&ScenarioSpec::demand_bits_per_user)},
      {"wraparound",
       [](ScenarioSpec& s, const json& v, const std::string& name) {
         if (!v.is_boolean()) throw SchemaError(name, "expected a boolean");
         s.wraparound = v.get<bool>();
       }},
      {"rng_seed",
       [](ScenarioSpec& s, const json& v, const std::string& name) {
         if (!v.is_number_unsigned()) throw SchemaError(name, "expected a nonnegative integer");
         s.rng_seed = v.get<std::uint64_t>();
       }},
      {"tx_power_dbm", real(&ScenarioSpec::tx_power_dbm)},
      {"noise_figure_db", real(&ScenarioSpec::noise_figure_db)},
      {"duration_s", real(&ScenarioSpec::duration_s)},
      {"bs_height_m", real(&ScenarioSpec::bs_height_m)},
      {"ue_height_m", real(&ScenarioSpec::ue_height_m)},
      {"min_distance_m", real(&ScenarioSpec::min_distance_m)},
      {"penetration_loss_db", real(&ScenarioSpec::penetration_loss_db)},
      {"beamwidth_deg", real(&ScenarioSpec::beamwidth_deg)},
      {"front_to_back_db", real(&ScenarioSpec::front_to_back_db)},
  };
  return fields;
}

// Hexagonal lattice with spacing d: a1 = (d, 0), a2 = (d/2, d sqrt(3)/2).
struct LatticePoint {
  long m = 0, n = 0;
};

std::pair<double, double> to_xy(const LatticePoint& p, double d) {
  return {d * (static_cast<double>(p.m) + 0.5 * static_cast<double>(p.n)),
          d * std::sqrt(3.0) / 2.0 * static_cast<double>(p.n)};
}

// Site clusters that tile the plane: N = p^2 + pq + q^2.
std::optional<std::pair<long, long>> cluster_shape(int sites) {
  for (long p = 1; p * p <= sites; ++p) {
    for (long q = 0; q <= p; ++q) {
      if (p * p + p * q + q * q == sites) return std::make_pair(p, q);
    }
  }
  return std::nullopt;
}

struct SiteLayout {
  std::vector<std::pair<double, double>> sites;
  std::optional<WrapLattice> wrap;
};

SiteLayout site_layout(const ScenarioSpec& spec) {
  const double d = spec.inter_site_distance_m;
  std::vector<LatticePoint> candidates;
  const long radius = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(spec.num_sites)))) + 2;
  for (long m = -radius; m <= radius; ++m) {
    for (long n = -radius; n <= radius; ++n) candidates.push_back({m, n});
  }
  auto key = [d](const LatticePoint& p) {
    const auto [x, y] = to_xy(p, d);
    double ang = std::atan2(y, x);
    if (ang < -1e-12) ang += 2.0 * kPi;
    return std::make_tuple(std::llround(std::hypot(x, y) * 1e6), std::llround(ang * 1e9), p.m, p.n);
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const LatticePoint& a, const LatticePoint& b) { return key(a) < key(b); });

  SiteLayout layout;
  std::vector<LatticePoint> chosen;
  if (spec.wraparound) {
    const auto shape = cluster_shape(spec.num_sites);
    if (!shape) {
      throw SchemaError("num_sites", "wrap-around needs a site count of the form p^2 + pq + q^2");
    }
    const auto [p, q] = *shape;
    const long count = spec.num_sites;
    // d - s is a cluster translation iff both coordinates in the cluster
    // basis (p, q), (-q, p + q) are integers.
    auto same_coset = [&](const LatticePoint& a, const LatticePoint& b) {
      const long dm = a.m - b.m, dn = a.n - b.n;
      return ((p + q) * dm + q * dn) % count == 0 && (-q * dm + p * dn) % count == 0;
    };
    for (const auto& c : candidates) {
      if (static_cast<int>(chosen.size()) == spec.num_sites) break;
      if (std::none_of(chosen.begin(), chosen.end(), [&](const auto& s) { return same_coset(c, s); })) {
        chosen.push_back(c);
      }
    }
    const auto A = to_xy({p, q}, d);
    const auto B = to_xy({-q, p + q}, d);
    layout.wrap = WrapLattice{A.first, A.second, B.first, B.second};
  } else {
    chosen.assign(candidates.begin(), candidates.begin() + spec.num_sites);
  }
  for (const auto& c : chosen) layout.sites.push_back(to_xy(c, d));
  return layout;
}

// Uniform point in the Voronoi hexagon of a site, restricted to a sector.
std::pair<double, double> sample_sector_point(std::mt19937_64& rng, double site_x, double site_y,
                                              double azimuth_deg, double half_width_deg, double isd) {
  std::uniform_real_distribution<double> box(-isd / std::sqrt(3.0), isd / std::sqrt(3.0));
  for (;;) {
    const double x = box(rng), y = box(rng);
    bool inside = true;
    for (int k = 0; k < 6 && inside; ++k) {
      const double t = k * kPi / 3.0;
      inside = x * std::cos(t) + y * std::sin(t) <= isd / 2.0;
    }
    if (!inside) continue;
    if (std::abs(angle_difference(bearing_deg(x, y), azimuth_deg)) > half_width_deg) continue;
    return {site_x + x, site_y + y};
  }
}

double gain_without_pattern_db(const ScenarioSpec& spec, double distance_m) {
  const double d_km = std::max(distance_m, spec.min_distance_m) / 1000.0;
  return -okumura_hata_urban_db(spec.carrier_ghz * 1000.0, spec.bs_height_m, spec.ue_height_m, d_km) +
         spec.antenna_gain_dbi + spec.ue_gain_dbi - spec.penetration_loss_db;
}

}  // namespace

void validate_scenario_spec(const ScenarioSpec& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw SchemaError(name, "must be positive");
  };
  if (s.num_sites < 1) throw SchemaError("num_sites", "must be positive");
  if (s.sectors_per_site < 1) throw SchemaError("sectors_per_site", "must be positive");
  if (s.users_per_cell_area < 1) throw SchemaError("users_per_cell_area", "must be positive");
  positive(s.inter_site_distance_m, "inter_site_distance_m");
  positive(s.carrier_ghz, "carrier_ghz");
  positive(s.bandwidth_mhz, "bandwidth_mhz");
  positive(s.hotspot_radius_m, "hotspot_radius_m");
  positive(s.demand_bits_per_user, "demand_bits_per_user");
  positive(s.duration_s, "duration_s");
  positive(s.bs_height_m, "bs_height_m");
  positive(s.ue_height_m, "ue_height_m");
  positive(s.min_distance_m, "min_distance_m");
  positive(s.beamwidth_deg, "beamwidth_deg");
  if (!(s.shadow_sigma_db >= 0.0)) throw SchemaError("shadow_sigma_db", "must be nonnegative");
  if (!(s.hotspot_fraction >= 0.0 && s.hotspot_fraction <= 1.0)) {
    throw SchemaError("hotspot_fraction", "must lie in [0, 1]");
  }
  if (!(s.penetration_loss_db >= 0.0)) throw SchemaError("penetration_loss_db", "must be nonnegative");
  if (!(s.front_to_back_db >= 0.0)) throw SchemaError("front_to_back_db", "must be nonnegative");
  if (s.wraparound && !cluster_shape(s.num_sites)) {
    throw SchemaError("num_sites", "wrap-around needs a site count of the form p^2 + pq + q^2");
  }
}

ScenarioSpec parse_scenario_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario spec parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario spec must be an object");
  ScenarioSpec spec;
  const auto& fields = spec_fields();
  for (const auto& [name, value] : doc.items()) {
    auto it = fields.find(name);
    if (it == fields.end()) throw SchemaError(name, "unknown scenario field");
    it->second(spec, value, name);
  }
  validate_scenario_spec(spec);
  return spec;
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open scenario spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_spec(ss.str());
}

std::string serialize_scenario_spec(const ScenarioSpec& s) {
  json doc = {
      {"num_sites", s.num_sites},
      {"sectors_per_site", s.sectors_per_site},
      {"inter_site_distance_m", s.inter_site_distance_m},
      {"carrier_ghz", s.carrier_ghz},
      {"bandwidth_mhz", s.bandwidth_mhz},
      {"antenna_gain_dbi", s.antenna_gain_dbi},
      {"ue_gain_dbi", s.ue_gain_dbi},
      {"shadow_sigma_db", s.shadow_sigma_db},
      {"users_per_cell_area", s.users_per_cell_area},
      {"hotspot_fraction", s.hotspot_fraction},
      {"hotspot_radius_m", s.hotspot_radius_m},
      {"demand_bits_per_user", s.demand_bits_per_user},
      {"wraparound", s.wraparound},
      {"rng_seed", s.rng_seed},
      {"tx_power_dbm", s.tx_power_dbm},
      {"noise_figure_db", s.noise_figure_db},
      {"duration_s", s.duration_s},
      {"bs_height_m", s.bs_height_m},
      {"ue_height_m", s.ue_height_m},
      {"min_distance_m", s.min_distance_m},
      {"penetration_loss_db", s.penetration_loss_db},
      {"beamwidth_deg", s.beamwidth_deg},
      {"front_to_back_db", s.front_to_back_db},
  };
  return doc.dump(1) + "\n";
}

double okumura_hata_urban_db(double f_mhz, double hb, double hm, double d_km) {
  const double lf = std::log10(f_mhz);
  const double mobile_correction = (1.1 * lf - 0.7) * hm - (1.56 * lf - 0.8);
  return 69.55 + 26.16 * lf - 13.82 * std::log10(hb) - mobile_correction +
         (44.9 - 6.55 * std::log10(hb)) * std::log10(d_km);
}

double sector_pattern_db(double theta_deg, double beamwidth_deg, double front_to_back_db) {
  const double t = angle_difference(theta_deg, 0.0) / beamwidth_deg;
  return -std::min(12.0 * t * t, front_to_back_db);
}

std::pair<double, double> displacement(double from_x, double from_y, double to_x, double to_y,
                                       const std::optional<WrapLattice>& wrap) {
  const double dx = to_x - from_x, dy = to_y - from_y;
  if (!wrap) return {dx, dy};
  std::pair<double, double> best{dx, dy};
  double best_d2 = dx * dx + dy * dy;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      const double x = dx + a * wrap->ax + b * wrap->bx;
      const double y = dy + a * wrap->ay + b * wrap->by;
      const double d2 = x * x + y * y;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {x, y};
      }
    }
  }
  return best;
}

NetworkInstance generate(const ScenarioSpec& spec) {
  validate_scenario_spec(spec);
  std::mt19937_64 rng(spec.rng_seed);
  const SiteLayout layout = site_layout(spec);

  NetworkInstance inst;
  inst.wrap = layout.wrap;
  const int num_rb = std::max(1, static_cast<int>(std::lround(spec.bandwidth_mhz * 5.0)));
  inst.num_resource_units =
      static_cast<long long>(std::llround(num_rb * spec.duration_s / kResourceUnitSeconds));
  inst.rate_scale = kResourceBlockHz * kResourceUnitSeconds;
  inst.noise_power_w =
      dbm_to_watt(kThermalNoiseDbmPerHz + 10.0 * std::log10(kResourceBlockHz) + spec.noise_figure_db);
  const double power_per_ru = dbm_to_watt(spec.tx_power_dbm) / num_rb;

  for (std::size_t s = 0; s < layout.sites.size(); ++s) {
    for (int k = 0; k < spec.sectors_per_site; ++k) {
      Cell c;
      c.id = static_cast<int>(inst.cells.size());
      c.power_per_ru_w = power_per_ru;
      c.x_m = layout.sites[s].first;
      c.y_m = layout.sites[s].second;
      c.azimuth_deg = 360.0 * k / spec.sectors_per_site;
      inst.cells.push_back(c);
    }
  }

  const double half_width = 180.0 / spec.sectors_per_site;
  const int hotspot_users =
      static_cast<int>(std::lround(spec.hotspot_fraction * spec.users_per_cell_area));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const Cell& c : inst.cells) {
    const auto centre = sample_sector_point(rng, c.x_m, c.y_m, c.azimuth_deg, half_width,
                                            spec.inter_site_distance_m);
    for (int u = 0; u < spec.users_per_cell_area; ++u) {
      Pixel p;
      p.id = static_cast<int>(inst.pixels.size());
      p.demand_bits = spec.demand_bits_per_user;
      if (u < hotspot_users) {
        const double r = spec.hotspot_radius_m * std::sqrt(unit(rng));
        const double t = 2.0 * kPi * unit(rng);
        p.x_m = centre.first + r * std::cos(t);
        p.y_m = centre.second + r * std::sin(t);
      } else {
        std::tie(p.x_m, p.y_m) = sample_sector_point(rng, c.x_m, c.y_m, c.azimuth_deg, half_width,
                                                     spec.inter_site_distance_m);
      }
      inst.pixels.push_back(p);
    }
  }

  // Shadowing is drawn per (site, pixel) and shared by co-sited sectors.
  const auto n = static_cast<Eigen::Index>(inst.cells.size());
  const auto m = static_cast<Eigen::Index>(inst.pixels.size());
  std::normal_distribution<double> shadow(0.0, 1.0);
  Matrix site_shadow(static_cast<Eigen::Index>(layout.sites.size()), m);
  for (Eigen::Index s = 0; s < site_shadow.rows(); ++s) {
    for (Eigen::Index j = 0; j < m; ++j) site_shadow(s, j) = spec.shadow_sigma_db * shadow(rng);
  }

  Matrix db(n, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cell& c = inst.cells[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      const Pixel& p = inst.pixels[static_cast<std::size_t>(j)];
      const auto [dx, dy] = displacement(c.x_m, c.y_m, p.x_m, p.y_m, inst.wrap);
      const double theta = angle_difference(bearing_deg(dx, dy), c.azimuth_deg);
      db(i, j) = gain_without_pattern_db(spec, std::hypot(dx, dy)) +
                 sector_pattern_db(theta, spec.beamwidth_deg, spec.front_to_back_db) +
                 site_shadow(i / spec.sectors_per_site, j);
    }
  }
  inst.gains = GainMatrix::from_db(std::move(db));
  inst.serving = assign_best_server(inst.cells, inst.pixels, inst.gains);
  return inst;
}

NetworkInstance rotate_sector(const NetworkInstance& instance, int cell, double new_azimuth_deg,
                              const SectorPattern& pattern) {
  if (cell < 0 || cell >= instance.num_cells()) {
    throw std::invalid_argument("rotate_sector: no cell " + std::to_string(cell + 1));
  }
  const Cell& old = instance.cells[static_cast<std::size_t>(cell)];
  const double target = wrap_degrees(new_azimuth_deg);
  if (target == wrap_degrees(old.azimuth_deg)) return instance;

  NetworkInstance out = instance;
  Vector row = instance.gains.db().row(cell).transpose();
  for (int j = 0; j < instance.num_pixels(); ++j) {
    const Pixel& p = instance.pixels[static_cast<std::size_t>(j)];
    const auto [dx, dy] = displacement(old.x_m, old.y_m, p.x_m, p.y_m, instance.wrap);
    const double bearing = bearing_deg(dx, dy);
    row(j) += sector_pattern_db(angle_difference(bearing, target), pattern.beamwidth_deg,
                                pattern.front_to_back_db) -
              sector_pattern_db(angle_difference(bearing, old.azimuth_deg), pattern.beamwidth_deg,
                                pattern.front_to_back_db);
  }
  out.gains.set_row_db(cell, row);
  out.cells[static_cast<std::size_t>(cell)].azimuth_deg = target;
  out.serving = assign_best_server(out.cells, out.pixels, out.gains);
  return out;
}

}  // namespace loadcouple
