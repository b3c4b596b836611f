#pragma once

#include <cstdint>
#include <string>

#include "loadcouple/netmodel.hpp"

namespace loadcouple {

/// Synthetic macro-cell layout: hexagonal sites, sectored antennas,
/// Okumura-Hata path loss with lognormal shadowing, uniform plus hotspot
/// users. Defaults describe a three-site, nine-cell 2 GHz / 10 MHz network.
struct ScenarioSpec {
  int num_sites = 3;
  int sectors_per_site = 3;
  double inter_site_distance_m = 500.0;
  double carrier_ghz = 2.0;
  double bandwidth_mhz = 10.0;
  double antenna_gain_dbi = 14.0;
  double ue_gain_dbi = 0.0;
  double shadow_sigma_db = 8.0;
  int users_per_cell_area = 30;
  double hotspot_fraction = 2.0 / 3.0;
  double hotspot_radius_m = 40.0;
  double demand_bits_per_user = 400e3;
  bool wraparound = true;
  std::uint64_t rng_seed = 1;

  double tx_power_dbm = 46.0;
  double noise_figure_db = 9.0;
  double duration_s = 1.0;
  double bs_height_m = 30.0;
  double ue_height_m = 1.5;
  double min_distance_m = 35.0;
  double penetration_loss_db = 20.0;
  double beamwidth_deg = 70.0;
  double front_to_back_db = 20.0;
};

/// Throws SchemaError naming the offending field.
ScenarioSpec parse_scenario_spec(const std::string& text);
ScenarioSpec load_scenario_spec(const std::string& path);
std::string serialize_scenario_spec(const ScenarioSpec& spec);
void validate_scenario_spec(const ScenarioSpec& spec);

/// Urban Okumura-Hata path loss in dB (small/medium city mobile correction).
double okumura_hata_urban_db(double carrier_mhz, double bs_height_m, double ue_height_m, double distance_km);

/// Horizontal sector pattern -min(12 (theta / theta_3dB)^2, front_to_back).
double sector_pattern_db(double theta_deg, double beamwidth_deg = 70.0, double front_to_back_db = 20.0);

/// Displacement (dx, dy) from `from` to `to`, reduced to the minimum image
/// when a wrap lattice is given.
std::pair<double, double> displacement(double from_x, double from_y, double to_x, double to_y,
                                       const std::optional<WrapLattice>& wrap);

NetworkInstance generate(const ScenarioSpec& spec);

struct SectorPattern {
  double beamwidth_deg = 70.0;
  double front_to_back_db = 20.0;
};

/// Points `cell` (0-based) at `new_azimuth_deg`, recomputing that cell's gain
/// row and the best-server assignment. Equal azimuths modulo 360 return the
/// instance unchanged.
NetworkInstance rotate_sector(const NetworkInstance& instance, int cell, double new_azimuth_deg,
                              const SectorPattern& pattern = {});

}  // namespace loadcouple
