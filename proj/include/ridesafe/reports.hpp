#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ridesafe::sim {

inline constexpr double kDefaultCapacityMah = 2500.0;
inline constexpr double kLogicRailV = 3.3;

struct PowerComponent {
  std::string name;
  double current_ma = 0.0;
  double vmin = 0.0;
  double vmax = 0.0;
};

struct PowerProfile {
  std::vector<PowerComponent> components;
  double battery_capacity_mah = kDefaultCapacityMah;
};

struct RailFlag {
  std::string component;
  double vmin = 0.0;
  double vmax = 0.0;
};

struct PowerReport {
  double total_current_ma = 0.0;
  double runtime_h = 0.0;
  double rail_v = kLogicRailV;
  std::vector<RailFlag> flagged;  // components whose input range excludes the rail
};

// Throws NoComponents for an empty profile and DomainError for a
// non-positive current or capacity.
PowerReport power_budget(const PowerProfile& profile, double rail_v = kLogicRailV);

// CSV with header component,current_mA,vmin,vmax. Throws FieldError.
PowerProfile read_power_csv(std::istream& in, double capacity_mah = kDefaultCapacityMah);

std::string format_power_report(const PowerReport& report);

struct BomRow {
  std::string component;
  std::int64_t quantity = 1;
  std::int64_t unit_price_bdt = 0;
};

struct BomTable {
  std::vector<BomRow> rows;

  // Throws DomainError.
  void validate() const;
};

std::int64_t bom_total(const BomTable& table);

// CSV with header component,quantity,unit_price_bdt. Throws FieldError.
BomTable read_bom_csv(std::istream& in);

std::string format_bom_report(const BomTable& table);

// RFC 4180-style reader: quoted fields, doubled quotes, blank lines skipped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace ridesafe::sim
