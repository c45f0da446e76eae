#include "ridesafe/reports.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "ridesafe/errors.hpp"
#include "ridesafe/text.hpp"

namespace ridesafe::sim {

namespace {

constexpr double kRailEpsilon = 1e-9;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void expect_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header) {
  if (rows.empty()) throw FieldError("empty CSV");
  std::vector<std::string> got;
  for (const auto& c : rows.front()) got.push_back(trim(c));
  if (got != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw FieldError("expected CSV header: " + want);
  }
}

double number_field(const std::string& raw, std::size_t row, const char* name) {
  double v = 0.0;
  if (!text::parse_decimal(trim(raw), v))
    throw FieldError("row " + std::to_string(row) + ": malformed " + name + " '" + raw + "'");
  return v;
}

std::int64_t integer_field(const std::string& raw, std::size_t row, const char* name) {
  long long v = 0;
  if (!text::parse_int(trim(raw), v))
    throw FieldError("row " + std::to_string(row) + ": malformed " + name + " '" + raw + "'");
  return v;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          fields.back() += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else {
        fields.back() += c;
      }
    }
    if (quoted) throw FieldError("unterminated quote in CSV line: " + line);
    rows.push_back(std::move(fields));
  }
  return rows;
}

PowerReport power_budget(const PowerProfile& profile, double rail_v) {
  if (profile.components.empty()) throw NoComponents("power profile has no components");
  if (!(profile.battery_capacity_mah > 0)) throw DomainError("battery capacity must be positive");
  PowerReport report;
  report.rail_v = rail_v;
  for (const auto& c : profile.components) {
    if (!(c.current_ma > 0)) throw DomainError("current must be positive for " + c.name);
    if (c.vmin > c.vmax) throw DomainError("vmin exceeds vmax for " + c.name);
    report.total_current_ma += c.current_ma;
    if (rail_v < c.vmin - kRailEpsilon || rail_v > c.vmax + kRailEpsilon)
      report.flagged.push_back({c.name, c.vmin, c.vmax});
  }
  report.runtime_h = profile.battery_capacity_mah / report.total_current_ma;
  return report;
}

PowerProfile read_power_csv(std::istream& in, double capacity_mah) {
  const auto rows = read_csv(in);
  expect_header(rows, {"component", "current_mA", "vmin", "vmax"});
  PowerProfile p;
  p.battery_capacity_mah = capacity_mah;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw FieldError("row " + std::to_string(i) + ": expected 4 columns");
    p.components.push_back({trim(r[0]), number_field(r[1], i, "current_mA"), number_field(r[2], i, "vmin"),
                            number_field(r[3], i, "vmax")});
  }
  return p;
}

std::string format_power_report(const PowerReport& report) {
  std::ostringstream out;
  out << "total_current_mA: " << text::fixed(report.total_current_ma, 2) << '\n';
  out << "runtime_h: " << text::fixed(report.runtime_h, 2) << '\n';
  out << "rail_V: " << text::fixed(report.rail_v, 1) << '\n';
  for (const auto& f : report.flagged)
    out << "FLAG " << f.component << ": " << text::fixed(report.rail_v, 1) << " V rail outside ["
        << text::fixed(f.vmin, 1) << ", " << text::fixed(f.vmax, 1) << "] V\n";
  return out.str();
}

void BomTable::validate() const {
  for (const auto& r : rows) {
    if (r.quantity < 1) throw DomainError("quantity must be >= 1 for " + r.component);
    if (r.unit_price_bdt < 0) throw DomainError("price must be >= 0 for " + r.component);
  }
}

std::int64_t bom_total(const BomTable& table) {
  table.validate();
  std::int64_t total = 0;
  for (const auto& r : table.rows) total += r.quantity * r.unit_price_bdt;
  return total;
}

BomTable read_bom_csv(std::istream& in) {
  const auto rows = read_csv(in);
  expect_header(rows, {"component", "quantity", "unit_price_bdt"});
  BomTable t;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw FieldError("row " + std::to_string(i) + ": expected 3 columns");
    t.rows.push_back({trim(r[0]), integer_field(r[1], i, "quantity"), integer_field(r[2], i, "unit_price_bdt")});
  }
  return t;
}

std::string format_bom_report(const BomTable& table) {
  std::ostringstream out;
  for (const auto& r : table.rows)
    out << r.component << ": " << r.quantity << " x " << r.unit_price_bdt << " = " << r.quantity * r.unit_price_bdt
        << " BDT\n";
  out << "total_bdt: " << bom_total(table) << '\n';
  return out.str();
}

}  // namespace ridesafe::sim
