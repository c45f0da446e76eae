#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ridesafe/errors.hpp"
#include "ridesafe/gsm.hpp"
#include "ridesafe/nmea.hpp"
#include "ridesafe/replay.hpp"
#include "ridesafe/reports.hpp"
#include "ridesafe/scenario.hpp"
#include "ridesafe/text.hpp"
#include "ridesafe/trace.hpp"

using namespace ridesafe;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "-" selects stdout.
void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

std::string fix_json(std::size_t line_no, const nmea::GeoFix& fix) {
  std::string j = "{\"line\":" + std::to_string(line_no) + ",\"quality\":\"" + nmea::to_string(fix.quality) + "\"";
  if (fix.has_position()) {
    j += ",\"latitude_deg\":" + text::fixed(fix.latitude_deg, 6);
    j += ",\"longitude_deg\":" + text::fixed(fix.longitude_deg, 6);
  } else {
    j += ",\"latitude_deg\":null,\"longitude_deg\":null";
  }
  if (fix.timestamp_utc) j += ",\"utc\":\"" + fix.timestamp_utc->to_string() + "\"";
  if (fix.satellites) j += ",\"satellites\":" + std::to_string(*fix.satellites);
  return j + "}";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmet accident detection simulator"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Generate a ride trace (JSONL)");
  std::string scenario_name;
  double duration_s = 60.0;
  std::uint64_t seed = 0;
  std::optional<double> crash_at_s;
  std::int64_t sample_period_ms = 100;
  std::string sim_out = "-";
  simulate->add_option("--scenario", scenario_name, "ride | crash | wobble")->required();
  simulate->add_option("--duration", duration_s, "Trace length in seconds");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--crash-at", crash_at_s, "Crash / wobble start in seconds");
  simulate->add_option("--sample-period-ms", sample_period_ms, "Accelerometer sample period");
  simulate->add_option("--out", sim_out, "Output file, '-' for stdout");

  auto* replay_cmd = app.add_subcommand("replay", "Replay a trace through the pipeline");
  std::string trace_path = "-";
  std::string contacts_csv;
  bool rearm = false;
  std::string replay_out = "-";
  std::string config_path;
  replay_cmd->add_option("--trace", trace_path, "Trace file, '-' for stdin");
  replay_cmd->add_option("--contacts", contacts_csv, "Comma-separated E.164 numbers")->required();
  replay_cmd->add_flag("--rearm", rearm, "Re-arm detection after the helmet returns upright");
  replay_cmd->add_option("--out", replay_out, "Transcript file, '-' for stdout");
  replay_cmd->add_option("--config", config_path, "JSON config overrides");

  auto* parse_cmd = app.add_subcommand("parse-nmea", "Decode NMEA sentences to JSON fixes");
  std::string nmea_path;
  parse_cmd->add_option("--in", nmea_path, "NMEA text file")->required();

  auto* power_cmd = app.add_subcommand("power-budget", "Battery runtime from a power profile");
  std::string profile_path;
  double capacity_mah = sim::kDefaultCapacityMah;
  power_cmd->add_option("--profile", profile_path, "CSV: component,current_mA,vmin,vmax")->required();
  power_cmd->add_option("--capacity-mah", capacity_mah, "Battery capacity");

  auto* bom_cmd = app.add_subcommand("bom", "Bill-of-materials total");
  std::string bom_path;
  bom_cmd->add_option("--file", bom_path, "CSV: component,quantity,unit_price_bdt")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim::Scenario s{sim::scenario_kind_from_string(scenario_name), duration_s, seed, crash_at_s};
      std::ostringstream out;
      sim::write_trace(out, sim::generate(s, sample_period_ms));
      write_output(sim_out, out.str());
      return 0;
    }
    if (*replay_cmd) {
      sim::ReplayOptions opt;
      if (!config_path.empty()) opt = sim::apply_config_json(read_file(config_path), opt);
      for (auto c : text::split(contacts_csv, ',')) {
        if (c.empty()) continue;
        if (!gsm::is_e164(c)) throw ConfigError("contact is not an E.164 number: " + std::string(c));
        opt.contacts.emplace_back(c);
      }
      if (opt.contacts.empty()) throw ConfigError("at least one contact is required");
      opt.rearm = rearm;

      sim::RideTrace trace;
      if (trace_path == "-") {
        trace = sim::read_trace(std::cin);
      } else {
        std::ifstream in(trace_path, std::ios::binary);
        if (!in) throw Error("cannot open " + trace_path);
        trace = sim::read_trace(in);
      }
      const auto result = sim::replay(trace, opt);
      std::ostringstream out;
      sim::write_transcript(out, result);
      write_output(replay_out, out.str());
      return result.exit_code();
    }
    if (*parse_cmd) {
      std::istringstream in(read_file(nmea_path));
      std::string line;
      std::size_t line_no = 0;
      nmea::ParseCounters errors;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        try {
          std::cout << fix_json(line_no, nmea::to_geofix(nmea::parse_sentence(line))) << '\n';
        } catch (const FramingError& e) {
          ++errors.framing_errors;
          std::cerr << "line " << line_no << ": framing: " << e.what() << '\n';
        } catch (const ChecksumError& e) {
          ++errors.checksum_errors;
          std::cerr << "line " << line_no << ": checksum: " << e.what() << '\n';
        } catch (const UnsupportedSentence&) {
          ++errors.unsupported;
        } catch (const FieldError& e) {
          ++errors.field_errors;
          std::cerr << "line " << line_no << ": field: " << e.what() << '\n';
        }
      }
      std::cerr << "dropped: framing=" << errors.framing_errors << " checksum=" << errors.checksum_errors
                << " unsupported=" << errors.unsupported << " field=" << errors.field_errors << '\n';
      return 0;
    }
    if (*power_cmd) {
      std::istringstream in(read_file(profile_path));
      std::cout << sim::format_power_report(sim::power_budget(sim::read_power_csv(in, capacity_mah)));
      return 0;
    }
    if (*bom_cmd) {
      std::istringstream in(read_file(bom_path));
      std::cout << sim::format_bom_report(sim::read_bom_csv(in));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
