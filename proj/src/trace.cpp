#include "ridesafe/trace.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "ridesafe/errors.hpp"

namespace ridesafe::sim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t kind_index(const TraceRecord& r) { return r.payload.index(); }

}  // namespace

const char* TraceRecord::kind() const {
  static constexpr const char* names[] = {"tilt", "nmea", "phy"};
  return names[payload.index()];
}

std::string to_jsonl(const TraceRecord& record) {
  nlohmann::ordered_json j;
  j["t_ms"] = record.t_ms;
  j["kind"] = record.kind();
  std::visit(overloaded{
                 [&](const TiltRecord& t) {
                   j["ax"] = t.ax;
                   j["ay"] = t.ay;
                   j["az"] = t.az;
                 },
                 [&](const NmeaRecord& n) { j["line"] = n.line; },
                 [&](const PhyRecord& p) { j["line"] = p.line; },
             },
             record.payload);
  return j.dump();
}

TraceRecord record_from_jsonl(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw TraceError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceError(line_no, "record is not an object");

  auto int_field = [&](const char* key) -> std::int64_t {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) throw TraceError(line_no, std::string("missing integer field '") + key + "'");
    return it->get<std::int64_t>();
  };
  auto str_field = [&](const char* key) -> std::string {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw TraceError(line_no, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  };

  TraceRecord r;
  r.t_ms = int_field("t_ms");
  if (r.t_ms < 0) throw TraceError(line_no, "negative t_ms");
  const auto kind = str_field("kind");
  if (kind == "tilt") {
    auto axis = [&](const char* key) {
      const auto v = int_field(key);
      if (v < -512 || v > 512) throw TraceError(line_no, std::string(key) + " outside [-512, 512]");
      return static_cast<int>(v);
    };
    r.payload = TiltRecord{axis("ax"), axis("ay"), axis("az")};
  } else if (kind == "nmea") {
    r.payload = NmeaRecord{str_field("line")};
  } else if (kind == "phy") {
    r.payload = PhyRecord{str_field("line")};
  } else {
    throw TraceError(line_no, "unknown record kind '" + kind + "'");
  }
  return r;
}

void write_trace(std::ostream& out, const RideTrace& trace) {
  for (const auto& r : trace) out << to_jsonl(r) << '\n';
}

RideTrace read_trace(std::istream& in) {
  RideTrace trace;
  std::string line;
  std::size_t line_no = 0;
  std::int64_t last_t = -1;
  std::int64_t last_by_kind[3] = {-1, -1, -1};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto r = record_from_jsonl(line, line_no);
    if (r.t_ms < last_t) throw TraceError(line_no, "t_ms decreases");
    auto& last_kind = last_by_kind[kind_index(r)];
    if (r.t_ms <= last_kind) throw TraceError(line_no, std::string("t_ms not strictly increasing for kind ") + r.kind());
    last_t = r.t_ms;
    last_kind = r.t_ms;
    trace.push_back(std::move(r));
  }
  return trace;
}

void validate_trace(const RideTrace& trace) {
  std::int64_t last_t = -1;
  std::int64_t last_by_kind[3] = {-1, -1, -1};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (r.t_ms < 0) throw TraceError(i + 1, "negative t_ms");
    if (r.t_ms < last_t) throw TraceError(i + 1, "t_ms decreases");
    auto& last_kind = last_by_kind[kind_index(r)];
    if (r.t_ms <= last_kind) throw TraceError(i + 1, std::string("t_ms not strictly increasing for kind ") + r.kind());
    last_t = r.t_ms;
    last_kind = r.t_ms;
  }
}

}  // namespace ridesafe::sim
