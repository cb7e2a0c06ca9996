#include "hpmpc/io.hpp"

#include "hpmpc/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hpmpc::io {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s) {
  if (s.empty() || s == "nan" || s == "NaN" || s == "NA") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError("'" + s + "' is not a number");
  }
  return v;
}

std::string CsvMeta::get(const std::string& key) const {
  for (const auto& [k, v] : extra) {
    if (k == key) return v;
  }
  return {};
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw DataError("schema " + meta.schema + ": missing column '" + name + "'");
}

double CsvTable::number(std::size_t row, int col) const {
  try {
    return parse_number(rows.at(row).at(static_cast<std::size_t>(col)));
  } catch (const DataError& e) {
    // Data rows start on file line 3.
    throw DataError("schema " + meta.schema + " line " + std::to_string(row + 3) +
                    ", column '" + header[col] + "': " + e.what());
  }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

CsvMeta with_schema(CsvMeta m, const char* schema) {
  m.schema = schema;
  return m;
}

std::int64_t time_cell(const CsvTable& t, std::size_t row, int col) {
  try {
    return scenario::parse_iso8601(t.rows[row][col]);
  } catch (const DataError& e) {
    throw DataError("schema " + t.meta.schema + " line " + std::to_string(row + 3) +
                    ", column '" + t.header[col] + "': " + e.what());
  }
}

}  // namespace

std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  os << "# schema=" << t.meta.schema << " version=" << t.meta.version
     << " digest=" << t.meta.digest << " seed=" << t.meta.seed;
  for (const auto& [k, v] : t.meta.extra) os << ' ' << k << '=' << v;
  os << '\n' << join(t.header) << '\n';
  for (const auto& r : t.rows) os << join(r) << '\n';
  return os.str();
}

CsvTable parse_csv(const std::string& text, const std::string& schema,
                   const std::vector<std::string>& required) {
  std::istringstream is(text);
  std::string line;
  CsvTable t;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw DataError("line 1: expected '# schema=... version=...' metadata line");
  }
  for (const std::string& tok : split(line.substr(2), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("line 1: malformed metadata '" + tok + "'");
    const std::string k = tok.substr(0, eq);
    const std::string v = tok.substr(eq + 1);
    if (k == "schema") {
      t.meta.schema = v;
    } else if (k == "version") {
      t.meta.version = v;
    } else if (k == "digest") {
      t.meta.digest = v;
    } else if (k == "seed") {
      const auto res = std::from_chars(v.data(), v.data() + v.size(), t.meta.seed);
      if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw DataError("line 1: seed '" + v + "' is not an unsigned integer");
      }
    } else {
      t.meta.extra.emplace_back(k, v);
    }
  }
  if (t.meta.schema != schema) {
    throw DataError("expected schema '" + schema + "', file declares '" + t.meta.schema + "'");
  }
  const auto dot = t.meta.version.find('.');
  int major = -1;
  std::from_chars(t.meta.version.data(), t.meta.version.data() + (dot == std::string::npos ? t.meta.version.size() : dot), major);
  if (major != kSchemaMajor) {
    throw DataError("schema " + schema + ": unsupported major version " + t.meta.version);
  }
  if (!std::getline(is, line) || line.empty()) {
    throw DataError("line 2: header row is mandatory");
  }
  t.header = split(line, ',');
  for (const std::string& c : required) (void)t.column(c);
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw DataError("schema " + schema + " line " + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

CsvTable scenario_table(const scenario::Scenario& s, CsvMeta meta) {
  CsvTable t;
  t.meta = with_schema(std::move(meta), "scenario");
  t.meta.extra = {{"days", std::to_string(s.days)},
                  {"lookahead", std::to_string(s.lookahead_days)}};
  t.header = {"timestamp", "t_amb", "i_dir", "cloud", "spot", "co2", "pv_w"};
  for (int i = 0; i < s.hours(); ++i) {
    const auto& w = s.weather[i];
    t.rows.push_back({scenario::iso8601(static_cast<std::int64_t>(w.time_s)), fmt(w.t_amb),
                      fmt(w.i_dir), fmt(w.cloud), fmt(s.spot[i]), fmt(s.co2[i]),
                      fmt(s.pv_w[i])});
  }
  return t;
}

scenario::Scenario scenario_from_table(const CsvTable& t) {
  const int ts = t.column("timestamp");
  const int ta = t.column("t_amb");
  const int id = t.column("i_dir");
  const int cl = t.column("cloud");
  const int sp = t.column("spot");
  const int co = t.column("co2");
  const int pv = t.column("pv_w");
  scenario::Scenario s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    forecasting::WeatherPoint w;
    w.time_s = static_cast<double>(time_cell(t, r, ts));
    w.t_amb = t.number(r, ta);
    w.i_dir = t.number(r, id);
    w.cloud = t.number(r, cl);
    s.weather.push_back(w);
    s.spot.push_back(t.number(r, sp));
    s.co2.push_back(t.number(r, co));
    s.pv_w.push_back(t.number(r, pv));
  }
  if (s.weather.empty()) throw DataError("scenario file has no rows");
  s.start_epoch_s = static_cast<std::int64_t>(s.weather.front().time_s);
  if (s.start_epoch_s % 86400 != 0) throw DataError("scenario must start at midnight UTC");
  const std::string la = t.meta.get("lookahead");
  s.lookahead_days = la.empty() ? 2 : std::stoi(la);
  s.days = static_cast<int>(s.weather.size() / 24) - s.lookahead_days;
  if (s.days < 1) throw DataError("scenario holds no whole simulation day");
  s.validate();
  return s;
}

CsvTable trace_steps_table(const plant::SimTrace& tr, CsvMeta meta) {
  CsvTable t;
  t.meta = with_schema(std::move(meta), "trace-steps");
  t.meta.extra = {{"controller", plant::to_string(tr.controller)}};
  t.header = {"timestamp", "t_room", "t_floor", "t_amb", "t_artificial", "dq_w",
              "p_hp_w", "p_dhw_w", "mode", "events", "valves", "buy", "sell"};
  for (const auto& s : tr.steps) {
    t.rows.push_back({scenario::iso8601(static_cast<std::int64_t>(s.time_s)), fmt(s.t_room),
                      fmt(s.t_floor), fmt(s.t_amb), fmt(s.t_artificial), fmt(s.dq_w),
                      fmt(s.p_hp_w), fmt(s.p_dhw_w), s.mode, plant::events_to_string(s.events),
                      std::to_string(s.valves), fmt(s.buy), fmt(s.sell)});
  }
  return t;
}

namespace {
const std::vector<std::string> kHourColumns = {
    "timestamp", "e_hp", "e_dhw", "e_pv", "e_app", "e_import", "e_export", "q_heat",
    "q_budget",  "t_room", "t_amb", "buy", "sell", "slack_binding"};
}

CsvTable trace_hours_table(const plant::SimTrace& tr, CsvMeta meta) {
  CsvTable t;
  t.meta = with_schema(std::move(meta), "trace-hours");
  t.meta.extra = {{"controller", plant::to_string(tr.controller)}};
  t.header = kHourColumns;
  for (const auto& h : tr.hours) {
    t.rows.push_back({scenario::iso8601(static_cast<std::int64_t>(h.time_s)), fmt(h.e_hp),
                      fmt(h.e_dhw), fmt(h.e_pv), fmt(h.e_app), fmt(h.e_import),
                      fmt(h.e_export), fmt(h.q_heat), fmt(h.q_budget), fmt(h.t_room),
                      fmt(h.t_amb), fmt(h.buy), fmt(h.sell), h.slack_binding ? "1" : "0"});
  }
  return t;
}

plant::SimTrace trace_from_hours(const CsvTable& t) {
  std::vector<int> c;
  for (const auto& name : kHourColumns) c.push_back(t.column(name));
  plant::SimTrace tr;
  const std::string ctl = t.meta.get("controller");
  if (!ctl.empty()) tr.controller = plant::controller_from_string(ctl);
  tr.seed = t.meta.seed;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    plant::HourRecord h;
    h.time_s = static_cast<double>(time_cell(t, r, c[0]));
    double* fields[] = {&h.e_hp,   &h.e_dhw, &h.e_pv, &h.e_app, &h.e_import, &h.e_export,
                        &h.q_heat, &h.q_budget, &h.t_room, &h.t_amb, &h.buy, &h.sell};
    for (int k = 0; k < 12; ++k) {
      *fields[k] = t.number(r, c[k + 1]);
      if (!std::isfinite(*fields[k])) {
        throw DataError("schema trace-hours line " + std::to_string(r + 3) + ", column '" +
                        kHourColumns[k + 1] + "': missing value");
      }
    }
    h.slack_binding = t.rows[r][c[13]] == "1";
    tr.hours.push_back(h);
  }
  if (tr.hours.size() % 24 != 0) {
    throw DataError("trace covers " + std::to_string(tr.hours.size()) +
                    " hours, not whole days");
  }
  if (!tr.hours.empty()) tr.start_epoch_s = static_cast<std::int64_t>(tr.hours[0].time_s);
  tr.days = static_cast<int>(tr.hours.size() / 24);
  return tr;
}

CsvTable day_records_table(const std::vector<evaluation::DayRecord>& days, CsvMeta meta) {
  CsvTable t;
  t.meta = with_schema(std::move(meta), "day-records");
  t.header = {"date", "hour", "e_g", "t_amb", "buy", "e_pv", "e_hp", "net_import"};
  for (const auto& d : days) {
    for (int h = 0; h < 24; ++h) {
      t.rows.push_back({d.date, std::to_string(h), fmt(d.e_g[h]), fmt(d.t_amb[h]),
                        fmt(d.buy[h]), fmt(d.e_pv[h]),
                        d.has_billing ? fmt(d.e_hp[h]) : "",
                        d.has_billing ? fmt(d.net_import[h]) : ""});
    }
  }
  return t;
}

std::vector<evaluation::DayRecord> day_records_from_table(const CsvTable& t) {
  const int dc = t.column("date");
  const int hc = t.column("hour");
  const int eg = t.column("e_g");
  const int ta = t.column("t_amb");
  const int bu = t.column("buy");
  const int pv = t.column("e_pv");
  const int eh = t.column("e_hp");
  const int ni = t.column("net_import");
  if (t.rows.size() % 24 != 0) throw DataError("day-records file does not hold whole days");
  std::vector<evaluation::DayRecord> out;
  for (std::size_t r0 = 0; r0 < t.rows.size(); r0 += 24) {
    evaluation::DayRecord d;
    d.date = t.rows[r0][dc];
    d.has_billing = !t.rows[r0][eh].empty();
    for (int h = 0; h < 24; ++h) {
      const std::size_t r = r0 + h;
      if (t.rows[r][dc] != d.date || t.number(r, hc) != h) {
        throw DataError("day-records line " + std::to_string(r + 3) +
                        ": expected hour " + std::to_string(h) + " of " + d.date);
      }
      d.e_g[h] = t.number(r, eg);
      d.t_amb[h] = t.number(r, ta);
      d.buy[h] = t.number(r, bu);
      d.e_pv[h] = t.number(r, pv);
      if (d.has_billing) {
        d.e_hp[h] = t.number(r, eh);
        d.net_import[h] = t.number(r, ni);
      }
    }
    d.validate();
    out.push_back(d);
  }
  return out;
}

std::vector<building::ThermalSample> thermal_samples_from_table(const CsvTable& t) {
  const int ts = t.column("timestamp");
  const int tr = t.column("t_room");
  const int q = t.column("q_hp_w");
  const int ta = t.column("t_amb");
  const int id = t.column("i_dir");
  const int cl = t.column("cloud");
  std::vector<building::ThermalSample> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    (void)time_cell(t, r, ts);
    out.push_back({t.number(r, tr), t.number(r, q), t.number(r, ta), t.number(r, id),
                   t.number(r, cl)});
  }
  return out;
}

std::vector<efficiency::OperatingSample> operating_samples_from_table(const CsvTable& t) {
  const int ts = t.column("timestamp");
  const int p = t.column("p_w");
  const int q = t.column("q_w");
  const int ta = t.column("t_amb");
  std::vector<efficiency::OperatingSample> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    efficiency::OperatingSample s;
    s.time_s = static_cast<double>(time_cell(t, r, ts));
    s.p_w = t.number(r, p);
    s.q_w = t.number(r, q);
    s.t_amb_c = t.number(r, ta);
    out.push_back(s);
  }
  return out;
}

void pv_history_from_table(const CsvTable& t, forecasting::WeatherSeries& weather,
                           std::vector<double>& pv_w) {
  const int ts = t.column("timestamp");
  const int ta = t.column("t_amb");
  const int id = t.column("i_dir");
  const int cl = t.column("cloud");
  const int pv = t.column("pv_w");
  weather.clear();
  pv_w.clear();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    forecasting::WeatherPoint w;
    w.time_s = static_cast<double>(time_cell(t, r, ts));
    w.t_amb = t.number(r, ta);
    w.i_dir = t.number(r, id);
    w.cloud = t.number(r, cl);
    weather.push_back(w);
    pv_w.push_back(t.number(r, pv));
  }
}

}  // namespace hpmpc::io
