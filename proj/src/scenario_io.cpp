#include "mimosel/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "mimosel/errors.hpp"

namespace mimosel {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(',');
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

double to_double(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(out))
    throw ParseError(line, "expected a number for " + std::string(key) + ", got '" + std::string(v) + "'");
  return out;
}

int to_int(std::string_view v, std::size_t line, std::string_view key) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end)
    throw ParseError(line, "expected an integer for " + std::string(key) + ", got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(line, "expected true or false for " + std::string(key) + ", got '" + std::string(v) + "'");
}

std::vector<double> to_doubles(std::string_view v, std::size_t count, std::size_t line,
                               std::string_view key) {
  const auto parts = split_commas(v);
  if (parts.size() != count)
    throw ParseError(line, std::string(key) + " expects " + std::to_string(count) +
                               " comma-separated values");
  std::vector<double> out;
  for (auto p : parts) out.push_back(to_double(p, line, key));
  return out;
}

void out_of_range(std::size_t line, std::string_view key, const std::string& why) {
  throw ParseError(line, "value out of range for " + std::string(key) + ": " + why);
}

}  // namespace

Scenario parse_scenario_text(std::string_view text) {
  static const std::set<std::string_view> kRepeatable = {"jammer"};
  static const std::set<std::string_view> kKnown = {
      "M", "N", "d_t", "d_r", "target_power_dbw", "target_theta_deg", "noise_power_dbw",
      "jammer", "jammer_model", "clutter_rank", "clutter_span", "clutter_cnr_db",
      "require_interference", "nonoverlapping_virtual"};
  static const char* kMandatory[] = {"M", "N", "d_t", "d_r", "target_power_dbw"};

  Scenario s;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, "malformed line, expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "malformed line, missing key");
    if (value.empty()) throw ParseError(line_no, "malformed line, missing value for " + std::string(key));
    if (!kKnown.count(key)) throw ParseError(line_no, "unknown key: " + std::string(key));
    if (!kRepeatable.count(key)) {
      if (auto it = seen.find(key); it != seen.end())
        throw ParseError(line_no, "duplicate key " + std::string(key) + " (first set on line " +
                                      std::to_string(it->second) + ")");
    }
    seen.emplace(std::string(key), line_no);

    if (key == "M" || key == "N") {
      const int v = to_int(value, line_no, key);
      if (v < 1 || v > 64) out_of_range(line_no, key, "must be between 1 and 64");
      (key == "M" ? s.geometry.M : s.geometry.N) = v;
    } else if (key == "d_t" || key == "d_r") {
      const double v = to_double(value, line_no, key);
      if (!(v > 0.0)) out_of_range(line_no, key, "spacing must be positive");
      (key == "d_t" ? s.geometry.d_t : s.geometry.d_r) = v;
    } else if (key == "target_power_dbw") {
      s.target_power_dbw = to_double(value, line_no, key);
    } else if (key == "noise_power_dbw") {
      s.noise_power_dbw = to_double(value, line_no, key);
    } else if (key == "target_theta_deg") {
      const double v = to_double(value, line_no, key);
      if (std::abs(v) > 90.0) out_of_range(line_no, key, "azimuth must lie in [-90, 90]");
      s.target_theta = Angle::degrees(v);
    } else if (key == "jammer") {
      const auto v = to_doubles(value, 2, line_no, key);
      if (std::abs(v[0]) > 90.0) out_of_range(line_no, key, "azimuth must lie in [-90, 90]");
      s.jammers.push_back({Angle::degrees(v[0]), v[1]});
    } else if (key == "jammer_model") {
      if (value == "barrage") s.jammer_model = JammerModel::barrage;
      else if (value == "coherent") s.jammer_model = JammerModel::coherent;
      else out_of_range(line_no, key, "expected barrage or coherent");
    } else if (key == "clutter_rank") {
      const int v = to_int(value, line_no, key);
      if (v < 0) out_of_range(line_no, key, "rank must be nonnegative");
      s.clutter.rank = v;
    } else if (key == "clutter_span") {
      const auto v = to_doubles(value, 2, line_no, key);
      if (v[0] > v[1]) out_of_range(line_no, key, "lower end exceeds upper end");
      if (std::abs(v[0]) > 90.0 || std::abs(v[1]) > 90.0)
        out_of_range(line_no, key, "azimuth must lie in [-90, 90]");
      s.clutter.span_lo_deg = v[0];
      s.clutter.span_hi_deg = v[1];
    } else if (key == "clutter_cnr_db") {
      s.clutter.cnr_db = to_double(value, line_no, key);
    } else if (key == "require_interference") {
      s.require_interference = to_bool(value, line_no, key);
    } else if (key == "nonoverlapping_virtual") {
      s.require_nonoverlapping = to_bool(value, line_no, key);
    }
  }

  for (const char* k : kMandatory)
    if (!seen.count(std::string_view(k))) throw ParseError(0, std::string("missing key: ") + k);

  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(0, std::string("invalid scenario: ") + e.what());
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read scenario file " + path);
  return parse_scenario_text(buf.str());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out.precision(17);
  out << "M = " << s.geometry.M << "\n";
  out << "N = " << s.geometry.N << "\n";
  out << "d_t = " << s.geometry.d_t << "\n";
  out << "d_r = " << s.geometry.d_r << "\n";
  out << "target_power_dbw = " << s.target_power_dbw << "\n";
  out << "target_theta_deg = " << s.target_theta.deg() << "\n";
  out << "noise_power_dbw = " << s.noise_power_dbw << "\n";
  out << "jammer_model = " << (s.jammer_model == JammerModel::barrage ? "barrage" : "coherent") << "\n";
  for (const auto& j : s.jammers) out << "jammer = " << j.theta.deg() << ", " << j.power_dbw << "\n";
  out << "clutter_rank = " << s.clutter.rank << "\n";
  out << "clutter_span = " << s.clutter.span_lo_deg << ", " << s.clutter.span_hi_deg << "\n";
  out << "clutter_cnr_db = " << s.clutter.cnr_db << "\n";
  out << "require_interference = " << (s.require_interference ? "true" : "false") << "\n";
  out << "nonoverlapping_virtual = " << (s.require_nonoverlapping ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace mimosel
