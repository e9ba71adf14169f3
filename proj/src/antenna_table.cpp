#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dirnet/radio.hpp"

namespace dirnet {

namespace {

double fold_angle(double alpha) {
  // Patterns are symmetric about boresight; map any angle onto [0, pi].
  return std::abs(std::remainder(alpha, 2.0 * std::numbers::pi));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size())
    throw std::runtime_error("antenna table line " + std::to_string(line) +
                             ": not a number: '" + token + "'");
  return v;
}

}  // namespace

AntennaModel AntennaModel::table(std::vector<AntennaSample> samples) {
  if (samples.empty()) throw std::invalid_argument("antenna table: no samples");
  if (samples.front().angle != 0.0)
    throw std::invalid_argument("antenna table: first angle must be 0");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].gain_dbi) || !std::isfinite(samples[i].angle))
      throw std::invalid_argument("antenna table: non-finite sample");
    if (i > 0 && !(samples[i].angle > samples[i - 1].angle))
      throw std::invalid_argument("antenna table: angles must be strictly increasing");
  }
  AntennaModel m;
  m.kind_ = Kind::Table;
  m.samples_ = std::move(samples);
  return m;
}

double AntennaModel::gain(double alpha, double theta) const {
  const double a = fold_angle(alpha);
  if (kind_ == Kind::Analytic) return max_directivity(theta) * directivity_reduction(a, theta);

  if (a >= samples_.back().angle) return dbm_to_mw(samples_.back().gain_dbi);
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), a,
                             [](double v, const AntennaSample& s) { return v < s.angle; });
  auto lo = std::prev(hi);
  const double t = (a - lo->angle) / (hi->angle - lo->angle);
  return dbm_to_mw(lo->gain_dbi + t * (hi->gain_dbi - lo->gain_dbi));
}

double AntennaModel::peak_gain(double theta) const {
  if (kind_ == Kind::Analytic) return max_directivity(theta);
  const auto it = std::max_element(samples_.begin(), samples_.end(),
                                   [](const auto& l, const auto& r) { return l.gain_dbi < r.gain_dbi; });
  return dbm_to_mw(it->gain_dbi);
}

AntennaModel parse_antenna_table(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool header_seen = false;
  std::vector<AntennaSample> samples;
  while (std::getline(in, raw)) {
    ++line;
    const std::string row = trim(raw);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "angle_deg,gain_dbi")
        throw std::runtime_error("antenna table line " + std::to_string(line) +
                                 ": expected header 'angle_deg,gain_dbi'");
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
      throw std::runtime_error("antenna table line " + std::to_string(line) + ": expected two columns");
    const double angle_deg = parse_number(trim(row.substr(0, comma)), line);
    const double gain = parse_number(trim(row.substr(comma + 1)), line);
    samples.push_back({deg_to_rad(angle_deg), gain});
  }
  if (!header_seen) throw std::runtime_error("antenna table: empty file");
  return AntennaModel::table(std::move(samples));
}

AntennaModel load_antenna_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open antenna table: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_antenna_table(buf.str());
}

}  // namespace dirnet
