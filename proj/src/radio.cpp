#include "dirnet/radio.hpp"

#include <stdexcept>

namespace dirnet {

void RadioParams::validate() const {
  auto fail = [](const char* field, const char* why) {
    throw std::invalid_argument(std::string(field) + ": " + why);
  };
  if (!std::isfinite(p_tx_dbm)) fail("p_tx_dbm", "must be finite");
  if (!std::isfinite(n_thr_dbm)) fail("n_thr_dbm", "must be finite");
  if (!(theta > 0.0 && theta <= std::numbers::pi)) fail("theta", "must lie in (0, 180] degrees");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail("kappa", "must be positive");
  if (!(c_const > 0.0) || !std::isfinite(c_const)) fail("c_const", "must be positive");
  if (!(p_tx_dbm > n_thr_dbm)) fail("p_tx_dbm", "must exceed n_thr_dbm");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth_hz", "must be positive");
  if (!std::isfinite(snr_max_db)) fail("snr_max_db", "must be finite");
}

double directivity_reduction(double alpha, double theta) {
  if (!(alpha >= 0.0)) throw std::domain_error("directivity_reduction: alpha must be >= 0");
  if (!(theta > 0.0)) throw std::domain_error("directivity_reduction: theta must be > 0");
  if (alpha >= theta) return 0.0;
  return 1.0 - alpha / theta;
}

double max_directivity(double theta) {
  if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi))
    throw std::domain_error("max_directivity: theta must lie in (0, 2pi)");
  return 2.0 / (1.0 - std::cos(theta / 2.0));
}

double receive_power(const RadioParams& params, const AntennaModel& antenna,
                     double d, double alpha) {
  if (!(d > 0.0)) throw std::domain_error("receive_power: distance must be > 0");
  const double gain = antenna.gain(alpha, params.theta);
  if (gain == 0.0) return 0.0;
  return dbm_to_mw(params.p_tx_dbm) * gain / (params.c_const * std::pow(d, params.kappa));
}

double coverage_radius(const RadioParams& params) {
  const double ratio = dbm_to_mw(params.p_tx_dbm) * max_directivity(params.theta) /
                       (dbm_to_mw(params.n_thr_dbm) * params.c_const);
  return std::pow(ratio, 1.0 / params.kappa);
}

Point2 beam_boundary(double R, double theta, double kappa, double alpha) {
  if (!(alpha >= 0.0) || alpha > theta)
    throw std::domain_error("beam_boundary: alpha must lie in [0, theta]");
  const double d = R * std::pow(1.0 - alpha / theta, 1.0 / kappa);
  return {d * std::cos(alpha), d * std::sin(alpha)};
}

double beam_area(double R, double theta, double kappa) {
  return R * R * kappa * theta / (2.0 + kappa);
}

double pair_coverage_area(double R, double theta, double kappa) {
  return 2.0 * beam_area(R, theta, kappa);
}

}  // namespace dirnet
