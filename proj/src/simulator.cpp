#include "dirnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace dirnet {

namespace {

constexpr int kPlacementRetries = 100;

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
double norm(Point2 p) { return std::hypot(p.x, p.y); }

struct Offsets {
  Point2 a;
  Point2 b;
};

Offsets sample_offsets(Rng& rng, const PairModel& model) {
  return std::visit(
      [&rng](const auto& m) -> Offsets {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FixedDistance>) {
          const double phi = 2.0 * std::numbers::pi * rng.uniform();
          return {{}, {m.d * std::cos(phi), m.d * std::sin(phi)}};
        } else if constexpr (std::is_same_v<T, TruncatedDistance>) {
          const double u = rng.uniform();
          double d = 0.0;
          switch (m.law) {
            case TruncatedDistance::Law::Uniform: d = u * m.d_max; break;
            case TruncatedDistance::Law::DiskUniform: d = m.d_max * std::sqrt(u); break;
            case TruncatedDistance::Law::Exponential:
              d = -m.scale * std::log1p(u * std::expm1(-m.d_max / m.scale));
              break;
          }
          const double phi = 2.0 * std::numbers::pi * rng.uniform();
          return {{}, {d * std::cos(phi), d * std::sin(phi)}};
        } else {
          auto draw = [&] {
            Point2 p{(rng.uniform() - 0.5) * m.dx, (rng.uniform() - 0.5) * m.dy};
            rng.uniform();  // vertical coordinate, discarded by the projection
            return p;
          };
          const Point2 a = draw();
          const Point2 b = draw();
          return {a, b};
        }
      },
      model);
}

bool inside_disk(Point2 p, double radius) { return p.x * p.x + p.y * p.y <= radius * radius; }

double bearing(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

}  // namespace

double max_pair_span(const PairModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FixedDistance>) return m.d;
        else if constexpr (std::is_same_v<T, TruncatedDistance>) return m.d_max;
        else return std::hypot(m.dx, m.dy);
      },
      model);
}

std::string describe(const PairModel& model) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FixedDistance>) {
          out << "fixed:" << m.d;
        } else if constexpr (std::is_same_v<T, TruncatedDistance>) {
          switch (m.law) {
            case TruncatedDistance::Law::Uniform: out << "uniform:" << m.d_max; break;
            case TruncatedDistance::Law::DiskUniform: out << "disk:" << m.d_max; break;
            case TruncatedDistance::Law::Exponential: out << "exponential:" << m.scale << ',' << m.d_max; break;
          }
        } else {
          out << "cuboid:" << m.dx << ',' << m.dy << ',' << m.dz;
        }
      },
      model);
  return out.str();
}

double DeploymentParams::region_area() const { return std::numbers::pi * region_radius * region_radius; }

void DeploymentParams::validate() const {
  if (!(region_radius > 0.0) || !std::isfinite(region_radius))
    throw std::invalid_argument("r_d_m: region radius must be positive");
  if (!(lambda_density >= 0.0) || !std::isfinite(lambda_density))
    throw std::invalid_argument("lambda_per_m2: must be finite and >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu_per_s: must be positive");
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FixedDistance>) {
          if (!(m.d > 0.0)) throw std::invalid_argument("pair_model: fixed distance must be positive");
        } else if constexpr (std::is_same_v<T, TruncatedDistance>) {
          if (!(m.d_max > 0.0)) throw std::invalid_argument("pair_model: d_max must be positive");
          if (m.law == TruncatedDistance::Law::Exponential && !(m.scale > 0.0))
            throw std::invalid_argument("pair_model: exponential scale must be positive");
        } else {
          if (!(m.dx > 0.0 && m.dy > 0.0 && m.dz > 0.0))
            throw std::invalid_argument("pair_model: cuboid dimensions must be positive");
        }
      },
      pair_model);
}

double PairPlacement::separation() const { return norm(pos_b - pos_a); }

std::uint64_t Rng::stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser over the (seed, index) pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

PairPlacement place_pair(Rng& rng, const DeploymentParams& deployment) {
  const double r_d = deployment.region_radius;
  for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
    const double r = r_d * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const Point2 anchor{r * std::cos(phi), r * std::sin(phi)};
    const Offsets off = sample_offsets(rng, deployment.pair_model);
    const Point2 a = anchor + off.a;
    const Point2 b = anchor + off.b;
    if (!inside_disk(a, r_d) || !inside_disk(b, r_d)) continue;
    return {a, b, bearing(a, b), bearing(b, a)};
  }
  throw std::runtime_error("place_pair: could not place a pair inside the region after " +
                           std::to_string(kPlacementRetries) + " attempts");
}

DistanceEstimate expected_pair_distance(const DeploymentParams& deployment, std::size_t samples,
                                        std::uint64_t seed) {
  if (samples < 100'000) throw std::invalid_argument("expected_pair_distance: need at least 1e5 samples");
  Rng rng(Rng::stream_seed(seed, 0));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Offsets off = sample_offsets(rng, deployment.pair_model);
    const double d = norm(off.b - off.a);
    const double delta = d - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (d - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

std::string to_string(CheckMode m) { return m == CheckMode::OneWay ? "one-way" : "two-way"; }

CheckMode check_mode_from_string(const std::string& s) {
  if (s == "one-way") return CheckMode::OneWay;
  if (s == "two-way") return CheckMode::TwoWay;
  throw std::invalid_argument("unknown check mode '" + s + "' (expected one-way or two-way)");
}

double interference_power(const RadioParams& radio, const AntennaModel& antenna, Point2 tx,
                          double boresight, Point2 rx) {
  const Point2 v = rx - tx;
  const double d = norm(v);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  const double alpha = std::atan2(v.y, v.x) - boresight;
  return receive_power(radio, antenna, d, alpha);
}

bool pair_interferes(const PairPlacement& source, const PairPlacement& victim,
                     const RadioParams& radio, const AntennaModel& antenna) {
  const double thr = dbm_to_mw(radio.n_thr_dbm);
  const std::pair<Point2, double> txs[] = {{source.pos_a, source.boresight_ab},
                                           {source.pos_b, source.boresight_ba}};
  for (const auto& [pos, dir] : txs) {
    if (interference_power(radio, antenna, pos, dir, victim.pos_a) >= thr) return true;
    if (interference_power(radio, antenna, pos, dir, victim.pos_b) >= thr) return true;
  }
  return false;
}

bool admission_check(const PairPlacement& candidate, std::span<const PairPlacement> active,
                     const RadioParams& radio, const AntennaModel& antenna, CheckMode mode) {
  for (const PairPlacement& other : active) {
    if (pair_interferes(other, candidate, radio, antenna)) return false;
    if (mode == CheckMode::TwoWay && pair_interferes(candidate, other, radio, antenna)) return false;
  }
  return true;
}

void SimConfig::validate() const {
  deployment.validate();
  radio.validate();
  if (!(warmup > 0.0) || !std::isfinite(warmup)) throw std::invalid_argument("warmup_s: must be positive");
  if (!(horizon > warmup) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon_s: must exceed warmup_s");
  if (replications < 1) throw std::invalid_argument("replications: must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs: must be >= 1");
  if (interference_snapshots < 0) throw std::invalid_argument("interference_snapshots: must be >= 0");
}

double t_confidence_halfwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
}

namespace {

/// Uniform grid over the region's bounding box; each active pair is filed
/// under the cell containing its device a.
class SpatialIndex {
 public:
  SpatialIndex(double region_radius, double cell_size) {
    constexpr int kMaxCellsPerSide = 512;
    origin_ = -region_radius;
    const double extent = 2.0 * region_radius;
    cell_ = std::max(cell_size, extent / kMaxCellsPerSide);
    side_ = std::max(1, static_cast<int>(std::ceil(extent / cell_)));
    cells_.resize(static_cast<std::size_t>(side_) * side_);
  }

  void insert(int slot, Point2 p) { cells_[cell_of(p)].push_back(slot); }

  void erase(int slot, Point2 p) {
    auto& c = cells_[cell_of(p)];
    const auto it = std::find(c.begin(), c.end(), slot);
    *it = c.back();
    c.pop_back();
  }

  /// Calls `fn(slot)` for every pair filed within `radius` (Chebyshev) of `p`.
  template <class Fn>
  void for_each_near(Point2 p, double radius, Fn&& fn) const {
    const int x0 = clamp_index((p.x - radius - origin_) / cell_);
    const int x1 = clamp_index((p.x + radius - origin_) / cell_);
    const int y0 = clamp_index((p.y - radius - origin_) / cell_);
    const int y1 = clamp_index((p.y + radius - origin_) / cell_);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (int slot : cells_[static_cast<std::size_t>(y) * side_ + x]) fn(slot);
  }

 private:
  int clamp_index(double v) const {
    return std::clamp(static_cast<int>(std::floor(v)), 0, side_ - 1);
  }
  std::size_t cell_of(Point2 p) const {
    return static_cast<std::size_t>(clamp_index((p.y - origin_) / cell_)) * side_ +
           clamp_index((p.x - origin_) / cell_);
  }

  double origin_ = 0.0;
  double cell_ = 1.0;
  int side_ = 1;
  std::vector<std::vector<int>> cells_;
};

struct QueuedEvent {
  double time;
  std::uint64_t seq;
  EventKind kind;
  int slot;

  bool operator>(const QueuedEvent& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

class Replication {
 public:
  Replication(const SimConfig& config, int index, const SimObserver& observer)
      : cfg_(config),
        index_(index),
        observer_(observer),
        rng_(Rng::stream_seed(config.seed, static_cast<std::uint64_t>(index))),
        reach_(std::pow(dbm_to_mw(config.radio.p_tx_dbm) * config.antenna.peak_gain(config.radio.theta) /
                            (dbm_to_mw(config.radio.n_thr_dbm) * config.radio.c_const),
                        1.0 / config.radio.kappa)),
        span_(max_pair_span(config.deployment.pair_model)),
        index_grid_(config.deployment.region_radius, reach_ + 2.0 * span_) {}

  ReplicationStats run() {
    if (!cfg_.trace_prefix.empty()) {
      trace_.open(cfg_.trace_prefix + ".rep" + std::to_string(index_) + ".csv");
      if (!trace_) throw std::runtime_error("cannot open trace file for prefix " + cfg_.trace_prefix);
      trace_.precision(12);
      trace_ << "t,event,n_active,accepted\n";
    }
    const double lambda = cfg_.deployment.lambda_total();
    if (lambda > 0.0) push(rng_.exponential(lambda), EventKind::Arrival, -1);
    if (cfg_.interference_snapshots > 0) next_snapshot_ = snapshot_time(0);

    while (!queue_.empty() && queue_.top().time <= cfg_.horizon) {
      const QueuedEvent ev = queue_.top();
      queue_.pop();
      take_snapshots_until(ev.time);
      advance_clock(ev.time);
      if (ev.kind == EventKind::Arrival) {
        handle_arrival(ev.time);
        push(ev.time + rng_.exponential(lambda), EventKind::Arrival, -1);
      } else {
        handle_departure(ev.time, ev.slot);
      }
    }
    take_snapshots_until(cfg_.horizon);
    advance_clock(cfg_.horizon);
    return finish();
  }

 private:
  void push(double t, EventKind kind, int slot) { queue_.push({t, seq_++, kind, slot}); }

  void advance_clock(double t) {
    const double from = std::max(clock_, cfg_.warmup);
    const double to = std::min(t, cfg_.horizon);
    if (to > from) {
      const std::size_t n = placements_.size();
      area_ += static_cast<double>(n) * (to - from);
      if (histogram_.size() <= n) histogram_.resize(n + 1, 0.0);
      histogram_[n] += to - from;
    }
    clock_ = t;
  }

  bool admissible(const PairPlacement& cand) {
    const double radius = reach_ + 2.0 * span_;
    bool ok = true;
    ++stamp_;
    auto visit = [&](int slot) {
      if (!ok || visited_[slot] == stamp_) return;
      visited_[slot] = stamp_;
      const PairPlacement& other = placements_[dense_of_[slot]];
      if (pair_interferes(other, cand, cfg_.radio, cfg_.antenna) ||
          (cfg_.check_mode == CheckMode::TwoWay && pair_interferes(cand, other, cfg_.radio, cfg_.antenna)))
        ok = false;
    };
    index_grid_.for_each_near(cand.pos_a, radius, visit);
    return ok;
  }

  int allocate_slot() {
    if (!free_slots_.empty()) {
      const int s = free_slots_.back();
      free_slots_.pop_back();
      return s;
    }
    dense_of_.push_back(-1);
    visited_.push_back(0);
    return static_cast<int>(dense_of_.size()) - 1;
  }

  void handle_arrival(double t) {
    const PairPlacement cand = place_pair(rng_, cfg_.deployment);
    const bool accepted = admissible(cand);
    const bool observed = t >= cfg_.warmup;
    if (observed) ++arrivals_;
    if (accepted) {
      if (observed) ++accepted_obs_;
      ++accepted_total_;
      const int slot = allocate_slot();
      dense_of_[slot] = static_cast<int>(placements_.size());
      placements_.push_back(cand);
      slots_.push_back(slot);
      index_grid_.insert(slot, cand.pos_a);
      push(t + rng_.exponential(cfg_.deployment.mu), EventKind::Departure, slot);
    }
    notify(t, EventKind::Arrival, accepted);
  }

  void handle_departure(double t, int slot) {
    const int dense = dense_of_[slot];
    index_grid_.erase(slot, placements_[dense].pos_a);
    const int last = static_cast<int>(placements_.size()) - 1;
    if (dense != last) {
      placements_[dense] = placements_[last];
      slots_[dense] = slots_[last];
      dense_of_[slots_[dense]] = dense;
    }
    placements_.pop_back();
    slots_.pop_back();
    dense_of_[slot] = -1;
    free_slots_.push_back(slot);
    ++departed_total_;
    notify(t, EventKind::Departure, false);
  }

  void notify(double t, EventKind kind, bool accepted) {
    if (trace_.is_open()) {
      trace_ << t << ',' << (kind == EventKind::Arrival ? "arrival" : "departure") << ','
             << placements_.size() << ',';
      if (kind == EventKind::Arrival) trace_ << (accepted ? 1 : 0);
      trace_ << '\n';
    }
    if (observer_) {
      observer_(SimEvent{index_, t, kind, accepted, accepted_total_, departed_total_,
                         std::span<const PairPlacement>(placements_)});
    }
  }

  double snapshot_time(int k) const {
    const double width = (cfg_.horizon - cfg_.warmup) / cfg_.interference_snapshots;
    return cfg_.warmup + (k + 0.5) * width;
  }

  void take_snapshots_until(double t) {
    while (snapshots_taken_ < cfg_.interference_snapshots && next_snapshot_ <= t) {
      sample_interference();
      ++snapshots_taken_;
      if (snapshots_taken_ < cfg_.interference_snapshots) next_snapshot_ = snapshot_time(snapshots_taken_);
    }
  }

  void sample_interference() {
    const std::size_t n = placements_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 victims[] = {placements_[i].pos_a, placements_[i].pos_b};
      for (Point2 rx : victims) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const PairPlacement& src = placements_[j];
          total += interference_power(cfg_.radio, cfg_.antenna, src.pos_a, src.boresight_ab, rx);
          total += interference_power(cfg_.radio, cfg_.antenna, src.pos_b, src.boresight_ba, rx);
        }
        interference_sum_ += total;
        ++interference_count_;
      }
    }
  }

  ReplicationStats finish() {
    ReplicationStats out;
    const double window = cfg_.horizon - cfg_.warmup;
    out.mean_pairs = area_ / window;
    out.arrivals_observed = arrivals_;
    out.accepted_observed = accepted_obs_;
    if (arrivals_ > 0) out.p_accept = static_cast<double>(accepted_obs_) / static_cast<double>(arrivals_);
    if (histogram_.empty()) histogram_.assign(1, window);
    double total = 0.0;
    for (double v : histogram_) total += v;
    for (double& v : histogram_) v /= total;
    out.state_histogram = std::move(histogram_);
    if (interference_count_ > 0)
      out.mean_interference_mw = interference_sum_ / static_cast<double>(interference_count_);
    out.final_active = placements_.size();
    return out;
  }

  const SimConfig& cfg_;
  int index_;
  const SimObserver& observer_;
  Rng rng_;
  double reach_;
  double span_;
  SpatialIndex index_grid_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;

  std::vector<PairPlacement> placements_;  // dense, active pairs only
  std::vector<int> slots_;                 // slot of each dense entry
  std::vector<int> dense_of_;              // dense index of each slot, -1 if free
  std::vector<int> free_slots_;
  std::vector<std::uint64_t> visited_;
  std::uint64_t stamp_ = 0;

  double clock_ = 0.0;
  double area_ = 0.0;
  std::vector<double> histogram_;
  std::uint64_t arrivals_ = 0;
  std::uint64_t accepted_obs_ = 0;
  std::uint64_t accepted_total_ = 0;
  std::uint64_t departed_total_ = 0;

  int snapshots_taken_ = 0;
  double next_snapshot_ = 0.0;
  double interference_sum_ = 0.0;
  std::uint64_t interference_count_ = 0;

  std::ofstream trace_;
};

}  // namespace

ReplicationStats run_replication(const SimConfig& config, int index, const SimObserver& observer) {
  Replication rep(config, index, observer);
  return rep.run();
}

SimStats run(const SimConfig& config, const SimObserver& observer) {
  config.validate();
  const int reps = config.replications;
  std::vector<ReplicationStats> results(static_cast<std::size_t>(reps));

  const int workers = observer ? 1 : std::min(config.jobs, reps);
  if (workers <= 1) {
    for (int r = 0; r < reps; ++r) results[r] = run_replication(config, r, observer);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = w; r < reps; r += workers) results[r] = run_replication(config, r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SimStats stats;
  stats.seed = config.seed;
  std::vector<double> means;
  std::vector<double> accepts;
  double interference = 0.0;
  int interference_reps = 0;
  for (const auto& r : results) {
    means.push_back(r.mean_pairs);
    if (r.arrivals_observed > 0) accepts.push_back(r.p_accept);
    stats.arrivals_observed += r.arrivals_observed;
    stats.accepted_observed += r.accepted_observed;
    if (stats.state_histogram.size() < r.state_histogram.size())
      stats.state_histogram.resize(r.state_histogram.size(), 0.0);
    for (std::size_t i = 0; i < r.state_histogram.size(); ++i) stats.state_histogram[i] += r.state_histogram[i];
    if (!std::isnan(r.mean_interference_mw)) {
      interference += r.mean_interference_mw;
      ++interference_reps;
    }
  }
  double hist_total = 0.0;
  for (double v : stats.state_histogram) hist_total += v;
  for (double& v : stats.state_histogram) v /= hist_total;

  for (double m : means) stats.mean_pairs += m;
  stats.mean_pairs /= static_cast<double>(reps);
  stats.mean_pairs_per_m2 = stats.mean_pairs / config.deployment.region_area();
  stats.ci_halfwidth_mean_pairs = t_confidence_halfwidth(means);
  if (!accepts.empty()) {
    stats.p_accept_defined = true;
    stats.p_accept = 0.0;
    for (double a : accepts) stats.p_accept += a;
    stats.p_accept /= static_cast<double>(accepts.size());
    stats.ci_halfwidth_p_accept = t_confidence_halfwidth(accepts);
  } else {
    stats.ci_halfwidth_p_accept = std::numeric_limits<double>::quiet_NaN();
  }
  if (interference_reps > 0) stats.mean_interference_mw = interference / interference_reps;
  stats.per_replication = std::move(results);
  return stats;
}

}  // namespace dirnet
