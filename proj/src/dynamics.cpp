#include "urbangen/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace urbangen {

namespace {

// Two bodies share a path when their centerline offsets differ by less than a
// vehicle width pair; only then does the follow rule bind.
constexpr double kLaneClearance = 1.9;
// A body moving slower than the camera's cruise yields to a curbside offset
// once the camera tails it, and stays there. Aux followers queue instead, so
// yields unwrap one vehicle at a time as the camera reaches each.
constexpr double kCurbLateral = 3.1;
constexpr double kPullOverRate = 0.09;     // m/s of lateral drift
constexpr double kYieldGap = 16.0;         // camera distance that triggers the yield
constexpr double kYieldSpeedMargin = 0.5;  // below cruise minus this counts as slow

bool SharesPath(double lateral_a, double lateral_b)
{
  return std::abs(lateral_a - lateral_b) < kLaneClearance;
}

}  // namespace

double ControlledSpeed(double current, double cruise, double accel, double dt, bool lead_present,
                       double lead_gap, double lead_speed, double d_follow)
{
  if (lead_present && lead_gap <= d_follow) {
    return std::max(0.0, std::min(cruise, lead_speed));
  }
  if (current < cruise) return std::min(cruise, current + accel * dt);
  if (current > cruise) return std::max(cruise, current - accel * dt);
  return current;
}

void AdvancePedestrian(PlacedEntity& e, double dt, double walk_speed, double bob_hz)
{
  if (e.gait != Gait::Walk) return;
  const Vec2 delta = e.walk_target - e.pos;
  const double dist = Length(delta);
  const double step = walk_speed * dt;
  if (dist <= step) {
    e.pos = e.walk_target;
    e.gait = Gait::StandIdle;
  } else {
    e.pos = e.pos + delta * (step / dist);
    e.heading = std::atan2(delta.y, delta.x);
  }
  e.walk_phase += dt * bob_hz;
}

TrafficSim::TrafficSim(const DynamicsConfig& config) : config_(config)
{
  camera_.cruise_speed = config.cruise_speed;
  camera_.speed = config.cruise_speed;
}

void TrafficSim::IngestSpawns(const std::vector<VehicleSpawn>& spawns)
{
  for (const VehicleSpawn& s : spawns) {
    bool blocked = std::abs(s.arc - camera_.arc) < config_.min_spawn_gap;
    for (const AuxVehicle& v : vehicles_) {
      if (v.alive && std::abs(s.arc - v.arc) < config_.min_spawn_gap) blocked = true;
    }
    if (blocked) continue;
    AuxVehicle v;
    v.id = next_vehicle_id_++;
    v.entry = s.entry;
    v.arc = s.arc;
    v.lateral = s.lateral;
    v.speed = s.speed;
    v.cruise = s.speed;
    vehicles_.push_back(v);
  }
}

void TrafficSim::Step(WorldWindow& window, double dt)
{
  IngestSpawns(window.TakeVehicleSpawns());

  // Lane ordering snapshot: a body follows the nearest arc ahead of it among
  // those sharing its path. Curbside traffic and the centerline camera pass
  // each other freely.
  struct LaneEntry {
    double arc;
    double lateral;
    double speed;
  };
  std::vector<LaneEntry> lane;
  lane.reserve(vehicles_.size() + 1);
  lane.push_back(LaneEntry{camera_.arc, 0.0, camera_.speed});
  for (const AuxVehicle& v : vehicles_) {
    if (v.alive) lane.push_back(LaneEntry{v.arc, v.lateral, v.speed});
  }
  std::sort(lane.begin(), lane.end(),
            [](const LaneEntry& a, const LaneEntry& b) { return a.arc < b.arc; });

  auto lead_of = [&lane](double arc, double lateral, double* gap, double* speed) {
    for (const LaneEntry& e : lane) {
      if (e.arc > arc && SharesPath(lateral, e.lateral)) {
        *gap = e.arc - arc;
        *speed = e.speed;
        return true;
      }
    }
    return false;
  };

  double gap = 0, lead_speed = 0;
  const bool cam_lead = lead_of(camera_.arc, 0.0, &gap, &lead_speed);
  camera_.speed = ControlledSpeed(camera_.speed, camera_.cruise_speed, config_.acceleration, dt,
                                  cam_lead, gap, lead_speed, config_.d_follow);
  camera_.arc += camera_.speed * dt;

  for (AuxVehicle& v : vehicles_) {
    if (!v.alive) continue;
    const bool has_lead = lead_of(v.arc, v.lateral, &gap, &lead_speed);
    v.speed = ControlledSpeed(v.speed, v.cruise, config_.acceleration, dt, has_lead, gap,
                              lead_speed, config_.d_follow);
    v.arc += v.speed * dt;
  }

  // Traffic currently moving slower than the camera's cruise yields curbward
  // once the camera tails it inside its own path, keeping the spawn-side sign.
  // Speed rather than cruise decides, so a fast body stuck behind a slow one
  // steps aside too and queues unwrap front to back. The drift pauses while it
  // would cut into the path of a longitudinally close body.
  for (AuxVehicle& v : vehicles_) {
    if (!v.alive) continue;
    const bool slow_now = v.speed < config_.cruise_speed - kYieldSpeedMargin;
    const bool camera_tails = camera_.arc < v.arc && v.arc - camera_.arc < kYieldGap &&
                              SharesPath(v.lateral, 0.0);
    if (!(slow_now && camera_tails) && std::abs(v.lateral) < kLaneClearance) continue;
    const double target = v.lateral < 0 ? -kCurbLateral : kCurbLateral;
    const double step = std::clamp(target - v.lateral, -kPullOverRate * dt, kPullOverRate * dt);
    if (step == 0) continue;
    const double proposed = v.lateral + step;
    bool blocked = false;
    if (std::abs(v.arc - camera_.arc) < config_.d_follow && !SharesPath(v.lateral, 0.0) &&
        SharesPath(proposed, 0.0)) {
      blocked = true;
    }
    for (const AuxVehicle& o : vehicles_) {
      if (&o == &v || !o.alive) continue;
      if (std::abs(v.arc - o.arc) < config_.d_follow && !SharesPath(v.lateral, o.lateral) &&
          SharesPath(proposed, o.lateral)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) v.lateral = proposed;
  }

  double cam_s = 0;
  const TileInstance* cam_tile = window.TileContaining(camera_.arc, &cam_s);
  window.Advance(cam_tile ? cam_tile->index : 0);

  // Vehicles live only while their arc lies inside the active window.
  const double front_arc = window.Active().front().arc_start;
  const double end_arc = window.TrackEndArc();
  for (AuxVehicle& v : vehicles_) {
    if (v.alive && (v.arc < front_arc || v.arc > end_arc)) v.alive = false;
  }
  vehicles_.erase(std::remove_if(vehicles_.begin(), vehicles_.end(),
                                 [](const AuxVehicle& v) { return !v.alive; }),
                  vehicles_.end());

  for (const TileInstance& t : window.Active()) {
    TileInstance* tile = window.TileAt(t.index);
    for (PlacedEntity& e : tile->entities) {
      if (e.category == ObjectCategory::Human) {
        AdvancePedestrian(e, dt, config_.pedestrian_speed, config_.bob_hz);
      }
    }
  }

  camera_.pose = window.TrackPoseAt(camera_.arc);
  for (AuxVehicle& v : vehicles_) {
    const Pose2 track = window.TrackPoseAt(v.arc);
    const Vec2 offset = Left(track) * v.lateral;
    v.pose = Pose2{track.x + offset.x, track.y + offset.y, track.heading};
  }
}

}  // namespace urbangen
