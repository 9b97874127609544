#pragma once

#include <vector>

#include "urbangen/geometry.hpp"
#include "urbangen/tiles.hpp"

namespace urbangen {

struct DynamicsConfig {
  double cruise_speed = 8.0;
  double d_follow = 8.0;        // gap at which a follower matches its lead
  double acceleration = 2.0;    // relaxation toward cruise, m/s^2
  double pedestrian_speed = 1.4;
  double bob_hz = 1.8;          // walking bob cycles per second
  double min_spawn_gap = 4.5;   // spawns closer than this to a live vehicle are skipped
  double camera_height = 1.5;
  int camera_entry = 0;         // vehicle asset entry rendered for the ego car; sampled upstream
};

// The ego vehicle. It never leaves the track centerline; its pose is derived
// from the arc position every step.
struct CameraVehicle {
  double arc = 0;
  double speed = 0;
  double cruise_speed = 8.0;
  Pose2 pose;
};

struct AuxVehicle {
  int id = 0;      // unique within the sim's lifetime, in spawn order
  int entry = 0;
  double arc = 0;
  double lateral = 0;  // signed offset from the centerline; slow traffic drifts curbward
  double speed = 0;
  double cruise = 0;   // drawn once at spawn
  bool alive = true;
  Pose2 pose;
};

// Follow rule shared by the camera and auxiliary vehicles: match a lead within
// d_follow (never above own cruise), otherwise relax toward cruise at `accel`.
// The result is never negative.
double ControlledSpeed(double current, double cruise, double accel, double dt, bool lead_present,
                       double lead_gap, double lead_speed, double d_follow);

// Moves a pedestrian toward its walk target, clamping at arrival and switching
// the gait to idle there. Advances the bob phase while walking.
void AdvancePedestrian(PlacedEntity& e, double dt, double walk_speed, double bob_hz);

// Forward traffic along the window's track. A body follows only leads whose
// lateral offset overlaps its own path; slow traffic tailed by the camera
// pulls over to the curb, so the centerline clears again after a short
// follow. New speeds for one tick are computed from the previous tick's
// snapshot, so per-entity updates commute.
class TrafficSim {
 public:
  explicit TrafficSim(const DynamicsConfig& config);

  // One simulation tick: vehicle control + integration, window advance, spawn
  // ingestion, pedestrian motion, pose derivation.
  void Step(WorldWindow& window, double dt);

  // Adds spawned vehicles; spawns landing within min_spawn_gap of a live
  // vehicle (or the camera) are discarded.
  void IngestSpawns(const std::vector<VehicleSpawn>& spawns);

  const CameraVehicle& Camera() const { return camera_; }
  const std::vector<AuxVehicle>& Vehicles() const { return vehicles_; }
  const DynamicsConfig& Config() const { return config_; }

 private:
  DynamicsConfig config_;
  CameraVehicle camera_;
  std::vector<AuxVehicle> vehicles_;
  int next_vehicle_id_ = 1;
};

}  // namespace urbangen
