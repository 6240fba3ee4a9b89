/**
 * Copyright 2026 the harvestsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <vector>

#include "hsim/rng.hpp"
#include "hsim/time.hpp"

namespace hsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class MobilityModel { random_waypoint, nomadic };

/// Geometry and movement parameters. Speeds are m/s, distances meters.
struct MobilityConfig {
  MobilityModel model = MobilityModel::random_waypoint;
  double area_w = 1000.0;
  double area_h = 2000.0;
  double speed_min = 0.83;
  double speed_max = 1.83;
  TimeMs pause_time = 0;
  /// Nodes start inside this disc around the area center, so a run opens
  /// from a staging deployment instead of a uniform scatter.
  double deploy_radius = 300.0;
  // Nomadic model only.
  int group_count = 5;
  double group_radius = 100.0;
  /// Roam box for group reference points, centered in the area;
  /// zero means the whole area.
  double group_area_w = 0.0;
  double group_area_h = 0.0;
};

/// Advances node positions one tick at a time. Random waypoint moves
/// every node independently across the whole area; the nomadic model
/// moves group reference points by random waypoint inside the roam box
/// and scatters each member uniformly within group_radius of its
/// reference every tick.
class MobilityDriver {
 public:
  MobilityDriver(const MobilityConfig& cfg, int n_nodes);

  /// Places initial positions. Must run before the first step.
  void init(std::vector<Vec2>& pos, Rng& rng);

  void step(std::vector<Vec2>& pos, TimeMs now, TimeMs dt, Rng& rng);

  int group_of(int node) const { return group_of_.empty() ? -1 : group_of_[node]; }

 private:
  struct Leg {
    Vec2 dest;
    double speed = 0.0;
    TimeMs pause_until = 0;
  };

  void advance(Vec2& p, Leg& leg, TimeMs now, TimeMs dt, Rng& rng);
  Vec2 roam_point(Rng& rng) const;
  Vec2 clamp_to_area(Vec2 p) const;

  MobilityConfig cfg_;
  int n_;
  std::vector<Leg> legs_;       // per node, or per group reference
  std::vector<Vec2> ref_pos_;   // nomadic reference points
  std::vector<int> group_of_;
};

}  // namespace hsim
