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
#include "hsim/mobility.hpp"

#include <algorithm>
#include <cassert>

namespace hsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 disc_point(Vec2 center, double radius, Rng& rng) {
  double r = radius * std::sqrt(rng.uniform());
  double a = rng.uniform(0.0, 2.0 * kPi);
  return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

}  // namespace

MobilityDriver::MobilityDriver(const MobilityConfig& cfg, int n_nodes) : cfg_(cfg), n_(n_nodes) {
  assert(n_ > 0);
  assert(cfg_.speed_min > 0.0 && cfg_.speed_max >= cfg_.speed_min);
}

Vec2 MobilityDriver::clamp_to_area(Vec2 p) const {
  return {std::clamp(p.x, 0.0, cfg_.area_w), std::clamp(p.y, 0.0, cfg_.area_h)};
}

Vec2 MobilityDriver::roam_point(Rng& rng) const {
  double w = cfg_.group_area_w > 0.0 ? cfg_.group_area_w : cfg_.area_w;
  double h = cfg_.group_area_h > 0.0 ? cfg_.group_area_h : cfg_.area_h;
  double x0 = (cfg_.area_w - w) / 2.0;
  double y0 = (cfg_.area_h - h) / 2.0;
  return {rng.uniform(x0, x0 + w), rng.uniform(y0, y0 + h)};
}

void MobilityDriver::init(std::vector<Vec2>& pos, Rng& rng) {
  pos.resize(static_cast<std::size_t>(n_));
  Vec2 center{cfg_.area_w / 2.0, cfg_.area_h / 2.0};

  if (cfg_.model == MobilityModel::random_waypoint) {
    legs_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      pos[i] = clamp_to_area(disc_point(center, cfg_.deploy_radius, rng));
      legs_[i].dest = {rng.uniform(0.0, cfg_.area_w), rng.uniform(0.0, cfg_.area_h)};
      legs_[i].speed = rng.uniform(cfg_.speed_min, cfg_.speed_max);
    }
    return;
  }

  assert(cfg_.group_count > 0);
  legs_.resize(static_cast<std::size_t>(cfg_.group_count));
  ref_pos_.resize(static_cast<std::size_t>(cfg_.group_count));
  group_of_.resize(static_cast<std::size_t>(n_));
  for (int g = 0; g < cfg_.group_count; ++g) {
    ref_pos_[g] = clamp_to_area(disc_point(center, cfg_.deploy_radius, rng));
    legs_[g].dest = roam_point(rng);
    legs_[g].speed = rng.uniform(cfg_.speed_min, cfg_.speed_max);
  }
  for (int i = 0; i < n_; ++i) {
    group_of_[i] = i % cfg_.group_count;
    pos[i] = clamp_to_area(disc_point(ref_pos_[group_of_[i]], cfg_.group_radius, rng));
  }
}

void MobilityDriver::advance(Vec2& p, Leg& leg, TimeMs now, TimeMs dt, Rng& rng) {
  if (now < leg.pause_until) return;
  double step_len = leg.speed * to_seconds(dt);
  double d = dist(p, leg.dest);
  if (d <= step_len) {
    p = leg.dest;
    leg.dest = cfg_.model == MobilityModel::random_waypoint
                   ? Vec2{rng.uniform(0.0, cfg_.area_w), rng.uniform(0.0, cfg_.area_h)}
                   : roam_point(rng);
    leg.speed = rng.uniform(cfg_.speed_min, cfg_.speed_max);
    leg.pause_until = now + cfg_.pause_time;
  } else {
    p.x += (leg.dest.x - p.x) / d * step_len;
    p.y += (leg.dest.y - p.y) / d * step_len;
  }
}

void MobilityDriver::step(std::vector<Vec2>& pos, TimeMs now, TimeMs dt, Rng& rng) {
  assert(!legs_.empty());
  if (cfg_.model == MobilityModel::random_waypoint) {
    for (int i = 0; i < n_; ++i) advance(pos[i], legs_[i], now, dt, rng);
    return;
  }
  for (std::size_t g = 0; g < ref_pos_.size(); ++g) advance(ref_pos_[g], legs_[g], now, dt, rng);
  for (int i = 0; i < n_; ++i) {
    pos[i] = clamp_to_area(disc_point(ref_pos_[group_of_[i]], cfg_.group_radius, rng));
  }
}

}  // namespace hsim
