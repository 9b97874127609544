#pragma once

#include <cmath>

namespace urbangen {

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return Vec2{a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return Vec2{a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return Vec2{a.x * s, a.y * s}; }
inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Length(Vec2 a) { return std::sqrt(Dot(a, a)); }

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return Vec3{a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return Vec3{a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(Vec3 a, double s) { return Vec3{a.x * s, a.y * s, a.z * s}; }
inline double Dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 Cross(Vec3 a, Vec3 b)
{
  return Vec3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double Length(Vec3 a) { return std::sqrt(Dot(a, a)); }
inline Vec3 Normalized(Vec3 a)
{
  const double len = Length(a);
  return len > 0 ? a * (1.0 / len) : Vec3{0, 0, 0};
}

// Rigid 2-D pose: translation plus heading (radians, counter-clockwise, 0 = +x).
struct Pose2 {
  double x = 0;
  double y = 0;
  double heading = 0;
};

// Applies pose a, then pose b expressed in a's local frame. Composition is
// associative; Pose2{} is the identity.
inline Pose2 Compose(const Pose2& a, const Pose2& b)
{
  const double c = std::cos(a.heading);
  const double s = std::sin(a.heading);
  return Pose2{a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.heading + b.heading};
}

inline Pose2 Inverse(const Pose2& p)
{
  const double c = std::cos(p.heading);
  const double s = std::sin(p.heading);
  return Pose2{-(c * p.x + s * p.y), -(-s * p.x + c * p.y), -p.heading};
}

// Maps a point from the pose's local frame to the parent frame.
inline Vec2 Apply(const Pose2& p, Vec2 local)
{
  const double c = std::cos(p.heading);
  const double s = std::sin(p.heading);
  return Vec2{p.x + c * local.x - s * local.y, p.y + s * local.x + c * local.y};
}

inline Vec2 Forward(const Pose2& p) { return Vec2{std::cos(p.heading), std::sin(p.heading)}; }

// Left-hand normal of the heading; lateral offsets use +left.
inline Vec2 Left(const Pose2& p) { return Vec2{-std::sin(p.heading), std::cos(p.heading)}; }

// Axis-aligned rectangle, half-open is not needed here: both corners inclusive.
struct Rect {
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  double Width() const { return x1 - x0; }
  double Height() const { return y1 - y0; }
  double Area() const { return Width() * Height(); }
  bool Contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

}  // namespace urbangen
