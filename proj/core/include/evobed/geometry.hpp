#ifndef EVOBED_GEOMETRY_HPP
#define EVOBED_GEOMETRY_HPP

#include <cmath>

namespace evobed {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * (kPi / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / kPi); }

// Principal-value wrap to (-pi, pi], implemented as atan2(sin g, cos g).
inline double wrap_radians(double g) { return std::atan2(std::sin(g), std::cos(g)); }

// Principal-value wrap to (-180, 180] degrees.
inline double wrap_degrees(double g) { return rad_to_deg(wrap_radians(deg_to_rad(g))); }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

}  // namespace evobed

#endif
