#pragma once

// Unit-ball and half-space primitives. The ball is B = {|w| < 1} in R^n,
// n >= 2. Every function here is pure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bhk/error.hpp"

namespace bhk {

/// Tolerance used when deciding that |x| <= 1 for a point claimed to lie
/// in the closed ball.
inline constexpr double kBallTolerance = 1e-12;

/// Below this, |x/|x| + y/|y|| is treated as zero (antipodal directions).
inline constexpr double kAntipodalTolerance = 1e-9;

class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords) : c_(std::move(coords)) {
        if (c_.size() < 2) throw DomainError("Point: dimension must be at least 2");
    }
    Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

    /// Point that must lie in the closed unit ball.
    static Point in_ball(std::vector<double> coords) {
        Point p(std::move(coords));
        if (p.norm() > 1.0 + kBallTolerance)
            throw DomainError("Point: |x| = " + std::to_string(p.norm()) + " exceeds 1");
        return p;
    }

    /// Point in R^n at distance 1 - delta from the origin along `direction`.
    static Point at_depth(double delta, std::span<const double> direction);

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    std::span<const double> coords() const { return c_; }

    double dot(const Point& o) const {
        check_dim(o);
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * o.c_[i];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this)); }

    Point operator+(const Point& o) const {
        check_dim(o);
        Point r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }
    Point operator-(const Point& o) const {
        check_dim(o);
        Point r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
        return r;
    }
    Point operator*(double s) const {
        Point r = *this;
        for (auto& v : r.c_) v *= s;
        return r;
    }
    friend Point operator*(double s, const Point& p) { return p * s; }

    /// x / |x|; throws DegenerateGeometryError for the zero vector.
    Point unit() const {
        const double r = norm();
        if (!(r > 0.0)) throw DegenerateGeometryError("Point::unit: zero vector has no direction");
        return *this * (1.0 / r);
    }

    bool operator==(const Point&) const = default;

    void check_dim(const Point& o) const {
        if (o.c_.size() != c_.size())
            throw DomainError("Point: dimension mismatch (" + std::to_string(c_.size()) + " vs " +
                              std::to_string(o.c_.size()) + ")");
    }

private:
    std::vector<double> c_;
};

inline Point Point::at_depth(double delta, std::span<const double> direction) {
    Point d(std::vector<double>(direction.begin(), direction.end()));
    return d.unit() * (1.0 - delta);
}

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }
inline double distance_sq(const Point& a, const Point& b) {
    const Point d = a - b;
    return d.dot(d);
}
inline Point midpoint(const Point& a, const Point& b) { return (a + b) * 0.5; }

/// Half-space {w : w . normal < offset}, normal a unit vector.
class HalfSpace {
public:
    HalfSpace(Point normal, double offset) : normal_(std::move(normal)), offset_(offset) {
        if (std::abs(normal_.norm() - 1.0) > 1e-12)
            throw DomainError("HalfSpace: normal must have unit length");
    }

    const Point& normal() const { return normal_; }
    double offset() const { return offset_; }
    std::size_t dim() const { return normal_.dim(); }

    /// offset - w . normal; positive exactly for interior points.
    double signed_distance(const Point& w) const { return offset_ - w.dot(normal_); }
    bool contains(const Point& w) const { return signed_distance(w) > 0.0; }

private:
    Point normal_;
    double offset_;
};

/// delta_B(x) = 1 - |x| for x in the closed ball.
inline double delta_ball(const Point& x) {
    const double r = x.norm();
    if (r > 1.0 + kBallTolerance)
        throw DomainError("delta_ball: point outside the closed unit ball (|x| = " + std::to_string(r) + ")");
    return r >= 1.0 ? 0.0 : 1.0 - r;
}

/// Half-space bounded by the plane tangent to the sphere at z/|z| and
/// containing the ball.
inline HalfSpace tangent_halfspace(const Point& z) {
    if (!(z.norm() > 0.0))
        throw DegenerateGeometryError("tangent_halfspace: z = 0 has no tangent direction");
    return HalfSpace(z.unit(), 1.0);
}

/// Half-space bounded by the plane through x/|x| and y/|y| perpendicular
/// to their bisector, on the side containing x and y.
inline HalfSpace chord_halfspace(const Point& x, const Point& y) {
    x.check_dim(y);
    if (!(x.norm() > 0.0) || !(y.norm() > 0.0))
        throw DegenerateGeometryError("chord_halfspace: x and y must be nonzero");
    const Point xh = x.unit();
    const Point yh = y.unit();
    const Point s = xh + yh;
    if (s.norm() < kAntipodalTolerance)
        throw DegenerateGeometryError("chord_halfspace: x and y point in antipodal directions");
    const Point nu = s.unit();
    // x^ . nu and y^ . nu agree analytically; average for symmetry in (x, y).
    return HalfSpace(nu, 0.5 * (xh.dot(nu) + yh.dot(nu)));
}

/// Height of the spherical cap cut off by the chord plane:
/// 1 - sqrt(1 - |x^ - y^|^2 / 4).
inline double rho_cap_height(const Point& x, const Point& y) {
    x.check_dim(y);
    if (!(x.norm() > 0.0) || !(y.norm() > 0.0))
        throw DegenerateGeometryError("rho_cap_height: x and y must be nonzero");
    const Point xh = x.unit();
    const Point yh = y.unit();
    if ((xh + yh).norm() < kAntipodalTolerance)
        throw DegenerateGeometryError("rho_cap_height: x and y point in antipodal directions");
    const double q = std::min(1.0, distance_sq(xh, yh) / 4.0);
    return q / (1.0 + std::sqrt(1.0 - q));
}

/// delta_B((x + y) / 2).
inline double midpoint_delta(const Point& x, const Point& y) {
    delta_ball(x);
    delta_ball(y);
    return delta_ball(midpoint(x, y));
}

/// Distance from the segment [x, y] to the sphere. |.| is convex, so its
/// maximum over the segment sits at an endpoint: rho = min(delta(x), delta(y)).
inline double segment_boundary_distance(const Point& x, const Point& y) {
    return std::min(delta_ball(x), delta_ball(y));
}

}  // namespace bhk
