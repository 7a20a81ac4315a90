#pragma once

#include "gns/gaussian_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gns {

inline constexpr int kMaxComponents = 64;
inline constexpr double kMergeGap = 1e-12;

struct Interval {
    double lo;
    double hi;
};

struct BoundaryPoint {
    double location;
    int normal; // +1 right endpoint, -1 left endpoint
};

enum class HalfSide { right_ray, left_ray };

struct HalfSpace1D {
    double threshold;
    HalfSide side;
};

class IntervalUnion {
public:
    IntervalUnion() = default;
    // Sorts, drops zero-length pieces, merges overlaps and gaps below 1e-12.
    explicit IntervalUnion(std::vector<Interval> pieces);

    static IntervalUnion full_line();
    static IntervalUnion from(const HalfSpace1D& h);
    static IntervalUnion parse(const std::string& text);

    const std::vector<Interval>& intervals() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    size_t size() const { return parts_.size(); }
    bool contains(double x) const;

    std::string to_string() const;
    uint64_t hash() const;

private:
    std::vector<Interval> parts_;
};

double measure(const IntervalUnion& s);
double barycenter(const IntervalUnion& s);
std::vector<BoundaryPoint> boundary(const IntervalUnion& s);
IntervalUnion complement(const IntervalUnion& s);
IntervalUnion set_union(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion set_intersection(const IntervalUnion& a, const IntervalUnion& b);
IntervalUnion set_difference(const IntervalUnion& a, const IntervalUnion& b);

HalfSpace1D halfspace_with_measure(double a, bool aligned_positive);
double symmetric_difference_measure(const IntervalUnion& s1, const IntervalUnion& s2);

// Sum of gamma_1 over boundary points.
double perimeter(const IntervalUnion& s);

} // namespace gns
