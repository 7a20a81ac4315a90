#include "gns/sets_1d.hpp"
#include "gns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace gns {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
    std::vector<Interval> v;
    for (auto p : pieces) {
        if (std::isnan(p.lo) || std::isnan(p.hi)) throw DomainError("IntervalUnion: NaN endpoint");
        if (p.lo > p.hi) throw DomainError("IntervalUnion: interval with lo > hi");
        if (p.lo < p.hi) v.push_back(p);
    }
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (auto p : v) {
        if (!parts_.empty() && p.lo - parts_.back().hi < kMergeGap) parts_.back().hi = std::max(parts_.back().hi, p.hi);
        else parts_.push_back(p);
    }
    if (int(parts_.size()) > kMaxComponents) throw DomainError("IntervalUnion: more than 64 components");
}

IntervalUnion IntervalUnion::full_line() { return IntervalUnion({{-kInf, kInf}}); }

IntervalUnion IntervalUnion::from(const HalfSpace1D& h) {
    if (h.side == HalfSide::right_ray) return IntervalUnion({{h.threshold, kInf}});
    return IntervalUnion({{-kInf, h.threshold}});
}

bool IntervalUnion::contains(double x) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x, [](double v, const Interval& p) { return v < p.lo; });
    if (it == parts_.begin()) return false;
    --it;
    return x <= it->hi;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n\r"), b = s.find_last_not_of(" \t\n\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double parse_endpoint(const std::string& raw) {
    std::string t = trim(raw);
    if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInf;
    if (t == "-inf" || t == "-infinity") return -kInf;
    if (t.empty()) throw ParseError("empty endpoint");
    size_t used = 0;
    double v;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParseError("bad endpoint '" + t + "'");
    }
    if (used != t.size() || std::isnan(v)) throw ParseError("bad endpoint '" + t + "'");
    return v;
}

std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

IntervalUnion IntervalUnion::parse(const std::string& text) {
    std::string t = trim(text);
    if (t.empty() || t == "{}" || t == "empty") return {};
    std::vector<Interval> v;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::string p = trim(item);
        if (p.size() < 5) throw ParseError("bad interval '" + p + "'");
        char open = p.front(), close = p.back();
        if ((open != '(' && open != '[') || (close != ')' && close != ']'))
            throw ParseError("interval must be bracketed: '" + p + "'");
        std::string body = p.substr(1, p.size() - 2);
        size_t comma = body.find(',');
        if (comma == std::string::npos || body.find(',', comma + 1) != std::string::npos)
            throw ParseError("interval needs exactly one comma: '" + p + "'");
        double lo = parse_endpoint(body.substr(0, comma));
        double hi = parse_endpoint(body.substr(comma + 1));
        if (lo > hi) throw ParseError("interval with lo > hi: '" + p + "'");
        v.push_back({lo, hi});
    }
    try {
        return IntervalUnion(std::move(v));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

std::string IntervalUnion::to_string() const {
    if (parts_.empty()) return "{}";
    std::string out;
    for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) out += ';';
        const auto& p = parts_[i];
        out += std::isinf(p.lo) ? "(" : "[";
        out += fmt(p.lo) + "," + fmt(p.hi);
        out += std::isinf(p.hi) ? ")" : "]";
    }
    return out;
}

uint64_t IntervalUnion::hash() const {
    // FNV-1a over endpoint bits
    uint64_t h = 1469598103934665603ULL;
    for (const auto& p : parts_) {
        for (double d : {p.lo, p.hi}) {
            uint64_t bits;
            std::memcpy(&bits, &d, sizeof bits);
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xff;
                h *= 1099511628211ULL;
            }
        }
    }
    return h;
}

double measure(const IntervalUnion& s) {
    double m = 0.0;
    for (const auto& p : s.intervals()) m += gaussian_mass(p.lo, p.hi);
    return m;
}

double barycenter(const IntervalUnion& s) {
    double z = 0.0;
    for (const auto& p : s.intervals()) z += density(p.lo) - density(p.hi);
    return z;
}

std::vector<BoundaryPoint> boundary(const IntervalUnion& s) {
    std::vector<BoundaryPoint> b;
    for (const auto& p : s.intervals()) {
        if (std::isfinite(p.lo)) b.push_back({p.lo, -1});
        if (std::isfinite(p.hi)) b.push_back({p.hi, +1});
    }
    return b;
}

IntervalUnion complement(const IntervalUnion& s) {
    std::vector<Interval> v;
    double cur = -kInf;
    for (const auto& p : s.intervals()) {
        if (cur < p.lo) v.push_back({cur, p.lo});
        cur = p.hi;
    }
    if (cur < kInf) v.push_back({cur, kInf});
    return IntervalUnion(std::move(v));
}

IntervalUnion set_union(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> v = a.intervals();
    v.insert(v.end(), b.intervals().begin(), b.intervals().end());
    return IntervalUnion(std::move(v));
}

IntervalUnion set_intersection(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> v;
    const auto &A = a.intervals(), &B = b.intervals();
    size_t i = 0, j = 0;
    while (i < A.size() && j < B.size()) {
        double lo = std::max(A[i].lo, B[j].lo), hi = std::min(A[i].hi, B[j].hi);
        if (lo < hi) v.push_back({lo, hi});
        if (A[i].hi < B[j].hi) ++i;
        else ++j;
    }
    return IntervalUnion(std::move(v));
}

IntervalUnion set_difference(const IntervalUnion& a, const IntervalUnion& b) {
    return set_intersection(a, complement(b));
}

HalfSpace1D halfspace_with_measure(double a, bool aligned_positive) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("halfspace_with_measure: a must lie in (0,1)");
    if (aligned_positive) return {-phi_inv(a), HalfSide::right_ray};
    return {phi_inv(a), HalfSide::left_ray};
}

double symmetric_difference_measure(const IntervalUnion& s1, const IntervalUnion& s2) {
    return measure(set_difference(s1, s2)) + measure(set_difference(s2, s1));
}

double perimeter(const IntervalUnion& s) {
    double p = 0.0;
    for (const auto& b : boundary(s)) p += density(b.location);
    return p;
}

} // namespace gns
