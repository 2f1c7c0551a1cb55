#pragma once

#include <limits>
#include <stdexcept>

namespace ssopt {

/// Extended nonnegative real with an explicit infinity variant.
///
/// Used for the per-unit setup rate of infinitesimal orders, which is
/// infinite whenever the setup cost does not vanish near zero. Keeping the
/// infinity explicit (rather than a sentinel double) lets downstream cost
/// formulas decide how to propagate it.
class ExtReal {
public:
    static ExtReal finite(double v) {
        if (!(v >= 0.0)) throw std::invalid_argument("ExtReal: finite value must be >= 0");
        return ExtReal(false, v);
    }
    static ExtReal infinity() { return ExtReal(true, 0.0); }

    bool is_infinite() const { return infinite_; }

    /// Finite value; throws when infinite.
    double value() const {
        if (infinite_) throw std::logic_error("ExtReal: value() on infinity");
        return value_;
    }

    /// IEEE view: +inf when infinite. Safe for cost arithmetic where
    /// infinity should contaminate the result.
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend bool operator==(const ExtReal& a, const ExtReal& b) {
        if (a.infinite_ != b.infinite_) return false;
        return a.infinite_ || a.value_ == b.value_;
    }

private:
    ExtReal(bool inf, double v) : infinite_(inf), value_(v) {}
    bool infinite_;
    double value_;
};

} // namespace ssopt
