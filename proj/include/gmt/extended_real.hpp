#pragma once

#include <string>

#include "gmt/errors.hpp"

namespace gmt {

/// Value in [0, +inf] with an explicit infinity marker. Used for
/// measure masses so that the 0 * inf = 0 convention stays a deliberate
/// rule rather than IEEE arithmetic fallout.
class ExtendedReal {
public:
    ExtendedReal() = default;

    ExtendedReal(double value) : value_(value) {  // NOLINT(google-explicit-constructor)
        if (!(value >= 0.0))
            throw InvariantError("extended real must be nonnegative");
    }

    static ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        r.value_ = 0.0;
        return r;
    }

    bool is_infinite() const noexcept { return infinite_; }

    /// Finite value; invalid to call on the infinity marker.
    double value() const {
        if (infinite_) throw InvariantError("value() on infinite extended real");
        return value_;
    }

    ExtendedReal operator+(const ExtendedReal& o) const {
        if (infinite_ || o.infinite_) return infinity();
        return ExtendedReal(value_ + o.value_);
    }

    ExtendedReal& operator+=(const ExtendedReal& o) { return *this = *this + o; }

    /// Scale by a nonnegative factor; 0 * inf = 0 by convention.
    ExtendedReal scaled(double factor) const {
        if (!(factor >= 0.0))
            throw InvariantError("scale factor must be nonnegative");
        if (factor == 0.0) return ExtendedReal(0.0);
        if (infinite_) return infinity();
        return ExtendedReal(value_ * factor);
    }

    bool operator==(const ExtendedReal& o) const noexcept {
        if (infinite_ != o.infinite_) return false;
        return infinite_ || value_ == o.value_;
    }
    bool operator!=(const ExtendedReal& o) const noexcept { return !(*this == o); }

    bool operator<(const ExtendedReal& o) const noexcept {
        if (infinite_) return false;
        if (o.infinite_) return true;
        return value_ < o.value_;
    }
    bool operator<=(const ExtendedReal& o) const noexcept { return !(o < *this); }

    static ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) {
        return a < b ? b : a;
    }

    std::string str() const {
        if (infinite_) return "inf";
        return std::to_string(value_);
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

} // namespace gmt
