// curve_access.hpp - Internal construction helpers for Curve (not installed).

#ifndef NCDELAY_SRC_CURVE_ACCESS_HPP
#define NCDELAY_SRC_CURVE_ACCESS_HPP

#include "ncdelay/curve.hpp"

#include <algorithm>
#include <cmath>

namespace ncdelay {

struct CurveAccess {
    static Curve blank() { return Curve(); }

    static double& origin(Curve& c) { return c.origin_; }
    static std::vector<Segment>& segments(Curve& c) { return c.segments_; }
    static CurveKind& kind(Curve& c) { return c.kind_; }
    static double& horizon(Curve& c) { return c.horizon_; }
    static double& impulse_delay(Curve& c) { return c.impulse_delay_; }
    static std::optional<Periodicity>& periodicity(Curve& c) { return c.periodicity_; }
    static std::shared_ptr<const Curve>& upper(Curve& c) { return c.upper_; }
    static std::shared_ptr<const std::pair<Curve, Curve>>& min_operands(Curve& c)
    {
        return c.min_operands_;
    }
    static const std::shared_ptr<const std::pair<Curve, Curve>>& min_operands(const Curve& c)
    {
        return c.min_operands_;
    }
    static std::optional<AffineParams>& affine(Curve& c) { return c.affine_; }
    static std::optional<StaircaseParams>& staircase(Curve& c) { return c.staircase_; }
    static std::optional<std::pair<AffineParams, StaircaseParams>>& generators(Curve& c)
    {
        return c.generators_;
    }

    static double eval_representation(const Curve& c, double t) { return c.eval_representation(t); }
    static double right_limit_representation(const Curve& c, double t)
    {
        return c.right_limit_representation(t);
    }
    static void validate(const Curve& c) { c.validate(); }
};

namespace detail {

inline bool values_close(double a, double b)
{
    if (a == b) {
        return true;
    }
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= kValueRelTolerance * scale;
}

inline bool times_close(double a, double b)
{
    return std::abs(a - b) <= kTimeTolerance;
}

inline bool slopes_close(double a, double b)
{
    return values_close(a, b);
}

// Drops empty segments and fuses neighbours that continue the same line.
std::vector<Segment> normalize_segments(std::vector<Segment> segments);

} // namespace detail

} // namespace ncdelay

#endif
