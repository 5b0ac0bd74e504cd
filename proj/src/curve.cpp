// curve.cpp - Curve construction, evaluation and CSV export.

#include "ncdelay/curve.hpp"

#include "curve_access.hpp"
#include "ncdelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace ncdelay {

std::string_view to_string(CurveKind kind)
{
    switch (kind) {
    case CurveKind::affine: return "affine";
    case CurveKind::concave: return "concave_min_of_affines";
    case CurveKind::staircase: return "staircase";
    case CurveKind::rate_latency: return "rate_latency";
    case CurveKind::impulse: return "impulse";
    case CurveKind::composite: return "composite";
    }
    return "unknown";
}

std::string_view to_string(ErrorCategory category)
{
    switch (category) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::unsupported: return "unsupported";
    case ErrorCategory::unbounded_delay: return "unbounded_delay";
    case ErrorCategory::precondition: return "precondition";
    case ErrorCategory::infeasible_source: return "infeasible_source";
    case ErrorCategory::horizon_exceeded: return "horizon_exceeded";
    case ErrorCategory::estimation_failed: return "estimation_failed";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

namespace detail {

std::vector<Segment> normalize_segments(std::vector<Segment> segments)
{
    std::vector<Segment> out;
    out.reserve(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        // A segment shorter than the time tolerance is dominated by its successor.
        if (i + 1 < segments.size() && segments[i + 1].t - s.t <= kTimeTolerance) {
            continue;
        }
        if (!out.empty()) {
            const Segment& prev = out.back();
            const double end_value = prev.value + prev.slope * (s.t - prev.t);
            if (slopes_close(prev.slope, s.slope) && values_close(end_value, s.value)) {
                continue;
            }
        }
        out.push_back(s);
    }
    return out;
}

} // namespace detail

namespace {

void require_finite_nonnegative(double x, const char* what)
{
    if (!std::isfinite(x) || x < 0.0) {
        std::ostringstream msg;
        msg << what << " must be finite and >= 0, got " << x;
        throw DomainError(msg.str());
    }
}

} // namespace

Curve Curve::affine(double rate, double burst)
{
    require_finite_nonnegative(rate, "affine rate");
    require_finite_nonnegative(burst, "affine burst");
    Curve c;
    c.origin_ = 0.0;
    c.segments_ = {{0.0, burst, rate}};
    c.kind_ = CurveKind::affine;
    c.affine_ = AffineParams{rate, burst};
    return c;
}

Curve Curve::rate_latency(double rate, double latency)
{
    require_finite_nonnegative(rate, "service rate");
    require_finite_nonnegative(latency, "latency");
    Curve c;
    c.origin_ = 0.0;
    if (latency > 0.0) {
        c.segments_ = {{0.0, 0.0, 0.0}, {latency, 0.0, rate}};
    } else {
        c.segments_ = {{0.0, 0.0, rate}};
    }
    c.kind_ = CurveKind::rate_latency;
    return c;
}

Curve Curve::staircase(double burst, double period, int periods)
{
    require_finite_nonnegative(burst, "staircase burst");
    if (!std::isfinite(period) || period <= 0.0) {
        throw DomainError("staircase period must be finite and > 0");
    }
    if (periods < 2) {
        throw DomainError("staircase must be unrolled for at least 2 periods");
    }
    Curve c;
    c.origin_ = 0.0;
    c.segments_.reserve(static_cast<std::size_t>(periods) + 1);
    for (int k = 0; k < periods; ++k) {
        c.segments_.push_back({k * period, (k + 1) * burst, 0.0});
    }
    // Lower bound b*t/T of the continuation, touching the stairs at multiples of T.
    c.segments_.push_back({periods * period, periods * burst, burst / period});
    c.kind_ = CurveKind::staircase;
    c.horizon_ = periods * period;
    c.periodicity_ = Periodicity{0.0, period, burst};
    c.upper_ = std::make_shared<const Curve>(Curve::affine(burst / period, burst));
    c.staircase_ = StaircaseParams{burst, period};
    return c;
}

Curve Curve::impulse(double delay)
{
    require_finite_nonnegative(delay, "impulse delay");
    Curve c;
    c.origin_ = 0.0;
    c.segments_ = {{0.0, 0.0, 0.0}};
    c.kind_ = CurveKind::impulse;
    c.impulse_delay_ = delay;
    return c;
}

Curve Curve::from_segments(double origin, std::vector<Segment> segments, CurveKind kind)
{
    if (kind == CurveKind::impulse || kind == CurveKind::staircase) {
        throw DomainError("from_segments cannot build " + std::string(to_string(kind)) + " curves");
    }
    Curve c;
    c.origin_ = origin;
    c.segments_ = std::move(segments);
    c.kind_ = kind;
    c.validate();
    c.segments_ = detail::normalize_segments(std::move(c.segments_));
    return c;
}

void Curve::validate() const
{
    require_finite_nonnegative(origin_, "curve origin value");
    if (segments_.empty()) {
        throw DomainError("curve needs at least one segment");
    }
    if (segments_.front().t != 0.0) {
        throw DomainError("first segment must start at t = 0");
    }
    double prev_end = origin_;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        require_finite_nonnegative(s.value, "segment value");
        require_finite_nonnegative(s.slope, "segment slope");
        if (!std::isfinite(s.t)) {
            throw DomainError("segment start must be finite");
        }
        if (i > 0) {
            const Segment& prev = segments_[i - 1];
            if (s.t <= prev.t) {
                std::ostringstream msg;
                msg << "segment times must be strictly increasing (segment " << i << ")";
                throw DomainError(msg.str());
            }
            prev_end = prev.value + prev.slope * (s.t - prev.t);
        }
        if (s.value < prev_end && !detail::values_close(s.value, prev_end)) {
            std::ostringstream msg;
            msg << "curve decreases at t = " << s.t << " (" << prev_end << " -> " << s.value << ")";
            throw DomainError(msg.str());
        }
    }
}

double Curve::eval_representation(double t) const
{
    if (t == 0.0) {
        return origin_;
    }
    // Last segment whose start lies strictly before t.
    auto it = std::partition_point(segments_.begin(), segments_.end(),
                                   [t](const Segment& s) { return s.t < t; });
    const Segment& s = *(it - 1);
    return s.value + s.slope * (t - s.t);
}

double Curve::right_limit_representation(double t) const
{
    auto it = std::partition_point(segments_.begin(), segments_.end(),
                                   [t](const Segment& s) { return s.t <= t; });
    const Segment& s = *(it - 1);
    return s.value + s.slope * (t - s.t);
}

double Curve::eval(double t) const
{
    if (!(t >= 0.0)) {
        std::ostringstream msg;
        msg << "curve evaluated at negative time " << t;
        throw DomainError(msg.str());
    }
    if (kind_ == CurveKind::impulse) {
        return t > impulse_delay_ ? kInfinity : 0.0;
    }
    if (t <= horizon_) {
        return eval_representation(t);
    }
    if (periodicity_) {
        const Periodicity& p = *periodicity_;
        const double m = std::ceil((t - horizon_) / p.period);
        return eval_representation(t - m * p.period) + m * p.increment;
    }
    if (min_operands_) {
        return std::min(min_operands_->first.eval(t), min_operands_->second.eval(t));
    }
    throw HorizonExceeded("curve has no exact continuation past its horizon");
}

double Curve::right_limit(double t) const
{
    if (!(t >= 0.0)) {
        throw DomainError("right limit requested at negative time");
    }
    if (kind_ == CurveKind::impulse) {
        return t >= impulse_delay_ ? kInfinity : 0.0;
    }
    if (t < horizon_) {
        return right_limit_representation(t);
    }
    if (periodicity_) {
        const Periodicity& p = *periodicity_;
        const double m = std::floor((t - horizon_) / p.period) + 1.0;
        return right_limit_representation(t - m * p.period) + m * p.increment;
    }
    if (min_operands_) {
        return std::min(min_operands_->first.right_limit(t), min_operands_->second.right_limit(t));
    }
    throw HorizonExceeded("curve has no exact continuation past its horizon");
}

double Curve::long_run_rate() const
{
    if (kind_ == CurveKind::impulse) {
        return kInfinity;
    }
    if (periodicity_) {
        return periodicity_->increment / periodicity_->period;
    }
    if (min_operands_) {
        return std::min(min_operands_->first.long_run_rate(), min_operands_->second.long_run_rate());
    }
    return tail_rate();
}

bool Curve::is_concave() const
{
    if (kind_ == CurveKind::impulse || origin_ != 0.0 || !is_exact()) {
        return false;
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        const Segment& prev = segments_[i - 1];
        const Segment& s = segments_[i];
        const double end_value = prev.value + prev.slope * (s.t - prev.t);
        if (!detail::values_close(end_value, s.value)) {
            return false;
        }
        if (s.slope > prev.slope && !detail::slopes_close(s.slope, prev.slope)) {
            return false;
        }
    }
    return true;
}

bool Curve::same_shape(const Curve& other) const
{
    if (kind_ == CurveKind::impulse || other.kind_ == CurveKind::impulse) {
        return kind_ == other.kind_ && impulse_delay_ == other.impulse_delay_;
    }
    if (!detail::values_close(origin_, other.origin_) || segments_.size() != other.segments_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& a = segments_[i];
        const Segment& b = other.segments_[i];
        if (!detail::times_close(a.t, b.t) && !detail::values_close(a.t, b.t)) {
            return false;
        }
        if (!detail::values_close(a.value, b.value) || !detail::slopes_close(a.slope, b.slope)) {
            return false;
        }
    }
    return horizon_ == other.horizon_;
}

void export_csv(const Curve& c, std::ostream& out)
{
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    out << "t_seconds,value_bits,slope_bps\n";
    if (c.is_impulse()) {
        out << "# impulse delay_s=" << c.impulse_delay() << "\n";
    }
    if (!c.is_exact()) {
        out << "# exact_until_s=" << c.horizon() << "\n";
    }
    const auto& segs = c.segments();
    if (c.origin() != segs.front().value) {
        out << 0.0 << ',' << c.origin() << ',' << 0.0 << '\n';
    }
    for (const Segment& s : segs) {
        out << s.t << ',' << s.value << ',' << s.slope << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

} // namespace ncdelay
