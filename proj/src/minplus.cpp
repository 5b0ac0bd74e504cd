// minplus.cpp - Minimum, convolution, sub-additive closure and horizontal
// deviation on ncdelay::Curve.

#include "ncdelay/curve.hpp"

#include "curve_access.hpp"
#include "ncdelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace ncdelay {

namespace {

using detail::values_close;

// Linear piece of c on an interval starting at t: right limit and slope.
struct Piece {
    double value;
    double slope;
};

Piece piece_at(const Curve& c, double t)
{
    const auto& segs = c.segments();
    auto it = std::partition_point(segs.begin(), segs.end(), [t](const Segment& s) { return s.t <= t; });
    const Segment& s = *(it - 1);
    return {s.value + s.slope * (t - s.t), s.slope};
}

std::vector<double> merged_breakpoints(const Curve& a, const Curve& b)
{
    std::vector<double> times;
    times.reserve(a.segments().size() + b.segments().size());
    for (const Segment& s : a.segments()) {
        times.push_back(s.t);
    }
    for (const Segment& s : b.segments()) {
        times.push_back(s.t);
    }
    std::sort(times.begin(), times.end());
    std::vector<double> unique;
    for (double t : times) {
        if (unique.empty() || t - unique.back() > kTimeTolerance) {
            unique.push_back(t);
        }
    }
    return unique;
}

// Minimum of the stored representations of two non-impulse curves.
Curve minimum_of_representations(const Curve& a, const Curve& b)
{
    const std::vector<double> times = merged_breakpoints(a, b);
    std::vector<Segment> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double lo = times[i];
        const double hi = i + 1 < times.size() ? times[i + 1] : kInfinity;
        const Piece pa = piece_at(a, lo);
        const Piece pb = piece_at(b, lo);
        const bool a_first = pa.value < pb.value || (values_close(pa.value, pb.value) && pa.slope <= pb.slope);
        const Piece& first = a_first ? pa : pb;
        const Piece& second = a_first ? pb : pa;
        out.push_back({lo, std::min(pa.value, pb.value), first.slope});
        if (first.slope > second.slope) {
            const double gap = second.value - first.value;
            const double cross = lo + std::max(gap, 0.0) / (first.slope - second.slope);
            if (cross > lo + kTimeTolerance && cross < hi - kTimeTolerance) {
                out.push_back({cross, first.value + first.slope * (cross - lo), second.slope});
            }
        }
    }
    Curve c = CurveAccess::blank();
    CurveAccess::origin(c) = std::min(a.origin(), b.origin());
    CurveAccess::segments(c) = detail::normalize_segments(std::move(out));
    return c;
}

// Curve that is `c` delayed by `shift` and holds c(0) on [0, shift].
Curve shifted(const Curve& c, double shift)
{
    if (shift == 0.0) {
        return c;
    }
    if (c.is_impulse()) {
        return Curve::impulse(c.impulse_delay() + shift);
    }
    std::vector<Segment> segs;
    segs.reserve(c.segments().size() + 1);
    segs.push_back({0.0, c.origin(), 0.0});
    for (const Segment& s : c.segments()) {
        segs.push_back({s.t + shift, s.value, s.slope});
    }
    Curve out = CurveAccess::blank();
    CurveAccess::origin(out) = c.origin();
    CurveAccess::segments(out) = detail::normalize_segments(std::move(segs));
    CurveAccess::kind(out) = CurveKind::composite;
    CurveAccess::horizon(out) = c.horizon() + shift;
    if (c.periodicity()) {
        Periodicity p = *c.periodicity();
        p.start += shift;
        CurveAccess::periodicity(out) = p;
    }
    if (c.upper_envelope()) {
        CurveAccess::upper(out) = std::make_shared<const Curve>(shifted(*c.upper_envelope(), shift));
    }
    if (const auto& ops = CurveAccess::min_operands(c)) {
        CurveAccess::min_operands(out) = std::make_shared<const std::pair<Curve, Curve>>(
            shifted(ops->first, shift), shifted(ops->second, shift));
    }
    return out;
}

bool is_affine(const Curve& c) { return c.kind() == CurveKind::affine && c.affine_params().has_value(); }
bool is_staircase(const Curve& c) { return c.kind() == CurveKind::staircase && c.staircase_params().has_value(); }

std::string pair_name(const Curve& a, const Curve& b)
{
    return std::string(to_string(a.kind())) + " (x) " + std::string(to_string(b.kind()));
}

// (p t + l) (x) b ceil(t / T): on (kT, (k+1)T] the result is kb + min(l + p (t - kT), b).
Curve convolve_affine_staircase(const AffineParams& affine, const StaircaseParams& stairs, int periods)
{
    const double p = affine.rate;
    const double l = affine.burst;
    const double b = stairs.burst;
    const double T = stairs.period;
    if (p * T < b && !values_close(p * T, b)) {
        std::ostringstream msg;
        msg << "affine rate " << p << " is below the staircase rate " << b / T
            << "; the convolution is not periodic";
        throw DomainError(msg.str());
    }
    std::vector<Segment> segs;
    for (int k = 0; k < periods; ++k) {
        const double start = k * T;
        const double base = k * b;
        if (l >= b || p == kInfinity) {
            segs.push_back({start, base + b, 0.0});
            continue;
        }
        segs.push_back({start, base + l, p});
        const double reach = start + (b - l) / p;
        if (reach < start + T - kTimeTolerance) {
            segs.push_back({reach, base + b, 0.0});
        }
    }
    // Lower bound of the continuation, equal to the true curve at multiples of T.
    segs.push_back({periods * T, periods * b, b / T});

    Curve c = CurveAccess::blank();
    CurveAccess::origin(c) = 0.0;
    CurveAccess::segments(c) = detail::normalize_segments(std::move(segs));
    CurveAccess::kind(c) = CurveKind::composite;
    CurveAccess::horizon(c) = periods * T;
    CurveAccess::periodicity(c) = Periodicity{0.0, T, b};
    CurveAccess::upper(c) = std::make_shared<const Curve>(Curve::affine(b / T, b));
    return c;
}

int unrolled_periods(const Curve& staircase)
{
    const double periods = staircase.horizon() / staircase.staircase_params()->period;
    return static_cast<int>(std::lround(periods));
}

// Which pseudo-inverse: inf{t : c(t) >= y} or inf{t : c(t) > y}.
enum class Inverse { lower, upper };

double inverse(const Curve& c, double y, Inverse which)
{
    auto reaches = [which](double v, double y) { return which == Inverse::lower ? v >= y : v > y; };
    if (c.is_impulse()) {
        return reaches(0.0, y) ? 0.0 : c.impulse_delay();
    }
    if (reaches(c.origin(), y)) {
        return 0.0;
    }
    const auto& segs = c.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& s = segs[i];
        if (reaches(s.value, y)) {
            return s.t;
        }
        if (s.slope <= 0.0) {
            continue;
        }
        const double t = s.t + (y - s.value) / s.slope;
        const bool last = i + 1 == segs.size();
        if (last || t <= segs[i + 1].t) {
            return t;
        }
    }
    return kInfinity;
}

struct Scan {
    double value = -kInfinity;
    double witness = 0.0;

    void offer(double dev, double t)
    {
        if (dev > value) {
            value = dev;
            witness = t;
        }
    }
};

// Breakpoint levels of beta: right limits and left values at every breakpoint.
std::vector<double> levels_of(const Curve& beta)
{
    std::vector<double> levels;
    if (beta.is_impulse()) {
        return levels;
    }
    levels.push_back(beta.origin());
    const auto& segs = beta.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        levels.push_back(segs[i].value);
        if (i + 1 < segs.size()) {
            levels.push_back(segs[i].value + segs[i].slope * (segs[i + 1].t - segs[i].t));
        }
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(), values_close), levels.end());
    return levels;
}

double snap(double y, const std::vector<double>& levels)
{
    auto it = std::lower_bound(levels.begin(), levels.end(), y);
    if (it != levels.end() && values_close(*it, y)) {
        return *it;
    }
    if (it != levels.begin() && values_close(*(it - 1), y)) {
        return *(it - 1);
    }
    return y;
}

double checked_inverse(const Curve& beta, double y, Inverse which)
{
    const double t = inverse(beta, y, which);
    if (t == kInfinity) {
        std::ostringstream msg;
        msg << "service curve never reaches " << y << " bits; delay is unbounded";
        throw UnboundedDelay(msg.str());
    }
    return t;
}

// Sup of the deviation over the stored representation of alpha on [from, to].
Scan scan_deviation(const Curve& alpha, const Curve& beta, double from, double to)
{
    const std::vector<double> levels = levels_of(beta);
    Scan best;
    if (from == 0.0) {
        best.offer(checked_inverse(beta, snap(alpha.origin(), levels), Inverse::lower), 0.0);
    }
    const auto& segs = alpha.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& s = segs[i];
        double lo = s.t;
        double hi = i + 1 < segs.size() ? segs[i + 1].t : kInfinity;
        if (hi <= from || lo >= to) {
            continue;
        }
        lo = std::max(lo, from);
        hi = std::min(hi, to);
        const double y_lo = snap(s.value + s.slope * (lo - s.t), levels);
        if (s.slope == 0.0) {
            best.offer(checked_inverse(beta, y_lo, Inverse::lower) - lo, lo);
            continue;
        }
        best.offer(checked_inverse(beta, y_lo, Inverse::upper) - lo, lo);
        const double y_hi = hi == kInfinity ? kInfinity : s.value + s.slope * (hi - s.t);
        if (hi != kInfinity) {
            best.offer(checked_inverse(beta, snap(y_hi, levels), Inverse::lower) - hi, hi);
        }
        for (double level : levels) {
            if (level <= y_lo || level >= y_hi) {
                continue;
            }
            const double t = lo + (level - y_lo) / s.slope;
            best.offer(checked_inverse(beta, level, Inverse::upper) - t, t);
        }
    }
    return best;
}

bool rates_exceed(double arrival, double service)
{
    return arrival > service && !values_close(arrival, service);
}

} // namespace

double pseudo_inverse(const Curve& c, double y)
{
    return inverse(c, y, Inverse::lower);
}

Curve minimum(const Curve& a, const Curve& b)
{
    if (a.is_impulse() && b.is_impulse()) {
        return a.impulse_delay() <= b.impulse_delay() ? a : b;
    }
    if (a.is_impulse() || b.is_impulse()) {
        const Curve& impulse = a.is_impulse() ? a : b;
        const Curve& other = a.is_impulse() ? b : a;
        // 0 on [0, T], other(t) afterwards.
        const double T = impulse.impulse_delay();
        std::vector<Segment> segs{{0.0, 0.0, 0.0}};
        const Piece at = piece_at(other, T);
        segs.push_back({T, at.value, at.slope});
        for (const Segment& s : other.segments()) {
            if (s.t > T) {
                segs.push_back(s);
            }
        }
        Curve c = CurveAccess::blank();
        CurveAccess::origin(c) = 0.0;
        CurveAccess::segments(c) = detail::normalize_segments(std::move(segs));
        if (!other.is_exact()) {
            CurveAccess::horizon(c) = other.horizon();
            CurveAccess::min_operands(c) = std::make_shared<const std::pair<Curve, Curve>>(a, b);
            CurveAccess::upper(c) = other.upper_envelope();
        }
        return c;
    }

    Curve c = minimum_of_representations(a, b);
    if (c.same_shape(a) && a.horizon() <= b.horizon()) {
        return a;
    }
    if (c.same_shape(b) && b.horizon() <= a.horizon()) {
        return b;
    }
    CurveAccess::horizon(c) = std::min(a.horizon(), b.horizon());
    if (!c.is_exact()) {
        CurveAccess::min_operands(c) = std::make_shared<const std::pair<Curve, Curve>>(a, b);
        const Curve& upper_a = a.upper_envelope() ? *a.upper_envelope() : a;
        const Curve& upper_b = b.upper_envelope() ? *b.upper_envelope() : b;
        CurveAccess::upper(c) = std::make_shared<const Curve>(minimum(upper_a, upper_b));
    }
    if (c.is_concave()) {
        CurveAccess::kind(c) = c.segments().size() == 1 ? CurveKind::affine : CurveKind::concave;
        if (c.segments().size() == 1) {
            CurveAccess::affine(c) = AffineParams{c.segments()[0].slope, c.segments()[0].value};
        }
    } else {
        CurveAccess::kind(c) = CurveKind::composite;
    }
    if (is_affine(a) && is_staircase(b)) {
        CurveAccess::generators(c) = std::make_pair(*a.affine_params(), *b.staircase_params());
    } else if (is_staircase(a) && is_affine(b)) {
        CurveAccess::generators(c) = std::make_pair(*b.affine_params(), *a.staircase_params());
    }
    return c;
}

Curve convolve(const Curve& a, const Curve& b)
{
    if (a.is_impulse()) {
        return shifted(b, a.impulse_delay());
    }
    if (b.is_impulse()) {
        return shifted(a, b.impulse_delay());
    }
    if (is_affine(a) && is_staircase(b)) {
        return convolve_affine_staircase(*a.affine_params(), *b.staircase_params(), unrolled_periods(b));
    }
    if (is_staircase(a) && is_affine(b)) {
        return convolve_affine_staircase(*b.affine_params(), *a.staircase_params(), unrolled_periods(a));
    }
    // For concave f, g with f(0) = g(0) = 0 the convolution is the minimum.
    if (a.is_concave() && b.is_concave()) {
        return minimum(a, b);
    }
    throw UnsupportedOperation("convolve: unsupported pair " + pair_name(a, b));
}

Curve subadditive_closure(const Curve& c)
{
    if (c.is_concave() || is_staircase(c)) {
        return c;
    }
    if (c.generators()) {
        const auto& [affine, stairs] = *c.generators();
        const double periods = std::round(c.horizon() / stairs.period);
        return convolve_affine_staircase(affine, stairs, static_cast<int>(periods));
    }
    throw UnsupportedOperation("subadditive_closure: unsupported kind " + std::string(to_string(c.kind())));
}

HorizontalDeviation horizontal_deviation(const Curve& alpha, const Curve& beta)
{
    if (alpha.is_impulse()) {
        throw UnboundedDelay("arrival curve is an impulse; delay is unbounded");
    }
    if (!beta.is_exact()) {
        throw UnsupportedOperation("horizontal_deviation: service curve must be exact everywhere");
    }
    const double alpha_rate = alpha.long_run_rate();
    const double beta_rate = beta.long_run_rate();
    if (rates_exceed(alpha_rate, beta_rate)) {
        std::ostringstream msg;
        msg << "arrival long-run rate " << alpha_rate << " exceeds service rate " << beta_rate;
        throw UnboundedDelay(msg.str());
    }

    Scan best = scan_deviation(alpha, beta, 0.0, alpha.horizon());

    if (!alpha.is_exact()) {
        const double H = alpha.horizon();
        if (alpha.periodicity()) {
            // Past the horizon alpha repeats with increment inc every period P. Once
            // those values sit on beta's affine tail the deviation drops by
            // P - inc / rate per period, so the exact region already holds the sup.
            const Periodicity& p = *alpha.periodicity();
            const double tail_value = beta.is_impulse() ? 0.0 : beta.segments().back().value;
            const bool on_tail = alpha.right_limit(H - p.period) >= tail_value;
            const bool shrinking = beta_rate * p.period >= p.increment || values_close(beta_rate * p.period, p.increment);
            if (!on_tail || !shrinking) {
                throw HorizonExceeded("horizontal_deviation: periodic arrival curve not unrolled far enough");
            }
        } else if (alpha.upper_envelope()) {
            const Scan beyond = scan_deviation(*alpha.upper_envelope(), beta, H, kInfinity);
            if (beyond.value > best.value && !values_close(beyond.value, best.value)) {
                std::ostringstream msg;
                msg << "horizontal_deviation: witness may lie beyond the unrolling horizon " << H << " s";
                throw HorizonExceeded(msg.str());
            }
        } else {
            throw HorizonExceeded("horizontal_deviation: arrival curve is inexact past its horizon");
        }
    }
    return {std::max(best.value, 0.0), best.witness};
}

} // namespace ncdelay
