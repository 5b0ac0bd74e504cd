// curve.hpp - Ultimately-affine piecewise-linear curves and min-plus operations.
//
// A Curve is a non-decreasing function on t >= 0 given by its value at the
// origin plus a list of segments. Segment k covers the half-open interval
// (t_k, t_{k+1}] and is linear there, starting from its right limit at t_k.
// The last segment extends to infinity (the affine tail). Curves are
// left-continuous: at a jump the function takes the lower (left) value.
//
// Curves built from staircases are only unrolled up to a finite horizon.
// Beyond the horizon the stored segments form a lower bound of the true curve;
// eval() still answers exactly (through periodicity or the operands that built
// the curve), and horizontal_deviation() certifies or refuses results that
// could depend on the region past the horizon.
//
// Units: seconds on the time axis, bits on the value axis.

#ifndef NCDELAY_CURVE_HPP
#define NCDELAY_CURVE_HPP

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace ncdelay {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Breakpoint merging tolerances.
inline constexpr double kTimeTolerance = 1e-15;
inline constexpr double kValueRelTolerance = 1e-12;

// Number of periods a staircase is unrolled before its lower-bound tail.
inline constexpr int kDefaultStaircasePeriods = 16;

enum class CurveKind { affine, concave, staircase, rate_latency, impulse, composite };

std::string_view to_string(CurveKind kind);

struct Segment {
    double t;      // start of the segment, seconds
    double value;  // right limit at t, bits
    double slope;  // bits/second
};

// f(t + period) = f(t) + increment for every t > start.
struct Periodicity {
    double start;
    double period;
    double increment;
};

struct AffineParams {
    double rate;
    double burst;
};

struct StaircaseParams {
    double burst;
    double period;
};

class Curve {
public:
    // t -> rate * t + burst for t > 0, and 0 at t = 0.
    static Curve affine(double rate, double burst);
    // t -> rate * max(0, t - latency).
    static Curve rate_latency(double rate, double latency);
    // t -> burst * ceil(t / period), unrolled for `periods` periods.
    static Curve staircase(double burst, double period, int periods = kDefaultStaircasePeriods);
    // delta_T: 0 on [0, T], +infinity after. impulse(0) is the identity of convolution.
    static Curve impulse(double delay);
    // Arbitrary exact curve; validated against the Curve invariants.
    static Curve from_segments(double origin, std::vector<Segment> segments,
                               CurveKind kind = CurveKind::composite);

    double eval(double t) const;
    // Limit of the function from the right at t (the top of a jump).
    double right_limit(double t) const;

    double origin() const { return origin_; }
    const std::vector<Segment>& segments() const { return segments_; }
    CurveKind kind() const { return kind_; }

    double tail_start() const { return segments_.back().t; }
    double tail_rate() const { return segments_.back().slope; }
    // Long-run growth rate of the true curve.
    double long_run_rate() const;

    // Stored segments equal the true curve on [0, horizon()].
    double horizon() const { return horizon_; }
    bool is_exact() const { return horizon_ == kInfinity; }
    const std::optional<Periodicity>& periodicity() const { return periodicity_; }
    // Exact curve bounding the true curve from above; null when is_exact().
    const std::shared_ptr<const Curve>& upper_envelope() const { return upper_; }

    bool is_impulse() const { return kind_ == CurveKind::impulse; }
    double impulse_delay() const { return impulse_delay_; }

    // Zero at the origin, continuous on t > 0, non-increasing slopes.
    bool is_concave() const;

    const std::optional<AffineParams>& affine_params() const { return affine_; }
    const std::optional<StaircaseParams>& staircase_params() const { return staircase_; }
    // Set on min(affine, staircase) composites, used by the closure.
    const std::optional<std::pair<AffineParams, StaircaseParams>>& generators() const
    {
        return generators_;
    }

    // Same function on the stored representation, within the merge tolerances.
    bool same_shape(const Curve& other) const;

private:
    friend struct CurveAccess;

    Curve() = default;

    double eval_representation(double t) const;
    double right_limit_representation(double t) const;
    void validate() const;

    double origin_ = 0.0;
    std::vector<Segment> segments_;
    CurveKind kind_ = CurveKind::composite;
    double horizon_ = kInfinity;
    double impulse_delay_ = 0.0;
    std::optional<Periodicity> periodicity_;
    std::shared_ptr<const Curve> upper_;
    // Set when this curve is the minimum of two curves that are not both exact.
    std::shared_ptr<const std::pair<Curve, Curve>> min_operands_;
    std::optional<AffineParams> affine_;
    std::optional<StaircaseParams> staircase_;
    std::optional<std::pair<AffineParams, StaircaseParams>> generators_;
};

struct HorizontalDeviation {
    double value;      // seconds
    double witness_t;  // time achieving the supremum
};

// Pointwise minimum.
Curve minimum(const Curve& a, const Curve& b);

// Min-plus convolution. Supported pairs: concave with concave (both zero at
// the origin), affine with staircase, and anything with an impulse.
Curve convolve(const Curve& a, const Curve& b);

// Sub-additive closure for concave curves, staircases and min(affine,
// staircase) composites.
Curve subadditive_closure(const Curve& c);

// sup over t of inf{d >= 0 : beta(t + d) >= alpha(t)}.
HorizontalDeviation horizontal_deviation(const Curve& alpha, const Curve& beta);

// inf{t >= 0 : c(t) >= y}; +infinity when c never reaches y.
double pseudo_inverse(const Curve& c, double y);

// CSV with header t_seconds,value_bits,slope_bps.
void export_csv(const Curve& c, std::ostream& out);

} // namespace ncdelay

#endif
