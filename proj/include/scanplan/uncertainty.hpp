#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "scanplan/errors.hpp"
#include "scanplan/geometry.hpp"
#include "scanplan/measurement.hpp"

namespace scanplan {

struct CurveKnot {
    double alpha = 0.0;  // incident angle, rad
    double u_sen = 0.0;  // sensor uncertainty, mm
};

/// Empirical incident-angle -> sensor-uncertainty relationship U_sen = f(alpha),
/// supplied as strictly monotone knots with the first knot at alpha = 0. The
/// last knot's angle is the validity limit.
class SensorUncertaintyCurve {
public:
    explicit SensorUncertaintyCurve(std::vector<CurveKnot> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) throw ConfigError("uncertainty curve needs at least 2 knots");
        if (std::abs(knots_.front().alpha) > 1e-12)
            throw ConfigError("uncertainty curve must start at alpha = 0");
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            if (!(knots_[i].alpha < knots_[i + 1].alpha))
                throw ConfigError("uncertainty curve knots must be strictly increasing in alpha");
            if (!(knots_[i].u_sen < knots_[i + 1].u_sen))
                throw ConfigError("uncertainty curve must be strictly increasing in U_sen");
        }
        if (knots_.front().u_sen <= 0.0)
            throw ConfigError("uncertainty curve values must be positive");
    }

    const std::vector<CurveKnot>& knots() const { return knots_; }
    double alpha_limit() const { return knots_.back().alpha; }
    double min_value() const { return knots_.front().u_sen; }
    double max_value() const { return knots_.back().u_sen; }

private:
    std::vector<CurveKnot> knots_;
};

/// Piecewise-linear interpolation of the curve at `alpha`.
inline double sensor_uncertainty_at(const SensorUncertaintyCurve& curve, double alpha) {
    if (alpha < 0.0) throw OutOfValidityError("incident angle must be non-negative");
    if (alpha > curve.alpha_limit())
        throw OutOfValidityError("incident angle " + std::to_string(alpha) +
                                 " rad exceeds the curve validity limit " +
                                 std::to_string(curve.alpha_limit()) + " rad");
    const auto& k = curve.knots();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        if (alpha <= k[i + 1].alpha) {
            if (alpha == k[i].alpha) return k[i].u_sen;
            if (alpha == k[i + 1].alpha) return k[i + 1].u_sen;
            const double t = (alpha - k[i].alpha) / (k[i + 1].alpha - k[i].alpha);
            return k[i].u_sen + t * (k[i + 1].u_sen - k[i].u_sen);
        }
    }
    return k.back().u_sen;
}

/// Curve value with angles beyond the validity limit saturated at the last
/// knot. Used when reporting achieved uncertainty of gate-free plans.
inline double sensor_uncertainty_saturated(const SensorUncertaintyCurve& curve, double alpha) {
    return sensor_uncertainty_at(curve, std::min(alpha, curve.alpha_limit()));
}

/// Maximum admissible sensor uncertainty for tolerance T under coverage
/// factor k and fixed material/robot terms:
///   U_sen_max = sqrt((T/(8k))^2 - U_mat^2 - U_rot^2).
inline double budget_from_tolerance(double tolerance, int k, double u_mat, double u_rot) {
    if (tolerance <= 0.0) throw ConfigError("tolerance must be positive");
    if (k < 1 || k > 3) throw ConfigError("coverage factor k must be 1, 2 or 3");
    if (u_mat < 0.0 || u_rot < 0.0) throw ConfigError("uncertainty terms must be non-negative");
    const double bound = tolerance / (8.0 * k);
    const double radicand = bound * bound - u_mat * u_mat - u_rot * u_rot;
    if (radicand <= 0.0)
        throw InfeasibleToleranceError(
            "tolerance " + std::to_string(tolerance) +
            " mm is unachievable: (T/(8k))^2 <= U_mat^2 + U_rot^2");
    return std::sqrt(radicand);
}

/// Combined standard uncertainty.
inline double combined_uncertainty(double u_sen, double u_mat, double u_rot) {
    if (u_sen < 0.0 || u_mat < 0.0 || u_rot < 0.0)
        throw ConfigError("uncertainty terms must be non-negative");
    return std::sqrt(u_sen * u_sen + u_mat * u_mat + u_rot * u_rot);
}

/// Largest incident angle whose curve value stays within `budget` (inverse
/// interpolation on the monotone curve), clamped to the validity limit.
inline double max_incident_angle(double budget, const SensorUncertaintyCurve& curve) {
    if (budget < curve.min_value())
        throw InfeasibleToleranceError("sensor-uncertainty budget " + std::to_string(budget) +
                                       " mm is below the curve minimum " +
                                       std::to_string(curve.min_value()) + " mm");
    if (budget >= curve.max_value()) return curve.alpha_limit();
    const auto& k = curve.knots();
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        if (budget <= k[i + 1].u_sen) {
            if (budget == k[i].u_sen) return k[i].alpha;
            if (budget == k[i + 1].u_sen) return k[i + 1].alpha;
            const double t = (budget - k[i].u_sen) / (k[i + 1].u_sen - k[i].u_sen);
            return k[i].alpha + t * (k[i + 1].alpha - k[i].alpha);
        }
    }
    return curve.alpha_limit();
}

/// Tolerance-derived budget of one MP: the admissible sensor uncertainty and
/// the resulting feasible incident-angle cone.
struct UncertaintyBudget {
    double tolerance = 0.0;
    int k = 2;
    double u_mat = 0.0;
    double u_rot = 0.0;
    double u_sen_max = 0.0;
    double alpha_p = 0.0;  // rad
};

inline UncertaintyBudget compute_budget(double tolerance, int k, double u_mat, double u_rot,
                                        const SensorUncertaintyCurve& curve) {
    UncertaintyBudget b;
    b.tolerance = tolerance;
    b.k = k;
    b.u_mat = u_mat;
    b.u_rot = u_rot;
    b.u_sen_max = budget_from_tolerance(tolerance, k, u_mat, u_rot);
    b.alpha_p = max_incident_angle(b.u_sen_max, curve);
    return b;
}

using BudgetMap = std::unordered_map<int, UncertaintyBudget>;  // MP id -> budget

inline BudgetMap compute_budgets(const std::vector<MeasurementPoint>& mps, int k, double u_mat,
                                 double u_rot, const SensorUncertaintyCurve& curve) {
    BudgetMap budgets;
    for (const MeasurementPoint& mp : mps) {
        try {
            budgets.emplace(mp.id, compute_budget(mp.tolerance, k, u_mat, u_rot, curve));
        } catch (const InfeasibleToleranceError& e) {
            throw InfeasibleToleranceError("MP " + std::to_string(mp.id) + ": " + e.what());
        }
    }
    return budgets;
}

}  // namespace scanplan
