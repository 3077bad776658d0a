#pragma once

#include "kmu/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kmu {

/// Outcome of one residual check aggregated over sample points.
struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::optional<Point> worst_point;
    std::string note;
};

/// Max-residual reduction in sample order; NaN counts as an infinite residual.
class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double tolerance) {
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void add(double residual, const Point& p);
    void fail(const Point& p, const std::string& why);
    void note(std::string text) { result_.note = std::move(text); }
    /// With no points evaluated the check passes vacuously, carrying `why`.
    void allow_vacuous(std::string why) {
        vacuous_note_ = std::move(why);
    }
    bool empty() const { return !seen_; }
    CheckResult result() const;

private:
    CheckResult result_;
    bool seen_ = false;
    std::string vacuous_note_;
};

bool all_passed(const std::vector<CheckResult>& checks);
const CheckResult* find_check(const std::vector<CheckResult>& checks, const std::string& name);

} // namespace kmu
