#include "kmu/check.hpp"

#include <cmath>
#include <limits>

namespace kmu {

void CheckAccumulator::add(double residual, const Point& p) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (!seen_ || residual > result_.max_residual) {
        result_.max_residual = residual;
        result_.worst_point = p;
    }
    seen_ = true;
}

void CheckAccumulator::fail(const Point& p, const std::string& why) {
    add(std::numeric_limits<double>::infinity(), p);
    if (result_.note.empty()) result_.note = why;
}

CheckResult CheckAccumulator::result() const {
    CheckResult r = result_;
    r.passed = seen_ && r.max_residual < r.tolerance;
    if (!seen_ && !vacuous_note_.empty()) {
        r.passed = true;
        r.note = vacuous_note_;
    } else if (!seen_ && r.note.empty()) {
        r.note = "no points evaluated";
    }
    return r;
}

bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

const CheckResult* find_check(const std::vector<CheckResult>& checks, const std::string& name) {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace kmu
