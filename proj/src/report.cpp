#include "carnot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace carnot {

namespace {

double safe_ratio(double num, double den)
{
    if (den != 0.0)
        return num / den;
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

} // namespace

VerificationReport VerificationReport::identity(std::string id, double lhs, double rhs, double tol)
{
    VerificationReport r;
    r.claim_id = std::move(id);
    r.kind = Kind::identity;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = safe_ratio(lhs, rhs);
    r.tolerance = tol;
    r.pass = std::abs(lhs - rhs) <= tol * std::max(1.0, std::abs(rhs));
    return r;
}

VerificationReport VerificationReport::relative_identity(std::string id, double lhs, double rhs,
                                                         double tol)
{
    VerificationReport r = identity(std::move(id), lhs, rhs, tol);
    r.pass = std::abs(lhs - rhs) <= tol * std::abs(rhs) || (lhs == 0.0 && rhs == 0.0);
    return r;
}

VerificationReport VerificationReport::inequality(std::string id, double lhs, double rhs,
                                                  double constant, double tol)
{
    VerificationReport r;
    r.claim_id = std::move(id);
    r.kind = Kind::inequality;
    r.lhs = lhs;
    r.rhs = rhs;
    r.constant = constant;
    r.ratio = safe_ratio(lhs, constant * rhs);
    r.tolerance = tol;
    r.pass = r.ratio <= 1.0 + tol;
    return r;
}

VerificationReport VerificationReport::bound(std::string id, double violation, double tol)
{
    VerificationReport r;
    r.claim_id = std::move(id);
    r.kind = Kind::bound;
    r.lhs = violation;
    r.rhs = 0.0;
    r.ratio = safe_ratio(violation, tol);
    r.tolerance = tol;
    r.pass = std::isfinite(violation) && violation <= tol;
    return r;
}

const char* to_string(VerificationReport::Kind kind)
{
    switch (kind) {
    case VerificationReport::Kind::identity:
        return "identity";
    case VerificationReport::Kind::inequality:
        return "inequality";
    case VerificationReport::Kind::bound:
        return "bound";
    }
    return "unknown";
}

nlohmann::json to_json(const VerificationReport& r)
{
    nlohmann::json j;
    j["claim_id"] = r.claim_id;
    j["kind"] = to_string(r.kind);
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["constant"] = r.constant;
    // nlohmann writes non-finite numbers as null
    j["ratio"] = r.ratio;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["resolution"] = r.resolution;
    j["warnings"] = r.warnings;
    return j;
}

std::string format_table(const std::vector<VerificationReport>& reports)
{
    std::size_t width = 10;
    for (const auto& r : reports)
        width = std::max(width, r.claim_id.size());

    std::string out;
    char line[512];
    std::snprintf(line, sizeof line, "%-*s  %-10s  %13s  %13s  %9s  %10s  %8s  %s\n",
                  static_cast<int>(width), "claim", "kind", "lhs", "rhs", "constant", "ratio", "tol",
                  "result");
    out += line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-*s  %-10s  %13.6g  %13.6g  %9.4g  %10.6g  %8.3g  %s\n",
                      static_cast<int>(width), r.claim_id.c_str(), to_string(r.kind), r.lhs, r.rhs,
                      r.constant, r.ratio, r.tolerance, r.pass ? "PASS" : "FAIL");
        out += line;
        for (const auto& w : r.warnings)
            out += "    warning: " + w + "\n";
    }
    return out;
}

} // namespace carnot
