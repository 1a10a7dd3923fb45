#ifndef CARNOT_REPORT_HPP
#define CARNOT_REPORT_HPP

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace carnot {

/// One checked claim. `pass` follows from the kind:
///   identity:   |lhs - rhs| <= tolerance * max(1, |rhs|)
///   inequality: ratio = lhs / (constant * rhs) <= 1 + tolerance
///   bound:      lhs <= tolerance (max-violation style checks, rhs unused)
struct VerificationReport {
    enum class Kind { identity, inequality, bound };

    std::string claim_id;
    Kind kind = Kind::identity;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 1.0;
    double ratio = 1.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> resolution;
    std::vector<std::string> warnings;

    static VerificationReport identity(std::string id, double lhs, double rhs, double tol);
    static VerificationReport inequality(std::string id, double lhs, double rhs, double constant,
                                         double tol);
    static VerificationReport bound(std::string id, double violation, double tol);

    /// Identity with relative comparison |lhs - rhs| <= tol * |rhs| (both zero passes).
    static VerificationReport relative_identity(std::string id, double lhs, double rhs, double tol);
};

const char* to_string(VerificationReport::Kind kind);

nlohmann::json to_json(const VerificationReport& report);

/// Fixed-width table, one row per report.
std::string format_table(const std::vector<VerificationReport>& reports);

} // namespace carnot

#endif // CARNOT_REPORT_HPP
