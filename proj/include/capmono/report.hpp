#ifndef CAPMONO_REPORT_HPP
#define CAPMONO_REPORT_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace capmono {

enum class CheckStatus { Pass, Fail, Equality, NotApplicable };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Equality: return "EQUALITY";
    case CheckStatus::NotApplicable: return "NOT_APPLICABLE";
  }
  return "FAIL";
}

/// Named outcome of one verification. FAIL holds exactly when
/// max_violation > tolerance (a NaN violation also fails).
struct CheckReport {
  std::string suite;
  std::string check;
  std::string model;
  std::map<std::string, double> params;
  CheckStatus status = CheckStatus::Pass;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;

  bool failed() const { return status == CheckStatus::Fail; }

  /// Re-derives the status after a tolerance change, keeping EQUALITY and
  /// NOT_APPLICABLE when the check still holds.
  void settle(bool equality = false) {
    if (status == CheckStatus::NotApplicable) return;
    if (!(max_violation <= tolerance)) {
      status = CheckStatus::Fail;
    } else if (equality || status == CheckStatus::Equality) {
      status = CheckStatus::Equality;
    } else {
      status = CheckStatus::Pass;
    }
  }
};

inline CheckReport make_report(std::string suite, std::string check, std::string model,
                               double max_violation, double tolerance, std::size_t samples,
                               std::map<std::string, double> params = {}) {
  CheckReport r{std::move(suite), std::move(check), std::move(model), std::move(params),
                CheckStatus::Pass, max_violation, tolerance, samples};
  r.settle();
  return r;
}

inline CheckReport not_applicable(std::string suite, std::string check, std::string model,
                                  std::map<std::string, double> params = {}) {
  CheckReport r{std::move(suite), std::move(check), std::move(model), std::move(params),
                CheckStatus::NotApplicable, 0.0, 0.0, 0};
  return r;
}

}  // namespace capmono

#endif  // CAPMONO_REPORT_HPP
