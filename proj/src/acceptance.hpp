#pragma once
// The nine end-to-end acceptance checks, shared by the acceptance binary and
// the `verify` command. Each returns PASS/FAIL with a one-line summary.

#include <functional>
#include <string>
#include <vector>

namespace asf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  bool slow = true;  // include the sl3 main-theorem fit
  int jobs = 1;
  std::vector<int> only;  // criterion ids; empty means all
};

// runs the selected criteria; an exception inside a criterion is a FAIL
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_done = {});
std::string criterion_line(const CriterionResult& r);

}  // namespace asf
