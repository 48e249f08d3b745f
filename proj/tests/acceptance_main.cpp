// One PASS/FAIL line per acceptance criterion; exit status 1 on any FAIL.
#include <iostream>

#include "CLI11.hpp"
#include "acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  asf::AcceptanceOptions opt;
  bool fast = false;
  app.add_flag("--fast", fast, "skip the sl3 main-theorem fit");
  app.add_option("--only", opt.only, "criterion ids to run");
  app.add_option("--jobs", opt.jobs, "worker threads for counts")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  opt.slow = !fast;
  auto results = asf::run_acceptance(opt, [](const asf::CriterionResult& r) {
    std::cout << asf::criterion_line(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " criteria)" : std::string("acceptance: PASS"))
            << std::endl;
  return failed ? 1 : 0;
}
