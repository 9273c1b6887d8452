#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include "checks.hpp"

namespace {

struct Criterion {
  const char* name;
  acceptance::Outcome (*run)();
  double budget_s;  // 0 = no runtime bound
};

const Criterion kCriteria[] = {
    {"gradient-correctness", acceptance::gradient_correctness, 30.0},
    {"optimizer-identities", acceptance::optimizer_identities, 1.0},
    {"svm-oracle", acceptance::svm_oracle, 10.0},
    {"directional-learning", acceptance::directional_learning, 300.0},
    {"zero-leak-cascade", acceptance::zero_leak_cascade, 0.0},
    {"cascade-algebra", acceptance::cascade_algebra, 0.0},
    {"end-to-end-daily-run", acceptance::end_to_end_daily_run, 30.0},
    {"analyze-harness", acceptance::analyze_harness, 0.0},
    {"persistence", acceptance::persistence, 0.0},
    {"fail-closed", acceptance::fail_closed, 0.0},
};

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : kCriteria) {
    const auto t0 = std::chrono::steady_clock::now();
    acceptance::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(c.budget_s) + " s budget";
    }
    std::printf("%s %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(kCriteria)) - failed, std::size(kCriteria));
  return failed == 0 ? 0 : 1;
}
