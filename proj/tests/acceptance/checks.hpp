#pragma once

#include <string>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome gradient_correctness();
Outcome optimizer_identities();
Outcome svm_oracle();
Outcome directional_learning();
Outcome zero_leak_cascade();
Outcome cascade_algebra();
Outcome end_to_end_daily_run();
Outcome analyze_harness();
Outcome persistence();
Outcome fail_closed();

}  // namespace acceptance
