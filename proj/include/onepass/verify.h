// Copyright 2026 The onepass-rlhf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ONEPASS_VERIFY_H_
#define ONEPASS_VERIFY_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace onepass {

struct VerifyOptions {
  // Negative control: the inverse-agreement check uses a rank-one update
  // that skips symmetrization and perturbs the result.
  bool inject_sherman_morrison_fault = false;
  // Drops the multi-seed statistical checks.
  bool quick = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Invariant suite over all modules at desk-scale sizes; fully seeded.
std::vector<CheckResult> RunVerification(const VerifyOptions& options = {});

// Prints one line per check; returns 0 when every check passes, 1 otherwise.
int Verify(std::ostream& out, const VerifyOptions& options = {});

}  // namespace onepass

#endif  // ONEPASS_VERIFY_H_
