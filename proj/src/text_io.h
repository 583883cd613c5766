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

#ifndef ONEPASS_SRC_TEXT_IO_H_
#define ONEPASS_SRC_TEXT_IO_H_

#include <istream>
#include <ostream>
#include <stdexcept>

#include "Eigen/Core"
#include "fmt/format.h"
#include "fmt/ostream.h"

namespace onepass::internal {

// Space separated, shortest round-trip representation, newline terminated.
inline void WriteVector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    fmt::print(out, "{}{}", i == 0 ? "" : " ", v(i));
  }
  out << '\n';
}

inline Eigen::VectorXd ReadVector(std::istream& in, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    if (!(in >> v(i))) throw std::runtime_error("snapshot: truncated vector");
  }
  return v;
}

}  // namespace onepass::internal

#endif  // ONEPASS_SRC_TEXT_IO_H_
