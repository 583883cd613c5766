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

#include "onepass/run_record.h"

#include <ostream>
#include <sstream>

#include "fmt/format.h"
#include "fmt/ostream.h"

namespace onepass {
namespace {

std::string Optional(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

void WriteRunCsv(std::ostream& out, const RunRecord& record) {
  out << kRunCsvHeader << '\n';
  for (const RunRow& r : record.rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", r.t, r.wall_nanos,
               r.est_err_l2, r.est_err_local, r.beta, Optional(r.cum_regret),
               Optional(r.subopt_checkpoint), r.x, r.a, r.a_prime, r.y,
               r.flags);
  }
}

std::string RunCsvString(const RunRecord& record) {
  std::ostringstream out;
  WriteRunCsv(out, record);
  return out.str();
}

}  // namespace onepass
