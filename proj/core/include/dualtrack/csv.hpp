// Copyright 2026 The Dualtrack Authors
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

#ifndef DUALTRACK_CSV_HPP_
#define DUALTRACK_CSV_HPP_

#include <string>
#include <vector>

namespace dualtrack {

/// Reads numeric CSV rows. Blank lines and lines starting with '#' are
/// skipped. Throws std::runtime_error on a non-numeric field, naming the
/// line number.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

/// Writes rows with full double precision; optional '#'-prefixed header
/// comment lines.
void write_numeric_csv(const std::string& path,
                       const std::vector<std::string>& comment_lines,
                       const std::vector<std::vector<double>>& rows);

}  // namespace dualtrack

#endif  // DUALTRACK_CSV_HPP_
