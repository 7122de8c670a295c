// Copyright 2026 The qlc Authors
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

// Small helpers shared by the text formats (sample sets, trajectories, CSV).

#ifndef QLC_TEXTIO_HPP
#define QLC_TEXTIO_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qlc {

/// %.17g: enough digits to round-trip any double.
std::string format_double(double v);

/// Strict double parse of a whole token. Throws ParseError(line).
double parse_double(std::string_view token, int line = 0);
long long parse_int(std::string_view token, int line = 0);

/// Splits on runs of the delimiter; with ' ' also splits on tabs.
std::vector<std::string_view> split(std::string_view text, char delim = ' ');
std::string_view trim(std::string_view text);

/// Comma-separated table with optional leading "# key=value" comment lines.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace qlc

#endif  // QLC_TEXTIO_HPP
