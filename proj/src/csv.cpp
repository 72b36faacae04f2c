// Copyright 2026 The hdcam Authors
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

#include "hdcam/csv.hpp"

#include "hdcam/error.hpp"

namespace hdcam {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

bool CsvReader::next(CsvRow& row) {
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) break;
  }
  row.line = line_;
  row.fields.clear();

  std::string field;
  bool quoted = false;     // current field started with a quote
  bool in_quotes = false;  // inside an open quoted section
  bool after_quote = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (in_quotes) {
        std::string more;
        if (!std::getline(in_, more)) {
          throw ParseError(row.line, "unterminated quoted field");
        }
        ++line_;
        if (!more.empty() && more.back() == '\r') more.pop_back();
        field.push_back('\n');
        line = std::move(more);
        i = 0;
        continue;
      }
      row.fields.push_back(quoted ? field : trim(field));
      return true;
    }
    char c = line[i++];
    if (in_quotes) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      row.fields.push_back(quoted ? field : trim(field));
      field.clear();
      quoted = false;
      after_quote = false;
      continue;
    }
    if (after_quote) {
      if (c == ' ' || c == '\t') continue;
      throw ParseError(line_, "unexpected character after closing quote");
    }
    if (c == '"') {
      if (!trim(field).empty()) {
        throw ParseError(line_, "quote inside an unquoted field");
      }
      field.clear();
      quoted = true;
      in_quotes = true;
      continue;
    }
    field.push_back(c);
  }
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) os.put(',');
    os << csv_escape(fields[i]);
  }
  os.put('\n');
}

}  // namespace hdcam
