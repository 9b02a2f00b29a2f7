#pragma once

#include <string>
#include <vector>

#include "sentiscore/error.hpp"

namespace sentiscore {

// Minimal RFC-4180 CSV support. The parser works on the whole document at
// once so that quoted fields may span physical lines.

using CsvRow = std::vector<std::string>;

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_format_row(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_quote(row[i]);
  }
  out += '\n';
  return out;
}

inline std::vector<CsvRow> csv_parse(const std::string& content) {
  std::vector<CsvRow> rows;
  CsvRow fields;
  std::string cur;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&] {
    fields.push_back(cur);
    cur.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(fields);
    fields.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        cur += c;
        row_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw ParseError("csv: unterminated quoted field");
  }
  if (row_started || !fields.empty() || !cur.empty()) {
    end_row();
  }
  return rows;
}

}  // namespace sentiscore
