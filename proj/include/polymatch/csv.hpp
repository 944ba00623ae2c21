#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polymatch::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
// breaks. A UTF-8 byte-order mark is skipped. Throws InputError("csv_parse")
// on an unterminated quote.
std::vector<Row> parse(std::string_view text);

// Quotes a field only when it needs it.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace polymatch::csv
