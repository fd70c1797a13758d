#pragma once

// RFC 4180 style CSV output and the shared 12-significant-digit number format.

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace branchlab::csv {

/// Shortest decimal form of `value` rounded to 12 significant digits.
std::string number(double value);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string quote(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_row(std::ostream& out, std::initializer_list<std::string> fields);

}  // namespace branchlab::csv
