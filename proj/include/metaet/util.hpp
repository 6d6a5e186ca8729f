#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metaet {

/// Shortest round-trip decimal form of x (std::to_chars). Used for every
/// float that lands in a CSV or checkpoint so that identical runs emit
/// byte-identical artifacts.
std::string format_double(double x);

/// Strict double parse of the whole token; throws FormatError otherwise.
double parse_double(std::string_view token, int line_number);

/// Strict non-negative integer parse; throws FormatError otherwise.
long long parse_integer(std::string_view token, int line_number);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Worker count for batch/eval parallelism: METAET_THREADS if set and
/// positive, else hardware concurrency (at least 1).
int worker_count();

}  // namespace metaet
