#pragma once

#include <string>
#include <utility>
#include <vector>

#include "esr/types.hpp"

namespace esr {

inline constexpr const char* kToolName = "esr";
inline constexpr const char* kToolVersion = "0.1.0";

// "a+bi", "a-bi", "a", "bi", "i", "-i"; each part may use scientific notation.
cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);

// Comma separated reals; blank text gives an empty list, an empty item is an error.
std::vector<double> parse_list(const std::string& text);

// Provenance written at the top of every artifact. The timestamp is the only
// run-dependent field and always sits on a line of its own.
struct RunMeta {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echoed in the given order
  std::string timestamp;                                     // ISO 8601, UTC
};
std::string utc_timestamp();

// "# key: value" lines followed by the CSV body.
std::string with_csv_header(const RunMeta& m, const std::string& csv);
// {"meta": {...}, "result": <json>} with two-space indentation.
std::string with_json_meta(const RunMeta& m, const std::string& json);

}  // namespace esr
