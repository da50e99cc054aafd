#include "esr/cli_support.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

namespace esr {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty()) throw ValidationError("bad number: '" + whole + "'");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("bad number: '" + whole + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ValidationError("bad number: '" + whole + "'");
  return v;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ValidationError("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0.0};
  s.pop_back();
  // split before the sign that starts the imaginary part (not an exponent sign)
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  const std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
  std::string im = cut == std::string::npos ? s : s.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : parse_real(re, text), parse_real(im, text)};
}

std::string format_complex(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    out.push_back(parse_real(t, text));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string with_csv_header(const RunMeta& m, const std::string& csv) {
  std::ostringstream os;
  os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
  os << "# command: " << m.command << '\n';
  for (const auto& [k, v] : m.config) os << "# config." << k << ": " << v << '\n';
  os << "# timestamp: " << m.timestamp << '\n';
  os << csv;
  return os.str();
}

std::string with_json_meta(const RunMeta& m, const std::string& json) {
  using nlohmann::ordered_json;
  ordered_json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["command"] = m.command;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  meta["config"] = cfg;
  meta["timestamp"] = m.timestamp;
  ordered_json j;
  j["meta"] = meta;
  j["result"] = ordered_json::parse(json);
  return j.dump(2) + "\n";
}

}  // namespace esr
