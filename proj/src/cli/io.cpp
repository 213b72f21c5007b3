#include "mcscore/cli/io.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <boost/algorithm/string.hpp>

#include "mcscore/cli/config.hpp"

namespace mcscore::cli {

namespace fs = std::filesystem;

namespace {

bool parse_number(const std::string& text, double& out) {
  const std::string s = boost::algorithm::trim_copy(text);
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = boost::algorithm::trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    lines.push_back(t);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  boost::algorithm::split(cells, line, boost::algorithm::is_any_of(","));
  for (auto& c : cells) boost::algorithm::trim(c);
  return cells;
}

[[noreturn]] void bad_line(const fs::path& path, std::size_t lineno, const std::string& what) {
  throw ConfigError(path.string() + ": data line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::vector<double> read_numbers(const fs::path& path) {
  const auto lines = read_lines(path);
  std::vector<double> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    double v = 0.0;
    if (!parse_number(lines[i], v)) {
      if (i == 0) continue;
      bad_line(path, i + 1, "not a number: '" + lines[i] + "'");
    }
    if (!std::isfinite(v)) bad_line(path, i + 1, "non-finite value");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(path.string() + ": no values");
  return out;
}

std::vector<double> read_series(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ConfigError(path.string() + ": empty series file");
  const auto header = split_csv(lines[0]);
  std::size_t col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (boost::algorithm::iequals(header[c], "value")) col = c;
  }
  if (col == header.size()) throw ConfigError(path.string() + ": no 'value' column in header");
  std::vector<double> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    double v = 0.0;
    if (cells.size() != header.size() || !parse_number(cells[col], v) || !std::isfinite(v)) {
      bad_line(path, i + 1, "malformed row '" + lines[i] + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(path.string() + ": no observations");
  return out;
}

std::vector<std::pair<double, double>> read_pairs(const fs::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    double a = 0.0;
    double b = 0.0;
    const bool ok = cells.size() == 2 && parse_number(cells[0], a) && parse_number(cells[1], b);
    if (!ok) {
      if (i == 0) continue;
      bad_line(path, i + 1, "expected two numbers: '" + lines[i] + "'");
    }
    out.emplace_back(a, b);
  }
  if (out.empty()) throw ConfigError(path.string() + ": no rows");
  return out;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t t = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace mcscore::cli
