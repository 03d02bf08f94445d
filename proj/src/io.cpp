#include "iclseg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "iclseg/errors.hpp"

namespace iclseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<double> parse_series(std::istream& in, Family family) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;
    double value = 0.0;
    if (!parse_number(view, value)) {
      if (!seen_content) {
        seen_content = true;  // header
        continue;
      }
      throw InputError("line " + std::to_string(line_no) + ": cannot parse '" +
                       std::string(view) + "' as a number");
    }
    seen_content = true;
    if (is_count_family(family) && (value < 0.0 || std::floor(value) != value)) {
      throw InputError("line " + std::to_string(line_no) + ": " + std::string(view) +
                       " is not a non-negative integer count");
    }
    out.push_back(value);
  }
  validate_series(family, out);
  return out;
}

std::vector<double> ingest(const std::filesystem::path& path, Family family) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file " + path.string());
  return parse_series(in, family);
}

void write_series(std::ostream& out, std::span<const double> data) {
  for (double v : data) out << format_number(v) << '\n';
}

nlohmann::json to_json(const IclTable& table) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : table.records) {
    records.push_back({{"k", r.segments},
                       {"log_joint", r.log_joint},
                       {"entropy", r.entropy},
                       {"icl", r.icl},
                       {"breakpoints", r.map.breakpoints()},
                       {"seconds", r.seconds}});
  }
  return {{"n", table.n},
          {"family", std::string(to_string(table.family))},
          {"k_max", table.records.size()},
          {"init", std::string(to_string(table.init))},
          {"records", std::move(records)},
          {"k_hat", table.k_hat}};
}

void write_csv(std::ostream& out, const IclTable& table) {
  out << "k,log_joint,entropy,icl,breakpoints,seconds\n";
  for (const auto& r : table.records) {
    std::string bps;
    for (std::size_t t : r.map.breakpoints()) {
      if (!bps.empty()) bps += ' ';
      bps += std::to_string(t);
    }
    out << r.segments << ',' << format_number(r.log_joint) << ',' << format_number(r.entropy)
        << ',' << format_number(r.icl) << ',' << bps << ',' << format_number(r.seconds) << '\n';
  }
  out << "k_hat," << table.k_hat << ",,,,\n";
}

}  // namespace iclseg
