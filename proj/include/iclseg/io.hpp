#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "iclseg/emission.hpp"
#include "iclseg/icl.hpp"

namespace iclseg {

// Reads one value per line, or a single-column CSV whose first non-blank line
// may be a header. Blank lines are skipped. Throws InputError naming the line
// of the first bad token, and for count families when a value is negative or
// non-integral.
std::vector<double> parse_series(std::istream& in, Family family);
std::vector<double> ingest(const std::filesystem::path& path, Family family);

// One value per line, shortest round-trip representation.
void write_series(std::ostream& out, std::span<const double> data);

nlohmann::json to_json(const IclTable& table);
// Header, one row per K, then a "k_hat" summary row.
void write_csv(std::ostream& out, const IclTable& table);

}  // namespace iclseg
