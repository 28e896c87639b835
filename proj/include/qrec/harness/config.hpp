#pragma once

#include "qrec/harness/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace qrec {

/// Flat `key = value` configuration with dotted section keys and `#`
/// comments. Values are scalars, word lists (whitespace or comma
/// separated), booleans or strings; every key has a built-in default, so an
/// empty config is valid.
class Config {
public:
	Config() = default;
	static Config from_file(const std::string& path);
	static Config from_string(const std::string& text);

	bool has(const std::string& key) const { return values_.count(key) != 0; }

	double get_double(const std::string& key, double fallback) const;
	int get_int(const std::string& key, int fallback) const;
	std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
	bool get_bool(const std::string& key, bool fallback) const;
	std::string get_string(const std::string& key, const std::string& fallback) const;
	Vec3d get_vec3(const std::string& key, const Vec3d& fallback) const;
	/// Accepts one value (broadcast) or four.
	Vec4d get_vec4(const std::string& key, const Vec4d& fallback) const;

	/// Keys that were never read; non-empty after apply() means a typo.
	std::vector<std::string> unconsumed() const;

private:
	std::vector<double> parse_numbers(const std::string& key, std::size_t lo, std::size_t hi) const;

	std::map<std::string, std::string> values_;
	mutable std::map<std::string, bool> consumed_;
};

/// Overlay the config file values onto a base scenario. Throws on unknown
/// keys or malformed values.
ScenarioConfig apply_config(const Config& config, ScenarioConfig base);

}  // namespace qrec
