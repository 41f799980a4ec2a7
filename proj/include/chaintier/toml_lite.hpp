#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chaintier
{
// Minimal TOML subset: comments, [section] headers (flattened to
// "section.key"), bare keys, strings, integers (with underscores),
// floats, booleans, and homogeneous arrays of the above. Enough for
// scenario files; not a general TOML parser.
struct toml_value
{
	enum class kind_t
	{
		string,
		integer,
		floating,
		boolean,
		array,
	};
	kind_t kind{ kind_t::string };
	std::string str;
	std::int64_t integer{ 0 };
	double floating{ 0.0 };
	bool boolean{ false };
	std::vector<toml_value> array;

	double as_number () const;
};

class toml_table
{
public:
	static toml_table parse (std::string const & text); // throws config_error
	static toml_table parse_file (std::string const & path); // throws io_error/config_error

	bool contains (std::string const & key) const;
	std::string get_string (std::string const & key, std::string const & fallback) const;
	std::int64_t get_int (std::string const & key, std::int64_t fallback) const;
	std::uint64_t get_uint (std::string const & key, std::uint64_t fallback) const;
	double get_double (std::string const & key, double fallback) const;
	bool get_bool (std::string const & key, bool fallback) const;
	std::vector<toml_value> get_array (std::string const & key) const;
	std::map<std::string, toml_value> const & values () const
	{
		return values_;
	}

private:
	std::map<std::string, toml_value> values_;
};
}
