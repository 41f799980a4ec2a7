#include <chaintier/errors.hpp>
#include <chaintier/toml_lite.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace chaintier
{
namespace
{
	std::string trim (std::string const & s)
	{
		auto begin = s.find_first_not_of (" \t\r");
		if (begin == std::string::npos)
		{
			return "";
		}
		auto end = s.find_last_not_of (" \t\r");
		return s.substr (begin, end - begin + 1);
	}

	toml_value parse_scalar (std::string const & raw, int line_no);

	toml_value parse_array (std::string const & raw, int line_no)
	{
		toml_value value;
		value.kind = toml_value::kind_t::array;
		auto inner = trim (raw.substr (1, raw.size () - 2));
		if (inner.empty ())
		{
			return value;
		}
		std::string current;
		bool in_string = false;
		for (char c : inner)
		{
			if (c == '"')
			{
				in_string = !in_string;
				current.push_back (c);
			}
			else if (c == ',' && !in_string)
			{
				value.array.push_back (parse_scalar (trim (current), line_no));
				current.clear ();
			}
			else
			{
				current.push_back (c);
			}
		}
		if (!trim (current).empty ())
		{
			value.array.push_back (parse_scalar (trim (current), line_no));
		}
		return value;
	}

	toml_value parse_scalar (std::string const & raw, int line_no)
	{
		toml_value value;
		if (raw.empty ())
		{
			throw config_error ("empty value at line " + std::to_string (line_no));
		}
		if (raw.front () == '[')
		{
			if (raw.back () != ']')
			{
				throw config_error ("unterminated array at line " + std::to_string (line_no));
			}
			return parse_array (raw, line_no);
		}
		if (raw.front () == '"')
		{
			if (raw.size () < 2 || raw.back () != '"')
			{
				throw config_error ("unterminated string at line " + std::to_string (line_no));
			}
			value.kind = toml_value::kind_t::string;
			value.str = raw.substr (1, raw.size () - 2);
			return value;
		}
		if (raw == "true" || raw == "false")
		{
			value.kind = toml_value::kind_t::boolean;
			value.boolean = raw == "true";
			return value;
		}
		std::string digits;
		digits.reserve (raw.size ());
		for (char c : raw)
		{
			if (c != '_')
			{
				digits.push_back (c);
			}
		}
		bool looks_float = digits.find ('.') != std::string::npos || digits.find ('e') != std::string::npos || digits.find ('E') != std::string::npos;
		try
		{
			std::size_t used = 0;
			if (looks_float)
			{
				value.kind = toml_value::kind_t::floating;
				value.floating = std::stod (digits, &used);
			}
			else
			{
				value.kind = toml_value::kind_t::integer;
				value.integer = std::stoll (digits, &used);
			}
			if (used != digits.size ())
			{
				throw std::invalid_argument ("trailing");
			}
		}
		catch (std::exception const &)
		{
			throw config_error ("cannot parse value '" + raw + "' at line " + std::to_string (line_no));
		}
		return value;
	}
}

double toml_value::as_number () const
{
	switch (kind)
	{
		case kind_t::integer:
			return static_cast<double> (integer);
		case kind_t::floating:
			return floating;
		case kind_t::boolean:
			return boolean ? 1.0 : 0.0;
		default:
			throw config_error ("value is not numeric");
	}
}

toml_table toml_table::parse (std::string const & text)
{
	toml_table table;
	std::istringstream in (text);
	std::string line;
	std::string section;
	int line_no = 0;
	while (std::getline (in, line))
	{
		++line_no;
		// Strip comments outside strings.
		bool in_string = false;
		for (std::size_t i = 0; i < line.size (); ++i)
		{
			if (line[i] == '"')
			{
				in_string = !in_string;
			}
			else if (line[i] == '#' && !in_string)
			{
				line = line.substr (0, i);
				break;
			}
		}
		auto trimmed = trim (line);
		if (trimmed.empty ())
		{
			continue;
		}
		if (trimmed.front () == '[')
		{
			if (trimmed.back () != ']' || trimmed.size () < 3)
			{
				throw config_error ("bad section header at line " + std::to_string (line_no));
			}
			section = trim (trimmed.substr (1, trimmed.size () - 2));
			continue;
		}
		auto eq = trimmed.find ('=');
		if (eq == std::string::npos)
		{
			throw config_error ("expected key = value at line " + std::to_string (line_no));
		}
		auto key = trim (trimmed.substr (0, eq));
		auto raw = trim (trimmed.substr (eq + 1));
		if (key.empty ())
		{
			throw config_error ("empty key at line " + std::to_string (line_no));
		}
		auto full_key = section.empty () ? key : section + "." + key;
		table.values_[full_key] = parse_scalar (raw, line_no);
	}
	return table;
}

toml_table toml_table::parse_file (std::string const & path)
{
	std::ifstream in (path);
	if (!in)
	{
		throw io_error ("cannot open config file " + path);
	}
	std::ostringstream buffer;
	buffer << in.rdbuf ();
	return parse (buffer.str ());
}

bool toml_table::contains (std::string const & key) const
{
	return values_.count (key) > 0;
}

std::string toml_table::get_string (std::string const & key, std::string const & fallback) const
{
	auto it = values_.find (key);
	if (it == values_.end ())
	{
		return fallback;
	}
	if (it->second.kind != toml_value::kind_t::string)
	{
		throw config_error ("key '" + key + "' is not a string");
	}
	return it->second.str;
}

std::int64_t toml_table::get_int (std::string const & key, std::int64_t fallback) const
{
	auto it = values_.find (key);
	if (it == values_.end ())
	{
		return fallback;
	}
	if (it->second.kind == toml_value::kind_t::integer)
	{
		return it->second.integer;
	}
	throw config_error ("key '" + key + "' is not an integer");
}

std::uint64_t toml_table::get_uint (std::string const & key, std::uint64_t fallback) const
{
	auto value = get_int (key, static_cast<std::int64_t> (fallback));
	if (value < 0)
	{
		throw config_error ("key '" + key + "' must be non-negative");
	}
	return static_cast<std::uint64_t> (value);
}

double toml_table::get_double (std::string const & key, double fallback) const
{
	auto it = values_.find (key);
	if (it == values_.end ())
	{
		return fallback;
	}
	return it->second.as_number ();
}

bool toml_table::get_bool (std::string const & key, bool fallback) const
{
	auto it = values_.find (key);
	if (it == values_.end ())
	{
		return fallback;
	}
	if (it->second.kind != toml_value::kind_t::boolean)
	{
		throw config_error ("key '" + key + "' is not a boolean");
	}
	return it->second.boolean;
}

std::vector<toml_value> toml_table::get_array (std::string const & key) const
{
	auto it = values_.find (key);
	if (it == values_.end ())
	{
		return {};
	}
	if (it->second.kind != toml_value::kind_t::array)
	{
		throw config_error ("key '" + key + "' is not an array");
	}
	return it->second.array;
}
}
