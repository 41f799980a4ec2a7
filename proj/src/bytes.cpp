#include <chaintier/bytes.hpp>

namespace chaintier
{
std::string to_hex (byte_view data)
{
	static char const digits[] = "0123456789abcdef";
	std::string out;
	out.reserve (data.size () * 2);
	for (auto b : data)
	{
		out.push_back (digits[b >> 4]);
		out.push_back (digits[b & 0x0f]);
	}
	return out;
}

namespace
{
	int nibble (char c)
	{
		if (c >= '0' && c <= '9')
			return c - '0';
		if (c >= 'a' && c <= 'f')
			return c - 'a' + 10;
		if (c >= 'A' && c <= 'F')
			return c - 'A' + 10;
		return -1;
	}
}

bytes from_hex (std::string const & hex)
{
	if (hex.size () % 2 != 0)
	{
		throw codec_error ("hex string has odd length");
	}
	bytes out;
	out.reserve (hex.size () / 2);
	for (std::size_t i = 0; i < hex.size (); i += 2)
	{
		int hi = nibble (hex[i]);
		int lo = nibble (hex[i + 1]);
		if (hi < 0 || lo < 0)
		{
			throw codec_error ("invalid hex digit");
		}
		out.push_back (static_cast<std::uint8_t> ((hi << 4) | lo));
	}
	return out;
}
}
