#pragma once

#include <chaintier/errors.hpp>

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace chaintier
{
using bytes = std::vector<std::uint8_t>;
using byte_view = std::span<std::uint8_t const>;

// Canonical wire order is little-endian; variable-length fields carry a
// 4-byte length prefix.
class byte_writer
{
public:
	void u8 (std::uint8_t v)
	{
		buf_.push_back (v);
	}
	void u32 (std::uint32_t v)
	{
		for (int i = 0; i < 4; ++i)
		{
			buf_.push_back (static_cast<std::uint8_t> (v >> (8 * i)));
		}
	}
	void u64 (std::uint64_t v)
	{
		for (int i = 0; i < 8; ++i)
		{
			buf_.push_back (static_cast<std::uint8_t> (v >> (8 * i)));
		}
	}
	void raw (byte_view data)
	{
		buf_.insert (buf_.end (), data.begin (), data.end ());
	}
	template <std::size_t N>
	void raw (std::array<std::uint8_t, N> const & data)
	{
		buf_.insert (buf_.end (), data.begin (), data.end ());
	}
	void var_bytes (byte_view data)
	{
		if (data.size () > 0xffffffffull)
		{
			throw field_length_error ("variable field exceeds u32 length prefix");
		}
		u32 (static_cast<std::uint32_t> (data.size ()));
		raw (data);
	}
	std::size_t size () const
	{
		return buf_.size ();
	}
	bytes take ()
	{
		return std::move (buf_);
	}
	bytes const & view () const
	{
		return buf_;
	}

private:
	bytes buf_;
};

class byte_reader
{
public:
	explicit byte_reader (byte_view data) :
		data_ (data)
	{
	}
	std::uint8_t u8 ()
	{
		need (1);
		return data_[pos_++];
	}
	std::uint32_t u32 ()
	{
		need (4);
		std::uint32_t v = 0;
		for (int i = 0; i < 4; ++i)
		{
			v |= static_cast<std::uint32_t> (data_[pos_ + i]) << (8 * i);
		}
		pos_ += 4;
		return v;
	}
	std::uint64_t u64 ()
	{
		need (8);
		std::uint64_t v = 0;
		for (int i = 0; i < 8; ++i)
		{
			v |= static_cast<std::uint64_t> (data_[pos_ + i]) << (8 * i);
		}
		pos_ += 8;
		return v;
	}
	byte_view raw (std::size_t n)
	{
		need (n);
		auto out = data_.subspan (pos_, n);
		pos_ += n;
		return out;
	}
	template <std::size_t N>
	std::array<std::uint8_t, N> fixed ()
	{
		auto view = raw (N);
		std::array<std::uint8_t, N> out;
		std::memcpy (out.data (), view.data (), N);
		return out;
	}
	bytes var_bytes ()
	{
		auto n = u32 ();
		auto view = raw (n);
		return bytes (view.begin (), view.end ());
	}
	std::size_t remaining () const
	{
		return data_.size () - pos_;
	}
	std::size_t position () const
	{
		return pos_;
	}
	bool finished () const
	{
		return pos_ == data_.size ();
	}

private:
	void need (std::size_t n) const
	{
		if (data_.size () - pos_ < n)
		{
			throw codec_error ("truncated input: need " + std::to_string (n) + " bytes, have " + std::to_string (data_.size () - pos_));
		}
	}
	byte_view data_;
	std::size_t pos_{ 0 };
};

std::string to_hex (byte_view data);
bytes from_hex (std::string const & hex);

template <std::size_t N>
std::array<std::uint8_t, N> to_fixed (byte_view data)
{
	if (data.size () != N)
	{
		throw field_length_error ("expected " + std::to_string (N) + " bytes, got " + std::to_string (data.size ()));
	}
	std::array<std::uint8_t, N> out;
	std::memcpy (out.data (), data.data (), N);
	return out;
}
}
