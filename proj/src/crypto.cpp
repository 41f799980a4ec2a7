#include <chaintier/crypto.hpp>
#include <chaintier/errors.hpp>

#include <bit>
#include <cstring>

namespace chaintier::crypto
{
namespace
{
	// FIPS 180-4 SHA-256
	constexpr std::uint32_t sha_k[64] = {
		0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
		0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
		0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
		0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
		0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
		0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
		0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
		0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2
	};

	void sha_compress (std::uint32_t state[8], std::uint8_t const block[64])
	{
		std::uint32_t w[64];
		for (int i = 0; i < 16; ++i)
		{
			w[i] = (std::uint32_t (block[4 * i]) << 24) | (std::uint32_t (block[4 * i + 1]) << 16) | (std::uint32_t (block[4 * i + 2]) << 8) | std::uint32_t (block[4 * i + 3]);
		}
		for (int i = 16; i < 64; ++i)
		{
			auto s0 = std::rotr (w[i - 15], 7) ^ std::rotr (w[i - 15], 18) ^ (w[i - 15] >> 3);
			auto s1 = std::rotr (w[i - 2], 17) ^ std::rotr (w[i - 2], 19) ^ (w[i - 2] >> 10);
			w[i] = w[i - 16] + s0 + w[i - 7] + s1;
		}
		auto a = state[0], b = state[1], c = state[2], d = state[3];
		auto e = state[4], f = state[5], g = state[6], h = state[7];
		for (int i = 0; i < 64; ++i)
		{
			auto s1 = std::rotr (e, 6) ^ std::rotr (e, 11) ^ std::rotr (e, 25);
			auto ch = (e & f) ^ (~e & g);
			auto temp1 = h + s1 + ch + sha_k[i] + w[i];
			auto s0 = std::rotr (a, 2) ^ std::rotr (a, 13) ^ std::rotr (a, 22);
			auto maj = (a & b) ^ (a & c) ^ (b & c);
			auto temp2 = s0 + maj;
			h = g;
			g = f;
			f = e;
			e = d + temp1;
			d = c;
			c = b;
			b = a;
			a = temp1 + temp2;
		}
		state[0] += a;
		state[1] += b;
		state[2] += c;
		state[3] += d;
		state[4] += e;
		state[5] += f;
		state[6] += g;
		state[7] += h;
	}

	std::uint64_t splitmix64 (std::uint64_t & x)
	{
		x += 0x9e3779b97f4a7c15ull;
		auto z = x;
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}
}

digest sha256 (byte_view msg)
{
	std::uint32_t state[8] = { 0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19 };
	std::size_t full = msg.size () / 64;
	for (std::size_t i = 0; i < full; ++i)
	{
		sha_compress (state, msg.data () + 64 * i);
	}
	std::uint8_t tail[128] = { 0 };
	std::size_t rem = msg.size () - 64 * full;
	if (rem > 0)
	{
		std::memcpy (tail, msg.data () + 64 * full, rem);
	}
	tail[rem] = 0x80;
	std::size_t tail_len = (rem < 56) ? 64 : 128;
	std::uint64_t bit_len = std::uint64_t (msg.size ()) * 8;
	for (int i = 0; i < 8; ++i)
	{
		tail[tail_len - 1 - i] = static_cast<std::uint8_t> (bit_len >> (8 * i));
	}
	sha_compress (state, tail);
	if (tail_len == 128)
	{
		sha_compress (state, tail + 64);
	}
	digest out;
	for (int i = 0; i < 8; ++i)
	{
		out[4 * i] = static_cast<std::uint8_t> (state[i] >> 24);
		out[4 * i + 1] = static_cast<std::uint8_t> (state[i] >> 16);
		out[4 * i + 2] = static_cast<std::uint8_t> (state[i] >> 8);
		out[4 * i + 3] = static_cast<std::uint8_t> (state[i]);
	}
	return out;
}

// Four independently-seeded splitmix lanes folded over the message.
// Deterministic and fast; digest width matches SHA-256 so accounting
// and integrity modes produce identical byte sizes.
digest fast_hash (byte_view msg)
{
	std::uint64_t lanes[4] = { 0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull, 0x082efa98ec4e6c89ull };
	std::size_t i = 0;
	while (i + 8 <= msg.size ())
	{
		std::uint64_t chunk;
		std::memcpy (&chunk, msg.data () + i, 8);
		for (auto & lane : lanes)
		{
			lane ^= chunk;
			splitmix64 (lane);
			lane = splitmix64 (lane);
		}
		i += 8;
	}
	std::uint64_t last = 0;
	for (std::size_t j = i; j < msg.size (); ++j)
	{
		last = (last << 8) | msg[j];
	}
	last ^= std::uint64_t (msg.size ()) << 56;
	for (auto & lane : lanes)
	{
		lane ^= last;
		lane = splitmix64 (lane);
	}
	digest out;
	for (int l = 0; l < 4; ++l)
	{
		for (int b = 0; b < 8; ++b)
		{
			out[8 * l + b] = static_cast<std::uint8_t> (lanes[l] >> (8 * b));
		}
	}
	return out;
}

digest hash (hash_id scheme, byte_view msg)
{
	switch (scheme)
	{
		case hash_id::sha256:
			return sha256 (msg);
		case hash_id::fast:
			return fast_hash (msg);
	}
	throw unknown_scheme_error ("unknown hash scheme id " + std::to_string (static_cast<unsigned> (scheme)));
}

digest merkle_root (hash_id scheme, std::span<digest const> leaves)
{
	if (leaves.empty ())
	{
		throw empty_leaves_error ("merkle_root requires at least one leaf");
	}
	std::vector<digest> level (leaves.begin (), leaves.end ());
	if (level.size () == 1)
	{
		return hash (scheme, byte_view (level[0].data (), level[0].size ()));
	}
	while (level.size () > 1)
	{
		std::vector<digest> next;
		next.reserve ((level.size () + 1) / 2);
		for (std::size_t i = 0; i < level.size (); i += 2)
		{
			auto const & left = level[i];
			auto const & right = (i + 1 < level.size ()) ? level[i + 1] : level[i];
			std::array<std::uint8_t, 64> pair;
			std::memcpy (pair.data (), left.data (), 32);
			std::memcpy (pair.data () + 32, right.data (), 32);
			next.push_back (hash (scheme, byte_view (pair.data (), pair.size ())));
		}
		level = std::move (next);
	}
	return level[0];
}

key_pair derive_key_pair (std::uint64_t seed)
{
	key_pair kp;
	std::uint64_t x = seed ^ 0x5ec7e75ec7e70000ull;
	for (int i = 0; i < 4; ++i)
	{
		auto v = splitmix64 (x);
		std::memcpy (kp.secret.data () + 8 * i, &v, 8);
	}
	bytes tagged (kp.secret.begin (), kp.secret.end ());
	char const tag[] = "public";
	tagged.insert (tagged.end (), tag, tag + sizeof (tag) - 1);
	auto pk_digest = fast_hash (tagged);
	std::memcpy (kp.pub.data (), pk_digest.data (), public_key_width);
	return kp;
}

namespace
{
	signature mac33 (public_key const & pub, byte_view msg)
	{
		bytes input;
		char const tag[] = "mac33sig";
		input.insert (input.end (), tag, tag + sizeof (tag) - 1);
		input.insert (input.end (), pub.begin (), pub.end ());
		input.insert (input.end (), msg.begin (), msg.end ());
		auto first = fast_hash (input);
		input.push_back (0x01);
		auto second = fast_hash (input);
		signature out;
		std::memcpy (out.data (), first.data (), 32);
		out[32] = second[0];
		return out;
	}
}

signature sign (sig_id scheme, key_pair const & key, byte_view msg)
{
	if (scheme != sig_id::mac33)
	{
		throw unknown_scheme_error ("unknown signature scheme id " + std::to_string (static_cast<unsigned> (scheme)));
	}
	return mac33 (key.pub, msg);
}

bool verify (sig_id scheme, public_key const & pub, byte_view msg, signature const & sig)
{
	if (scheme != sig_id::mac33)
	{
		throw unknown_scheme_error ("unknown signature scheme id " + std::to_string (static_cast<unsigned> (scheme)));
	}
	return mac33 (pub, msg) == sig;
}
}
