#pragma once

#include <chaintier/bytes.hpp>

#include <array>
#include <cstdint>
#include <span>

namespace chaintier::crypto
{
constexpr std::size_t digest_width = 32;
constexpr std::size_t signature_width = 33;
constexpr std::size_t public_key_width = 20;

using digest = std::array<std::uint8_t, digest_width>;
using signature = std::array<std::uint8_t, signature_width>;
using public_key = std::array<std::uint8_t, public_key_width>;
using secret_key = std::array<std::uint8_t, 32>;

// Scheme ids are wire values: 0 = SHA-256, 1 = fast keyed-PRF double.
enum class hash_id : std::uint8_t
{
	sha256 = 0,
	fast = 1,
};

// 0 = 33-byte MAC truncation. Size-faithful stand-in, not secure.
enum class sig_id : std::uint8_t
{
	mac33 = 0,
};

digest sha256 (byte_view msg);
digest fast_hash (byte_view msg);
digest hash (hash_id scheme, byte_view msg); // throws unknown_scheme_error

// Binary Merkle tree over 32-byte leaves; an odd node at any level is
// paired with itself; the root of a single leaf is hash(leaf).
digest merkle_root (hash_id scheme, std::span<digest const> leaves); // throws empty_leaves_error

struct key_pair
{
	secret_key secret;
	public_key pub;
};

key_pair derive_key_pair (std::uint64_t seed);

signature sign (sig_id scheme, key_pair const & key, byte_view msg);
bool verify (sig_id scheme, public_key const & pub, byte_view msg, signature const & sig);
}
