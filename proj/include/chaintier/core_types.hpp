#pragma once

#include <chaintier/bytes.hpp>
#include <chaintier/crypto.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace chaintier
{
using device_id = std::array<std::uint8_t, 16>;

enum class tx_type : std::uint8_t
{
	reading = 0,
	warning = 1,
};

// One industrial measurement with provenance, digest and signature.
// Wire layout (little-endian, 4-byte length prefixes on variable fields):
//   from 16 | to 16 | type 1 | device_info 4+n | one_time_pk 20 |
//   timestamp 8 | tx_id 4 | data 4+m | hash_type 1 | tx_hash 32 |
//   sig_type 1 | signature 33
// Fixed-field minimum is 140 bytes.
struct transaction
{
	device_id from{};
	device_id to{};
	std::uint8_t type{ 0 };
	bytes device_info;
	crypto::public_key one_time_pk{};
	std::uint64_t timestamp{ 0 };
	std::uint32_t tx_id{ 0 };
	bytes data;
	std::uint8_t hash_type{ 0 };
	crypto::digest tx_hash{};
	std::uint8_t sig_type{ 0 };
	crypto::signature sig{};
};

constexpr std::size_t transaction_fixed_size = 140;

std::size_t encoded_transaction_size (std::size_t device_info_len, std::size_t data_len);

bytes encode_transaction (transaction const & tx);
transaction decode_transaction (byte_view data);

// Everything preceding tx_hash in canonical order; tx_hash commits to these.
bytes transaction_prehash_bytes (transaction const & tx);
crypto::digest compute_tx_hash (transaction const & tx);

// Header wire layout is 113 = 80 + 33 bytes:
//   prev_hash 32 | version 4 | merkle_root 32 | num_txs 4 | timestamp 8 | signature 33
// block_hash is not on the wire; it is the digest of the 113 encoded bytes
// and is recomputed on decode. The creator signs the leading 80 bytes.
struct block_header
{
	crypto::digest hash_pre_data_blk{};
	crypto::digest block_hash{};
	std::uint32_t version{ 1 };
	crypto::digest merkle_root{};
	std::uint32_t num_txs{ 0 };
	crypto::signature sig{};
	std::uint64_t timestamp{ 0 };
};

constexpr std::size_t block_header_wire_size = 113;
constexpr std::size_t block_header_signed_prefix = 80;

bytes encode_header (block_header const & header);
block_header decode_header (byte_view data, crypto::hash_id scheme);
bytes header_signing_bytes (block_header const & header);
crypto::digest compute_block_hash (block_header const & header, crypto::hash_id scheme);

// Body entry: no 4 | tx_id 4 | tx_data 4+len | tx_hash 32. tx_data carries
// the full encoded transaction; entries are numbered 1..N.
struct body_entry
{
	std::uint32_t no{ 0 };
	std::uint32_t tx_id{ 0 };
	bytes tx_data;
	crypto::digest tx_hash{};
};

constexpr std::size_t body_entry_overhead = 44;

struct block_body
{
	std::vector<body_entry> entries;
	std::size_t payload_bytes () const;
};

struct data_block
{
	block_header header;
	block_body body;
	std::uint64_t height{ 0 };
};

// Exact byte accounting used by the simulator; must equal the encoder's
// output length for every block.
std::size_t encoded_block_size (std::size_t num_txs, std::size_t payload_bytes);
std::size_t encoded_block_size (data_block const & block);

bytes encode_block (data_block const & block);
// height is not on the wire; callers supply it from segment framing.
data_block decode_block (byte_view data, std::uint64_t height = 0, crypto::hash_id scheme = crypto::hash_id::sha256);
data_block decode_block (byte_reader & reader, std::uint64_t height, crypto::hash_id scheme);

data_block make_genesis (crypto::hash_id scheme = crypto::hash_id::sha256);

struct chain_segment
{
	std::vector<data_block> blocks;
	std::uint64_t first_height{ 0 };
	std::uint64_t last_height{ 0 };
	std::size_t encoded_bytes () const;
};

chain_segment make_segment (std::vector<data_block> blocks);
bytes encode_segment (chain_segment const & segment);
chain_segment decode_segment (byte_view data, crypto::hash_id scheme = crypto::hash_id::sha256);

struct block_check
{
	std::uint64_t height{ 0 };
	bool link_ok{ true };
	bool hash_ok{ true };
	bool merkle_ok{ true };
	bool timestamp_ok{ true };
	bool passed () const
	{
		return link_ok && hash_ok && merkle_ok && timestamp_ok;
	}
};

struct verification_report
{
	std::vector<block_check> blocks;
	bool head_link_ok{ true };
	bool passed{ true };
	std::string describe () const;
};

// Per-block checks: hash link, block hash, Merkle root (including per-entry
// hash recomputation from transaction bytes and 1..N numbering), and strict
// timestamp monotonicity. Failures are reported, never thrown.
verification_report verify_chain (chain_segment const & segment, block_header const * trusted_head = nullptr, crypto::hash_id scheme = crypto::hash_id::sha256);
}
