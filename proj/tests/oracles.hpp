#pragma once

// Independent test oracles. These mirror definitions, not implementations:
// keep them free of calls into the code paths they check.

#include <chaintier/connector.hpp>
#include <chaintier/core_types.hpp>
#include <chaintier/crypto.hpp>
#include <chaintier/sim/rng.hpp>

#include <cstdlib>
#include <string>
#include <vector>

namespace oracles
{
using namespace chaintier;

// Brute-force Merkle expansion: build every level as an explicit list,
// duplicating the trailing node when a level has odd length.
inline crypto::digest merkle_brute_force (crypto::hash_id scheme, std::vector<crypto::digest> leaves)
{
	REQUIRE (!leaves.empty ());
	if (leaves.size () == 1)
	{
		return crypto::hash (scheme, byte_view (leaves[0].data (), leaves[0].size ()));
	}
	while (leaves.size () > 1)
	{
		if (leaves.size () % 2 == 1)
		{
			leaves.push_back (leaves.back ());
		}
		std::vector<crypto::digest> next;
		for (std::size_t i = 0; i < leaves.size (); i += 2)
		{
			bytes pair;
			pair.insert (pair.end (), leaves[i].begin (), leaves[i].end ());
			pair.insert (pair.end (), leaves[i + 1].begin (), leaves[i + 1].end ());
			next.push_back (crypto::hash (scheme, pair));
		}
		leaves = std::move (next);
	}
	return leaves[0];
}

// Byte accounting from the field table, independent of the encoder.
inline std::size_t transaction_size_by_table (std::size_t device_info_len, std::size_t data_len)
{
	return 16 + 16 + 1 + (4 + device_info_len) + 20 + 8 + 4 + (4 + data_len) + 1 + 32 + 1 + 33;
}

inline std::size_t block_size_by_table (std::vector<std::size_t> const & tx_data_lens)
{
	std::size_t total = 80 + 33; // header
	for (auto len : tx_data_lens)
	{
		total += 4 + 4 + (4 + len) + 32;
	}
	return total;
}

// Deterministic test transaction with a valid digest and signature.
inline transaction make_test_tx (std::uint32_t device, std::uint32_t tx_id, std::uint64_t timestamp, std::size_t device_info_len = 10, std::size_t data_len = 8)
{
	transaction tx;
	tx.from = connector::device_identity (device);
	tx.to = connector::node_identity (device % 4);
	tx.type = static_cast<std::uint8_t> (tx_type::reading);
	tx.device_info.assign (device_info_len, static_cast<std::uint8_t> (device + 1));
	auto key = crypto::derive_key_pair (0xde0000ull + device);
	tx.one_time_pk = key.pub;
	tx.timestamp = timestamp;
	tx.tx_id = tx_id;
	tx.data.assign (data_len, static_cast<std::uint8_t> (device * 7 + 1));
	tx.hash_type = 0;
	tx.tx_hash = compute_tx_hash (tx);
	tx.sig_type = 0;
	tx.sig = crypto::sign (crypto::sig_id::mac33, key, tx.tx_hash);
	return tx;
}

inline transaction random_tx (chaintier::sim::rng & rng, std::uint64_t timestamp)
{
	auto device = static_cast<std::uint32_t> (rng.uniform (0, 500));
	auto tx = make_test_tx (device, static_cast<std::uint32_t> (rng.uniform (1, 1 << 20)), timestamp, rng.uniform (0, 40), rng.uniform (0, 40));
	return tx;
}

// Builds a valid chain of the given length on top of genesis.
inline std::vector<data_block> build_test_chain (std::size_t blocks, std::size_t txs_per_block = 3)
{
	auto leader = crypto::derive_key_pair (0x4e0000ull);
	std::vector<data_block> chain{ make_genesis () };
	connector::permission_registry reg;
	connector::tx_validator validator (reg, connector::node_identity (0));
	for (std::size_t h = 1; h <= blocks; ++h)
	{
		connector::tx_pool pool;
		for (std::size_t d = 0; d < txs_per_block; ++d)
		{
			pool.add (validator.validate (make_test_tx (static_cast<std::uint32_t> (d), static_cast<std::uint32_t> (h), h), connector::node_identity (0)));
		}
		chain.push_back (connector::build_block (pool, chain.back ().header, chain.back ().height, 5000, leader, h));
	}
	return chain;
}

inline std::string fixture_path (std::string const & name)
{
	char const * dir = std::getenv ("CHAINTIER_FIXTURES");
	REQUIRE (dir != nullptr);
	return std::string (dir) + "/" + name;
}
}
