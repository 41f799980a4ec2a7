#include <doctest.h>

#include "oracles.hpp"

#include <chaintier/core_types.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/rng.hpp>
#include <chaintier/wire.hpp>

#include <fstream>

using namespace chaintier;

namespace
{
std::string read_fixture (std::string const & name)
{
	std::ifstream in (oracles::fixture_path (name));
	REQUIRE (in.good ());
	std::string hex;
	in >> hex;
	return hex;
}

bool equal_tx (transaction const & a, transaction const & b)
{
	return a.from == b.from && a.to == b.to && a.type == b.type && a.device_info == b.device_info && a.one_time_pk == b.one_time_pk && a.timestamp == b.timestamp && a.tx_id == b.tx_id && a.data == b.data && a.hash_type == b.hash_type && a.tx_hash == b.tx_hash && a.sig_type == b.sig_type && a.sig == b.sig;
}
}

TEST_CASE ("transaction with empty variable fields encodes to exactly 140 bytes")
{
	auto tx = oracles::make_test_tx (0, 1, 1, 0, 0);
	CHECK (encode_transaction (tx).size () == 140);
	CHECK (encoded_transaction_size (0, 0) == 140);
	CHECK (oracles::transaction_size_by_table (0, 0) == 140);
}

TEST_CASE ("typical transaction lands inside the 120-180 byte band")
{
	auto tx = oracles::make_test_tx (3, 9, 5, 10, 8);
	auto encoded = encode_transaction (tx);
	CHECK (encoded.size () == 158);
	CHECK (encoded.size () >= 120);
	CHECK (encoded.size () <= 180);
	CHECK (encoded.size () == oracles::transaction_size_by_table (10, 8));
}

TEST_CASE ("transaction encoding round-trips for 1000 randomized transactions")
{
	sim::rng rng (31);
	for (int i = 0; i < 1000; ++i)
	{
		auto tx = oracles::random_tx (rng, rng.uniform (1, 1 << 30));
		auto encoded = encode_transaction (tx);
		CHECK (encoded.size () == encoded_transaction_size (tx.device_info.size (), tx.data.size ()));
		auto decoded = decode_transaction (encoded);
		CHECK (equal_tx (tx, decoded));
		// Determinism: identical values, identical bytes.
		CHECK (encode_transaction (decoded) == encoded);
	}
}

TEST_CASE ("fixed-width fields are enforced")
{
	CHECK_THROWS_AS (to_fixed<20> (bytes (19, 0)), field_length_error);
	CHECK_THROWS_AS (to_fixed<32> (bytes (33, 0)), field_length_error);
	auto tx = oracles::make_test_tx (0, 1, 1);
	auto encoded = encode_transaction (tx);
	encoded.pop_back ();
	CHECK_THROWS_AS (decode_transaction (encoded), codec_error);
}

TEST_CASE ("golden transaction fixture")
{
	auto hex = read_fixture ("transaction.hex");
	auto tx = oracles::make_test_tx (0, 1, 1, 10, 8);
	// Fixture freezes specific fixed contents; rebuild them here.
	tx.device_info = { 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a };
	tx.data = { 0x10, 0x20, 0x30, 0x40, 0x50, 0x60, 0x70, 0x80 };
	tx.tx_hash = compute_tx_hash (tx);
	tx.sig = crypto::sign (crypto::sig_id::mac33, crypto::derive_key_pair (0xde0000ull), tx.tx_hash);
	CHECK (to_hex (encode_transaction (tx)) == hex);
	auto decoded = decode_transaction (from_hex (hex));
	CHECK (equal_tx (decoded, tx));
	CHECK (compute_tx_hash (decoded) == decoded.tx_hash);
}

TEST_CASE ("header wire layout is 80 signed bytes plus the 33-byte signature")
{
	auto chain = oracles::build_test_chain (1);
	auto const & header = chain[1].header;
	CHECK (encode_header (header).size () == block_header_wire_size);
	CHECK (header_signing_bytes (header).size () == block_header_signed_prefix);
	CHECK (block_header_wire_size == 113);
	auto decoded = decode_header (encode_header (header), crypto::hash_id::sha256);
	CHECK (decoded.block_hash == header.block_hash);
	CHECK (decoded.merkle_root == header.merkle_root);
	CHECK (decoded.timestamp == header.timestamp);
}

TEST_CASE ("genesis block round-trips")
{
	auto genesis = make_genesis ();
	CHECK (genesis.height == 0);
	CHECK (genesis.header.num_txs == 0);
	CHECK (genesis.header.timestamp == 0);
	CHECK (genesis.header.hash_pre_data_blk == crypto::digest{});
	auto encoded = encode_block (genesis);
	CHECK (encoded.size () == block_header_wire_size);
	auto decoded = decode_block (encoded, 0);
	CHECK (decoded.header.block_hash == genesis.header.block_hash);
	chain_segment singleton{ { genesis }, 0, 0 };
	CHECK (verify_chain (singleton).passed);
}

TEST_CASE ("a block of 2000 txs of 150 bytes each sizes exactly as the table predicts")
{
	auto leader = crypto::derive_key_pair (0x4e0000ull);
	connector::tx_pool pool (4000);
	connector::permission_registry reg;
	connector::tx_validator validator (reg, connector::node_identity (0));
	for (std::uint32_t i = 0; i < 2000; ++i)
	{
		// 140 fixed + 2 + 8 = 150 encoded bytes.
		pool.add (validator.validate (oracles::make_test_tx (i, 1, 1, 2, 8), connector::node_identity (0)));
	}
	auto genesis = make_genesis ();
	auto block = connector::build_block (pool, genesis.header, 0, 5000, leader, 1);
	auto encoded = encode_block (block);
	CHECK (encoded.size () == 113 + 2000 * (4 + 4 + 4 + 150 + 32));
	CHECK (encoded.size () == 388113);
	CHECK (encoded.size () == oracles::block_size_by_table (std::vector<std::size_t> (2000, 150)));
	CHECK (encoded_block_size (block) == encoded.size ());
	auto decoded = decode_block (encoded, 1);
	CHECK (decoded.body.entries.size () == 2000);
	CHECK (decoded.body.entries.front ().no == 1);
	CHECK (decoded.body.entries.back ().no == 2000);
}

TEST_CASE ("size model equals encoder output on 100 random blocks")
{
	sim::rng rng (17);
	auto leader = crypto::derive_key_pair (0x4e0000ull);
	auto genesis = make_genesis ();
	connector::permission_registry reg;
	for (int trial = 0; trial < 100; ++trial)
	{
		connector::tx_pool pool;
		connector::tx_validator validator (reg, connector::node_identity (0));
		auto count = rng.uniform (1, 40);
		for (std::uint64_t i = 0; i < count; ++i)
		{
			pool.add (validator.validate (oracles::random_tx (rng, 1 + rng.uniform (0, 5)), connector::node_identity (0)));
		}
		if (pool.empty ())
		{
			continue;
		}
		auto block = connector::build_block (pool, genesis.header, 0, 5000, leader, 10);
		CHECK (encode_block (block).size () == encoded_block_size (block));
	}
}

TEST_CASE ("corruption is detected after decode via verification")
{
	auto chain = oracles::build_test_chain (1);
	auto encoded = encode_block (chain[1]);
	// Flip one byte inside the merkle root region (offset 36..67).
	encoded[40] ^= 0xff;
	auto decoded = decode_block (encoded, 1);
	chain_segment singleton{ { decoded }, 1, 1 };
	auto report = verify_chain (singleton, &chain[0].header);
	CHECK_FALSE (report.passed);
	// Truncation is rejected at decode time.
	bytes truncated (encoded.begin (), encoded.begin () + 150);
	CHECK_THROWS_AS (decode_block (truncated, 1), malformed_block_error);
	// Broken body numbering is rejected at decode time.
	auto renumbered = encode_block (chain[1]);
	renumbered[block_header_wire_size] = 9;
	CHECK_THROWS_AS (decode_block (renumbered, 1), malformed_block_error);
}

TEST_CASE ("verify_chain passes an honest 10-block chain")
{
	auto chain = oracles::build_test_chain (10);
	auto segment = make_segment (chain);
	auto report = verify_chain (segment);
	CHECK (report.passed);
	CHECK (report.blocks.size () == 11);
	CHECK (report.describe () == "ok");
}

TEST_CASE ("verify_chain isolates a mutated body to a merkle failure at that height")
{
	auto chain = oracles::build_test_chain (10);
	chain[5].body.entries[0].tx_data[100] ^= 0x01;
	auto segment = make_segment (chain);
	auto report = verify_chain (segment);
	CHECK_FALSE (report.passed);
	for (auto const & check : report.blocks)
	{
		if (check.height == 5)
		{
			CHECK_FALSE (check.merkle_ok);
			CHECK (check.link_ok);
			CHECK (check.hash_ok);
			CHECK (check.timestamp_ok);
		}
		else
		{
			CHECK (check.passed ());
		}
	}
}

TEST_CASE ("verify_chain flags a repeated timestamp")
{
	auto chain = oracles::build_test_chain (5);
	// Rebuild block 3 with block 2's timestamp, keeping links valid.
	auto & block = chain[3];
	block.header.timestamp = chain[2].header.timestamp;
	auto leader = crypto::derive_key_pair (0x4e0000ull);
	block.header.sig = crypto::sign (crypto::sig_id::mac33, leader, header_signing_bytes (block.header));
	block.header.block_hash = compute_block_hash (block.header, crypto::hash_id::sha256);
	chain[4].header.hash_pre_data_blk = block.header.block_hash;
	chain[4].header.sig = crypto::sign (crypto::sig_id::mac33, leader, header_signing_bytes (chain[4].header));
	chain[4].header.block_hash = compute_block_hash (chain[4].header, crypto::hash_id::sha256);
	auto report = verify_chain (make_segment (chain));
	CHECK_FALSE (report.passed);
	CHECK_FALSE (report.blocks[3].timestamp_ok);
	CHECK (report.blocks[3].link_ok);
}

TEST_CASE ("verify_chain honors the trusted head")
{
	auto chain = oracles::build_test_chain (4);
	std::vector<data_block> tail (chain.begin () + 2, chain.end ());
	auto segment = make_segment (tail);
	CHECK (verify_chain (segment, &chain[1].header).passed);
	CHECK_FALSE (verify_chain (segment, &chain[0].header).passed);
	CHECK_FALSE (verify_chain (segment, &chain[0].header).head_link_ok);
}

TEST_CASE ("golden block and segment fixtures verify and re-encode identically")
{
	auto block_hex = read_fixture ("block.hex");
	auto block = decode_block (from_hex (block_hex), 1);
	CHECK (to_hex (encode_block (block)) == block_hex);

	auto segment_hex = read_fixture ("segment3.hex");
	auto segment = decode_segment (from_hex (segment_hex));
	CHECK (segment.first_height == 0);
	CHECK (segment.last_height == 2);
	CHECK (verify_chain (segment).passed);
	CHECK (to_hex (encode_segment (segment)) == segment_hex);
	CHECK (segment.blocks[1].header.block_hash == block.header.block_hash);
}

TEST_CASE ("segments require contiguous heights")
{
	auto chain = oracles::build_test_chain (4);
	std::vector<data_block> gap{ chain[0], chain[2] };
	CHECK_THROWS_AS (make_segment (gap), malformed_block_error);
	CHECK_THROWS_AS (make_segment ({}), malformed_block_error);
}

TEST_CASE ("wire envelopes round-trip and authenticate")
{
	auto key = crypto::derive_key_pair (1);
	auto env = wire::make_envelope (key, wire::kind::sync_request, 3, bytes{ 1, 2, 3 });
	auto decoded = wire::decode_envelope (wire::encode_envelope (env));
	CHECK (decoded.msg_kind == wire::kind::sync_request);
	CHECK (decoded.sender == 3);
	CHECK (decoded.payload == bytes{ 1, 2, 3 });
	CHECK (wire::verify_envelope (decoded, key.pub));
	decoded.payload.push_back (4);
	CHECK_FALSE (wire::verify_envelope (decoded, key.pub));
}
