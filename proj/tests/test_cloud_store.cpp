#include <doctest.h>

#include "oracles.hpp"

#include <chaintier/cloud_store.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/rng.hpp>

#include <filesystem>

using namespace chaintier;
using namespace chaintier::cloudstore;

namespace
{
chain_segment slice (std::vector<data_block> const & chain, std::uint64_t first, std::uint64_t last)
{
	std::vector<data_block> blocks (chain.begin () + static_cast<std::ptrdiff_t> (first), chain.begin () + static_cast<std::ptrdiff_t> (last) + 1);
	return make_segment (blocks);
}
}

TEST_CASE ("segments append, duplicates are no-ops and gaps are rejected")
{
	auto chain = oracles::build_test_chain (6);
	archive cloud (3, 3);
	CHECK (cloud.empty ());

	auto receipt = cloud.store_segment (slice (chain, 0, 3));
	CHECK_FALSE (receipt.duplicate);
	CHECK (cloud.head_height () == 3);
	CHECK (cloud.get_head ().block_hash == chain[3].header.block_hash);
	auto bytes_before = cloud.total_bytes ();

	auto replay = cloud.store_segment (slice (chain, 0, 3));
	CHECK (replay.duplicate);
	CHECK (cloud.total_bytes () == bytes_before);

	CHECK_THROWS_AS (cloud.store_segment (slice (chain, 5, 6)), head_gap_error);

	auto extend = cloud.store_segment (slice (chain, 4, 6));
	CHECK_FALSE (extend.duplicate);
	CHECK (cloud.head_height () == 6);

	// Head height never decreases.
	CHECK (cloud.store_segment (slice (chain, 4, 6)).duplicate);
	CHECK (cloud.head_height () == 6);
}

TEST_CASE ("the first archived segment must start at genesis")
{
	auto chain = oracles::build_test_chain (3);
	archive cloud (3, 3);
	CHECK_THROWS_AS (cloud.store_segment (slice (chain, 1, 3)), head_gap_error);
}

TEST_CASE ("a corrupt segment is refused with a verification error")
{
	auto chain = oracles::build_test_chain (3);
	auto segment = slice (chain, 0, 3);
	segment.blocks[1].body.entries[0].tx_data[50] ^= 0x01;
	archive cloud (3, 3);
	CHECK_THROWS_AS (cloud.store_segment (segment), verification_error);
	CHECK (cloud.empty ());
}

TEST_CASE ("majority head survives one tampered replica out of three")
{
	auto chain = oracles::build_test_chain (4);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 4));
	auto honest_head = cloud.get_head ().block_hash;

	cloud.tamper_head (1);
	auto result = cloud.head_query ();
	CHECK (result.header.block_hash == honest_head);
	REQUIRE (result.outvoted.size () == 1);
	CHECK (result.outvoted[0] == 1);
}

TEST_CASE ("two identically tampered replicas outvote the honest one")
{
	// Outside the honest-majority trust model: the wrong head wins.
	auto chain = oracles::build_test_chain (2);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 2));
	auto honest_head = cloud.get_head ().block_hash;
	cloud.tamper_head (0);
	cloud.tamper_head (1);
	CHECK (cloud.get_head ().block_hash != honest_head);
}

TEST_CASE ("majority reads survive any minority tamper pattern")
{
	auto chain = oracles::build_test_chain (3);
	sim::rng rng (23);
	for (std::uint32_t replicas : { 3u, 5u })
	{
		auto honest_needed = replicas / 2 + 1;
		for (int trial = 0; trial < 25; ++trial)
		{
			archive cloud (replicas, replicas);
			cloud.store_segment (slice (chain, 0, 3));
			auto honest_head = cloud.get_head ().block_hash;
			auto dishonest = (replicas - 1) / 2;
			std::set<std::uint32_t> tampered;
			while (tampered.size () < dishonest)
			{
				tampered.insert (static_cast<std::uint32_t> (rng.uniform (0, replicas - 1)));
			}
			for (auto r : tampered)
			{
				if (rng.uniform (0, 1) == 0)
				{
					cloud.tamper_head (r);
				}
				else
				{
					cloud.tamper_block (r, rng.uniform (0, 3));
				}
			}
			CHECK (cloud.get_head ().block_hash == honest_head);
			CHECK (replicas - tampered.size () >= honest_needed);
		}
	}
}

TEST_CASE ("consistency verification pinpoints the divergent replica and height")
{
	auto chain = oracles::build_test_chain (5);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 5));
	CHECK (cloud.verify_consistency ().consistent ());

	cloud.tamper_block (1, 3);
	auto report = cloud.verify_consistency ();
	CHECK_FALSE (report.consistent ());
	bool found = false;
	for (auto const & finding : report.divergences)
	{
		found = found || (finding.replica == 1 && finding.height == 3);
		CHECK (finding.replica == 1);
	}
	CHECK (found);
}

TEST_CASE ("query honors access control and archived range")
{
	auto chain = oracles::build_test_chain (5);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 5));

	connector::access_policy policy;
	auto owner = connector::node_identity (0);
	auto reader = connector::device_identity (50);
	policy.set_owner ("chain", owner);
	connector::grant_access (policy, owner, reader, "chain", "read");

	auto segment = cloud.query_blocks (reader, policy, 1, 4);
	CHECK (segment.first_height == 1);
	CHECK (segment.last_height == 4);
	CHECK (verify_chain (segment, &chain[0].header).passed);

	auto stranger = connector::device_identity (51);
	CHECK_THROWS_AS (cloud.query_blocks (stranger, policy, 1, 4), access_denied_error);
	CHECK_THROWS_AS (cloud.query_blocks (reader, policy, 1, 9), range_unavailable_error);
}

TEST_CASE ("the index holds every archived height on all replicas")
{
	auto chain = oracles::build_test_chain (4);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 2));
	cloud.store_segment (slice (chain, 3, 4));
	auto index = cloud.index ();
	CHECK (index.size () == 5);
	for (auto const & [height, holders] : index)
	{
		CHECK (holders.size () >= cloud.replication_factor ());
	}
}

TEST_CASE ("accounting-mode records store sizes without blocks")
{
	archive cloud (3, 3);
	segment_record first;
	first.first_height = 0;
	first.last_height = 100;
	first.bytes = 12'345;
	first.head_hash = crypto::fast_hash (bytes{ 1 });
	CHECK_FALSE (cloud.store_segment (first).duplicate);
	CHECK (cloud.total_bytes () == 12'345);
	CHECK (cloud.store_segment (first).duplicate);
	segment_record gap;
	gap.first_height = 102;
	gap.last_height = 110;
	gap.bytes = 1;
	CHECK_THROWS_AS (cloud.store_segment (gap), head_gap_error);
	CHECK (cloud.head_height () == 100);
}

TEST_CASE ("archive persists to a directory per replica and loads back")
{
	auto chain = oracles::build_test_chain (5);
	archive cloud (3, 3);
	cloud.store_segment (slice (chain, 0, 3));
	cloud.store_segment (slice (chain, 4, 5));

	auto dir = std::filesystem::temp_directory_path () / "chaintier_store_test";
	std::filesystem::remove_all (dir);
	cloud.save (dir);
	CHECK (std::filesystem::exists (dir / "replica_0" / "manifest.json"));
	CHECK (std::filesystem::exists (dir / "replica_2" / "seg_000000000000_000000000003.bin"));

	auto loaded = archive::load (dir);
	CHECK (loaded.head_height () == 5);
	CHECK (loaded.get_head ().block_hash == chain[5].header.block_hash);
	CHECK (loaded.total_bytes () == cloud.total_bytes ());
	CHECK (loaded.verify_consistency ().consistent ());
	auto index = loaded.index ();
	CHECK (index.size () == 6);
	std::filesystem::remove_all (dir);
}
