#include <doctest.h>

#include "oracles.hpp"

#include <chaintier/cloud_sync.hpp>
#include <chaintier/errors.hpp>

using namespace chaintier;
using namespace chaintier::cloudsync;

namespace
{
constexpr std::uint64_t gb = 1'000'000'000ull;
constexpr std::uint64_t ns_per_s = 1'000'000'000ull;
constexpr std::uint64_t hours_24 = 86'400ull * ns_per_s;

sync_policy paper_policy ()
{
	sync_policy policy;
	policy.capacity_bytes = 128 * gb;
	policy.trigger_threshold_bytes = 100 * gb;
	policy.min_interval_ns = 600 * ns_per_s;
	policy.schedule_period_ns = hours_24;
	policy.overhead_factor = 1.3;
	return policy;
}
}

TEST_CASE ("trigger fires on the 100 GB threshold")
{
	auto policy = paper_policy ();
	CHECK (check_trigger (policy, 100 * gb, 1'000 * ns_per_s, 0, 0) == trigger_reason::threshold_reached);
	CHECK (check_trigger (policy, 100 * gb + 1, 1'000 * ns_per_s, 0, 0) == trigger_reason::threshold_reached);
	CHECK (check_trigger (policy, 99 * gb, 1'000 * ns_per_s, 999 * ns_per_s, 0) == trigger_reason::none);
}

TEST_CASE ("trigger fires on the 24 h schedule with one day's volume pending")
{
	auto policy = paper_policy ();
	// 64.8 GB = 750 KB/s for a day; well under the byte threshold.
	CHECK (check_trigger (policy, 64'800'000'000ull, hours_24, 0, 0) == trigger_reason::scheduled);
	CHECK (check_trigger (policy, 64'800'000'000ull, hours_24 - 1, 0, 0) == trigger_reason::none);
}

TEST_CASE ("a second trigger within min_interval is suppressed")
{
	auto policy = paper_policy ();
	auto first = hours_24;
	CHECK (check_trigger (policy, 100 * gb, first + 1, 0, first) == trigger_reason::none);
	CHECK (check_trigger (policy, 100 * gb, first + policy.min_interval_ns, 0, first) == trigger_reason::threshold_reached);
	// A disabled schedule never fires on time alone.
	policy.schedule_period_ns = 0;
	CHECK (check_trigger (policy, 1 * gb, 10 * hours_24, 0, 0) == trigger_reason::none);
}

TEST_CASE ("policy validation rejects a threshold above capacity")
{
	sync_policy policy;
	policy.capacity_bytes = 10;
	policy.trigger_threshold_bytes = 11;
	CHECK_THROWS_AS (policy.validate (), config_error);
}

TEST_CASE ("peers vote only when the requester's head matches theirs")
{
	auto chain = oracles::build_test_chain (3);
	auto requester_key = crypto::derive_key_pair (1);
	auto voter_key = crypto::derive_key_pair (2);
	auto req = make_sync_request (requester_key, 0, chain[3].header, 3, trigger_reason::threshold_reached);

	auto vote = vote_on_sync (req, chain[3].header, voter_key, 1, requester_key.pub);
	REQUIRE (vote.has_value ());
	CHECK (verify_sync_vote (*vote, voter_key.pub));
	CHECK (vote->head_hash == chain[3].header.block_hash);

	// One block behind: no vote.
	CHECK_FALSE (vote_on_sync (req, chain[2].header, voter_key, 1, requester_key.pub).has_value ());

	// Forged request signature: dropped.
	auto forged = req;
	forged.sig[0] ^= 0xff;
	CHECK_FALSE (vote_on_sync (forged, chain[3].header, voter_key, 1, requester_key.pub).has_value ());
}

TEST_CASE ("sync approval needs strictly more than two thirds of 50 peers")
{
	auto chain = oracles::build_test_chain (1);
	consensus::config cfg{ 50, 0 };
	std::vector<crypto::key_pair> keys;
	for (std::uint32_t i = 0; i < 50; ++i)
	{
		keys.push_back (crypto::derive_key_pair (0x900 + i));
	}
	auto build_session = [&] (std::uint32_t votes) {
		sync_session session;
		session.request = make_sync_request (keys[0], 0, chain[1].header, 1, trigger_reason::threshold_reached);
		for (std::uint32_t v = 0; v < votes; ++v)
		{
			auto vote = make_sync_vote (keys[v], v, 0, chain[1].header.block_hash);
			CHECK (add_sync_vote (session, vote, keys[v].pub));
		}
		return session;
	};

	auto with_34 = build_session (34);
	CHECK (aggregate_sync_votes (with_34, cfg) == session_decision::approved);
	CHECK (with_34.frozen_last_height == 1);

	auto with_33 = build_session (33);
	CHECK (aggregate_sync_votes (with_33, cfg) == session_decision::pending);
	CHECK (aggregate_sync_votes (with_33, cfg, true) == session_decision::rejected);
}

TEST_CASE ("a malicious aggregator cannot fake approval past re-verification")
{
	auto chain = oracles::build_test_chain (1);
	consensus::config cfg{ 50, 0 };
	std::vector<crypto::key_pair> keys;
	std::vector<crypto::public_key> pubs;
	for (std::uint32_t i = 0; i < 50; ++i)
	{
		keys.push_back (crypto::derive_key_pair (0x900 + i));
		pubs.push_back (keys.back ().pub);
	}
	sync_decision_msg msg;
	msg.requester = 0;
	msg.head_hash = chain[1].header.block_hash;
	msg.approved = true;
	for (std::uint32_t v = 0; v < 33; ++v)
	{
		msg.votes.push_back (make_sync_vote (keys[v], v, 0, chain[1].header.block_hash));
	}
	// 33 honest votes: not enough, however the leader pads them.
	CHECK_FALSE (verify_sync_decision (msg, cfg, pubs));
	auto padded = msg;
	padded.votes.push_back (padded.votes.front ()); // duplicate voter
	CHECK_FALSE (verify_sync_decision (padded, cfg, pubs));
	auto forged = msg;
	auto fake = make_sync_vote (keys[40], 41, 0, chain[1].header.block_hash); // wrong key for voter 41
	forged.votes.push_back (fake);
	CHECK_FALSE (verify_sync_decision (forged, cfg, pubs));
	// The 34th genuine vote settles it.
	msg.votes.push_back (make_sync_vote (keys[33], 33, 0, chain[1].header.block_hash));
	CHECK (verify_sync_decision (msg, cfg, pubs));
}

TEST_CASE ("one day's segment over 200 Mbps takes 2592 s raw, about an hour with overhead")
{
	constexpr std::uint64_t day_bytes = 64'800'000'000ull; // 750 KB/s * 86400 s
	constexpr std::uint64_t bandwidth = 200'000'000 / 8; // 25 MB/s
	CHECK (transfer_duration_ns (day_bytes, bandwidth, 1.0) == 2'592 * ns_per_s);
	auto with_overhead = transfer_duration_ns (day_bytes, bandwidth, 1.3);
	CHECK (with_overhead >= 50ull * 60 * ns_per_s);
	CHECK (with_overhead <= 70ull * 60 * ns_per_s);
	CHECK_THROWS_AS (transfer_duration_ns (1, 0, 1.0), config_error);
}

namespace
{
sync_session approved_session (std::vector<data_block> const & chain, std::uint64_t first, std::uint64_t last)
{
	sync_session session;
	auto key = crypto::derive_key_pair (0x77);
	session.request = make_sync_request (key, 0, chain[last].header, last, trigger_reason::scheduled);
	session.decision = session_decision::approved;
	session.frozen_last_height = last;
	std::vector<data_block> blocks (chain.begin () + static_cast<std::ptrdiff_t> (first), chain.begin () + static_cast<std::ptrdiff_t> (last) + 1);
	session.segment = make_segment (blocks);
	return session;
}
}

TEST_CASE ("execute_sync stores, denies duplicates and reports interruptions")
{
	auto chain = oracles::build_test_chain (6);
	cloudstore::archive cloud (3, 3);
	constexpr std::uint64_t bandwidth = 25'000'000;

	auto session = approved_session (chain, 0, 4);
	auto exec = execute_sync (session, cloud, bandwidth, 1.3);
	CHECK (exec.response.kind == session_outcome::regular);
	CHECK_FALSE (exec.response.denied_duplicate);
	CHECK (exec.response.updated_height == 4);
	CHECK (cloud.head_height () == 4);
	auto stored = cloud.total_bytes ();
	CHECK (stored == session.segment->encoded_bytes ());

	// Replaying the same approved session changes nothing.
	auto replay = approved_session (chain, 0, 4);
	auto again = execute_sync (replay, cloud, bandwidth, 1.3);
	CHECK (again.response.kind == session_outcome::regular);
	CHECK (again.response.denied_duplicate);
	CHECK (cloud.total_bytes () == stored);

	// An interrupted transfer produces an exception response and no growth.
	auto tail = approved_session (chain, 5, 6);
	auto interrupted = execute_sync (tail, cloud, bandwidth, 1.3, true);
	CHECK (interrupted.response.kind == session_outcome::exception);
	CHECK (cloud.total_bytes () == stored);

	// A pending session cannot execute.
	sync_session pending;
	pending.request = tail.request;
	CHECK_THROWS_AS (execute_sync (pending, cloud, bandwidth, 1.3), error);

	// A segment that skips past the cloud head is a gap.
	auto gap = approved_session (chain, 6, 6);
	CHECK_THROWS_AS (execute_sync (gap, cloud, bandwidth, 1.3), head_gap_error);
}

TEST_CASE ("a corrupt segment turns into an exception response")
{
	auto chain = oracles::build_test_chain (3);
	cloudstore::archive cloud (3, 3);
	auto session = approved_session (chain, 0, 3);
	session.segment->blocks[2].body.entries[0].tx_data[60] ^= 0x01;
	auto exec = execute_sync (session, cloud, 25'000'000, 1.3);
	CHECK (exec.response.kind == session_outcome::exception);
	CHECK (cloud.empty ());
	CHECK (session.outcome == session_outcome::exception);
}

TEST_CASE ("prune keeps the updated head plus everything after it")
{
	auto chain = oracles::build_test_chain (1000);
	// Drop genesis so the local chain is heights 1..1000, a thousand blocks.
	std::vector<data_block> local (chain.begin () + 1, chain.end ());
	response_message resp;
	resp.kind = session_outcome::regular;
	resp.updated_head = chain[990].header;
	resp.updated_height = 990;
	auto pruned = prune_local (local, resp);
	CHECK (pruned.size () == 11); // head 990 plus the 10 newest blocks
	CHECK (pruned.front ().height == 990);
	CHECK (pruned.back ().height == 1000);

	// Degenerate: nothing formed during the sync leaves exactly the head.
	std::vector<data_block> only_head (chain.begin () + 990, chain.begin () + 991);
	CHECK (prune_local (only_head, resp).size () == 1);

	// Unknown head: refuse to prune.
	response_message stranger;
	stranger.updated_head = make_genesis ().header;
	stranger.updated_head.block_hash[0] ^= 0xff;
	stranger.updated_height = 5;
	CHECK_THROWS_AS (prune_local (pruned, stranger), head_mismatch_error);
}

TEST_CASE ("two sync errors mark a node as potentially malicious")
{
	fault_ledger ledger;
	CHECK (handle_sync_exception (ledger, 7, "bad segment") == exception_action::retry_other_node);
	CHECK (ledger.error_counts[7] == 1);
	CHECK (ledger.marked.empty ());
	// A success in between does not reset the count (no API touches it).
	CHECK (handle_sync_exception (ledger, 7, "bad segment again") == exception_action::marked_malicious);
	CHECK (ledger.marked.count (7) == 1);
	// Further errors keep the mark without re-announcing it.
	CHECK (handle_sync_exception (ledger, 7, "third") == exception_action::retry_other_node);
	CHECK (ledger.error_counts[7] == 3);
	// Errors from different nodes are independent.
	CHECK (handle_sync_exception (ledger, 9, "one-off") == exception_action::retry_other_node);
	CHECK (ledger.marked.count (9) == 0);
}
