#pragma once

#include <chaintier/cloud_store.hpp>
#include <chaintier/consensus.hpp>
#include <chaintier/core_types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace chaintier::cloudsync
{
// Hybrid trigger: fire on the byte threshold or on the schedule, whichever
// comes first; min_interval throttles consecutive request broadcasts.
struct sync_policy
{
	std::uint64_t capacity_bytes{ 128'000'000'000 };
	std::uint64_t trigger_threshold_bytes{ 100'000'000'000 };
	std::uint64_t min_interval_ns{ 600ull * 1'000'000'000 };
	std::uint64_t schedule_period_ns{ 86'400ull * 1'000'000'000 }; // 0 disables
	double overhead_factor{ 1.3 };
	void validate () const;
};

enum class trigger_reason : std::uint8_t
{
	none = 0,
	threshold_reached = 1,
	scheduled = 2,
};

// last_*_ns of 0 means "never"; a first broadcast is not suppressed.
trigger_reason check_trigger (sync_policy const & policy, std::uint64_t local_bytes, std::uint64_t now_ns, std::uint64_t last_sync_ns, std::uint64_t last_request_ns);

struct sync_request
{
	std::uint32_t requester{ 0 };
	block_header latest{};
	std::uint64_t latest_height{ 0 };
	trigger_reason reason{ trigger_reason::none };
	crypto::signature sig{};
};

bytes sync_request_signing_bytes (sync_request const & req);
sync_request make_sync_request (crypto::key_pair const & key, std::uint32_t requester, block_header const & latest, std::uint64_t latest_height, trigger_reason reason);
bool verify_sync_request (sync_request const & req, crypto::public_key const & pub);

// "agree to synchronization" response, sent to the current leader.
struct sync_vote
{
	std::uint32_t voter{ 0 };
	std::uint32_t requester{ 0 };
	crypto::digest head_hash{};
	crypto::signature sig{};
};

bytes sync_vote_signing_bytes (sync_vote const & vote);
sync_vote make_sync_vote (crypto::key_pair const & key, std::uint32_t voter, std::uint32_t requester, crypto::digest const & head_hash);
bool verify_sync_vote (sync_vote const & vote, crypto::public_key const & pub);

// Emits a signed agree vote iff the requester's head matches ours.
std::optional<sync_vote> vote_on_sync (sync_request const & req, block_header const & my_latest, crypto::key_pair const & my_key, std::uint32_t my_id, crypto::public_key const & requester_pub);

enum class session_decision : std::uint8_t
{
	pending = 0,
	approved = 1,
	rejected = 2,
};

enum class session_outcome : std::uint8_t
{
	none = 0,
	regular = 1,
	exception = 2,
};

struct sync_session
{
	sync_request request;
	std::map<std::uint32_t, sync_vote> agree_votes;
	session_decision decision{ session_decision::pending };
	session_outcome outcome{ session_outcome::none };
	// Segment bounds frozen at approval; blocks finalized later join the
	// next session.
	std::uint64_t frozen_last_height{ 0 };
	std::optional<chain_segment> segment;
	std::optional<cloudstore::segment_record> segment_meta;
};

// Records a vote after signature and head-hash screening.
bool add_sync_vote (sync_session & session, sync_vote const & vote, crypto::public_key const & voter_pub);

// Leader-side tally: approve on matching votes from more than 2/3 of all
// peers; reject when the deadline passes short of quorum.
session_decision aggregate_sync_votes (sync_session & session, consensus::config const & cfg, bool deadline_reached = false);

// Broadcast decision; peers re-verify the individually signed votes so a
// malicious aggregator cannot forge approval.
struct sync_decision_msg
{
	std::uint32_t requester{ 0 };
	crypto::digest head_hash{};
	bool approved{ false };
	std::vector<sync_vote> votes;
};

bool verify_sync_decision (sync_decision_msg const & msg, consensus::config const & cfg, std::vector<crypto::public_key> const & peer_keys);

std::uint64_t transfer_duration_ns (std::uint64_t bytes, std::uint64_t bandwidth_bytes_per_s, double overhead_factor);

struct response_message
{
	session_outcome kind{ session_outcome::regular };
	block_header updated_head{};
	std::uint64_t updated_height{ 0 };
	bool denied_duplicate{ false };
	std::string error_detail;
};

struct sync_execution
{
	response_message response;
	std::uint64_t duration_ns{ 0 };
	std::uint64_t transferred_bytes{ 0 };
};

// Cloud-side completion of an approved session: denies duplicates whose
// head already matches, otherwise stores the segment and answers with the
// updated head. Verification failures and injected interruptions yield an
// exception response. Throws head_gap_error when the cloud head is not an
// ancestor of the offered segment.
sync_execution execute_sync (sync_session & session, cloudstore::archive & cloud, std::uint64_t bandwidth_bytes_per_s, double overhead_factor, bool interrupt_transfer = false);

// Keeps only updated_head and everything after it.
std::vector<data_block> prune_local (std::vector<data_block> chain, response_message const & response);

// Cloud-side fault ledger: two detected errors mark the node.
struct fault_ledger
{
	std::map<std::uint32_t, unsigned> error_counts;
	std::set<std::uint32_t> marked;
};

enum class exception_action
{
	retry_other_node,
	marked_malicious,
};

exception_action handle_sync_exception (fault_ledger & ledger, std::uint32_t node, std::string const & error);
}
