#pragma once

#include <chaintier/core_types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace chaintier::consensus
{
struct config
{
	std::uint32_t n{ 0 };
	std::uint64_t epoch_timeout_ns{ 250'000'000 };

	std::uint32_t f_max () const
	{
		return (n - 1) / 3;
	}
	// Smallest integer strictly greater than 2n/3.
	std::uint32_t quorum () const
	{
		return 2 * n / 3 + 1;
	}
	void validate () const;
};

// Deterministic round-robin: node (epoch + view) mod n.
std::uint32_t elect_leader (config const & cfg, std::uint64_t epoch, std::uint32_t view);

struct signed_vote
{
	std::uint32_t voter{ 0 };
	std::uint64_t epoch{ 0 };
	std::uint32_t view{ 0 };
	crypto::digest block_hash{};
	crypto::signature sig{};
};

bytes vote_signing_bytes (std::uint32_t voter, std::uint64_t epoch, std::uint32_t view, crypto::digest const & block_hash);
signed_vote make_vote (crypto::key_pair const & key, std::uint32_t voter, std::uint64_t epoch, std::uint32_t view, crypto::digest const & block_hash);
bool verify_vote (signed_vote const & vote, crypto::public_key const & pub);

struct view_change_msg
{
	std::uint32_t node{ 0 };
	std::uint64_t epoch{ 0 };
	std::uint32_t new_view{ 0 };
	crypto::signature sig{};
};

bytes view_change_signing_bytes (std::uint32_t node, std::uint64_t epoch, std::uint32_t new_view);
view_change_msg make_view_change (crypto::key_pair const & key, std::uint32_t node, std::uint64_t epoch, std::uint32_t new_view);
bool verify_view_change (view_change_msg const & msg, crypto::public_key const & pub);

enum class phase
{
	idle,
	proposed,
	finalized,
	view_changing,
};

enum class proposal_outcome
{
	voted,
	rejected_not_leader,
	rejected_invalid,
	rejected_duplicate,
};

struct vote_decision
{
	proposal_outcome outcome;
	std::optional<signed_vote> vote;
};

enum class vote_outcome
{
	accepted,
	finalized,
	duplicate_ignored,
	stale_ignored,
	invalid_signature,
};

struct finalize_decision
{
	vote_outcome outcome;
	std::optional<data_block> finalized;
};

// One consensus node's epoch state machine. Instant finality: a block
// finalized at vote quorum is never reverted; every honest node holds the
// same chain prefix after each epoch.
class node_state
{
public:
	node_state (config cfg, std::uint32_t self, crypto::key_pair key, std::vector<crypto::public_key> peer_keys, block_header genesis, crypto::hash_id scheme = crypto::hash_id::sha256);

	std::uint64_t epoch () const
	{
		return epoch_;
	}
	std::uint32_t view () const
	{
		return view_;
	}
	phase current_phase () const
	{
		return phase_;
	}
	block_header const & latest () const
	{
		return latest_;
	}
	std::uint64_t latest_height () const
	{
		return latest_height_;
	}
	std::uint32_t current_leader () const
	{
		return elect_leader (cfg_, epoch_, view_);
	}
	bool is_leader () const
	{
		return current_leader () == self_;
	}

	// Re-verifies the block (link to our latest, Merkle root and entry
	// hashes, leader signature) and emits our signed vote on success.
	vote_decision on_proposal (data_block const & block, std::uint32_t sender);

	// Tallies a vote; finalizes when distinct voters for one block hash
	// reach quorum and the matching proposal is held.
	finalize_decision on_vote (signed_vote const & vote);

	// Timeout path: emits a view-change message for view+1 (at most once
	// per target view).
	std::optional<view_change_msg> on_timeout ();

	// Returns true when a quorum of view-change messages moves us into the
	// new view.
	bool on_view_change (view_change_msg const & msg);

	// NEW_VIEW carries the quorum proof so lagging nodes can catch up.
	bool on_new_view (std::uint32_t new_view, std::vector<view_change_msg> const & proof);

	std::uint64_t view_changes_completed () const
	{
		return view_changes_completed_;
	}

	// Distinct voters behind the most recent finalization.
	std::uint32_t last_quorum_size () const
	{
		return last_quorum_size_;
	}

	std::vector<view_change_msg> view_change_proof (std::uint32_t target_view) const;

private:
	bool verify_proposal (data_block const & block, std::uint32_t sender) const;
	finalize_decision try_finalize ();
	void enter_view (std::uint32_t new_view);

	config cfg_;
	std::uint32_t self_;
	crypto::key_pair key_;
	std::vector<crypto::public_key> peer_keys_;
	crypto::hash_id scheme_;
	block_header latest_;
	std::uint64_t latest_height_{ 0 };
	std::uint64_t epoch_{ 1 };
	std::uint32_t view_{ 0 };
	phase phase_{ phase::idle };
	std::optional<data_block> proposal_;
	std::map<std::uint32_t, signed_vote> votes_;
	bool voted_this_view_{ false };
	std::map<std::uint32_t, std::map<std::uint32_t, view_change_msg>> view_changes_;
	std::set<std::uint32_t> vc_emitted_;
	std::uint64_t view_changes_completed_{ 0 };
	std::uint32_t last_quorum_size_{ 0 };
};
}
