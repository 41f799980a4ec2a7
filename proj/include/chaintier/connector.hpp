#pragma once

#include <chaintier/core_types.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>

namespace chaintier::connector
{
// Devices and overlay nodes share one identity space (16-byte ids).
using identity = device_id;

identity node_identity (std::uint32_t node_index);
identity device_identity (std::uint32_t device_index);

enum class action : std::uint8_t
{
	join = 0,
	submit = 1,
	validate = 2,
	aggregate = 3,
	create_asset = 4,
};

constexpr std::uint8_t role_bit (action a)
{
	return static_cast<std::uint8_t> (1u << static_cast<unsigned> (a));
}

struct permission_registry
{
	std::map<identity, std::uint8_t> whitelist; // identity -> role mask
	void add (identity const & who, std::uint8_t roles);
	void remove (identity const & who);
};

bool check_permission (permission_registry const & reg, identity const & who, action what);

// Finer than all-or-nothing: per-(resource, permission) grants with
// immediate revocation. Each resource has one owner who may alter grants.
struct access_policy
{
	std::map<std::string, identity> owners;
	std::map<identity, std::set<std::pair<std::string, std::string>>> grants;
	void set_owner (std::string const & resource, identity const & owner);
};

void grant_access (access_policy & policy, identity const & caller, identity const & who, std::string const & resource, std::string const & perm);
void revoke_access (access_policy & policy, identity const & caller, identity const & who, std::string const & resource, std::string const & perm);
bool check_access (access_policy const & policy, identity const & who, std::string const & resource, std::string const & perm);

// A transaction that passed both validation phases. The mark is set exactly
// once; the post-mark hash commits to the marked encoding.
struct validated_transaction
{
	transaction inner;
	std::uint8_t mark{ 0 };
	crypto::digest post_mark_hash{};
	identity validator{};
};

// Marked encoding inserts the mark byte after sig_type.
bytes encode_marked_transaction (transaction const & tx, std::uint8_t mark);

// Two-phase validation with per-(gateway, tx) retry accounting. Phase 1
// recomputes the digest against tx_hash; phase 2 sets the mark and computes
// the post-mark hash. A transaction failing phase 1 may be re-requested from
// the same gateway up to retry_limit times; past that the gateway is flagged.
class tx_validator
{
public:
	explicit tx_validator (permission_registry const & reg, identity self, unsigned retry_limit = 3);

	validated_transaction validate (transaction const & tx, identity const & gateway);

	bool gateway_flagged (identity const & gateway) const;
	unsigned failures (identity const & gateway, std::uint32_t tx_id) const;

private:
	permission_registry const & registry_;
	identity self_;
	unsigned retry_limit_;
	std::map<std::pair<identity, std::uint32_t>, unsigned> failure_counts_;
	std::set<identity> flagged_;
	std::set<std::tuple<device_id, std::uint32_t, std::uint64_t>> marked_;
};

enum class pool_result
{
	accepted,
	duplicate,
	full,
};

// Bounded buffer of validated transactions awaiting block inclusion.
// Overflow rejects the incoming transaction (backpressure), preserving
// already-validated work. Duplicates on (from, tx_id, timestamp) rejected.
class tx_pool
{
public:
	explicit tx_pool (std::size_t capacity = 100000);

	pool_result add (validated_transaction vtx);
	std::size_t size () const;
	bool empty () const;
	std::size_t capacity () const;
	std::deque<validated_transaction> const & pending () const;

	// Removes and returns up to max_txs entries with timestamps strictly
	// after min_timestamp, ordered by (timestamp, from, tx_id).
	std::vector<validated_transaction> drain (std::size_t max_txs, std::uint64_t min_timestamp);

	// Drops an entry once it is seen inside a finalized block.
	void remove (device_id const & from, std::uint32_t tx_id, std::uint64_t timestamp);

private:
	std::size_t capacity_;
	std::deque<validated_transaction> pending_;
	std::set<std::tuple<device_id, std::uint32_t, std::uint64_t>> keys_;
};

// Forms a block for the consensus leader: drains the pool (ordered by
// timestamp, from, tx_id), numbers entries 1..N, computes the Merkle root
// over transaction hashes and signs the header.
data_block build_block (tx_pool & pool, block_header const & prev, std::uint64_t prev_height, std::size_t max_txs, crypto::key_pair const & leader_key, std::uint64_t now, crypto::hash_id scheme = crypto::hash_id::sha256);
}
