#include <chaintier/connector.hpp>
#include <chaintier/errors.hpp>

#include <algorithm>
#include <cstring>

namespace chaintier::connector
{
identity node_identity (std::uint32_t node_index)
{
	identity id{};
	id[0] = 'N';
	std::memcpy (id.data () + 1, &node_index, sizeof (node_index));
	return id;
}

identity device_identity (std::uint32_t device_index)
{
	identity id{};
	id[0] = 'D';
	std::memcpy (id.data () + 1, &device_index, sizeof (device_index));
	return id;
}

void permission_registry::add (identity const & who, std::uint8_t roles)
{
	whitelist[who] |= roles;
}

void permission_registry::remove (identity const & who)
{
	whitelist.erase (who);
}

bool check_permission (permission_registry const & reg, identity const & who, action what)
{
	auto existing = reg.whitelist.find (who);
	if (existing == reg.whitelist.end ())
	{
		return false;
	}
	return (existing->second & role_bit (what)) != 0;
}

void access_policy::set_owner (std::string const & resource, identity const & owner)
{
	owners[resource] = owner;
}

namespace
{
	void require_owner (access_policy const & policy, identity const & caller, std::string const & resource)
	{
		auto owner = policy.owners.find (resource);
		if (owner == policy.owners.end () || owner->second != caller)
		{
			throw not_owner_error ("caller does not own resource " + resource);
		}
	}
}

void grant_access (access_policy & policy, identity const & caller, identity const & who, std::string const & resource, std::string const & perm)
{
	require_owner (policy, caller, resource);
	policy.grants[who].emplace (resource, perm);
}

void revoke_access (access_policy & policy, identity const & caller, identity const & who, std::string const & resource, std::string const & perm)
{
	require_owner (policy, caller, resource);
	auto grants = policy.grants.find (who);
	if (grants != policy.grants.end ())
	{
		grants->second.erase ({ resource, perm });
	}
}

bool check_access (access_policy const & policy, identity const & who, std::string const & resource, std::string const & perm)
{
	auto grants = policy.grants.find (who);
	if (grants == policy.grants.end ())
	{
		return false;
	}
	return grants->second.count ({ resource, perm }) > 0;
}

bytes encode_marked_transaction (transaction const & tx, std::uint8_t mark)
{
	byte_writer writer;
	writer.raw (byte_view (transaction_prehash_bytes (tx)));
	writer.raw (tx.tx_hash);
	writer.u8 (tx.sig_type);
	writer.u8 (mark);
	writer.raw (tx.sig);
	return writer.take ();
}

tx_validator::tx_validator (permission_registry const & reg, identity self, unsigned retry_limit) :
	registry_ (reg),
	self_ (self),
	retry_limit_ (retry_limit)
{
}

validated_transaction tx_validator::validate (transaction const & tx, identity const & gateway)
{
	if (marked_.count ({ tx.from, tx.tx_id, tx.timestamp }) > 0)
	{
		throw already_marked_error ("transaction already validated and marked");
	}
	if (compute_tx_hash (tx) != tx.tx_hash)
	{
		auto & count = failure_counts_[{ gateway, tx.tx_id }];
		++count;
		if (count > retry_limit_)
		{
			flagged_.insert (gateway);
			throw retry_limit_error ("re-request bound exceeded for tx " + std::to_string (tx.tx_id));
		}
		throw hash_mismatch_error ("transaction digest mismatch for tx " + std::to_string (tx.tx_id));
	}
	validated_transaction vtx;
	vtx.inner = tx;
	vtx.mark = 1;
	vtx.post_mark_hash = crypto::hash (static_cast<crypto::hash_id> (tx.hash_type), encode_marked_transaction (tx, 1));
	vtx.validator = self_;
	marked_.insert ({ tx.from, tx.tx_id, tx.timestamp });
	return vtx;
}

bool tx_validator::gateway_flagged (identity const & gateway) const
{
	return flagged_.count (gateway) > 0;
}

unsigned tx_validator::failures (identity const & gateway, std::uint32_t tx_id) const
{
	auto existing = failure_counts_.find ({ gateway, tx_id });
	return existing == failure_counts_.end () ? 0 : existing->second;
}

tx_pool::tx_pool (std::size_t capacity) :
	capacity_ (capacity)
{
}

pool_result tx_pool::add (validated_transaction vtx)
{
	std::tuple<device_id, std::uint32_t, std::uint64_t> key{ vtx.inner.from, vtx.inner.tx_id, vtx.inner.timestamp };
	if (keys_.count (key) > 0)
	{
		return pool_result::duplicate;
	}
	if (pending_.size () >= capacity_)
	{
		return pool_result::full;
	}
	keys_.insert (key);
	pending_.push_back (std::move (vtx));
	return pool_result::accepted;
}

std::size_t tx_pool::size () const
{
	return pending_.size ();
}

bool tx_pool::empty () const
{
	return pending_.empty ();
}

std::size_t tx_pool::capacity () const
{
	return capacity_;
}

std::deque<validated_transaction> const & tx_pool::pending () const
{
	return pending_;
}

std::vector<validated_transaction> tx_pool::drain (std::size_t max_txs, std::uint64_t min_timestamp)
{
	std::vector<std::size_t> eligible;
	eligible.reserve (pending_.size ());
	for (std::size_t i = 0; i < pending_.size (); ++i)
	{
		if (pending_[i].inner.timestamp > min_timestamp)
		{
			eligible.push_back (i);
		}
	}
	std::stable_sort (eligible.begin (), eligible.end (), [this] (std::size_t a, std::size_t b) {
		auto const & ta = pending_[a].inner;
		auto const & tb = pending_[b].inner;
		return std::tie (ta.timestamp, ta.from, ta.tx_id) < std::tie (tb.timestamp, tb.from, tb.tx_id);
	});
	if (eligible.size () > max_txs)
	{
		eligible.resize (max_txs);
	}
	std::vector<validated_transaction> out;
	out.reserve (eligible.size ());
	std::set<std::size_t> taken (eligible.begin (), eligible.end ());
	for (auto index : eligible)
	{
		out.push_back (std::move (pending_[index]));
	}
	std::deque<validated_transaction> rest;
	for (std::size_t i = 0; i < pending_.size (); ++i)
	{
		if (taken.count (i) == 0)
		{
			rest.push_back (std::move (pending_[i]));
		}
	}
	pending_ = std::move (rest);
	for (auto const & vtx : out)
	{
		keys_.erase ({ vtx.inner.from, vtx.inner.tx_id, vtx.inner.timestamp });
	}
	return out;
}

void tx_pool::remove (device_id const & from, std::uint32_t tx_id, std::uint64_t timestamp)
{
	std::tuple<device_id, std::uint32_t, std::uint64_t> key{ from, tx_id, timestamp };
	if (keys_.erase (key) == 0)
	{
		return;
	}
	for (auto it = pending_.begin (); it != pending_.end (); ++it)
	{
		if (it->inner.from == from && it->inner.tx_id == tx_id && it->inner.timestamp == timestamp)
		{
			pending_.erase (it);
			return;
		}
	}
}

data_block build_block (tx_pool & pool, block_header const & prev, std::uint64_t prev_height, std::size_t max_txs, crypto::key_pair const & leader_key, std::uint64_t now, crypto::hash_id scheme)
{
	if (pool.empty ())
	{
		throw empty_pool_error ("no pending transactions to bundle");
	}
	auto selected = pool.drain (max_txs, prev.timestamp);
	if (selected.empty ())
	{
		throw empty_pool_error ("no transaction is newer than the previous block");
	}
	data_block block;
	block.height = prev_height + 1;
	std::vector<crypto::digest> leaves;
	leaves.reserve (selected.size ());
	std::uint32_t no = 1;
	for (auto & vtx : selected)
	{
		body_entry entry;
		entry.no = no++;
		entry.tx_id = vtx.inner.tx_id;
		entry.tx_hash = vtx.inner.tx_hash;
		entry.tx_data = encode_transaction (vtx.inner);
		leaves.push_back (entry.tx_hash);
		block.body.entries.push_back (std::move (entry));
	}
	block.header.hash_pre_data_blk = prev.block_hash;
	block.header.version = 1;
	block.header.merkle_root = crypto::merkle_root (scheme, leaves);
	block.header.num_txs = static_cast<std::uint32_t> (block.body.entries.size ());
	block.header.timestamp = now;
	block.header.sig = crypto::sign (crypto::sig_id::mac33, leader_key, header_signing_bytes (block.header));
	block.header.block_hash = compute_block_hash (block.header, scheme);
	return block;
}
}
