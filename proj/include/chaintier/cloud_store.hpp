#pragma once

#include <chaintier/connector.hpp>
#include <chaintier/core_types.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace chaintier::cloudstore
{
// One archived contiguous range. blocks are materialized only in
// materialized mode; accounting mode keeps sizes and the head hash.
struct segment_record
{
	std::uint64_t first_height{ 0 };
	std::uint64_t last_height{ 0 };
	std::uint64_t bytes{ 0 };
	crypto::digest head_hash{};
	std::optional<chain_segment> blocks;
};

struct store_receipt
{
	std::uint64_t first_height{ 0 };
	std::uint64_t last_height{ 0 };
	crypto::digest head_hash{};
	bool duplicate{ false };
};

struct cloud_node
{
	std::uint32_t id{ 0 };
	bool honest{ true };
	std::vector<segment_record> segments;
	block_header head{};
	std::uint64_t head_height{ 0 };
	std::uint64_t total_bytes{ 0 };
	bool empty{ true };
};

struct head_result
{
	block_header header;
	std::uint64_t height{ 0 };
	std::vector<std::uint32_t> outvoted; // replicas disagreeing with the majority
};

struct consistency_finding
{
	std::uint32_t replica{ 0 };
	std::uint64_t height{ 0 };
	std::string what;
};

struct consistency_report
{
	std::vector<consistency_finding> divergences;
	bool consistent () const
	{
		return divergences.empty ();
	}
};

// Simulated decentralized multi-cloud archive: full replication across
// replicas, majority agreement on the head, cross-replica verification.
class archive
{
public:
	explicit archive (std::uint32_t replicas = 3, std::uint32_t replication_factor = 3, crypto::hash_id scheme = crypto::hash_id::sha256);

	// Verifies the segment, requires it to extend the archive head with no
	// gap, writes it to replication_factor replicas. Re-storing an already
	// archived segment is a no-op returning the prior receipt.
	store_receipt store_segment (chain_segment const & segment);
	store_receipt store_segment (segment_record record);

	bool empty () const;
	block_header get_head () const; // majority-agreed; throws no_quorum_error
	head_result head_query () const;
	std::uint64_t head_height () const;
	std::uint64_t total_bytes () const;

	consistency_report verify_consistency () const;

	chain_segment query_blocks (connector::identity const & who, connector::access_policy const & policy, std::uint64_t first, std::uint64_t last, std::string const & resource = "chain") const;

	// height -> (replicas holding it, agreed hash at segment heads)
	std::map<std::uint64_t, std::set<std::uint32_t>> index () const;
	std::vector<cloud_node> const & replicas () const
	{
		return replicas_;
	}
	std::uint32_t replication_factor () const
	{
		return replication_factor_;
	}

	// Fault-injection hooks for simulated tampering.
	void tamper_block (std::uint32_t replica, std::uint64_t height);
	void tamper_head (std::uint32_t replica);

	void save (std::filesystem::path const & dir) const;
	static archive load (std::filesystem::path const & dir, crypto::hash_id scheme = crypto::hash_id::sha256);

private:
	store_receipt store_common (segment_record record);

	std::uint32_t replication_factor_;
	crypto::hash_id scheme_;
	std::vector<cloud_node> replicas_;
	std::optional<store_receipt> last_receipt_;
};
}
