#include <chaintier/cloud_store.hpp>
#include <chaintier/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace chaintier::cloudstore
{
archive::archive (std::uint32_t replicas, std::uint32_t replication_factor, crypto::hash_id scheme) :
	replication_factor_ (replication_factor),
	scheme_ (scheme)
{
	if (replicas == 0 || replication_factor == 0 || replication_factor > replicas)
	{
		throw config_error ("archive needs 1 <= replication_factor <= replicas");
	}
	replicas_.resize (replicas);
	for (std::uint32_t i = 0; i < replicas; ++i)
	{
		replicas_[i].id = i;
	}
}

bool archive::empty () const
{
	for (auto const & replica : replicas_)
	{
		if (!replica.empty)
		{
			return false;
		}
	}
	return true;
}

store_receipt archive::store_common (segment_record record)
{
	if (last_receipt_.has_value () && last_receipt_->first_height == record.first_height && last_receipt_->last_height == record.last_height && last_receipt_->head_hash == record.head_hash)
	{
		auto receipt = *last_receipt_;
		receipt.duplicate = true;
		return receipt;
	}
	auto const & primary = replicas_.front ();
	if (primary.empty)
	{
		if (record.first_height != 0)
		{
			throw head_gap_error ("first archived segment must start at genesis");
		}
	}
	else
	{
		if (record.last_height <= primary.head_height)
		{
			// Segment already covered; idempotent replay.
			store_receipt receipt{ record.first_height, record.last_height, record.head_hash, true };
			return receipt;
		}
		if (record.first_height != primary.head_height + 1)
		{
			throw head_gap_error ("segment does not extend archive head: head " + std::to_string (primary.head_height) + ", segment starts at " + std::to_string (record.first_height));
		}
	}
	block_header new_head{};
	if (record.blocks.has_value ())
	{
		new_head = record.blocks->blocks.back ().header;
	}
	else
	{
		new_head.block_hash = record.head_hash;
	}
	for (std::uint32_t i = 0; i < replication_factor_; ++i)
	{
		auto & replica = replicas_[i];
		replica.segments.push_back (record);
		replica.head = new_head;
		replica.head_height = record.last_height;
		replica.total_bytes += record.bytes;
		replica.empty = false;
	}
	store_receipt receipt{ record.first_height, record.last_height, record.head_hash, false };
	last_receipt_ = receipt;
	return receipt;
}

store_receipt archive::store_segment (chain_segment const & segment)
{
	if (segment.blocks.empty ())
	{
		throw verification_error ("cannot archive an empty segment");
	}
	// Idempotent replay of an already archived range short-circuits before
	// the head-link verification (the head has moved past it).
	if (!empty () && segment.last_height <= replicas_.front ().head_height)
	{
		auto head_hash = segment.blocks.back ().header.block_hash;
		for (auto const & record : replicas_.front ().segments)
		{
			if (record.first_height == segment.first_height && record.last_height == segment.last_height)
			{
				if (record.head_hash != head_hash)
				{
					throw verification_error ("segment conflicts with the archived copy at the same heights");
				}
				return store_receipt{ record.first_height, record.last_height, record.head_hash, true };
			}
		}
		throw head_gap_error ("heights already archived with different segment bounds");
	}
	block_header trusted;
	block_header const * trusted_ptr = nullptr;
	if (!empty ())
	{
		if (segment.first_height != replicas_.front ().head_height + 1)
		{
			throw head_gap_error ("segment does not extend archive head: head " + std::to_string (replicas_.front ().head_height) + ", segment starts at " + std::to_string (segment.first_height));
		}
		trusted = replicas_.front ().head;
		trusted_ptr = &trusted;
	}
	else if (segment.first_height != 0)
	{
		throw head_gap_error ("first archived segment must start at genesis");
	}
	auto report = verify_chain (segment, trusted_ptr, scheme_);
	if (!report.passed)
	{
		throw verification_error ("segment failed verification: " + report.describe ());
	}
	segment_record record;
	record.first_height = segment.first_height;
	record.last_height = segment.last_height;
	record.bytes = segment.encoded_bytes ();
	record.head_hash = segment.blocks.back ().header.block_hash;
	record.blocks = segment;
	return store_common (std::move (record));
}

store_receipt archive::store_segment (segment_record record)
{
	if (record.blocks.has_value ())
	{
		return store_segment (*record.blocks);
	}
	if (record.last_height < record.first_height)
	{
		throw verification_error ("segment record heights out of order");
	}
	return store_common (std::move (record));
}

head_result archive::head_query () const
{
	std::map<crypto::digest, std::vector<std::uint32_t>> tallies;
	for (auto const & replica : replicas_)
	{
		if (!replica.empty)
		{
			tallies[replica.head.block_hash].push_back (replica.id);
		}
	}
	auto majority_needed = replicas_.size () / 2 + 1;
	for (auto const & [hash, holders] : tallies)
	{
		if (holders.size () >= majority_needed)
		{
			head_result result;
			result.header = replicas_[holders.front ()].head;
			result.height = replicas_[holders.front ()].head_height;
			for (auto const & replica : replicas_)
			{
				if (!replica.empty && replica.head.block_hash != hash)
				{
					result.outvoted.push_back (replica.id);
				}
			}
			return result;
		}
	}
	throw no_quorum_error ("no majority among replica heads");
}

block_header archive::get_head () const
{
	return head_query ().header;
}

std::uint64_t archive::head_height () const
{
	return head_query ().height;
}

std::uint64_t archive::total_bytes () const
{
	auto result = head_query ();
	for (auto const & replica : replicas_)
	{
		bool agreed = true;
		for (auto out : result.outvoted)
		{
			agreed = agreed && out != replica.id;
		}
		if (!replica.empty && agreed)
		{
			return replica.total_bytes;
		}
	}
	return 0;
}

consistency_report archive::verify_consistency () const
{
	consistency_report report;
	// Per-replica internal verification.
	for (auto const & replica : replicas_)
	{
		std::uint64_t expect_next = 0;
		crypto::digest prev_head{};
		bool first = true;
		for (auto const & record : replica.segments)
		{
			if (record.first_height != expect_next)
			{
				report.divergences.push_back ({ replica.id, record.first_height, "segment gap" });
			}
			expect_next = record.last_height + 1;
			if (record.blocks.has_value ())
			{
				block_header trusted;
				block_header const * trusted_ptr = nullptr;
				if (!first)
				{
					trusted.block_hash = prev_head;
					trusted_ptr = &trusted;
				}
				auto check = verify_chain (*record.blocks, trusted_ptr, scheme_);
				if (!check.passed)
				{
					for (auto const & block : check.blocks)
					{
						if (!block.passed ())
						{
							report.divergences.push_back ({ replica.id, block.height, "chain verification failed" });
						}
					}
					if (!check.head_link_ok)
					{
						report.divergences.push_back ({ replica.id, record.first_height, "segment does not link to previous segment" });
					}
				}
			}
			prev_head = record.head_hash;
			first = false;
		}
	}
	// Cross-replica comparison per segment position.
	std::size_t max_segments = 0;
	for (auto const & replica : replicas_)
	{
		max_segments = std::max (max_segments, replica.segments.size ());
	}
	for (std::size_t s = 0; s < max_segments; ++s)
	{
		std::map<crypto::digest, std::size_t> tally;
		for (auto const & replica : replicas_)
		{
			if (s < replica.segments.size ())
			{
				++tally[replica.segments[s].head_hash];
			}
		}
		crypto::digest majority_hash{};
		std::size_t best = 0;
		for (auto const & [hash, count] : tally)
		{
			if (count > best)
			{
				best = count;
				majority_hash = hash;
			}
		}
		for (auto const & replica : replicas_)
		{
			if (s < replica.segments.size () && replica.segments[s].head_hash != majority_hash)
			{
				report.divergences.push_back ({ replica.id, replica.segments[s].last_height, "segment head diverges from majority" });
			}
		}
	}
	return report;
}

chain_segment archive::query_blocks (connector::identity const & who, connector::access_policy const & policy, std::uint64_t first, std::uint64_t last, std::string const & resource) const
{
	if (!connector::check_access (policy, who, resource, "read"))
	{
		throw access_denied_error ("identity lacks read grant on " + resource);
	}
	if (empty () || last > head_height () || first > last)
	{
		throw range_unavailable_error ("requested heights " + std::to_string (first) + ".." + std::to_string (last) + " not archived");
	}
	auto result = head_query ();
	for (auto const & replica : replicas_)
	{
		bool agreed = !replica.empty;
		for (auto out : result.outvoted)
		{
			agreed = agreed && out != replica.id;
		}
		if (!agreed)
		{
			continue;
		}
		std::vector<data_block> blocks;
		for (auto const & record : replica.segments)
		{
			if (!record.blocks.has_value ())
			{
				continue;
			}
			for (auto const & block : record.blocks->blocks)
			{
				if (block.height >= first && block.height <= last)
				{
					blocks.push_back (block);
				}
			}
		}
		if (blocks.size () == last - first + 1)
		{
			auto segment = make_segment (std::move (blocks));
			auto report = verify_chain (segment, nullptr, scheme_);
			if (report.passed)
			{
				return segment;
			}
		}
	}
	throw range_unavailable_error ("no consistent replica can serve the range (blocks not materialized or corrupted)");
}

std::map<std::uint64_t, std::set<std::uint32_t>> archive::index () const
{
	std::map<std::uint64_t, std::set<std::uint32_t>> out;
	for (auto const & replica : replicas_)
	{
		for (auto const & record : replica.segments)
		{
			for (std::uint64_t h = record.first_height; h <= record.last_height; ++h)
			{
				out[h].insert (replica.id);
			}
		}
	}
	return out;
}

void archive::tamper_block (std::uint32_t replica_index, std::uint64_t height)
{
	auto & replica = replicas_.at (replica_index);
	replica.honest = false;
	for (auto & record : replica.segments)
	{
		if (height >= record.first_height && height <= record.last_height)
		{
			if (record.blocks.has_value ())
			{
				auto & block = record.blocks->blocks.at (height - record.first_height);
				if (!block.body.entries.empty () && !block.body.entries.front ().tx_data.empty ())
				{
					block.body.entries.front ().tx_data.front () ^= 0xff;
				}
				else
				{
					block.header.merkle_root[0] ^= 0xff;
				}
			}
			record.head_hash[0] ^= 0xff;
			if (record.last_height == replica.head_height)
			{
				replica.head.block_hash[0] ^= 0xff;
			}
			return;
		}
	}
}

void archive::tamper_head (std::uint32_t replica_index)
{
	auto & replica = replicas_.at (replica_index);
	replica.honest = false;
	replica.head.block_hash[0] ^= 0xff;
	if (!replica.segments.empty ())
	{
		replica.segments.back ().head_hash[0] ^= 0xff;
	}
}

namespace
{
	std::string segment_file_name (segment_record const & record)
	{
		char buf[64];
		std::snprintf (buf, sizeof (buf), "seg_%012llu_%012llu.bin", static_cast<unsigned long long> (record.first_height), static_cast<unsigned long long> (record.last_height));
		return buf;
	}
}

void archive::save (std::filesystem::path const & dir) const
{
	namespace fs = std::filesystem;
	std::error_code ec;
	fs::create_directories (dir, ec);
	if (ec)
	{
		throw io_error ("cannot create archive directory " + dir.string ());
	}
	for (auto const & replica : replicas_)
	{
		auto replica_dir = dir / ("replica_" + std::to_string (replica.id));
		fs::create_directories (replica_dir, ec);
		nlohmann::json manifest;
		manifest["head_height"] = replica.head_height;
		manifest["head_hash"] = to_hex (replica.head.block_hash);
		manifest["head"] = to_hex (encode_header (replica.head));
		manifest["empty"] = replica.empty;
		manifest["honest"] = replica.honest;
		manifest["total_bytes"] = replica.total_bytes;
		auto & segments = manifest["segments"] = nlohmann::json::array ();
		for (auto const & record : replica.segments)
		{
			nlohmann::json entry;
			entry["first"] = record.first_height;
			entry["last"] = record.last_height;
			entry["bytes"] = record.bytes;
			entry["head_hash"] = to_hex (record.head_hash);
			if (record.blocks.has_value ())
			{
				auto file = segment_file_name (record);
				entry["file"] = file;
				auto encoded = encode_segment (*record.blocks);
				std::ofstream out (replica_dir / file, std::ios::binary | std::ios::trunc);
				out.write (reinterpret_cast<char const *> (encoded.data ()), static_cast<std::streamsize> (encoded.size ()));
				if (!out)
				{
					throw io_error ("failed writing segment file " + file);
				}
			}
			segments.push_back (entry);
		}
		std::ofstream mf (replica_dir / "manifest.json", std::ios::trunc);
		mf << manifest.dump (2) << "\n";
		if (!mf)
		{
			throw io_error ("failed writing manifest for replica " + std::to_string (replica.id));
		}
	}
}

archive archive::load (std::filesystem::path const & dir, crypto::hash_id scheme)
{
	namespace fs = std::filesystem;
	std::vector<fs::path> replica_dirs;
	for (auto const & entry : fs::directory_iterator (dir))
	{
		if (entry.is_directory () && entry.path ().filename ().string ().starts_with ("replica_"))
		{
			replica_dirs.push_back (entry.path ());
		}
	}
	if (replica_dirs.empty ())
	{
		throw io_error ("no replica directories under " + dir.string ());
	}
	std::sort (replica_dirs.begin (), replica_dirs.end ());
	archive result (static_cast<std::uint32_t> (replica_dirs.size ()), static_cast<std::uint32_t> (replica_dirs.size ()), scheme);
	for (std::size_t i = 0; i < replica_dirs.size (); ++i)
	{
		std::ifstream mf (replica_dirs[i] / "manifest.json");
		if (!mf)
		{
			throw io_error ("missing manifest in " + replica_dirs[i].string ());
		}
		nlohmann::json manifest = nlohmann::json::parse (mf);
		auto & replica = result.replicas_[i];
		replica.head_height = manifest["head_height"].get<std::uint64_t> ();
		replica.empty = manifest["empty"].get<bool> ();
		replica.honest = manifest["honest"].get<bool> ();
		replica.total_bytes = manifest["total_bytes"].get<std::uint64_t> ();
		if (!replica.empty)
		{
			replica.head = decode_header (from_hex (manifest["head"].get<std::string> ()), scheme);
			replica.head.block_hash = to_fixed<32> (from_hex (manifest["head_hash"].get<std::string> ()));
		}
		for (auto const & entry : manifest["segments"])
		{
			segment_record record;
			record.first_height = entry["first"].get<std::uint64_t> ();
			record.last_height = entry["last"].get<std::uint64_t> ();
			record.bytes = entry["bytes"].get<std::uint64_t> ();
			record.head_hash = to_fixed<32> (from_hex (entry["head_hash"].get<std::string> ()));
			if (entry.contains ("file"))
			{
				std::ifstream seg (replica_dirs[i] / entry["file"].get<std::string> (), std::ios::binary);
				if (!seg)
				{
					throw io_error ("missing segment file in " + replica_dirs[i].string ());
				}
				bytes encoded ((std::istreambuf_iterator<char> (seg)), std::istreambuf_iterator<char> ());
				record.blocks = decode_segment (encoded, scheme);
			}
			replica.segments.push_back (std::move (record));
		}
	}
	return result;
}
}
