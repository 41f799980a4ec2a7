#include <chaintier/core_types.hpp>
#include <chaintier/errors.hpp>

#include <sstream>

namespace chaintier
{
std::size_t encoded_transaction_size (std::size_t device_info_len, std::size_t data_len)
{
	return transaction_fixed_size + device_info_len + data_len;
}

namespace
{
	void write_prehash_fields (byte_writer & writer, transaction const & tx)
	{
		writer.raw (tx.from);
		writer.raw (tx.to);
		writer.u8 (tx.type);
		writer.var_bytes (tx.device_info);
		writer.raw (tx.one_time_pk);
		writer.u64 (tx.timestamp);
		writer.u32 (tx.tx_id);
		writer.var_bytes (tx.data);
		writer.u8 (tx.hash_type);
	}
}

bytes transaction_prehash_bytes (transaction const & tx)
{
	byte_writer writer;
	write_prehash_fields (writer, tx);
	return writer.take ();
}

crypto::digest compute_tx_hash (transaction const & tx)
{
	auto pre = transaction_prehash_bytes (tx);
	return crypto::hash (static_cast<crypto::hash_id> (tx.hash_type), pre);
}

bytes encode_transaction (transaction const & tx)
{
	byte_writer writer;
	write_prehash_fields (writer, tx);
	writer.raw (tx.tx_hash);
	writer.u8 (tx.sig_type);
	writer.raw (tx.sig);
	return writer.take ();
}

transaction decode_transaction (byte_view data)
{
	byte_reader reader (data);
	transaction tx;
	tx.from = reader.fixed<16> ();
	tx.to = reader.fixed<16> ();
	tx.type = reader.u8 ();
	tx.device_info = reader.var_bytes ();
	tx.one_time_pk = reader.fixed<crypto::public_key_width> ();
	tx.timestamp = reader.u64 ();
	tx.tx_id = reader.u32 ();
	tx.data = reader.var_bytes ();
	tx.hash_type = reader.u8 ();
	tx.tx_hash = reader.fixed<crypto::digest_width> ();
	tx.sig_type = reader.u8 ();
	tx.sig = reader.fixed<crypto::signature_width> ();
	if (!reader.finished ())
	{
		throw codec_error ("trailing bytes after transaction");
	}
	return tx;
}

std::size_t block_body::payload_bytes () const
{
	std::size_t total = 0;
	for (auto const & entry : entries)
	{
		total += entry.tx_data.size ();
	}
	return total;
}

bytes encode_header (block_header const & header)
{
	byte_writer writer;
	writer.raw (header.hash_pre_data_blk);
	writer.u32 (header.version);
	writer.raw (header.merkle_root);
	writer.u32 (header.num_txs);
	writer.u64 (header.timestamp);
	writer.raw (header.sig);
	return writer.take ();
}

bytes header_signing_bytes (block_header const & header)
{
	byte_writer writer;
	writer.raw (header.hash_pre_data_blk);
	writer.u32 (header.version);
	writer.raw (header.merkle_root);
	writer.u32 (header.num_txs);
	writer.u64 (header.timestamp);
	return writer.take ();
}

crypto::digest compute_block_hash (block_header const & header, crypto::hash_id scheme)
{
	return crypto::hash (scheme, encode_header (header));
}

block_header decode_header (byte_view data, crypto::hash_id scheme)
{
	if (data.size () < block_header_wire_size)
	{
		throw malformed_block_error ("header shorter than 113 bytes");
	}
	byte_reader reader (data.subspan (0, block_header_wire_size));
	block_header header;
	header.hash_pre_data_blk = reader.fixed<32> ();
	header.version = reader.u32 ();
	header.merkle_root = reader.fixed<32> ();
	header.num_txs = reader.u32 ();
	header.timestamp = reader.u64 ();
	header.sig = reader.fixed<crypto::signature_width> ();
	header.block_hash = compute_block_hash (header, scheme);
	return header;
}

std::size_t encoded_block_size (std::size_t num_txs, std::size_t payload_bytes)
{
	return block_header_wire_size + num_txs * body_entry_overhead + payload_bytes;
}

std::size_t encoded_block_size (data_block const & block)
{
	return encoded_block_size (block.body.entries.size (), block.body.payload_bytes ());
}

bytes encode_block (data_block const & block)
{
	byte_writer writer;
	writer.raw (byte_view (encode_header (block.header)));
	for (auto const & entry : block.body.entries)
	{
		writer.u32 (entry.no);
		writer.u32 (entry.tx_id);
		writer.var_bytes (entry.tx_data);
		writer.raw (entry.tx_hash);
	}
	return writer.take ();
}

data_block decode_block (byte_reader & reader, std::uint64_t height, crypto::hash_id scheme)
{
	try
	{
		data_block block;
		block.height = height;
		auto header_bytes = reader.raw (block_header_wire_size);
		block.header = decode_header (header_bytes, scheme);
		block.body.entries.reserve (block.header.num_txs);
		for (std::uint32_t i = 0; i < block.header.num_txs; ++i)
		{
			body_entry entry;
			entry.no = reader.u32 ();
			entry.tx_id = reader.u32 ();
			entry.tx_data = reader.var_bytes ();
			entry.tx_hash = reader.fixed<crypto::digest_width> ();
			if (entry.no != i + 1)
			{
				throw malformed_block_error ("body entry numbering broken at position " + std::to_string (i + 1));
			}
			block.body.entries.push_back (std::move (entry));
		}
		return block;
	}
	catch (malformed_block_error const &)
	{
		throw;
	}
	catch (codec_error const & err)
	{
		throw malformed_block_error (std::string ("malformed block: ") + err.what ());
	}
}

data_block decode_block (byte_view data, std::uint64_t height, crypto::hash_id scheme)
{
	byte_reader reader (data);
	auto block = decode_block (reader, height, scheme);
	if (!reader.finished ())
	{
		throw malformed_block_error ("trailing bytes after block");
	}
	return block;
}

data_block make_genesis (crypto::hash_id scheme)
{
	data_block genesis;
	genesis.height = 0;
	genesis.header.version = 1;
	genesis.header.timestamp = 0;
	genesis.header.num_txs = 0;
	genesis.header.block_hash = compute_block_hash (genesis.header, scheme);
	return genesis;
}

std::size_t chain_segment::encoded_bytes () const
{
	std::size_t total = 0;
	for (auto const & block : blocks)
	{
		total += encoded_block_size (block);
	}
	return total;
}

chain_segment make_segment (std::vector<data_block> blocks)
{
	if (blocks.empty ())
	{
		throw malformed_block_error ("segment requires at least one block");
	}
	chain_segment segment;
	segment.first_height = blocks.front ().height;
	segment.last_height = blocks.back ().height;
	segment.blocks = std::move (blocks);
	if (segment.last_height - segment.first_height + 1 != segment.blocks.size ())
	{
		throw malformed_block_error ("segment heights are not contiguous");
	}
	return segment;
}

// Segment wire layout: first_height 8 | count 4 | blocks back to back.
bytes encode_segment (chain_segment const & segment)
{
	byte_writer writer;
	writer.u64 (segment.first_height);
	writer.u32 (static_cast<std::uint32_t> (segment.blocks.size ()));
	for (auto const & block : segment.blocks)
	{
		writer.raw (byte_view (encode_block (block)));
	}
	return writer.take ();
}

chain_segment decode_segment (byte_view data, crypto::hash_id scheme)
{
	try
	{
		byte_reader reader (data);
		auto first_height = reader.u64 ();
		auto count = reader.u32 ();
		std::vector<data_block> blocks;
		blocks.reserve (count);
		for (std::uint32_t i = 0; i < count; ++i)
		{
			blocks.push_back (decode_block (reader, first_height + i, scheme));
		}
		if (!reader.finished ())
		{
			throw malformed_block_error ("trailing bytes after segment");
		}
		return make_segment (std::move (blocks));
	}
	catch (malformed_block_error const &)
	{
		throw;
	}
	catch (codec_error const & err)
	{
		throw malformed_block_error (std::string ("malformed segment: ") + err.what ());
	}
}

namespace
{
	bool verify_body (data_block const & block, crypto::hash_id scheme)
	{
		if (block.header.num_txs != block.body.entries.size ())
		{
			return false;
		}
		if (block.body.entries.empty ())
		{
			// Only genesis may be empty; its Merkle root stays zero.
			return block.height == 0 && block.header.merkle_root == crypto::digest{};
		}
		std::vector<crypto::digest> leaves;
		leaves.reserve (block.body.entries.size ());
		std::uint32_t expected_no = 1;
		for (auto const & entry : block.body.entries)
		{
			if (entry.no != expected_no++)
			{
				return false;
			}
			transaction tx;
			try
			{
				tx = decode_transaction (entry.tx_data);
			}
			catch (codec_error const &)
			{
				return false;
			}
			if (tx.tx_id != entry.tx_id || tx.tx_hash != entry.tx_hash || compute_tx_hash (tx) != entry.tx_hash)
			{
				return false;
			}
			leaves.push_back (entry.tx_hash);
		}
		return crypto::merkle_root (scheme, leaves) == block.header.merkle_root;
	}
}

std::string verification_report::describe () const
{
	std::ostringstream out;
	for (auto const & check : blocks)
	{
		if (!check.passed ())
		{
			out << "height " << check.height << ":";
			if (!check.link_ok)
				out << " link";
			if (!check.hash_ok)
				out << " block-hash";
			if (!check.merkle_ok)
				out << " merkle";
			if (!check.timestamp_ok)
				out << " timestamp";
			out << " failed; ";
		}
	}
	if (!head_link_ok)
	{
		out << "trusted head link failed; ";
	}
	auto text = out.str ();
	return text.empty () ? "ok" : text;
}

verification_report verify_chain (chain_segment const & segment, block_header const * trusted_head, crypto::hash_id scheme)
{
	verification_report report;
	block_header const * prev = nullptr;
	for (auto const & block : segment.blocks)
	{
		block_check check;
		check.height = block.height;
		check.hash_ok = compute_block_hash (block.header, scheme) == block.header.block_hash;
		check.merkle_ok = verify_body (block, scheme);
		if (prev != nullptr)
		{
			check.link_ok = block.header.hash_pre_data_blk == prev->block_hash;
			check.timestamp_ok = block.header.timestamp > prev->timestamp;
		}
		else if (block.height == 0)
		{
			check.link_ok = block.header.hash_pre_data_blk == crypto::digest{};
		}
		if (block.height > 0 && block.header.num_txs == 0)
		{
			check.merkle_ok = false;
		}
		report.blocks.push_back (check);
		prev = &block.header;
	}
	if (trusted_head != nullptr && !segment.blocks.empty ())
	{
		report.head_link_ok = segment.blocks.front ().header.hash_pre_data_blk == trusted_head->block_hash;
		if (!report.blocks.empty () && segment.blocks.front ().height > 0)
		{
			report.blocks.front ().link_ok = report.head_link_ok;
			report.blocks.front ().timestamp_ok = segment.blocks.front ().header.timestamp > trusted_head->timestamp;
		}
	}
	report.passed = report.head_link_ok;
	for (auto const & check : report.blocks)
	{
		report.passed = report.passed && check.passed ();
	}
	return report;
}
}
