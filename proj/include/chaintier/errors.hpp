#pragma once

#include <stdexcept>
#include <string>

namespace chaintier
{
// Base for everything thrown by this library.
struct error : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

// Codec / data-model errors
struct codec_error : error
{
	using error::error;
};
struct field_length_error : codec_error
{
	using codec_error::codec_error;
};
struct malformed_block_error : codec_error
{
	using codec_error::codec_error;
};

// Crypto
struct unknown_scheme_error : error
{
	using error::error;
};
struct empty_leaves_error : error
{
	using error::error;
};

// Transaction validation / block forming
struct hash_mismatch_error : error
{
	using error::error;
};
struct retry_limit_error : error
{
	using error::error;
};
struct already_marked_error : error
{
	using error::error;
};
struct empty_pool_error : error
{
	using error::error;
};
struct not_leader_error : error
{
	using error::error;
};
struct not_owner_error : error
{
	using error::error;
};

// Consensus
struct invalid_block_error : error
{
	using error::error;
};
struct duplicate_vote_error : error
{
	using error::error;
};
struct stale_vote_error : error
{
	using error::error;
};

// Cloud synchronization
struct quorum_timeout_error : error
{
	using error::error;
};
struct transfer_interrupted_error : error
{
	using error::error;
};
struct head_gap_error : error
{
	using error::error;
};
struct head_mismatch_error : error
{
	using error::error;
};

// Cloud archive
struct verification_error : error
{
	using error::error;
};
struct no_quorum_error : error
{
	using error::error;
};
struct access_denied_error : error
{
	using error::error;
};
struct range_unavailable_error : error
{
	using error::error;
};

// Simulation harness
struct unknown_behavior_error : error
{
	using error::error;
};
struct config_error : error
{
	using error::error;
};
struct invariant_violation : error
{
	using error::error;
};
struct io_error : error
{
	using error::error;
};
}
