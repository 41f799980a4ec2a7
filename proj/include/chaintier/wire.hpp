#pragma once

#include <chaintier/bytes.hpp>
#include <chaintier/crypto.hpp>

#include <cstdint>

namespace chaintier::wire
{
// Message kinds on the simulated wire. Every message is the canonical
// payload encoding wrapped in a signed envelope.
enum class kind : std::uint8_t
{
	propose = 0,
	vote = 1,
	view_change = 2,
	new_view = 3,
	sync_request = 4,
	sync_vote = 5,
	sync_decision = 6,
	segment_chunk = 7,
	sync_response = 8,
	admin_alert = 9,
};

struct envelope
{
	kind msg_kind{ kind::propose };
	std::uint32_t sender{ 0 };
	bytes payload;
	crypto::signature sig{};
};

// Envelope layout: kind 1 | sender 4 | payload 4+n | signature 33.
// The signature covers everything before it.
bytes encode_envelope (envelope const & env);
envelope decode_envelope (byte_view data); // throws codec_error

envelope make_envelope (crypto::key_pair const & key, kind msg_kind, std::uint32_t sender, bytes payload);
bool verify_envelope (envelope const & env, crypto::public_key const & pub);
}
