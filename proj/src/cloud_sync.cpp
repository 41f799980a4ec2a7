#include <chaintier/cloud_sync.hpp>
#include <chaintier/errors.hpp>

#include <cmath>

namespace chaintier::cloudsync
{
void sync_policy::validate () const
{
	if (trigger_threshold_bytes > capacity_bytes)
	{
		throw config_error ("sync threshold exceeds disk capacity");
	}
	if (overhead_factor < 1.0)
	{
		throw config_error ("transfer overhead factor must be >= 1");
	}
}

trigger_reason check_trigger (sync_policy const & policy, std::uint64_t local_bytes, std::uint64_t now_ns, std::uint64_t last_sync_ns, std::uint64_t last_request_ns)
{
	if (last_request_ns > 0 && now_ns - last_request_ns < policy.min_interval_ns)
	{
		return trigger_reason::none;
	}
	if (local_bytes >= policy.trigger_threshold_bytes)
	{
		return trigger_reason::threshold_reached;
	}
	if (policy.schedule_period_ns > 0 && now_ns - last_sync_ns >= policy.schedule_period_ns)
	{
		return trigger_reason::scheduled;
	}
	return trigger_reason::none;
}

bytes sync_request_signing_bytes (sync_request const & req)
{
	byte_writer writer;
	writer.u8 ('R');
	writer.u32 (req.requester);
	writer.u64 (req.latest_height);
	writer.u8 (static_cast<std::uint8_t> (req.reason));
	writer.raw (byte_view (encode_header (req.latest)));
	return writer.take ();
}

sync_request make_sync_request (crypto::key_pair const & key, std::uint32_t requester, block_header const & latest, std::uint64_t latest_height, trigger_reason reason)
{
	sync_request req{ requester, latest, latest_height, reason, {} };
	req.sig = crypto::sign (crypto::sig_id::mac33, key, sync_request_signing_bytes (req));
	return req;
}

bool verify_sync_request (sync_request const & req, crypto::public_key const & pub)
{
	return crypto::verify (crypto::sig_id::mac33, pub, sync_request_signing_bytes (req), req.sig);
}

bytes sync_vote_signing_bytes (sync_vote const & vote)
{
	byte_writer writer;
	writer.u8 ('A');
	writer.u32 (vote.voter);
	writer.u32 (vote.requester);
	writer.raw (vote.head_hash);
	return writer.take ();
}

sync_vote make_sync_vote (crypto::key_pair const & key, std::uint32_t voter, std::uint32_t requester, crypto::digest const & head_hash)
{
	sync_vote vote{ voter, requester, head_hash, {} };
	vote.sig = crypto::sign (crypto::sig_id::mac33, key, sync_vote_signing_bytes (vote));
	return vote;
}

bool verify_sync_vote (sync_vote const & vote, crypto::public_key const & pub)
{
	return crypto::verify (crypto::sig_id::mac33, pub, sync_vote_signing_bytes (vote), vote.sig);
}

std::optional<sync_vote> vote_on_sync (sync_request const & req, block_header const & my_latest, crypto::key_pair const & my_key, std::uint32_t my_id, crypto::public_key const & requester_pub)
{
	if (!verify_sync_request (req, requester_pub))
	{
		return std::nullopt;
	}
	if (req.latest.block_hash != my_latest.block_hash)
	{
		return std::nullopt;
	}
	return make_sync_vote (my_key, my_id, req.requester, req.latest.block_hash);
}

bool add_sync_vote (sync_session & session, sync_vote const & vote, crypto::public_key const & voter_pub)
{
	if (!verify_sync_vote (vote, voter_pub))
	{
		return false;
	}
	if (vote.requester != session.request.requester || vote.head_hash != session.request.latest.block_hash)
	{
		return false;
	}
	session.agree_votes[vote.voter] = vote;
	return true;
}

session_decision aggregate_sync_votes (sync_session & session, consensus::config const & cfg, bool deadline_reached)
{
	if (session.decision != session_decision::pending)
	{
		return session.decision;
	}
	std::uint32_t matching = 0;
	for (auto const & [voter, vote] : session.agree_votes)
	{
		if (vote.head_hash == session.request.latest.block_hash)
		{
			++matching;
		}
	}
	// Strictly more than 2/3 of all peers.
	if (3ull * matching > 2ull * cfg.n)
	{
		session.decision = session_decision::approved;
		session.frozen_last_height = session.request.latest_height;
	}
	else if (deadline_reached)
	{
		session.decision = session_decision::rejected;
	}
	return session.decision;
}

bool verify_sync_decision (sync_decision_msg const & msg, consensus::config const & cfg, std::vector<crypto::public_key> const & peer_keys)
{
	if (!msg.approved)
	{
		return true; // rejections carry no quorum claim
	}
	std::set<std::uint32_t> distinct;
	for (auto const & vote : msg.votes)
	{
		if (vote.requester != msg.requester || vote.head_hash != msg.head_hash)
		{
			continue;
		}
		if (vote.voter >= peer_keys.size () || !verify_sync_vote (vote, peer_keys[vote.voter]))
		{
			continue;
		}
		distinct.insert (vote.voter);
	}
	return 3ull * distinct.size () > 2ull * cfg.n;
}

std::uint64_t transfer_duration_ns (std::uint64_t bytes, std::uint64_t bandwidth_bytes_per_s, double overhead_factor)
{
	if (bandwidth_bytes_per_s == 0)
	{
		throw config_error ("bandwidth must be positive");
	}
	long double seconds = static_cast<long double> (bytes) / static_cast<long double> (bandwidth_bytes_per_s);
	seconds *= static_cast<long double> (overhead_factor);
	return static_cast<std::uint64_t> (std::llroundl (seconds * 1'000'000'000.0L));
}

sync_execution execute_sync (sync_session & session, cloudstore::archive & cloud, std::uint64_t bandwidth_bytes_per_s, double overhead_factor, bool interrupt_transfer)
{
	if (session.decision != session_decision::approved)
	{
		throw error ("execute_sync requires an approved session");
	}
	sync_execution result;
	// Duplicate: the cloud already holds the requested head.
	if (!cloud.empty () && cloud.get_head ().block_hash == session.request.latest.block_hash)
	{
		session.outcome = session_outcome::regular;
		result.response.kind = session_outcome::regular;
		result.response.denied_duplicate = true;
		result.response.updated_head = cloud.get_head ();
		result.response.updated_height = cloud.head_height ();
		return result;
	}
	std::uint64_t segment_first = 0;
	std::uint64_t segment_bytes = 0;
	if (session.segment.has_value ())
	{
		segment_first = session.segment->first_height;
		segment_bytes = session.segment->encoded_bytes ();
	}
	else if (session.segment_meta.has_value ())
	{
		segment_first = session.segment_meta->first_height;
		segment_bytes = session.segment_meta->bytes;
	}
	else
	{
		throw error ("approved session carries no segment");
	}
	if (!cloud.empty () && segment_first != cloud.head_height () + 1)
	{
		throw head_gap_error ("cloud head is not an ancestor of the offered segment");
	}
	result.duration_ns = transfer_duration_ns (segment_bytes, bandwidth_bytes_per_s, overhead_factor);
	if (interrupt_transfer)
	{
		session.outcome = session_outcome::exception;
		result.response.kind = session_outcome::exception;
		result.response.error_detail = "transfer interrupted";
		return result;
	}
	try
	{
		if (session.segment.has_value ())
		{
			cloud.store_segment (*session.segment);
		}
		else
		{
			cloud.store_segment (*session.segment_meta);
		}
	}
	catch (verification_error const & err)
	{
		session.outcome = session_outcome::exception;
		result.response.kind = session_outcome::exception;
		result.response.error_detail = err.what ();
		return result;
	}
	// The exception handler runs before the cloud answers: cross-replica
	// inconsistency during a session turns the response into an exception.
	auto consistency = cloud.verify_consistency ();
	if (!consistency.consistent ())
	{
		session.outcome = session_outcome::exception;
		result.response.kind = session_outcome::exception;
		result.response.error_detail = "replica divergence at height " + std::to_string (consistency.divergences.front ().height);
		return result;
	}
	result.transferred_bytes = segment_bytes;
	session.outcome = session_outcome::regular;
	result.response.kind = session_outcome::regular;
	result.response.updated_head = cloud.get_head ();
	result.response.updated_height = cloud.head_height ();
	return result;
}

std::vector<data_block> prune_local (std::vector<data_block> chain, response_message const & response)
{
	auto keep_from = chain.size ();
	for (std::size_t i = 0; i < chain.size (); ++i)
	{
		if (chain[i].header.block_hash == response.updated_head.block_hash && chain[i].height == response.updated_height)
		{
			keep_from = i;
			break;
		}
	}
	if (keep_from == chain.size ())
	{
		throw head_mismatch_error ("updated head unknown in local chain");
	}
	chain.erase (chain.begin (), chain.begin () + static_cast<std::ptrdiff_t> (keep_from));
	return chain;
}

exception_action handle_sync_exception (fault_ledger & ledger, std::uint32_t node, std::string const &)
{
	auto count = ++ledger.error_counts[node];
	if (count >= 2 && ledger.marked.count (node) == 0)
	{
		ledger.marked.insert (node);
		return exception_action::marked_malicious;
	}
	return exception_action::retry_other_node;
}
}
