#include <chaintier/consensus.hpp>
#include <chaintier/errors.hpp>

namespace chaintier::consensus
{
void config::validate () const
{
	if (n == 0)
	{
		throw config_error ("consensus requires at least one node");
	}
	if (n < 3 * f_max () + 1)
	{
		throw config_error ("n must satisfy n >= 3*f_max + 1");
	}
	if (3 * quorum () <= 2 * n)
	{
		throw config_error ("quorum must exceed 2n/3");
	}
}

std::uint32_t elect_leader (config const & cfg, std::uint64_t epoch, std::uint32_t view)
{
	return static_cast<std::uint32_t> ((epoch + view) % cfg.n);
}

bytes vote_signing_bytes (std::uint32_t voter, std::uint64_t epoch, std::uint32_t view, crypto::digest const & block_hash)
{
	byte_writer writer;
	writer.u8 ('V');
	writer.u32 (voter);
	writer.u64 (epoch);
	writer.u32 (view);
	writer.raw (block_hash);
	return writer.take ();
}

signed_vote make_vote (crypto::key_pair const & key, std::uint32_t voter, std::uint64_t epoch, std::uint32_t view, crypto::digest const & block_hash)
{
	signed_vote vote{ voter, epoch, view, block_hash, {} };
	vote.sig = crypto::sign (crypto::sig_id::mac33, key, vote_signing_bytes (voter, epoch, view, block_hash));
	return vote;
}

bool verify_vote (signed_vote const & vote, crypto::public_key const & pub)
{
	return crypto::verify (crypto::sig_id::mac33, pub, vote_signing_bytes (vote.voter, vote.epoch, vote.view, vote.block_hash), vote.sig);
}

bytes view_change_signing_bytes (std::uint32_t node, std::uint64_t epoch, std::uint32_t new_view)
{
	byte_writer writer;
	writer.u8 ('C');
	writer.u32 (node);
	writer.u64 (epoch);
	writer.u32 (new_view);
	return writer.take ();
}

view_change_msg make_view_change (crypto::key_pair const & key, std::uint32_t node, std::uint64_t epoch, std::uint32_t new_view)
{
	view_change_msg msg{ node, epoch, new_view, {} };
	msg.sig = crypto::sign (crypto::sig_id::mac33, key, view_change_signing_bytes (node, epoch, new_view));
	return msg;
}

bool verify_view_change (view_change_msg const & msg, crypto::public_key const & pub)
{
	return crypto::verify (crypto::sig_id::mac33, pub, view_change_signing_bytes (msg.node, msg.epoch, msg.new_view), msg.sig);
}

node_state::node_state (config cfg, std::uint32_t self, crypto::key_pair key, std::vector<crypto::public_key> peer_keys, block_header genesis, crypto::hash_id scheme) :
	cfg_ (cfg),
	self_ (self),
	key_ (key),
	peer_keys_ (std::move (peer_keys)),
	scheme_ (scheme),
	latest_ (genesis)
{
	cfg_.validate ();
}

bool node_state::verify_proposal (data_block const & block, std::uint32_t sender) const
{
	if (block.height != latest_height_ + 1)
	{
		return false;
	}
	chain_segment singleton;
	singleton.blocks.push_back (block);
	singleton.first_height = block.height;
	singleton.last_height = block.height;
	auto report = verify_chain (singleton, &latest_, scheme_);
	if (!report.passed)
	{
		return false;
	}
	return crypto::verify (crypto::sig_id::mac33, peer_keys_.at (sender), header_signing_bytes (block.header), block.header.sig);
}

vote_decision node_state::on_proposal (data_block const & block, std::uint32_t sender)
{
	if (sender != current_leader ())
	{
		return { proposal_outcome::rejected_not_leader, std::nullopt };
	}
	if (proposal_.has_value ())
	{
		if (proposal_->header.block_hash == block.header.block_hash)
		{
			return { proposal_outcome::rejected_duplicate, std::nullopt };
		}
		// Second, different proposal from the same leader: equivocation.
		return { proposal_outcome::rejected_invalid, std::nullopt };
	}
	if (!verify_proposal (block, sender))
	{
		return { proposal_outcome::rejected_invalid, std::nullopt };
	}
	proposal_ = block;
	phase_ = phase::proposed;
	voted_this_view_ = true;
	auto vote = make_vote (key_, self_, epoch_, view_, block.header.block_hash);
	return { proposal_outcome::voted, vote };
}

finalize_decision node_state::try_finalize ()
{
	if (!proposal_.has_value ())
	{
		return { vote_outcome::accepted, std::nullopt };
	}
	auto const & target = proposal_->header.block_hash;
	std::uint32_t matching = 0;
	for (auto const & [voter, vote] : votes_)
	{
		if (vote.block_hash == target)
		{
			++matching;
		}
	}
	if (matching < cfg_.quorum ())
	{
		return { vote_outcome::accepted, std::nullopt };
	}
	last_quorum_size_ = matching;
	auto block = std::move (*proposal_);
	latest_ = block.header;
	latest_height_ = block.height;
	epoch_ += 1;
	view_ = 0;
	phase_ = phase::idle;
	proposal_.reset ();
	votes_.clear ();
	voted_this_view_ = false;
	view_changes_.clear ();
	vc_emitted_.clear ();
	return { vote_outcome::finalized, std::move (block) };
}

finalize_decision node_state::on_vote (signed_vote const & vote)
{
	if (vote.voter >= cfg_.n || !verify_vote (vote, peer_keys_.at (vote.voter)))
	{
		return { vote_outcome::invalid_signature, std::nullopt };
	}
	if (vote.epoch != epoch_ || vote.view != view_)
	{
		return { vote_outcome::stale_ignored, std::nullopt };
	}
	if (votes_.count (vote.voter) > 0)
	{
		return { vote_outcome::duplicate_ignored, std::nullopt };
	}
	votes_[vote.voter] = vote;
	return try_finalize ();
}

std::optional<view_change_msg> node_state::on_timeout ()
{
	auto target = view_ + 1;
	if (vc_emitted_.count (target) > 0)
	{
		return std::nullopt;
	}
	vc_emitted_.insert (target);
	phase_ = phase::view_changing;
	auto msg = make_view_change (key_, self_, epoch_, target);
	view_changes_[target][self_] = msg;
	return msg;
}

void node_state::enter_view (std::uint32_t new_view)
{
	view_ = new_view;
	phase_ = phase::idle;
	proposal_.reset ();
	votes_.clear ();
	voted_this_view_ = false;
	++view_changes_completed_;
}

bool node_state::on_view_change (view_change_msg const & msg)
{
	if (msg.node >= cfg_.n || !verify_view_change (msg, peer_keys_.at (msg.node)))
	{
		return false;
	}
	if (msg.epoch != epoch_ || msg.new_view <= view_)
	{
		return false;
	}
	auto & collected = view_changes_[msg.new_view];
	collected[msg.node] = msg;
	if (collected.size () >= cfg_.quorum ())
	{
		enter_view (msg.new_view);
		return true;
	}
	return false;
}

std::vector<view_change_msg> node_state::view_change_proof (std::uint32_t target_view) const
{
	std::vector<view_change_msg> out;
	auto it = view_changes_.find (target_view);
	if (it != view_changes_.end ())
	{
		for (auto const & [node, msg] : it->second)
		{
			out.push_back (msg);
		}
	}
	return out;
}

bool node_state::on_new_view (std::uint32_t new_view, std::vector<view_change_msg> const & proof)
{
	if (new_view <= view_)
	{
		return false;
	}
	std::set<std::uint32_t> distinct;
	for (auto const & msg : proof)
	{
		if (msg.new_view == new_view && msg.epoch == epoch_ && msg.node < cfg_.n && verify_view_change (msg, peer_keys_.at (msg.node)))
		{
			distinct.insert (msg.node);
		}
	}
	if (distinct.size () < cfg_.quorum ())
	{
		return false;
	}
	enter_view (new_view);
	return true;
}
}
