#include <chaintier/connector.hpp>
#include <chaintier/consensus.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/rng.hpp>
#include <chaintier/sim/simulation.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <variant>

namespace chaintier::sim
{
namespace
{
	constexpr std::uint64_t ns_per_s = 1'000'000'000ull;
	constexpr std::uint64_t ns_per_ms = 1'000'000ull;
	constexpr std::uint64_t seconds_per_day = 86'400ull;
	constexpr std::uint64_t sync_vote_deadline_ns = 500 * ns_per_ms;

	// --- event payloads -------------------------------------------------

	struct workload_tick
	{
		std::uint64_t second;
	};
	struct epoch_tick
	{
		std::uint64_t second;
	};
	struct timeout_check
	{
		std::uint64_t epoch;
		std::uint32_t view;
	};
	struct trigger_check
	{
		std::uint64_t second;
	};
	struct sample_tick
	{
		std::uint64_t index;
	};
	struct tamper_tick
	{
		std::uint32_t replica;
		std::size_t fault_index;
	};
	struct vote_deadline
	{
		std::uint32_t requester;
	};
	struct session_timeout
	{
		std::uint64_t session_epoch;
	};
	struct transfer_complete
	{
		std::uint32_t uploader;
	};
	struct propose_msg
	{
		std::uint32_t sender;
		data_block block;
	};
	struct vote_msg
	{
		consensus::signed_vote vote;
	};
	struct view_change_relay
	{
		consensus::view_change_msg msg;
	};
	struct new_view_msg
	{
		std::uint32_t sender;
		std::uint32_t new_view;
		std::vector<consensus::view_change_msg> proof;
	};
	struct pool_tx_msg
	{
		connector::validated_transaction vtx;
	};
	struct sync_request_msg
	{
		cloudsync::sync_request req;
	};
	struct sync_vote_msg
	{
		cloudsync::sync_vote vote;
	};
	struct sync_decision_relay
	{
		std::uint32_t sender;
		cloudsync::sync_decision_msg msg;
	};
	struct sync_response_msg
	{
		cloudsync::response_message resp;
		std::uint64_t trigger_ns;
	};
	struct admin_alert_msg
	{
		std::uint32_t about_node;
		std::string detail;
	};

	using payload_t = std::variant<workload_tick, epoch_tick, timeout_check, trigger_check, sample_tick, tamper_tick, vote_deadline, session_timeout, transfer_complete, propose_msg, vote_msg, view_change_relay, new_view_msg, pool_tx_msg, sync_request_msg, sync_vote_msg, sync_decision_relay, sync_response_msg, admin_alert_msg>;

	struct sim_event
	{
		std::uint64_t fire_ns;
		std::uint64_t seq;
		std::uint32_t target;
		payload_t payload;
	};

	struct event_after
	{
		bool operator() (sim_event const & a, sim_event const & b) const
		{
			if (a.fire_ns != b.fire_ns)
			{
				return a.fire_ns > b.fire_ns;
			}
			return a.seq > b.seq;
		}
	};

	// --- full protocol engine --------------------------------------------

	struct node_ctx
	{
		std::uint32_t id{ 0 };
		crypto::key_pair key;
		std::unique_ptr<consensus::node_state> consensus;
		connector::tx_pool pool;
		std::vector<data_block> chain;
		std::uint64_t local_bytes{ 0 };
		std::uint64_t last_sync_trigger_ns{ 0 };
		std::uint64_t last_request_ns{ 0 };
		bool session_active{ false };
		std::uint64_t session_epoch{ 0 }; // bumps on every open/close, guards timeouts
		std::optional<cloudsync::sync_request> my_request;
		std::uint64_t my_request_ns{ 0 };
	};

	struct leader_session_ctx
	{
		cloudsync::sync_session session;
		std::uint64_t trigger_ns{ 0 };
		bool decided{ false };
	};

	struct transfer_ctx
	{
		cloudsync::sync_session session;
		std::uint32_t uploader{ 0 };
		std::uint64_t trigger_ns{ 0 };
		unsigned attempts{ 0 };
	};

	class engine
	{
	public:
		explicit engine (scenario_config const & cfg) :
			cfg_ (cfg),
			rng_ (cfg.seed),
			scheme_ (crypto::hash_id::sha256),
			archive_ (cfg.cloud_replicas, cfg.replication_factor, crypto::hash_id::sha256),
			ccfg_{ cfg.overlay_size, cfg.epoch_timeout_ms * ns_per_ms }
		{
			policy_.capacity_bytes = cfg.disk_capacity_bytes;
			policy_.trigger_threshold_bytes = cfg.sync_threshold_bytes;
			policy_.min_interval_ns = cfg.sync_min_interval_s * ns_per_s;
			policy_.schedule_period_ns = cfg.sync_schedule_s * ns_per_s;
			policy_.overhead_factor = cfg.sync_overhead_factor;
		}

		run_artifacts run ();

	private:
		// setup
		void init_nodes ();
		void schedule (std::uint64_t fire_ns, std::uint32_t target, payload_t payload);

		// helpers
		std::uint64_t now_seconds () const
		{
			return now_ / ns_per_s;
		}
		std::uint64_t overlay_latency ()
		{
			return rng_.uniform (cfg_.latency_overlay_min_ms, cfg_.latency_overlay_max_ms) * ns_per_ms;
		}
		std::uint64_t cloud_latency ()
		{
			return rng_.uniform (cfg_.latency_cloud_min_ms, cfg_.latency_cloud_max_ms) * ns_per_ms;
		}
		bool fault_active (std::uint32_t node, fault_behavior behavior) const
		{
			for (auto const & fault : cfg_.faults)
			{
				if (fault.node == node && fault.behavior == behavior && fault.active (now_))
				{
					return true;
				}
			}
			return false;
		}
		std::uint64_t block_size (data_block const & block) const
		{
			if (cfg_.mode == sim_mode::materialized)
			{
				return encode_block (block).size ();
			}
			return encoded_block_size (block);
		}
		void violate (std::string const & what);
		void record_event (event_kind kind, std::uint32_t node, std::string detail);
		template <typename T>
		void broadcast (std::uint32_t sender, T const & payload)
		{
			for (std::uint32_t target = 0; target < cfg_.overlay_size; ++target)
			{
				if (target != sender)
				{
					schedule (now_ + overlay_latency (), target, payload);
				}
			}
		}

		// handlers
		void handle (std::uint32_t target, workload_tick const &);
		void handle (std::uint32_t target, epoch_tick const &);
		void handle (std::uint32_t target, timeout_check const &);
		void handle (std::uint32_t target, trigger_check const &);
		void handle (std::uint32_t target, sample_tick const &);
		void handle (std::uint32_t target, tamper_tick const &);
		void handle (std::uint32_t target, vote_deadline const &);
		void handle (std::uint32_t target, session_timeout const &);
		void handle (std::uint32_t target, transfer_complete const &);
		void handle (std::uint32_t target, propose_msg const &);
		void handle (std::uint32_t target, vote_msg const &);
		void handle (std::uint32_t target, view_change_relay const &);
		void handle (std::uint32_t target, new_view_msg const &);
		void handle (std::uint32_t target, pool_tx_msg const &);
		void handle (std::uint32_t target, sync_request_msg const &);
		void handle (std::uint32_t target, sync_vote_msg const &);
		void handle (std::uint32_t target, sync_decision_relay const &);
		void handle (std::uint32_t target, sync_response_msg const &);
		void handle (std::uint32_t target, admin_alert_msg const &);

		void propose (std::uint32_t node_id);
		void deliver_own_vote (std::uint32_t node_id, consensus::signed_vote const & vote);
		void handle_finalized (std::uint32_t node_id, data_block block);
		void abandon_session ();
		void open_session (std::uint32_t node_id, std::uint64_t timeout_ns);
		void close_session (std::uint32_t node_id);
		void update_local_tracking (std::uint32_t node_id);
		void start_upload (std::uint32_t uploader);
		void verify_reconstruction (std::uint32_t node_id);
		void close_day (std::uint64_t boundary_s);
		data_block equivocation_variant (data_block block, crypto::key_pair const & key);

		scenario_config cfg_;
		rng rng_;
		crypto::hash_id scheme_;
		std::priority_queue<sim_event, std::vector<sim_event>, event_after> queue_;
		std::uint64_t now_{ 0 };
		std::uint64_t seq_{ 0 };
		std::vector<node_ctx> nodes_;
		std::vector<crypto::public_key> peer_keys_;
		std::vector<crypto::key_pair> device_keys_;
		std::vector<std::uint32_t> device_tx_seq_;
		connector::permission_registry registry_;
		std::vector<std::unique_ptr<connector::tx_validator>> validators_;
		cloudstore::archive archive_;
		consensus::config ccfg_;
		cloudsync::sync_policy policy_;
		cloudsync::fault_ledger cloud_faults_;
		std::optional<leader_session_ctx> leader_session_;
		std::map<std::uint32_t, std::vector<cloudsync::sync_vote>> pending_sync_votes_;
		std::optional<transfer_ctx> transfer_;
		std::optional<cloudsync::sync_session> last_completed_session_;
		std::map<std::uint64_t, std::map<std::uint32_t, crypto::digest>> finalized_hashes_;
		metrics_log log_;
		// storage tracking (node 0 is the reporting representative)
		std::uint64_t total_chain_bytes_{ 0 };
		std::uint64_t day_peak_{ 0 };
		std::uint64_t cummax_{ 0 };
		std::uint32_t day_syncs_{ 0 };
		std::uint64_t duration_ns_{ 0 };
	};

	void engine::violate (std::string const & what)
	{
		record_event (event_kind::invariant_violation, 0, what);
		log_.invariants_ok = false;
		throw invariant_violation ("t=" + std::to_string (now_) + "ns: " + what);
	}

	void engine::record_event (event_kind kind, std::uint32_t node, std::string detail)
	{
		log_.events.push_back ({ now_, kind, node, std::move (detail) });
	}

	void engine::schedule (std::uint64_t fire_ns, std::uint32_t target, payload_t payload)
	{
		if (fire_ns <= now_)
		{
			fire_ns = now_ + 1; // events may only fire strictly later
		}
		queue_.push (sim_event{ fire_ns, seq_++, target, std::move (payload) });
	}

	void engine::init_nodes ()
	{
		auto genesis = make_genesis (scheme_);
		auto genesis_bytes = block_size (genesis);
		peer_keys_.resize (cfg_.overlay_size);
		nodes_.resize (cfg_.overlay_size);
		for (std::uint32_t i = 0; i < cfg_.overlay_size; ++i)
		{
			nodes_[i].id = i;
			nodes_[i].key = crypto::derive_key_pair ((cfg_.seed << 20) ^ (0x4e0000ull + i));
			peer_keys_[i] = nodes_[i].key.pub;
		}
		for (std::uint32_t i = 0; i < cfg_.overlay_size; ++i)
		{
			nodes_[i].consensus = std::make_unique<consensus::node_state> (ccfg_, i, nodes_[i].key, peer_keys_, genesis.header, scheme_);
			nodes_[i].chain.push_back (genesis);
			nodes_[i].local_bytes = genesis_bytes;
			auto identity = connector::node_identity (i);
			registry_.add (identity, connector::role_bit (connector::action::join) | connector::role_bit (connector::action::submit) | connector::role_bit (connector::action::validate) | connector::role_bit (connector::action::aggregate));
			validators_.push_back (std::make_unique<connector::tx_validator> (registry_, identity));
		}
		auto devices = cfg_.device_count ();
		device_keys_.resize (devices);
		device_tx_seq_.assign (devices, 0);
		for (std::uint32_t d = 0; d < devices; ++d)
		{
			device_keys_[d] = crypto::derive_key_pair ((cfg_.seed << 20) ^ (0xde0000ull + d));
			registry_.add (connector::device_identity (d), connector::role_bit (connector::action::join) | connector::role_bit (connector::action::submit));
		}
		total_chain_bytes_ = genesis_bytes;
		day_peak_ = nodes_[0].local_bytes;
		cummax_ = nodes_[0].local_bytes;
	}

	void engine::handle (std::uint32_t, workload_tick const & tick)
	{
		auto second = tick.second;
		auto devices = cfg_.device_count ();
		std::uint64_t pair_draw = 0;
		auto span = cfg_.tx_size_max - cfg_.tx_size_min;
		for (std::uint32_t d = 0; d < devices; ++d)
		{
			std::uint32_t size;
			if (d + 1 == devices && devices % 2 == 1)
			{
				size = (cfg_.tx_size_min + cfg_.tx_size_max) / 2;
			}
			else if (d % 2 == 0)
			{
				pair_draw = rng_.uniform (0, span);
				size = cfg_.tx_size_min + static_cast<std::uint32_t> (pair_draw);
			}
			else
			{
				size = cfg_.tx_size_max - static_cast<std::uint32_t> (pair_draw);
			}
			auto extra = size - transaction_fixed_size;
			auto gateway = d % cfg_.overlay_size;
			transaction tx;
			tx.from = connector::device_identity (d);
			tx.to = connector::node_identity (gateway);
			tx.type = static_cast<std::uint8_t> (tx_type::reading);
			tx.device_info.assign (extra / 2, static_cast<std::uint8_t> (d + second));
			tx.one_time_pk = device_keys_[d].pub;
			tx.timestamp = second;
			tx.tx_id = ++device_tx_seq_[d];
			tx.data.assign (extra - extra / 2, static_cast<std::uint8_t> (d * 31 + second));
			tx.hash_type = static_cast<std::uint8_t> (scheme_);
			tx.tx_hash = compute_tx_hash (tx);
			tx.sig_type = static_cast<std::uint8_t> (crypto::sig_id::mac33);
			tx.sig = crypto::sign (crypto::sig_id::mac33, device_keys_[d], tx.tx_hash);
			++log_.counters.transactions_submitted;
			if (!connector::check_permission (registry_, tx.from, connector::action::submit))
			{
				continue;
			}
			auto vtx = validators_[gateway]->validate (tx, connector::node_identity (gateway));
			nodes_[gateway].pool.add (vtx);
			broadcast (gateway, pool_tx_msg{ vtx });
		}
		if (second + 1 <= cfg_.run_duration_s)
		{
			schedule ((second + 1) * ns_per_s, 0, workload_tick{ second + 1 });
		}
	}

	data_block engine::equivocation_variant (data_block block, crypto::key_pair const & key)
	{
		if (block.body.entries.size () >= 2)
		{
			block.body.entries.pop_back ();
			block.header.num_txs = static_cast<std::uint32_t> (block.body.entries.size ());
			std::vector<crypto::digest> leaves;
			for (auto const & entry : block.body.entries)
			{
				leaves.push_back (entry.tx_hash);
			}
			block.header.merkle_root = crypto::merkle_root (scheme_, leaves);
		}
		else
		{
			block.header.version += 1;
		}
		block.header.sig = crypto::sign (crypto::sig_id::mac33, key, header_signing_bytes (block.header));
		block.header.block_hash = compute_block_hash (block.header, scheme_);
		return block;
	}

	void engine::propose (std::uint32_t node_id)
	{
		auto & node = nodes_[node_id];
		if (!node.consensus->is_leader () || node.consensus->current_phase () != consensus::phase::idle || node.pool.empty ())
		{
			return;
		}
		data_block block;
		try
		{
			block = connector::build_block (node.pool, node.consensus->latest (), node.consensus->latest_height (), cfg_.max_txs_per_block, node.key, now_seconds (), scheme_);
		}
		catch (empty_pool_error const &)
		{
			return;
		}
		if (fault_active (node_id, fault_behavior::equivocate))
		{
			auto variant = equivocation_variant (block, node.key);
			for (std::uint32_t target = 0; target < cfg_.overlay_size; ++target)
			{
				if (target == node_id)
				{
					continue;
				}
				auto const & chosen = (target < cfg_.overlay_size / 2) ? block : variant;
				schedule (now_ + overlay_latency (), target, propose_msg{ node_id, chosen });
			}
			auto decision = node.consensus->on_proposal (block, node_id);
			if (decision.vote.has_value ())
			{
				broadcast (node_id, vote_msg{ *decision.vote });
				deliver_own_vote (node_id, *decision.vote);
			}
			return;
		}
		broadcast (node_id, propose_msg{ node_id, block });
		auto decision = node.consensus->on_proposal (block, node_id);
		if (decision.vote.has_value ())
		{
			broadcast (node_id, vote_msg{ *decision.vote });
			deliver_own_vote (node_id, *decision.vote);
		}
	}

	void engine::handle (std::uint32_t, epoch_tick const & tick)
	{
		for (auto & node : nodes_)
		{
			if (fault_active (node.id, fault_behavior::silent))
			{
				continue;
			}
			propose (node.id);
			if (!node.pool.empty () || node.consensus->current_phase () == consensus::phase::proposed)
			{
				schedule (now_ + ccfg_.epoch_timeout_ns, node.id, timeout_check{ node.consensus->epoch (), node.consensus->view () });
			}
		}
		if (tick.second + 1 <= cfg_.run_duration_s)
		{
			schedule ((tick.second + 1) * ns_per_s + ns_per_s / 2, 0, epoch_tick{ tick.second + 1 });
		}
	}

	void engine::deliver_own_vote (std::uint32_t node_id, consensus::signed_vote const & vote)
	{
		auto result = nodes_[node_id].consensus->on_vote (vote);
		if (result.outcome == consensus::vote_outcome::finalized)
		{
			handle_finalized (node_id, std::move (*result.finalized));
		}
	}

	void engine::handle (std::uint32_t target, propose_msg const & msg)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		auto decision = node.consensus->on_proposal (msg.block, msg.sender);
		if (decision.outcome == consensus::proposal_outcome::voted)
		{
			broadcast (target, vote_msg{ *decision.vote });
			deliver_own_vote (target, *decision.vote);
		}
	}

	void engine::handle (std::uint32_t target, vote_msg const & msg)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto result = nodes_[target].consensus->on_vote (msg.vote);
		switch (result.outcome)
		{
			case consensus::vote_outcome::finalized:
				handle_finalized (target, std::move (*result.finalized));
				break;
			case consensus::vote_outcome::duplicate_ignored:
				++log_.counters.duplicate_votes;
				break;
			case consensus::vote_outcome::invalid_signature:
				++log_.counters.invalid_signatures;
				break;
			default:
				break;
		}
	}

	void engine::handle_finalized (std::uint32_t node_id, data_block block)
	{
		auto & node = nodes_[node_id];
		if (node.consensus->last_quorum_size () < ccfg_.quorum ())
		{
			violate ("finalization below quorum");
		}
		auto & at_height = finalized_hashes_[block.height];
		for (auto const & [other, hash] : at_height)
		{
			if (!fault_active (other, fault_behavior::silent) && hash != block.header.block_hash)
			{
				violate ("conflicting finalization at height " + std::to_string (block.height));
			}
		}
		at_height[node_id] = block.header.block_hash;
		for (auto const & entry : block.body.entries)
		{
			auto tx = decode_transaction (entry.tx_data);
			node.pool.remove (tx.from, tx.tx_id, tx.timestamp);
		}
		node.local_bytes += block_size (block);
		node.chain.push_back (std::move (block));
		if (node.local_bytes > cfg_.disk_capacity_bytes)
		{
			violate ("node " + std::to_string (node_id) + " exceeded disk capacity");
		}
		if (node_id == 0)
		{
			++log_.counters.finalized_blocks;
			total_chain_bytes_ += block_size (node.chain.back ());
			update_local_tracking (0);
		}
	}

	void engine::update_local_tracking (std::uint32_t node_id)
	{
		if (node_id != 0)
		{
			return;
		}
		day_peak_ = std::max (day_peak_, nodes_[0].local_bytes);
		cummax_ = std::max (cummax_, nodes_[0].local_bytes);
	}

	void engine::handle (std::uint32_t target, timeout_check const & check)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		if (node.consensus->epoch () != check.epoch || node.consensus->view () != check.view)
		{
			return; // finalized or moved on
		}
		auto msg = node.consensus->on_timeout ();
		if (msg.has_value ())
		{
			broadcast (target, view_change_relay{ *msg });
		}
	}

	void engine::handle (std::uint32_t target, view_change_relay const & relay)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		auto previous_view = node.consensus->view ();
		if (node.consensus->on_view_change (relay.msg))
		{
			if (target == 0)
			{
				++log_.counters.view_changes;
				record_event (event_kind::view_change, target, "view " + std::to_string (previous_view) + " -> " + std::to_string (node.consensus->view ()));
			}
			schedule (now_ + ccfg_.epoch_timeout_ns, target, timeout_check{ node.consensus->epoch (), node.consensus->view () });
			if (node.consensus->is_leader ())
			{
				auto proof = node.consensus->view_change_proof (node.consensus->view ());
				broadcast (target, new_view_msg{ target, node.consensus->view (), proof });
				if (target == 0)
				{
					record_event (event_kind::new_view, target, "view " + std::to_string (node.consensus->view ()));
				}
				propose (target);
			}
		}
	}

	void engine::handle (std::uint32_t target, new_view_msg const & msg)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		if (node.consensus->on_new_view (msg.new_view, msg.proof))
		{
			if (target == 0)
			{
				++log_.counters.view_changes;
				record_event (event_kind::new_view, target, "adopted view " + std::to_string (msg.new_view));
			}
			schedule (now_ + ccfg_.epoch_timeout_ns, target, timeout_check{ node.consensus->epoch (), node.consensus->view () });
			if (node.consensus->is_leader ())
			{
				propose (target);
			}
		}
	}

	void engine::handle (std::uint32_t target, pool_tx_msg const & msg)
	{
		nodes_[target].pool.add (msg.vtx);
	}

	void engine::handle (std::uint32_t target, trigger_check const & tick)
	{
		auto & node = nodes_[target];
		if (!fault_active (target, fault_behavior::silent) && !node.session_active && transfer_ == std::nullopt)
		{
			auto reason = cloudsync::check_trigger (policy_, node.local_bytes, now_, node.last_sync_trigger_ns, node.last_request_ns);
			if (reason != cloudsync::trigger_reason::none)
			{
				auto req = cloudsync::make_sync_request (node.key, target, node.consensus->latest (), node.consensus->latest_height (), reason);
				node.last_request_ns = now_;
				node.my_request = req;
				node.my_request_ns = now_;
				++log_.counters.sync_requests;
				record_event (event_kind::sync_request, target, reason == cloudsync::trigger_reason::threshold_reached ? "threshold" : "scheduled");
				broadcast (target, sync_request_msg{ req });
				handle (target, sync_request_msg{ req });
			}
		}
		if (tick.second + 1 <= cfg_.run_duration_s)
		{
			schedule ((tick.second + 1) * ns_per_s + 250 * ns_per_ms + target * 20 * ns_per_ms, target, trigger_check{ tick.second + 1 });
		}
	}

	void engine::handle (std::uint32_t target, sync_request_msg const & msg)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		auto const & req = msg.req;
		if (req.requester >= cfg_.overlay_size || !cloudsync::verify_sync_request (req, peer_keys_[req.requester]))
		{
			++log_.counters.invalid_signatures;
			return;
		}
		if (!connector::check_permission (registry_, connector::node_identity (req.requester), connector::action::join))
		{
			return;
		}
		if (!node.session_active)
		{
			// Covers the vote round; a swallowed decision re-opens requests.
			open_session (target, 2 * ns_per_s);
		}
		// The epoch leader aggregates; initialize its session ledger.
		if (node.consensus->current_leader () == target)
		{
			if (!leader_session_.has_value ())
			{
				leader_session_ = leader_session_ctx{};
				leader_session_->session.request = req;
				leader_session_->trigger_ns = now_;
				schedule (now_ + sync_vote_deadline_ns, target, vote_deadline{ req.requester });
				auto pending = pending_sync_votes_.find (req.requester);
				if (pending != pending_sync_votes_.end ())
				{
					for (auto const & vote : pending->second)
					{
						handle (target, sync_vote_msg{ vote });
					}
					pending_sync_votes_.erase (pending);
				}
			}
		}
		auto vote = cloudsync::vote_on_sync (req, node.consensus->latest (), node.key, target, peer_keys_[req.requester]);
		if (vote.has_value ())
		{
			auto leader = node.consensus->current_leader ();
			if (leader == target)
			{
				handle (target, sync_vote_msg{ *vote });
			}
			else
			{
				schedule (now_ + overlay_latency (), leader, sync_vote_msg{ *vote });
			}
		}
	}

	void engine::handle (std::uint32_t target, sync_vote_msg const & msg)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		if (!leader_session_.has_value () || leader_session_->session.request.requester != msg.vote.requester)
		{
			pending_sync_votes_[msg.vote.requester].push_back (msg.vote);
			return;
		}
		if (leader_session_->decided)
		{
			return;
		}
		auto & session = leader_session_->session;
		if (msg.vote.voter >= cfg_.overlay_size || !cloudsync::add_sync_vote (session, msg.vote, peer_keys_[msg.vote.voter]))
		{
			++log_.counters.invalid_signatures;
			return;
		}
		if (cloudsync::aggregate_sync_votes (session, ccfg_, false) == cloudsync::session_decision::approved)
		{
			leader_session_->decided = true;
			++log_.counters.sync_sessions_approved;
			record_event (event_kind::sync_approved, target, std::to_string (session.agree_votes.size ()) + " votes");
			cloudsync::sync_decision_msg decision;
			decision.requester = session.request.requester;
			decision.head_hash = session.request.latest.block_hash;
			decision.approved = true;
			for (auto const & [voter, vote] : session.agree_votes)
			{
				decision.votes.push_back (vote);
			}
			broadcast (target, sync_decision_relay{ target, decision });
			handle (target, sync_decision_relay{ target, decision });
		}
	}

	void engine::handle (std::uint32_t target, vote_deadline const & deadline)
	{
		if (!leader_session_.has_value () || leader_session_->session.request.requester != deadline.requester || leader_session_->decided)
		{
			return;
		}
		auto decision = cloudsync::aggregate_sync_votes (leader_session_->session, ccfg_, true);
		if (decision == cloudsync::session_decision::rejected)
		{
			++log_.counters.sync_sessions_rejected;
			record_event (event_kind::sync_rejected, target, "quorum deadline");
			cloudsync::sync_decision_msg msg;
			msg.requester = deadline.requester;
			msg.head_hash = leader_session_->session.request.latest.block_hash;
			msg.approved = false;
			broadcast (target, sync_decision_relay{ target, msg });
			handle (target, sync_decision_relay{ target, msg });
			leader_session_.reset ();
		}
	}

	void engine::handle (std::uint32_t target, sync_decision_relay const & relay)
	{
		if (fault_active (target, fault_behavior::silent))
		{
			return;
		}
		auto & node = nodes_[target];
		if (!cloudsync::verify_sync_decision (relay.msg, ccfg_, peer_keys_))
		{
			// Forged approval from an adversarial aggregator.
			++log_.counters.invalid_signatures;
			return;
		}
		if (!relay.msg.approved)
		{
			close_session (target);
			return;
		}
		// Approved: re-arm the session guard to span the transfer plus the
		// cloud's per-node retries.
		node.session_active = true;
		++node.session_epoch;
		auto transfer_bound = cloudsync::transfer_duration_ns (node.local_bytes, cfg_.cloud_bandwidth_bytes_per_s (), cfg_.sync_overhead_factor);
		schedule (now_ + 2 * ns_per_s + (cfg_.overlay_size + 1) * transfer_bound, target, session_timeout{ node.session_epoch });
		if (relay.msg.requester == target && node.my_request.has_value ())
		{
			start_upload (target);
		}
	}

	void engine::start_upload (std::uint32_t uploader)
	{
		if (transfer_.has_value ())
		{
			return;
		}
		auto & node = nodes_[uploader];
		cloudsync::sync_session session;
		session.request = *node.my_request;
		session.decision = cloudsync::session_decision::approved;
		session.frozen_last_height = node.my_request->latest_height;
		std::uint64_t first_height = archive_.empty () ? 0 : archive_.head_height () + 1;
		if (first_height > session.frozen_last_height)
		{
			// Nothing new; hand the session to the cloud for the duplicate
			// denial path.
			first_height = session.frozen_last_height;
		}
		std::vector<data_block> blocks;
		for (auto const & block : node.chain)
		{
			if (block.height >= first_height && block.height <= session.frozen_last_height)
			{
				blocks.push_back (block);
			}
		}
		if (blocks.empty ())
		{
			abandon_session ();
			return;
		}
		auto segment = make_segment (std::move (blocks));
		if (fault_active (uploader, fault_behavior::bad_sync))
		{
			bool corrupted = false;
			for (auto & block : segment.blocks)
			{
				if (!block.body.entries.empty ())
				{
					block.body.entries.front ().tx_data.front () ^= 0xff;
					corrupted = true;
					break;
				}
			}
			if (!corrupted)
			{
				segment.blocks.back ().header.merkle_root[0] ^= 0xff;
			}
		}
		auto bytes = segment.encoded_bytes ();
		session.segment = std::move (segment);
		transfer_ = transfer_ctx{ std::move (session), uploader, node.my_request_ns, 1 };
		auto duration = cloudsync::transfer_duration_ns (bytes, cfg_.cloud_bandwidth_bytes_per_s (), cfg_.sync_overhead_factor);
		schedule (now_ + cloud_latency () + duration, uploader, transfer_complete{ uploader });
	}

	void engine::open_session (std::uint32_t node_id, std::uint64_t timeout_ns)
	{
		auto & node = nodes_[node_id];
		node.session_active = true;
		++node.session_epoch;
		schedule (now_ + timeout_ns, node_id, session_timeout{ node.session_epoch });
	}

	void engine::close_session (std::uint32_t node_id)
	{
		auto & node = nodes_[node_id];
		node.session_active = false;
		++node.session_epoch;
		node.my_request.reset ();
	}

	// A stalled session (e.g. a silent leader swallowing the vote round)
	// unblocks here; the next trigger re-requests via the then-current leader.
	void engine::handle (std::uint32_t target, session_timeout const & timeout)
	{
		auto & node = nodes_[target];
		if (node.session_active && node.session_epoch == timeout.session_epoch)
		{
			close_session (target);
		}
	}

	void engine::abandon_session ()
	{
		for (auto & node : nodes_)
		{
			if (node.session_active)
			{
				close_session (node.id);
			}
		}
		transfer_.reset ();
		leader_session_.reset ();
		pending_sync_votes_.clear ();
	}

	void engine::handle (std::uint32_t, transfer_complete const & completion)
	{
		if (!transfer_.has_value () || transfer_->uploader != completion.uploader)
		{
			return;
		}
		cloudsync::sync_execution exec;
		try
		{
			exec = cloudsync::execute_sync (transfer_->session, archive_, cfg_.cloud_bandwidth_bytes_per_s (), cfg_.sync_overhead_factor, false);
		}
		catch (head_gap_error const & err)
		{
			violate (std::string ("sync segment does not extend the cloud head: ") + err.what ());
		}
		if (exec.response.kind == cloudsync::session_outcome::exception)
		{
			++log_.counters.sync_exceptions;
			record_event (event_kind::sync_exception, transfer_->uploader, exec.response.error_detail);
			auto action = cloudsync::handle_sync_exception (cloud_faults_, transfer_->uploader, exec.response.error_detail);
			if (action == cloudsync::exception_action::marked_malicious)
			{
				++log_.counters.malicious_marks;
				++log_.counters.admin_alerts;
				record_event (event_kind::malicious_mark, transfer_->uploader, "two sync errors");
				record_event (event_kind::admin_alert, transfer_->uploader, "potential malicious node");
				broadcast (cfg_.overlay_size, admin_alert_msg{ transfer_->uploader, "potential malicious node" });
			}
			// The cloud retries with another overlay node.
			if (transfer_->attempts >= cfg_.overlay_size)
			{
				abandon_session ();
				return;
			}
			auto next = (transfer_->uploader + 1) % cfg_.overlay_size;
			auto const & source = nodes_[next];
			std::uint64_t first_height = archive_.empty () ? 0 : archive_.head_height () + 1;
			std::vector<data_block> blocks;
			for (auto const & block : source.chain)
			{
				if (block.height >= first_height && block.height <= transfer_->session.frozen_last_height)
				{
					blocks.push_back (block);
				}
			}
			if (blocks.empty ())
			{
				// Nothing left to retransmit (the store itself succeeded).
				abandon_session ();
				return;
			}
			auto segment = make_segment (std::move (blocks));
			auto bytes = segment.encoded_bytes ();
			transfer_->session.segment = std::move (segment);
			transfer_->session.outcome = cloudsync::session_outcome::none;
			transfer_->uploader = next;
			++transfer_->attempts;
			auto duration = cloudsync::transfer_duration_ns (bytes, cfg_.cloud_bandwidth_bytes_per_s (), cfg_.sync_overhead_factor);
			schedule (now_ + duration, next, transfer_complete{ next });
			return;
		}
		if (exec.response.denied_duplicate)
		{
			++log_.counters.sync_denied_duplicates;
			record_event (event_kind::sync_denied_duplicate, transfer_->uploader, "");
		}
		else
		{
			++log_.counters.sync_completions;
			++day_syncs_;
			record_event (event_kind::sync_complete, transfer_->uploader, std::to_string (exec.transferred_bytes) + " bytes");
		}
		auto trigger_ns = transfer_->trigger_ns;
		last_completed_session_ = transfer_->session;
		for (std::uint32_t target = 0; target < cfg_.overlay_size; ++target)
		{
			schedule (now_ + cloud_latency (), target, sync_response_msg{ exec.response, trigger_ns });
		}
		transfer_.reset ();
		leader_session_.reset ();
		pending_sync_votes_.clear ();
	}

	void engine::verify_reconstruction (std::uint32_t node_id)
	{
		if (cfg_.mode != sim_mode::materialized)
		{
			return;
		}
		auto const & node = nodes_[node_id];
		std::vector<data_block> full;
		for (auto const & record : archive_.replicas ().front ().segments)
		{
			if (record.blocks.has_value ())
			{
				for (auto const & block : record.blocks->blocks)
				{
					full.push_back (block);
				}
			}
		}
		// Local tail overlaps the archive exactly at the cloud head.
		for (auto const & block : node.chain)
		{
			if (full.empty () || block.height > full.back ().height)
			{
				full.push_back (block);
			}
		}
		auto segment = make_segment (std::move (full));
		auto report = verify_chain (segment, nullptr, scheme_);
		if (!report.passed)
		{
			violate ("end-to-end chain verification failed: " + report.describe ());
		}
	}

	void engine::handle (std::uint32_t target, sync_response_msg const & msg)
	{
		auto & node = nodes_[target];
		close_session (target);
		if (msg.resp.kind != cloudsync::session_outcome::regular)
		{
			return;
		}
		node.last_sync_trigger_ns = msg.trigger_ns;
		bool head_known = false;
		for (auto const & block : node.chain)
		{
			head_known = head_known || (block.height == msg.resp.updated_height && block.header.block_hash == msg.resp.updated_head.block_hash);
		}
		if (!head_known)
		{
			if (target == 0)
			{
				violate ("prune failed on node 0: cloud head unknown locally");
			}
			// A node that fell behind (e.g. after a silent window) cannot
			// prune to a head it never finalized; it keeps its chain.
			record_event (event_kind::prune_skipped, target, "cloud head unknown locally");
			return;
		}
		node.chain = cloudsync::prune_local (std::move (node.chain), msg.resp);
		node.local_bytes = 0;
		for (auto const & block : node.chain)
		{
			node.local_bytes += block_size (block);
		}
		if (node.local_bytes == 0)
		{
			violate ("local storage reached zero after sync");
		}
		if (target == 0)
		{
			update_local_tracking (0);
			// Conservation: cloud holds [0..head], local holds [head..latest].
			if (node.chain.front ().height != archive_.head_height () || node.chain.front ().header.block_hash != archive_.get_head ().block_hash)
			{
				violate ("cloud head and local tail overlap broken");
			}
			verify_reconstruction (0);
		}
	}

	void engine::handle (std::uint32_t, admin_alert_msg const &)
	{
		// Alerts are already logged by the cloud side.
	}

	void engine::handle (std::uint32_t, sample_tick const & tick)
	{
		std::uint64_t cloud_bytes = archive_.empty () ? 0 : archive_.total_bytes ();
		for (auto const & node : nodes_)
		{
			log_.samples.push_back ({ now_, node.id, node.local_bytes, cloud_bytes });
		}
		auto next = (tick.index + 1) * cfg_.sample_cadence_s * ns_per_s;
		if (next <= duration_ns_)
		{
			schedule (next, 0, sample_tick{ tick.index + 1 });
		}
	}

	void engine::handle (std::uint32_t, tamper_tick const & tick)
	{
		if (!archive_.empty ())
		{
			archive_.tamper_block (tick.replica, archive_.head_height ());
			return;
		}
		auto const & fault = cfg_.faults[tick.fault_index];
		if (now_ + ns_per_s < fault.window_end_ns)
		{
			schedule (now_ + ns_per_s, 0, tamper_tick{ tick.replica, tick.fault_index });
		}
	}

	void engine::close_day (std::uint64_t boundary_s)
	{
		day_stat stat;
		stat.day = static_cast<std::uint32_t> ((boundary_s + seconds_per_day - 1) / seconds_per_day);
		stat.peak_local_bytes = day_peak_;
		stat.end_local_bytes = nodes_[0].local_bytes;
		stat.cummax_local_bytes = cummax_;
		stat.total_chain_bytes = total_chain_bytes_;
		stat.cloud_bytes = archive_.empty () ? 0 : archive_.total_bytes ();
		stat.local_ratio = total_chain_bytes_ > 0 ? static_cast<double> (cummax_) / static_cast<double> (total_chain_bytes_) : 0.0;
		stat.syncs_completed = day_syncs_;
		log_.days.push_back (stat);
		day_peak_ = nodes_[0].local_bytes;
		day_syncs_ = 0;
	}

	run_artifacts engine::run ()
	{
		duration_ns_ = cfg_.run_duration_s * ns_per_s;
		log_.scenario = cfg_.name;
		log_.seed = cfg_.seed;
		log_.mode = cfg_.mode == sim_mode::accounting ? "accounting" : "materialized";
		log_.duration_ns = duration_ns_;
		log_.sample_cadence_ns = cfg_.sample_cadence_s * ns_per_s;
		log_.headline["payload_rate_bytes_per_s"] = payload_rate_bytes_per_s (cfg_);
		init_nodes ();
		if (cfg_.run_duration_s > 0)
		{
			schedule (ns_per_s, 0, workload_tick{ 1 });
			schedule (ns_per_s + ns_per_s / 2, 0, epoch_tick{ 1 });
			for (std::uint32_t i = 0; i < cfg_.overlay_size; ++i)
			{
				schedule (ns_per_s + 250 * ns_per_ms + i * 20 * ns_per_ms, i, trigger_check{ 1 });
			}
			if (cfg_.sample_cadence_s * ns_per_s <= duration_ns_)
			{
				schedule (cfg_.sample_cadence_s * ns_per_s, 0, sample_tick{ 1 });
			}
			for (std::size_t i = 0; i < cfg_.faults.size (); ++i)
			{
				if (cfg_.faults[i].behavior == fault_behavior::tamper_cloud_replica)
				{
					auto start = std::max<std::uint64_t> (cfg_.faults[i].window_start_ns, 1);
					if (start <= duration_ns_)
					{
						schedule (start, 0, tamper_tick{ cfg_.faults[i].node, i });
					}
				}
			}
		}
		std::uint64_t next_day_boundary = seconds_per_day;
		while (!queue_.empty () && queue_.top ().fire_ns <= duration_ns_)
		{
			auto event = queue_.top ();
			queue_.pop ();
			if (event.fire_ns < now_)
			{
				violate ("event queue time went backwards");
			}
			// Day windows are [start, boundary); close before anything at or
			// past the boundary runs.
			while (next_day_boundary <= cfg_.run_duration_s && next_day_boundary * ns_per_s <= event.fire_ns)
			{
				close_day (next_day_boundary);
				next_day_boundary += seconds_per_day;
			}
			now_ = event.fire_ns;
			std::visit ([&] (auto const & payload) { handle (event.target, payload); }, event.payload);
		}
		now_ = duration_ns_;
		while (next_day_boundary <= cfg_.run_duration_s)
		{
			close_day (next_day_boundary);
			next_day_boundary += seconds_per_day;
		}
		if (cfg_.run_duration_s >= seconds_per_day && cfg_.run_duration_s % seconds_per_day != 0)
		{
			close_day (cfg_.run_duration_s); // trailing partial day
		}
		if (cfg_.mode == sim_mode::materialized && cfg_.run_duration_s > 0)
		{
			verify_reconstruction (0);
		}
		log_.headline["total_chain_bytes"] = static_cast<double> (total_chain_bytes_);
		log_.headline["final_local_bytes"] = static_cast<double> (nodes_[0].local_bytes);
		log_.headline["final_cloud_bytes"] = static_cast<double> (archive_.empty () ? 0 : archive_.total_bytes ());
		run_artifacts artifacts;
		artifacts.log = std::move (log_);
		artifacts.archive = std::move (archive_);
		for (auto & node : nodes_)
		{
			artifacts.node_chains.push_back (std::move (node.chain));
		}
		artifacts.cloud_faults = cloud_faults_;
		artifacts.last_session = last_completed_session_;
		artifacts.config_toml = config_to_toml (cfg_);
		return artifacts;
	}

	// --- batched closed-form engine ---------------------------------------

	run_artifacts run_batched (scenario_config const & cfg)
	{
		auto const duration_ns = cfg.run_duration_s * ns_per_s;
		auto const bs = per_epoch_block_bytes (cfg);
		auto const num_txs = cfg.device_count ();
		auto const payload = per_epoch_payload_bytes (cfg);
		auto const genesis_bytes = static_cast<std::uint64_t> (block_header_wire_size);
		auto const bandwidth = cfg.cloud_bandwidth_bytes_per_s ();
		cloudsync::sync_policy policy;
		policy.capacity_bytes = cfg.disk_capacity_bytes;
		policy.trigger_threshold_bytes = cfg.sync_threshold_bytes;
		policy.min_interval_ns = cfg.sync_min_interval_s * ns_per_s;
		policy.schedule_period_ns = cfg.sync_schedule_s * ns_per_s;
		policy.overhead_factor = cfg.sync_overhead_factor;
		policy.validate ();

		metrics_log log;
		log.scenario = cfg.name;
		log.seed = cfg.seed;
		log.mode = "accounting";
		log.duration_ns = duration_ns;
		log.sample_cadence_ns = cfg.sample_cadence_s * ns_per_s;
		log.headline["payload_rate_bytes_per_s"] = payload_rate_bytes_per_s (cfg);
		log.headline["per_epoch_block_bytes"] = static_cast<double> (bs);
		log.headline["week_payload_bytes"] = payload_rate_bytes_per_s (cfg) * 604'800.0;

		cloudstore::archive archive (cfg.cloud_replicas, cfg.replication_factor, crypto::hash_id::fast);

		// Byte model: genesis (113) at height 0, constant-size block per
		// second thereafter.
		auto range_bytes = [&] (std::uint64_t first, std::uint64_t last) -> std::uint64_t {
			std::uint64_t total = 0;
			if (first == 0)
			{
				total += genesis_bytes;
				first = 1;
			}
			if (last >= first)
			{
				total += (last - first + 1) * bs;
			}
			return total;
		};
		auto synthetic_head = [] (std::uint64_t height) {
			byte_writer writer;
			writer.u64 (height);
			return crypto::fast_hash (writer.view ());
		};

		std::uint64_t height = 0;
		std::uint64_t local_bytes = genesis_bytes;
		std::uint64_t total_bytes = genesis_bytes;
		std::uint64_t local_first = 0; // lowest height held locally
		std::uint64_t last_sync_trigger_ns = 0;
		std::uint64_t last_request_ns = 0;
		bool in_flight = false;
		std::uint64_t flight_complete_ns = 0;
		std::uint64_t flight_frozen = 0;
		std::uint64_t flight_bytes = 0;
		std::uint64_t flight_first = 0;
		std::uint64_t flight_trigger_ns = 0;
		std::uint64_t day_peak = local_bytes;
		std::uint64_t cummax = local_bytes;
		std::uint32_t day_syncs = 0;

		auto complete_flight = [&] (std::uint64_t at_ns) {
			cloudstore::segment_record record;
			record.first_height = flight_first;
			record.last_height = flight_frozen;
			record.bytes = flight_bytes;
			record.head_hash = synthetic_head (flight_frozen);
			archive.store_segment (record);
			local_first = flight_frozen;
			local_bytes = range_bytes (local_first, height);
			last_sync_trigger_ns = flight_trigger_ns;
			in_flight = false;
			++log.counters.sync_completions;
			++day_syncs;
			log.events.push_back ({ at_ns, event_kind::sync_complete, 0, std::to_string (flight_bytes) + " bytes" });
			// Conservation: archived ∪ local covers everything, overlapping
			// exactly at the cloud head.
			auto overlap = range_bytes (flight_frozen, flight_frozen);
			if (archive.total_bytes () + local_bytes != total_bytes + overlap)
			{
				throw invariant_violation ("batched conservation check failed at t=" + std::to_string (at_ns));
			}
			if (local_bytes == 0)
			{
				throw invariant_violation ("local bytes hit zero after sync");
			}
		};
		auto track = [&] {
			day_peak = std::max (day_peak, local_bytes);
			cummax = std::max (cummax, local_bytes);
			if (local_bytes > cfg.disk_capacity_bytes)
			{
				throw invariant_violation ("disk capacity exceeded: " + std::to_string (local_bytes));
			}
		};
		auto close_day = [&] (std::uint64_t boundary_s) {
			day_stat stat;
			stat.day = static_cast<std::uint32_t> ((boundary_s + seconds_per_day - 1) / seconds_per_day);
			stat.peak_local_bytes = day_peak;
			stat.end_local_bytes = local_bytes;
			stat.cummax_local_bytes = cummax;
			stat.total_chain_bytes = total_bytes;
			stat.cloud_bytes = archive.empty () ? 0 : archive.total_bytes ();
			stat.local_ratio = static_cast<double> (cummax) / static_cast<double> (total_bytes);
			stat.syncs_completed = day_syncs;
			log.days.push_back (stat);
			day_peak = local_bytes;
			day_syncs = 0;
		};

		for (std::uint64_t k = 1; k <= cfg.run_duration_s; ++k)
		{
			auto const t_ns = k * ns_per_s;
			if (in_flight && flight_complete_ns < t_ns)
			{
				complete_flight (flight_complete_ns);
			}
			if (k % seconds_per_day == 0)
			{
				close_day (k);
			}
			// One finalized block per second.
			height += 1;
			local_bytes += bs;
			total_bytes += bs;
			++log.counters.finalized_blocks;
			track ();
			if (in_flight && flight_complete_ns == t_ns)
			{
				complete_flight (flight_complete_ns);
			}
			if (!in_flight)
			{
				auto reason = cloudsync::check_trigger (policy, local_bytes, t_ns, last_sync_trigger_ns, last_request_ns);
				if (reason != cloudsync::trigger_reason::none)
				{
					last_request_ns = t_ns;
					++log.counters.sync_requests;
					++log.counters.sync_sessions_approved;
					log.events.push_back ({ t_ns, event_kind::sync_request, 0, reason == cloudsync::trigger_reason::threshold_reached ? "threshold" : "scheduled" });
					log.events.push_back ({ t_ns, event_kind::sync_approved, 0, "batched" });
					flight_first = archive.empty () ? 0 : archive.head_query ().height + 1;
					flight_frozen = height;
					flight_bytes = range_bytes (flight_first, flight_frozen);
					flight_trigger_ns = t_ns;
					flight_complete_ns = t_ns + cloudsync::transfer_duration_ns (flight_bytes, bandwidth, cfg.sync_overhead_factor);
					in_flight = true;
				}
			}
			if (k % cfg.sample_cadence_s == 0)
			{
				log.samples.push_back ({ t_ns, 0, local_bytes, archive.empty () ? 0 : archive.total_bytes () });
			}
		}
		if (in_flight && flight_complete_ns <= duration_ns)
		{
			complete_flight (flight_complete_ns);
		}
		if (cfg.run_duration_s % seconds_per_day != 0 && cfg.run_duration_s >= seconds_per_day)
		{
			close_day (cfg.run_duration_s);
		}
		log.headline["total_chain_bytes"] = static_cast<double> (total_bytes);
		log.headline["total_payload_bytes"] = static_cast<double> (static_cast<std::uint64_t> (payload) * cfg.run_duration_s);
		log.headline["final_local_bytes"] = static_cast<double> (local_bytes);
		log.headline["final_cloud_bytes"] = static_cast<double> (archive.empty () ? 0 : archive.total_bytes ());
		log.headline["num_txs_per_epoch"] = static_cast<double> (num_txs);
		if (!log.days.empty ())
		{
			log.headline["final_day_ratio"] = log.days.back ().local_ratio;
		}
		run_artifacts artifacts;
		artifacts.log = std::move (log);
		artifacts.archive = std::move (archive);
		artifacts.config_toml = config_to_toml (cfg);
		return artifacts;
	}

	// --- projection preset -------------------------------------------------

	run_artifacts run_projection (scenario_config const & cfg)
	{
		metrics_log log;
		log.scenario = cfg.name;
		log.seed = cfg.seed;
		log.mode = "accounting";
		log.duration_ns = 0;
		log.sample_cadence_ns = 0;
		constexpr double week_s = 604'800.0;
		auto bitcoin_rate = cfg.bitcoin_txs_per_block * cfg.bitcoin_tx_bytes / cfg.bitcoin_block_interval_s;
		auto iiot_rate = payload_rate_bytes_per_s (cfg);
		log.headline["bitcoin_rate_bytes_per_s"] = bitcoin_rate;
		log.headline["bitcoin_week_bytes"] = compute_volume_projection (bitcoin_rate, week_s);
		log.headline["iiot_rate_bytes_per_s"] = iiot_rate;
		log.headline["iiot_week_bytes"] = compute_volume_projection (iiot_rate, week_s);
		log.headline["payload_rate_bytes_per_s"] = iiot_rate;
		run_artifacts artifacts;
		artifacts.log = std::move (log);
		artifacts.config_toml = config_to_toml (cfg);
		return artifacts;
	}
}

run_artifacts run_scenario_with_artifacts (scenario_config const & cfg)
{
	cfg.validate ();
	if (cfg.projection_only)
	{
		return run_projection (cfg);
	}
	if (cfg.run_duration_s == 0)
	{
		metrics_log log;
		log.scenario = cfg.name;
		log.seed = cfg.seed;
		log.mode = cfg.mode == sim_mode::accounting ? "accounting" : "materialized";
		log.sample_cadence_ns = cfg.sample_cadence_s * ns_per_s;
		log.headline["payload_rate_bytes_per_s"] = payload_rate_bytes_per_s (cfg);
		run_artifacts artifacts;
		artifacts.log = std::move (log);
		artifacts.config_toml = config_to_toml (cfg);
		return artifacts;
	}
	if (cfg.batch)
	{
		if (cfg.mode != sim_mode::accounting)
		{
			throw config_error ("batched runs require accounting mode");
		}
		return run_batched (cfg);
	}
	if (cfg.sample_period_s != 1.0)
	{
		throw config_error ("event-level runs support a 1 second sample period; use batch mode otherwise");
	}
	engine e (cfg);
	return e.run ();
}

metrics_log run_scenario (scenario_config const & cfg)
{
	return run_scenario_with_artifacts (cfg).log;
}

void save_run (run_artifacts const & artifacts, std::filesystem::path const & dir, bool gnuplot)
{
	write_report (artifacts.log, dir, gnuplot);
	std::ofstream cfg_out (dir / "scenario.toml", std::ios::trunc);
	cfg_out << artifacts.config_toml;
	if (artifacts.archive.has_value () && !artifacts.archive->empty ())
	{
		artifacts.archive->save (dir / "archive");
	}
	for (std::size_t i = 0; i < artifacts.node_chains.size (); ++i)
	{
		auto const & chain = artifacts.node_chains[i];
		if (chain.empty ())
		{
			continue;
		}
		bool materialized = true;
		for (auto const & block : chain)
		{
			materialized = materialized && (block.height == 0 || !block.body.entries.empty ());
		}
		if (!materialized)
		{
			continue;
		}
		auto segment = make_segment (chain);
		auto encoded = encode_segment (segment);
		std::ofstream out (dir / ("local_node_" + std::to_string (i) + ".seg"), std::ios::binary | std::ios::trunc);
		out.write (reinterpret_cast<char const *> (encoded.data ()), static_cast<std::streamsize> (encoded.size ()));
		if (!out)
		{
			throw io_error ("failed writing local tail for node " + std::to_string (i));
		}
	}
}
}
