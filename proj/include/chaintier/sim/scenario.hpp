#pragma once

#include <chaintier/toml_lite.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace chaintier::sim
{
enum class sim_mode : std::uint8_t
{
	accounting = 0,
	materialized = 1,
};

enum class fault_behavior : std::uint8_t
{
	silent = 0,
	equivocate = 1,
	bad_sync = 2,
	tamper_cloud_replica = 3,
};

std::string to_string (fault_behavior behavior);
fault_behavior fault_behavior_from_string (std::string const & name); // throws unknown_behavior_error

struct fault_script
{
	std::uint32_t node{ 0 };
	fault_behavior behavior{ fault_behavior::silent };
	std::uint64_t window_start_ns{ 0 };
	std::uint64_t window_end_ns{ UINT64_MAX };
	bool active (std::uint64_t now_ns) const
	{
		return now_ns >= window_start_ns && now_ns < window_end_ns;
	}
};

struct scenario_config
{
	std::string name{ "custom" };

	// Workload: num_wsans x nodes_per_wsan devices, one transaction per
	// sample period each, encoded sizes uniform in [tx_size_min,
	// tx_size_max] drawn in antithetic pairs (exact aggregate rate).
	std::uint32_t num_wsans{ 1 };
	std::uint32_t nodes_per_wsan{ 10 };
	double sample_period_s{ 1.0 };
	std::uint32_t tx_size_min{ 140 };
	std::uint32_t tx_size_max{ 160 };

	// Overlay / consensus
	std::uint32_t overlay_size{ 4 };
	std::uint64_t epoch_timeout_ms{ 250 };
	std::uint32_t max_txs_per_block{ 5000 };

	// Network
	std::uint32_t latency_overlay_min_ms{ 1 };
	std::uint32_t latency_overlay_max_ms{ 10 };
	std::uint32_t latency_cloud_min_ms{ 20 };
	std::uint32_t latency_cloud_max_ms{ 50 };
	std::uint64_t cloud_bandwidth_bps{ 200'000'000 }; // bits per second

	// Sync policy
	std::uint64_t disk_capacity_bytes{ 128'000'000'000 };
	std::uint64_t sync_threshold_bytes{ 100'000'000'000 };
	std::uint64_t sync_schedule_s{ 86'400 }; // 0 disables the schedule
	std::uint64_t sync_min_interval_s{ 600 };
	double sync_overhead_factor{ 1.3 };

	// Cloud archive
	std::uint32_t cloud_replicas{ 3 };
	std::uint32_t replication_factor{ 3 };

	// Run control
	std::uint64_t run_duration_s{ 60 };
	std::uint64_t seed{ 0 };
	sim_mode mode{ sim_mode::accounting };
	bool batch{ false }; // closed-form per-epoch accounting, no per-message events
	std::uint64_t sample_cadence_s{ 1 };
	std::vector<fault_script> faults;

	// Projection presets only compute storage arithmetic.
	bool projection_only{ false };
	double bitcoin_txs_per_block{ 2000.0 };
	double bitcoin_block_interval_s{ 600.0 };
	double bitcoin_tx_bytes{ 500.0 };

	std::uint32_t device_count () const
	{
		return num_wsans * nodes_per_wsan;
	}
	double avg_tx_bytes () const
	{
		return (static_cast<double> (tx_size_min) + static_cast<double> (tx_size_max)) / 2.0;
	}
	std::uint64_t cloud_bandwidth_bytes_per_s () const
	{
		return cloud_bandwidth_bps / 8;
	}

	void validate () const; // throws config_error
};

scenario_config config_from_toml (toml_table const & table);
scenario_config load_config (std::string const & path_or_preset);
std::string config_to_toml (scenario_config const & cfg);

std::vector<std::string> preset_names ();
scenario_config preset (std::string const & name); // throws config_error

// Scripts an adversarial behavior on a node (overlay node index, or cloud
// replica index for tamper_cloud_replica).
scenario_config inject_fault (scenario_config cfg, std::uint32_t node, fault_behavior behavior, std::uint64_t window_start_ns, std::uint64_t window_end_ns);
}
