#pragma once

#include <chaintier/cloud_store.hpp>
#include <chaintier/cloud_sync.hpp>
#include <chaintier/sim/metrics.hpp>
#include <chaintier/sim/scenario.hpp>

#include <filesystem>
#include <optional>

namespace chaintier::sim
{
// Final state of a run, kept for verification and replay tests.
struct run_artifacts
{
	metrics_log log;
	std::optional<cloudstore::archive> archive;
	std::vector<std::vector<data_block>> node_chains; // materialized local tails
	cloudsync::fault_ledger cloud_faults;
	std::optional<cloudsync::sync_session> last_session; // last completed sync, replayable
	std::string config_toml;
};

// Drives the deterministic run to completion. Identical configs (including
// seed) produce byte-identical logs. Throws invariant_violation with a
// diagnostic when any run invariant breaks, config_error on a bad config.
metrics_log run_scenario (scenario_config const & cfg);
run_artifacts run_scenario_with_artifacts (scenario_config const & cfg);

// Writes report files and, for materialized runs, the cloud archive layout
// (directory per replica) plus each node's retained local tail.
void save_run (run_artifacts const & artifacts, std::filesystem::path const & dir, bool gnuplot = false);
}
