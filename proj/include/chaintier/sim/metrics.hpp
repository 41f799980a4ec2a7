#pragma once

#include <chaintier/sim/scenario.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chaintier::sim
{
struct metric_sample
{
	std::uint64_t t_ns{ 0 };
	std::uint32_t node{ 0 };
	std::uint64_t local_bytes{ 0 };
	std::uint64_t cloud_bytes{ 0 };
};

enum class event_kind : std::uint8_t
{
	sync_request,
	sync_approved,
	sync_rejected,
	sync_complete,
	sync_denied_duplicate,
	sync_exception,
	view_change,
	new_view,
	admin_alert,
	malicious_mark,
	prune_skipped,
	invariant_violation,
};

std::string to_string (event_kind kind);

struct event_record
{
	std::uint64_t t_ns{ 0 };
	event_kind kind{ event_kind::sync_request };
	std::uint32_t node{ 0 };
	std::string detail;
};

struct day_stat
{
	std::uint32_t day{ 0 }; // 1-based
	std::uint64_t peak_local_bytes{ 0 };
	std::uint64_t end_local_bytes{ 0 };
	std::uint64_t cummax_local_bytes{ 0 };
	std::uint64_t total_chain_bytes{ 0 };
	std::uint64_t cloud_bytes{ 0 };
	double local_ratio{ 0.0 }; // cummax_local / total
	std::uint32_t syncs_completed{ 0 };
};

struct counter_set
{
	std::uint64_t finalized_blocks{ 0 };
	std::uint64_t view_changes{ 0 };
	std::uint64_t sync_requests{ 0 };
	std::uint64_t sync_sessions_approved{ 0 };
	std::uint64_t sync_sessions_rejected{ 0 };
	std::uint64_t sync_completions{ 0 };
	std::uint64_t sync_denied_duplicates{ 0 };
	std::uint64_t sync_exceptions{ 0 };
	std::uint64_t malicious_marks{ 0 };
	std::uint64_t admin_alerts{ 0 };
	std::uint64_t invalid_signatures{ 0 };
	std::uint64_t duplicate_votes{ 0 };
	std::uint64_t transactions_submitted{ 0 };
};

struct metrics_log
{
	std::string scenario;
	std::uint64_t seed{ 0 };
	std::string mode;
	std::uint64_t duration_ns{ 0 };
	std::uint64_t sample_cadence_ns{ 0 };
	std::vector<metric_sample> samples;
	std::vector<event_record> events;
	std::vector<day_stat> days;
	counter_set counters;
	std::map<std::string, double> headline;
	bool invariants_ok{ true };

	std::string to_json () const; // canonical serialization, byte-comparable
	static metrics_log from_json (std::string const & text);

	std::string metrics_csv () const;
	std::string events_csv () const;
	std::string summary_json () const;
	std::string gnuplot_data () const;
};

// Writes metrics.csv, events.csv, summary.json and log.json (plus
// metrics.dat when gnuplot is set) into dir.
void write_report (metrics_log const & log, std::filesystem::path const & dir, bool gnuplot = false);

// Storage arithmetic shared by presets, acceptance checks and reports.
double payload_rate_bytes_per_s (scenario_config const & cfg);
double compute_volume_projection (double rate_bytes_per_s, double duration_s);
std::uint64_t per_epoch_payload_bytes (scenario_config const & cfg); // exact antithetic aggregate
std::uint64_t per_epoch_block_bytes (scenario_config const & cfg);
}
