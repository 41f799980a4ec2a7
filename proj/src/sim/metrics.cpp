#include <chaintier/core_types.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/metrics.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace chaintier::sim
{
std::string to_string (event_kind kind)
{
	switch (kind)
	{
		case event_kind::sync_request:
			return "sync_request";
		case event_kind::sync_approved:
			return "sync_approved";
		case event_kind::sync_rejected:
			return "sync_rejected";
		case event_kind::sync_complete:
			return "sync_complete";
		case event_kind::sync_denied_duplicate:
			return "sync_denied_duplicate";
		case event_kind::sync_exception:
			return "sync_exception";
		case event_kind::view_change:
			return "view_change";
		case event_kind::new_view:
			return "new_view";
		case event_kind::admin_alert:
			return "admin_alert";
		case event_kind::malicious_mark:
			return "malicious_mark";
		case event_kind::prune_skipped:
			return "prune_skipped";
		case event_kind::invariant_violation:
			return "invariant_violation";
	}
	return "unknown";
}

namespace
{
	event_kind event_kind_from_string (std::string const & name)
	{
		for (int i = 0; i <= static_cast<int> (event_kind::invariant_violation); ++i)
		{
			auto kind = static_cast<event_kind> (i);
			if (to_string (kind) == name)
			{
				return kind;
			}
		}
		throw io_error ("unknown event kind '" + name + "' in log");
	}

	nlohmann::json counters_json (counter_set const & c)
	{
		nlohmann::json out;
		out["finalized_blocks"] = c.finalized_blocks;
		out["view_changes"] = c.view_changes;
		out["sync_requests"] = c.sync_requests;
		out["sync_sessions_approved"] = c.sync_sessions_approved;
		out["sync_sessions_rejected"] = c.sync_sessions_rejected;
		out["sync_completions"] = c.sync_completions;
		out["sync_denied_duplicates"] = c.sync_denied_duplicates;
		out["sync_exceptions"] = c.sync_exceptions;
		out["malicious_marks"] = c.malicious_marks;
		out["admin_alerts"] = c.admin_alerts;
		out["invalid_signatures"] = c.invalid_signatures;
		out["duplicate_votes"] = c.duplicate_votes;
		out["transactions_submitted"] = c.transactions_submitted;
		return out;
	}

	counter_set counters_from_json (nlohmann::json const & in)
	{
		counter_set c;
		c.finalized_blocks = in.value ("finalized_blocks", 0ull);
		c.view_changes = in.value ("view_changes", 0ull);
		c.sync_requests = in.value ("sync_requests", 0ull);
		c.sync_sessions_approved = in.value ("sync_sessions_approved", 0ull);
		c.sync_sessions_rejected = in.value ("sync_sessions_rejected", 0ull);
		c.sync_completions = in.value ("sync_completions", 0ull);
		c.sync_denied_duplicates = in.value ("sync_denied_duplicates", 0ull);
		c.sync_exceptions = in.value ("sync_exceptions", 0ull);
		c.malicious_marks = in.value ("malicious_marks", 0ull);
		c.admin_alerts = in.value ("admin_alerts", 0ull);
		c.invalid_signatures = in.value ("invalid_signatures", 0ull);
		c.duplicate_votes = in.value ("duplicate_votes", 0ull);
		c.transactions_submitted = in.value ("transactions_submitted", 0ull);
		return c;
	}
}

std::string metrics_log::to_json () const
{
	nlohmann::json out;
	out["scenario"] = scenario;
	out["seed"] = seed;
	out["mode"] = mode;
	out["duration_ns"] = duration_ns;
	out["sample_cadence_ns"] = sample_cadence_ns;
	out["invariants_ok"] = invariants_ok;
	out["counters"] = counters_json (counters);
	out["headline"] = headline;
	auto & sample_rows = out["samples"] = nlohmann::json::array ();
	for (auto const & s : samples)
	{
		sample_rows.push_back ({ s.t_ns, s.node, s.local_bytes, s.cloud_bytes });
	}
	auto & event_rows = out["events"] = nlohmann::json::array ();
	for (auto const & e : events)
	{
		event_rows.push_back ({ e.t_ns, to_string (e.kind), e.node, e.detail });
	}
	auto & day_rows = out["days"] = nlohmann::json::array ();
	for (auto const & d : days)
	{
		day_rows.push_back ({ d.day, d.peak_local_bytes, d.end_local_bytes, d.cummax_local_bytes, d.total_chain_bytes, d.cloud_bytes, d.local_ratio, d.syncs_completed });
	}
	return out.dump (1);
}

metrics_log metrics_log::from_json (std::string const & text)
{
	auto in = nlohmann::json::parse (text);
	metrics_log log;
	log.scenario = in.value ("scenario", "");
	log.seed = in.value ("seed", 0ull);
	log.mode = in.value ("mode", "");
	log.duration_ns = in.value ("duration_ns", 0ull);
	log.sample_cadence_ns = in.value ("sample_cadence_ns", 0ull);
	log.invariants_ok = in.value ("invariants_ok", true);
	log.counters = counters_from_json (in["counters"]);
	if (in.contains ("headline"))
	{
		for (auto const & [key, value] : in["headline"].items ())
		{
			log.headline[key] = value.get<double> ();
		}
	}
	for (auto const & row : in["samples"])
	{
		log.samples.push_back ({ row[0].get<std::uint64_t> (), row[1].get<std::uint32_t> (), row[2].get<std::uint64_t> (), row[3].get<std::uint64_t> () });
	}
	for (auto const & row : in["events"])
	{
		log.events.push_back ({ row[0].get<std::uint64_t> (), event_kind_from_string (row[1].get<std::string> ()), row[2].get<std::uint32_t> (), row[3].get<std::string> () });
	}
	for (auto const & row : in["days"])
	{
		day_stat d;
		d.day = row[0].get<std::uint32_t> ();
		d.peak_local_bytes = row[1].get<std::uint64_t> ();
		d.end_local_bytes = row[2].get<std::uint64_t> ();
		d.cummax_local_bytes = row[3].get<std::uint64_t> ();
		d.total_chain_bytes = row[4].get<std::uint64_t> ();
		d.cloud_bytes = row[5].get<std::uint64_t> ();
		d.local_ratio = row[6].get<double> ();
		d.syncs_completed = row[7].get<std::uint32_t> ();
		log.days.push_back (d);
	}
	return log;
}

std::string metrics_log::metrics_csv () const
{
	std::ostringstream out;
	out << "t_ns,node,local_bytes,cloud_bytes\n";
	for (auto const & s : samples)
	{
		out << s.t_ns << ',' << s.node << ',' << s.local_bytes << ',' << s.cloud_bytes << '\n';
	}
	return out.str ();
}

std::string metrics_log::events_csv () const
{
	std::ostringstream out;
	out << "t_ns,kind,node,detail\n";
	for (auto const & e : events)
	{
		auto detail = e.detail;
		for (auto & c : detail)
		{
			if (c == ',' || c == '\n')
			{
				c = ';';
			}
		}
		out << e.t_ns << ',' << to_string (e.kind) << ',' << e.node << ',' << detail << '\n';
	}
	return out.str ();
}

std::string metrics_log::summary_json () const
{
	nlohmann::json out;
	out["scenario"] = scenario;
	out["seed"] = seed;
	out["mode"] = mode;
	out["duration_s"] = duration_ns / 1'000'000'000.0;
	out["invariants_ok"] = invariants_ok;
	out["counters"] = counters_json (counters);
	out["headline"] = headline;
	auto & day_rows = out["days"] = nlohmann::json::array ();
	for (auto const & d : days)
	{
		nlohmann::json row;
		row["day"] = d.day;
		row["peak_local_bytes"] = d.peak_local_bytes;
		row["end_local_bytes"] = d.end_local_bytes;
		row["cummax_local_bytes"] = d.cummax_local_bytes;
		row["total_chain_bytes"] = d.total_chain_bytes;
		row["cloud_bytes"] = d.cloud_bytes;
		row["local_ratio"] = d.local_ratio;
		row["syncs_completed"] = d.syncs_completed;
		day_rows.push_back (row);
	}
	return out.dump (2);
}

std::string metrics_log::gnuplot_data () const
{
	std::ostringstream out;
	out << "# t_s node local_gb cloud_gb\n";
	for (auto const & s : samples)
	{
		out << (s.t_ns / 1'000'000'000.0) << ' ' << s.node << ' ' << (s.local_bytes / 1e9) << ' ' << (s.cloud_bytes / 1e9) << '\n';
	}
	return out.str ();
}

void write_report (metrics_log const & log, std::filesystem::path const & dir, bool gnuplot)
{
	std::error_code ec;
	std::filesystem::create_directories (dir, ec);
	if (ec)
	{
		throw io_error ("cannot create output directory " + dir.string ());
	}
	auto write = [&] (char const * name, std::string const & content) {
		std::ofstream out (dir / name, std::ios::trunc | std::ios::binary);
		out << content;
		if (!out)
		{
			throw io_error (std::string ("failed writing ") + name);
		}
	};
	write ("metrics.csv", log.metrics_csv ());
	write ("events.csv", log.events_csv ());
	write ("summary.json", log.summary_json ());
	write ("log.json", log.to_json ());
	if (gnuplot)
	{
		write ("metrics.dat", log.gnuplot_data ());
	}
}

double payload_rate_bytes_per_s (scenario_config const & cfg)
{
	return static_cast<double> (cfg.device_count ()) * cfg.avg_tx_bytes () / cfg.sample_period_s;
}

double compute_volume_projection (double rate_bytes_per_s, double duration_s)
{
	if (rate_bytes_per_s <= 0.0 || duration_s <= 0.0)
	{
		throw config_error ("projection needs positive rate and duration");
	}
	return rate_bytes_per_s * duration_s;
}

std::uint64_t per_epoch_payload_bytes (scenario_config const & cfg)
{
	std::uint64_t devices = cfg.device_count ();
	std::uint64_t pairs = devices / 2;
	std::uint64_t total = pairs * (static_cast<std::uint64_t> (cfg.tx_size_min) + cfg.tx_size_max);
	if (devices % 2 == 1)
	{
		total += (cfg.tx_size_min + cfg.tx_size_max) / 2;
	}
	return total;
}

std::uint64_t per_epoch_block_bytes (scenario_config const & cfg)
{
	return encoded_block_size (cfg.device_count (), per_epoch_payload_bytes (cfg));
}
}
