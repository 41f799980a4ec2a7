#include <chaintier/cloud_sync.hpp>
#include <chaintier/connector.hpp>
#include <chaintier/consensus.hpp>
#include <chaintier/core_types.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/metrics.hpp>
#include <chaintier/sim/simulation.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace chaintier;

namespace
{
bytes to_bytes (py::bytes const & data)
{
	std::string buffer = data;
	return bytes (buffer.begin (), buffer.end ());
}

py::bytes from_bytes (byte_view data)
{
	return py::bytes (reinterpret_cast<char const *> (data.data ()), data.size ());
}

crypto::hash_id scheme_from_id (int id)
{
	if (id != 0 && id != 1)
	{
		throw unknown_scheme_error ("hash scheme id must be 0 (sha256) or 1 (fast)");
	}
	return static_cast<crypto::hash_id> (id);
}

py::dict tx_to_dict (transaction const & tx)
{
	py::dict out;
	out["from_id"] = from_bytes (byte_view (tx.from.data (), tx.from.size ()));
	out["to_id"] = from_bytes (byte_view (tx.to.data (), tx.to.size ()));
	out["type"] = tx.type;
	out["device_info"] = from_bytes (tx.device_info);
	out["one_time_pk"] = from_bytes (byte_view (tx.one_time_pk.data (), tx.one_time_pk.size ()));
	out["timestamp"] = tx.timestamp;
	out["tx_id"] = tx.tx_id;
	out["data"] = from_bytes (tx.data);
	out["hash_type"] = tx.hash_type;
	out["tx_hash"] = from_bytes (byte_view (tx.tx_hash.data (), tx.tx_hash.size ()));
	out["sig_type"] = tx.sig_type;
	out["signature"] = from_bytes (byte_view (tx.sig.data (), tx.sig.size ()));
	return out;
}
}

PYBIND11_MODULE (_core, m)
{
	m.doc () = "Hierarchical blockchain storage simulator core";

	m.def ("sha256", [] (py::bytes const & msg) { return from_bytes (crypto::sha256 (to_bytes (msg))); }, py::arg ("msg"));
	m.def ("hash_digest", [] (int scheme, py::bytes const & msg) { return from_bytes (crypto::hash (scheme_from_id (scheme), to_bytes (msg))); }, py::arg ("scheme"), py::arg ("msg"));

	m.def (
	"merkle_root", [] (std::vector<py::bytes> const & leaves, int scheme) {
		std::vector<crypto::digest> digests;
		digests.reserve (leaves.size ());
		for (auto const & leaf : leaves)
		{
			digests.push_back (to_fixed<32> (to_bytes (leaf)));
		}
		return from_bytes (crypto::merkle_root (scheme_from_id (scheme), digests));
	},
	py::arg ("leaves"), py::arg ("scheme") = 0);

	m.def (
	"derive_keypair", [] (std::uint64_t seed) {
		auto key = crypto::derive_key_pair (seed);
		return py::make_tuple (from_bytes (byte_view (key.secret.data (), key.secret.size ())), from_bytes (byte_view (key.pub.data (), key.pub.size ())));
	},
	py::arg ("seed"));
	m.def ("sign", [] (std::uint64_t seed, py::bytes const & msg) { return from_bytes (crypto::sign (crypto::sig_id::mac33, crypto::derive_key_pair (seed), to_bytes (msg))); }, py::arg ("seed"), py::arg ("msg"));
	m.def ("verify", [] (py::bytes const & pub, py::bytes const & msg, py::bytes const & sig) { return crypto::verify (crypto::sig_id::mac33, to_fixed<20> (to_bytes (pub)), to_bytes (msg), to_fixed<33> (to_bytes (sig))); }, py::arg ("pub"), py::arg ("msg"), py::arg ("sig"));

	m.def (
	"make_transaction", [] (std::uint32_t device, std::uint32_t gateway, std::uint32_t tx_id, std::uint64_t timestamp, py::bytes const & device_info, py::bytes const & data, std::uint64_t key_seed) {
		transaction tx;
		tx.from = connector::device_identity (device);
		tx.to = connector::node_identity (gateway);
		tx.type = static_cast<std::uint8_t> (tx_type::reading);
		tx.device_info = to_bytes (device_info);
		auto key = crypto::derive_key_pair (key_seed);
		tx.one_time_pk = key.pub;
		tx.timestamp = timestamp;
		tx.tx_id = tx_id;
		tx.data = to_bytes (data);
		tx.hash_type = 0;
		tx.tx_hash = compute_tx_hash (tx);
		tx.sig_type = 0;
		tx.sig = crypto::sign (crypto::sig_id::mac33, key, tx.tx_hash);
		return from_bytes (encode_transaction (tx));
	},
	py::arg ("device"), py::arg ("gateway"), py::arg ("tx_id"), py::arg ("timestamp"), py::arg ("device_info") = py::bytes (), py::arg ("data") = py::bytes (), py::arg ("key_seed") = 0);

	m.def ("decode_transaction", [] (py::bytes const & encoded) { return tx_to_dict (decode_transaction (to_bytes (encoded))); }, py::arg ("encoded"));
	m.def ("transaction_size", [] (std::size_t device_info_len, std::size_t data_len) { return encoded_transaction_size (device_info_len, data_len); }, py::arg ("device_info_len") = 0, py::arg ("data_len") = 0);
	m.def ("block_size", [] (std::size_t num_txs, std::size_t payload_bytes) { return encoded_block_size (num_txs, payload_bytes); }, py::arg ("num_txs"), py::arg ("payload_bytes"));

	m.def (
	"verify_segment", [] (py::bytes const & encoded) {
		auto segment = decode_segment (to_bytes (encoded));
		auto report = verify_chain (segment);
		py::dict out;
		out["passed"] = report.passed;
		out["blocks"] = report.blocks.size ();
		out["detail"] = report.describe ();
		return out;
	},
	py::arg ("encoded"));

	m.def ("quorum_size", [] (std::uint32_t n) { return consensus::config{ n, 0 }.quorum (); }, py::arg ("n"));
	m.def ("elect_leader", [] (std::uint32_t n, std::uint64_t epoch, std::uint32_t view) { return consensus::elect_leader (consensus::config{ n, 0 }, epoch, view); }, py::arg ("n"), py::arg ("epoch"), py::arg ("view") = 0);
	m.def ("transfer_duration_s", [] (std::uint64_t bytes_count, std::uint64_t bandwidth_bps, double overhead) { return cloudsync::transfer_duration_ns (bytes_count, bandwidth_bps / 8, overhead) / 1e9; }, py::arg ("bytes_count"), py::arg ("bandwidth_bps"), py::arg ("overhead") = 1.3);
	m.def ("volume_projection", [] (double rate_bytes_per_s, double duration_s) { return sim::compute_volume_projection (rate_bytes_per_s, duration_s); }, py::arg ("rate_bytes_per_s"), py::arg ("duration_s"));

	m.def ("preset_names", [] { return sim::preset_names (); });
	m.def (
	"run_preset", [] (std::string const & name, std::uint64_t seed, std::string const & mode) {
		auto cfg = sim::preset (name);
		cfg.seed = seed;
		if (mode == "materialized")
		{
			cfg.mode = sim::sim_mode::materialized;
			cfg.batch = false;
		}
		else if (mode == "accounting")
		{
			cfg.mode = sim::sim_mode::accounting;
		}
		else if (!mode.empty ())
		{
			throw config_error ("mode must be 'accounting' or 'materialized'");
		}
		auto log = sim::run_scenario (cfg);
		py::dict out;
		out["scenario"] = log.scenario;
		out["seed"] = log.seed;
		out["mode"] = log.mode;
		out["invariants_ok"] = log.invariants_ok;
		py::dict headline;
		for (auto const & [key, value] : log.headline)
		{
			headline[py::str (key)] = value;
		}
		out["headline"] = headline;
		py::dict counters;
		counters["finalized_blocks"] = log.counters.finalized_blocks;
		counters["view_changes"] = log.counters.view_changes;
		counters["sync_completions"] = log.counters.sync_completions;
		counters["sync_exceptions"] = log.counters.sync_exceptions;
		counters["malicious_marks"] = log.counters.malicious_marks;
		out["counters"] = counters;
		py::list days;
		for (auto const & day : log.days)
		{
			py::dict row;
			row["day"] = day.day;
			row["peak_local_bytes"] = day.peak_local_bytes;
			row["end_local_bytes"] = day.end_local_bytes;
			row["total_chain_bytes"] = day.total_chain_bytes;
			row["local_ratio"] = day.local_ratio;
			days.append (row);
		}
		out["days"] = days;
		return out;
	},
	py::arg ("name"), py::arg ("seed") = 0, py::arg ("mode") = "");

	py::register_exception<chaintier::error> (m, "ChaintierError");
}
