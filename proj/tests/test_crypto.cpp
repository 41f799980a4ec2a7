#include <doctest.h>

#include "oracles.hpp"

#include <chaintier/crypto.hpp>
#include <chaintier/errors.hpp>
#include <chaintier/sim/rng.hpp>

#include <algorithm>
#include <cstring>
#include <set>

using namespace chaintier;

TEST_CASE ("sha256 matches the standard test vectors")
{
	CHECK (to_hex (crypto::sha256 ({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
	bytes abc{ 'a', 'b', 'c' };
	CHECK (to_hex (crypto::sha256 (abc)) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
	std::string two_block = "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq";
	bytes msg (two_block.begin (), two_block.end ());
	CHECK (to_hex (crypto::sha256 (msg)) == "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
	// 56-byte input exercises the two-block padding path.
	bytes fifty_six (56, 'a');
	CHECK (to_hex (crypto::sha256 (fifty_six)) == to_hex (crypto::sha256 (bytes (56, 'a'))));
}

TEST_CASE ("hashing is deterministic and scheme ids are checked")
{
	sim::rng rng (7);
	for (int i = 0; i < 200; ++i)
	{
		bytes msg (rng.uniform (0, 300));
		for (auto & b : msg)
		{
			b = static_cast<std::uint8_t> (rng.next ());
		}
		CHECK (crypto::hash (crypto::hash_id::sha256, msg) == crypto::hash (crypto::hash_id::sha256, msg));
		CHECK (crypto::hash (crypto::hash_id::fast, msg) == crypto::hash (crypto::hash_id::fast, msg));
		// Accounting and integrity digests have identical widths.
		CHECK (crypto::hash (crypto::hash_id::fast, msg).size () == crypto::hash (crypto::hash_id::sha256, msg).size ());
	}
	CHECK_THROWS_AS (crypto::hash (static_cast<crypto::hash_id> (9), {}), unknown_scheme_error);
}

TEST_CASE ("fast hash stays collision free over a million random messages")
{
	sim::rng rng (42);
	std::vector<crypto::digest> seen;
	seen.reserve (1000000);
	bytes msg (16);
	for (int i = 0; i < 1000000; ++i)
	{
		auto word = rng.next ();
		std::memcpy (msg.data (), &word, 8);
		word = rng.next ();
		std::memcpy (msg.data () + 8, &word, 8);
		seen.push_back (crypto::fast_hash (msg));
	}
	std::sort (seen.begin (), seen.end ());
	CHECK (std::adjacent_find (seen.begin (), seen.end ()) == seen.end ());
}

TEST_CASE ("merkle root base case and small trees")
{
	auto h = [] (bytes const & b) { return crypto::hash (crypto::hash_id::sha256, b); };
	std::vector<crypto::digest> leaves{ h ({ 1 }), h ({ 2 }), h ({ 3 }), h ({ 4 }) };

	// Single leaf: root = hash(leaf).
	CHECK (crypto::merkle_root (crypto::hash_id::sha256, std::span (leaves.data (), 1)) == h (bytes (leaves[0].begin (), leaves[0].end ())));

	// Four leaves: hash(hash(L1||L2) || hash(L3||L4)), expanded literally.
	auto cat = [] (crypto::digest const & a, crypto::digest const & b) {
		bytes out (a.begin (), a.end ());
		out.insert (out.end (), b.begin (), b.end ());
		return out;
	};
	auto expected4 = h (cat (h (cat (leaves[0], leaves[1])), h (cat (leaves[2], leaves[3]))));
	CHECK (crypto::merkle_root (crypto::hash_id::sha256, std::span (leaves.data (), 4)) == expected4);

	// Three leaves equal four leaves with the third duplicated.
	std::vector<crypto::digest> three{ leaves[0], leaves[1], leaves[2] };
	std::vector<crypto::digest> dup{ leaves[0], leaves[1], leaves[2], leaves[2] };
	CHECK (crypto::merkle_root (crypto::hash_id::sha256, three) == crypto::merkle_root (crypto::hash_id::sha256, dup));

	CHECK_THROWS_AS (crypto::merkle_root (crypto::hash_id::sha256, {}), empty_leaves_error);
}

TEST_CASE ("merkle root agrees with the brute-force expansion")
{
	sim::rng rng (11);
	for (int trial = 0; trial < 50; ++trial)
	{
		std::vector<crypto::digest> leaves (rng.uniform (1, 64));
		for (auto & leaf : leaves)
		{
			for (auto & b : leaf)
			{
				b = static_cast<std::uint8_t> (rng.next ());
			}
		}
		CHECK (crypto::merkle_root (crypto::hash_id::sha256, leaves) == oracles::merkle_brute_force (crypto::hash_id::sha256, leaves));
	}
}

TEST_CASE ("merkle root changes under any single-leaf mutation")
{
	sim::rng rng (13);
	for (int trial = 0; trial < 1000; ++trial)
	{
		std::vector<crypto::digest> leaves (rng.uniform (1, 50));
		for (auto & leaf : leaves)
		{
			for (auto & b : leaf)
			{
				b = static_cast<std::uint8_t> (rng.next ());
			}
		}
		auto root = crypto::merkle_root (crypto::hash_id::fast, leaves);
		auto victim = rng.uniform (0, leaves.size () - 1);
		leaves[victim][rng.uniform (0, 31)] ^= static_cast<std::uint8_t> (rng.uniform (1, 255));
		CHECK (crypto::merkle_root (crypto::hash_id::fast, leaves) != root);
	}
}

TEST_CASE ("signatures verify, reject tampering and stay 33 bytes")
{
	auto key = crypto::derive_key_pair (99);
	CHECK (key.pub.size () == 20);
	CHECK (crypto::derive_key_pair (99).pub == key.pub);
	CHECK (crypto::derive_key_pair (100).pub != key.pub);

	sim::rng rng (5);
	for (int i = 0; i < 100; ++i)
	{
		bytes msg (rng.uniform (0, 200));
		for (auto & b : msg)
		{
			b = static_cast<std::uint8_t> (rng.next ());
		}
		auto sig = crypto::sign (crypto::sig_id::mac33, key, msg);
		CHECK (sig.size () == 33);
		CHECK (crypto::verify (crypto::sig_id::mac33, key.pub, msg, sig));
		auto other = msg;
		other.push_back (0x00);
		CHECK_FALSE (crypto::verify (crypto::sig_id::mac33, key.pub, other, sig));
		auto bad_sig = sig;
		bad_sig[0] ^= 0xff;
		CHECK_FALSE (crypto::verify (crypto::sig_id::mac33, key.pub, msg, bad_sig));
	}
	CHECK_THROWS_AS (crypto::sign (static_cast<crypto::sig_id> (7), key, {}), unknown_scheme_error);
}
