#pragma once

#include <cstdint>

namespace chaintier::sim
{
// splitmix64 stream; self-contained so identical seeds give identical
// sequences on every platform and toolchain.
class rng
{
public:
	explicit rng (std::uint64_t seed) :
		state_ (seed ^ 0x9e3779b97f4a7c15ull)
	{
	}

	std::uint64_t next ()
	{
		state_ += 0x9e3779b97f4a7c15ull;
		auto z = state_;
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	// Uniform in [lo, hi], inclusive. Modulo bias is irrelevant for the
	// small ranges drawn here.
	std::uint64_t uniform (std::uint64_t lo, std::uint64_t hi)
	{
		if (hi <= lo)
		{
			return lo;
		}
		return lo + next () % (hi - lo + 1);
	}

private:
	std::uint64_t state_;
};
}
