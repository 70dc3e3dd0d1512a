/*
Seeded random streams: xoshiro256++ with splitmix64 initialization.

Every stochastic operation in the library takes an explicit stream; streams
derived with sub() are statistically independent, so Monte Carlo batches can
run in parallel and still merge to results that do not depend on the worker
count.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace blockfade {

constexpr std::uint64_t splitmix64(std::uint64_t &state) {
	std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
	return z ^ (z >> 31);
}

class RngStream {
public:
	RngStream(std::uint64_t seed, std::uint64_t stream = 0)
		: seed_(seed), stream_(stream) {
		std::uint64_t sm = seed ^ (0xd2b74407b1ce6e93ull * (stream + 1));
		for (auto &word : state_)
			word = splitmix64(sm);
	}

	// Derived stream: independent of this one and of sub(j) for j != i.
	RngStream sub(std::uint64_t i) const {
		std::uint64_t sm = stream_ ^ (i + 0x165667b19e3779f9ull);
		return RngStream(seed_, splitmix64(sm));
	}

	std::uint64_t seed() const { return seed_; }
	std::uint64_t stream() const { return stream_; }

	std::uint64_t next_u64() {
		const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
		const std::uint64_t t = state_[1] << 17;
		state_[2] ^= state_[0];
		state_[3] ^= state_[1];
		state_[1] ^= state_[2];
		state_[0] ^= state_[3];
		state_[2] ^= t;
		state_[3] = rotl(state_[3], 45);
		return result;
	}

	// Uniform on (0, 1]: never returns 0, may return 1 (Rayleigh inversion
	// needs log(u) finite).
	double uniform_pos() {
		return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
	}

	// Uniform on [0, 1).
	double uniform() {
		return static_cast<double>(next_u64() >> 11) * 0x1p-53;
	}

	// Unbiased integer in [0, n).
	std::uint64_t below(std::uint64_t n) {
		std::uint64_t x, r;
		do {
			x = next_u64();
			r = x % n;
		} while (x - r > std::uint64_t(0) - n);
		return r;
	}

	bool coin() { return (next_u64() >> 63) != 0; }

	// Standard normal via Box-Muller; second value of each pair is cached.
	double gaussian() {
		if (have_spare_) {
			have_spare_ = false;
			return spare_;
		}
		double u1 = uniform_pos();
		double u2 = uniform();
		double r = std::sqrt(-2.0 * std::log(u1));
		double a = 2.0 * std::numbers::pi * u2;
		spare_ = r * std::sin(a);
		have_spare_ = true;
		return r * std::cos(a);
	}

	// Rayleigh magnitude with scale sigma_h: h = sigma_h sqrt(-2 ln U).
	double rayleigh(double sigma_h) {
		return sigma_h * std::sqrt(-2.0 * std::log(uniform_pos()));
	}

private:
	static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
		return (x << k) | (x >> (64 - k));
	}

	std::uint64_t state_[4];
	std::uint64_t seed_;
	std::uint64_t stream_;
	double spare_ = 0.0;
	bool have_spare_ = false;
};

} // namespace blockfade
