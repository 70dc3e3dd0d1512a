/*
Block Rayleigh fading channel: y = h x + w with one gain per block of
coherent_time symbols, BPSK input, and three receiver knowledge regimes
(distribution only, receiver-side gain knowledge, or full knowledge).

SNR convention: symbol energy is 1 and E[h^2] = 2 sigma_h^2, so
SNR = 2 sigma_h^2 / sigma^2. With the default sigma_h^2 = 1/2 this reduces
to SNR(dB) = -20 log10(sigma).
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "llr.hh"
#include "rng.hh"

namespace blockfade {

enum class CsiMode { cdi, csir, full };

inline std::string csi_mode_name(CsiMode m) {
	switch (m) {
	case CsiMode::cdi:
		return "cdi";
	case CsiMode::csir:
		return "csir";
	default:
		return "full";
	}
}

inline CsiMode parse_csi_mode(const std::string &s) {
	if (s == "cdi")
		return CsiMode::cdi;
	if (s == "csir")
		return CsiMode::csir;
	if (s == "full")
		return CsiMode::full;
	throw std::invalid_argument("unknown csi mode: " + s);
}

struct FadingSpec {
	int coherent_time = 1;
	double rayleigh_sigma_h = std::sqrt(0.5);
	double noise_sigma = 1.0;
	CsiMode csi_mode = CsiMode::cdi;

	double sigma_h2() const { return rayleigh_sigma_h * rayleigh_sigma_h; }
	double noise_var() const { return noise_sigma * noise_sigma; }
	double snr() const { return 2.0 * sigma_h2() / noise_var(); }
	double snr_db() const { return 10.0 * std::log10(snr()); }

	void validate() const {
		if (coherent_time < 1)
			throw std::invalid_argument("coherent_time must be >= 1");
		if (rayleigh_sigma_h <= 0.0 || noise_sigma <= 0.0)
			throw std::invalid_argument("sigma_h and noise sigma must be positive");
	}
};

// Spec at the default gain normalization for a given SNR in dB.
inline FadingSpec spec_for_snr_db(double snr_db, int coherent_time = 1,
                                  CsiMode mode = CsiMode::cdi) {
	FadingSpec s;
	s.coherent_time = coherent_time;
	s.csi_mode = mode;
	s.noise_sigma = std::pow(10.0, -snr_db / 20.0);
	return s;
}

// One Rayleigh-distributed gain: h = sigma_h sqrt(-2 ln U), U uniform (0,1].
inline double sample_gain(const FadingSpec &spec, RngStream &rng) {
	return rng.rayleigh(spec.rayleigh_sigma_h);
}

// coherent_time x block_count matrices stored row-major; column i is one
// fading block sharing gains[i].
struct Frame {
	int coherent_time = 0;
	std::size_t block_count = 0;
	std::vector<std::uint8_t> tx_bits;
	std::vector<double> tx_symbols;
	std::vector<double> rx;
	std::vector<double> gains; // empty in distribution-only mode

	double &at(std::vector<double> &m, int row, std::size_t col) {
		return m[std::size_t(row) * block_count + col];
	}
	double rx_at(int row, std::size_t col) const {
		return rx[std::size_t(row) * block_count + col];
	}
	double symbol_at(int row, std::size_t col) const {
		return tx_symbols[std::size_t(row) * block_count + col];
	}
};

inline double bpsk(std::uint8_t bit) { return bit ? -1.0 : 1.0; }

// Transmit a coherent_time x N bit matrix: per-column gains, i.i.d. noise.
inline Frame transmit_frame(const std::vector<std::uint8_t> &bits,
                            std::size_t block_count, const FadingSpec &spec,
                            RngStream &rng) {
	spec.validate();
	std::size_t tc = std::size_t(spec.coherent_time);
	if (bits.size() != tc * block_count)
		throw std::invalid_argument("bit matrix does not match coherent_time x N");
	Frame f;
	f.coherent_time = spec.coherent_time;
	f.block_count = block_count;
	f.tx_bits = bits;
	f.tx_symbols.resize(bits.size());
	f.rx.resize(bits.size());
	std::vector<double> h(block_count);
	for (std::size_t i = 0; i < block_count; ++i)
		h[i] = sample_gain(spec, rng);
	for (std::size_t j = 0; j < tc; ++j)
		for (std::size_t i = 0; i < block_count; ++i) {
			std::size_t idx = j * block_count + i;
			f.tx_symbols[idx] = bpsk(bits[idx]);
			f.rx[idx] = h[i] * f.tx_symbols[idx] + spec.noise_sigma * rng.gaussian();
		}
	if (spec.csi_mode != CsiMode::cdi)
		f.gains = std::move(h);
	return f;
}

// Coherent BPSK LLR at known gain: log p(y|x=+1)/p(y|x=-1) = 2hy/sigma^2.
inline double csir_llr(double y, double h, const FadingSpec &spec) {
	return clamp_llr(2.0 * h * y / spec.noise_var());
}

} // namespace blockfade
