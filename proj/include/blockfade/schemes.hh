/*
End-to-end coding schemes over the block fading channel.

- Multilevel (no receiver CSI): T_c codes of length N, one per symbol
  position in the coherence block; multistage decoding computes noncoherent
  stage LLRs conditioned on re-encoded hard decisions of earlier levels.
- Parallel (receiver CSI): T_c independent codes of length N, one per row,
  decoded with coherent per-symbol LLRs; rows may be processed in any order.
- Interleaved (receiver CSI): one code of length T_c*N spread across the
  frame by a seeded permutation, decoded as a single merged i.i.d. channel.

Bit matrices are flat row-major (coherent_time x block_count), matching
Frame. Frozen bits are all zero.
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "blocklik.hh"
#include "fading.hh"
#include "polar.hh"
#include "quadrature.hh"
#include "rng.hh"

namespace blockfade {

// ---- interleaver ----------------------------------------------------------

struct InterleaverSpec {
	std::size_t length = 0;
	std::uint64_t seed = 0;
	std::vector<std::uint32_t> permutation; // stream position of input t
};

inline InterleaverSpec make_interleaver(std::size_t length, std::uint64_t seed) {
	InterleaverSpec il;
	il.length = length;
	il.seed = seed;
	il.permutation.resize(length);
	for (std::size_t i = 0; i < length; ++i)
		il.permutation[i] = std::uint32_t(i);
	RngStream rng(seed);
	for (std::size_t i = length; i > 1; --i) {
		std::size_t j = std::size_t(rng.below(i));
		std::swap(il.permutation[i - 1], il.permutation[j]);
	}
	return il;
}

inline InterleaverSpec identity_interleaver(std::size_t length) {
	InterleaverSpec il;
	il.length = length;
	il.permutation.resize(length);
	for (std::size_t i = 0; i < length; ++i)
		il.permutation[i] = std::uint32_t(i);
	return il;
}

// out[perm[t]] = in[t]
template <class T>
std::vector<T> interleave(const std::vector<T> &in, const InterleaverSpec &il) {
	if (in.size() != il.permutation.size())
		throw std::invalid_argument("interleaver length mismatch");
	std::vector<T> out(in.size());
	for (std::size_t t = 0; t < in.size(); ++t)
		out[il.permutation[t]] = in[t];
	return out;
}

// out[t] = in[perm[t]]
template <class T>
std::vector<T> deinterleave(const std::vector<T> &in, const InterleaverSpec &il) {
	if (in.size() != il.permutation.size())
		throw std::invalid_argument("interleaver length mismatch");
	std::vector<T> out(in.size());
	for (std::size_t t = 0; t < in.size(); ++t)
		out[t] = in[il.permutation[t]];
	return out;
}

// ---- u-vector assembly ----------------------------------------------------

inline std::vector<std::uint8_t> assemble_u(const CodeProfile &profile,
                                            const std::vector<std::uint8_t> &info_bits) {
	if (info_bits.size() != profile.info_count())
		throw std::invalid_argument("info bit count does not match profile");
	std::vector<std::uint8_t> u(profile.length, 0);
	std::size_t next = 0;
	for (std::size_t i = 0; i < profile.length; ++i) {
		switch (profile.cls[i]) {
		case BitClass::info:
			u[i] = info_bits[next++];
			break;
		case BitClass::frozen:
			u[i] = profile.frozen_value[i];
			break;
		case BitClass::det:
			u[i] = 0; // uniform-prior tie-break
			break;
		}
	}
	return u;
}

inline std::vector<std::uint8_t> extract_info(const CodeProfile &profile,
                                              const std::vector<std::uint8_t> &u) {
	std::vector<std::uint8_t> bits;
	bits.reserve(profile.info_count());
	for (std::size_t i = 0; i < profile.length; ++i)
		if (profile.cls[i] == BitClass::info)
			bits.push_back(u[i]);
	return bits;
}

inline std::vector<std::uint8_t> random_info(const CodeProfile &profile, RngStream &rng) {
	std::vector<std::uint8_t> bits(profile.info_count());
	for (auto &b : bits)
		b = std::uint8_t(rng.coin());
	return bits;
}

// ---- results --------------------------------------------------------------

struct FrameResult {
	std::vector<std::vector<std::uint8_t>> decoded_bits; // one vector per level
	std::vector<std::uint8_t> level_errors;
	bool frame_error = false;
};

// Compare decoded info bits against what was sent; fills the error flags.
inline void score_frame(FrameResult &r,
                        const std::vector<std::vector<std::uint8_t>> &sent) {
	if (sent.size() != r.decoded_bits.size())
		throw std::invalid_argument("level count mismatch in scoring");
	r.level_errors.assign(r.decoded_bits.size(), 0);
	r.frame_error = false;
	for (std::size_t j = 0; j < sent.size(); ++j) {
		r.level_errors[j] = std::uint8_t(r.decoded_bits[j] != sent[j]);
		if (r.level_errors[j])
			r.frame_error = true;
	}
}

inline long long bit_error_count(const FrameResult &r,
                                 const std::vector<std::vector<std::uint8_t>> &sent) {
	long long n = 0;
	for (std::size_t j = 0; j < sent.size(); ++j)
		for (std::size_t i = 0; i < sent[j].size(); ++i)
			n += r.decoded_bits[j][i] != sent[j][i];
	return n;
}

// ---- multilevel scheme ----------------------------------------------------

inline std::vector<std::uint8_t> mlc_encode(
	const std::vector<std::vector<std::uint8_t>> &info_bits,
	const std::vector<CodeProfile> &profiles) {
	if (info_bits.size() != profiles.size())
		throw std::invalid_argument("one info vector per level required");
	std::size_t tc = profiles.size();
	std::size_t n = profiles.front().length;
	std::vector<std::uint8_t> rows(tc * n);
	for (std::size_t j = 0; j < tc; ++j) {
		if (profiles[j].length != n)
			throw std::invalid_argument("level block lengths differ");
		std::vector<std::uint8_t> z = polar_transform(assemble_u(profiles[j], info_bits[j]));
		std::copy(z.begin(), z.end(), rows.begin() + std::ptrdiff_t(j * n));
	}
	return rows;
}

// Multistage decoding: level j sees the stage LLR of symbol j in each block,
// conditioned on symbols re-encoded from the levels already decided. When
// true_rows is given (row-major bit matrix), conditioning uses the true
// symbols instead — the genie variant used to isolate error propagation.
inline FrameResult mlc_decode(const Frame &frame,
                              const std::vector<CodeProfile> &profiles,
                              const FadingSpec &spec, const QuadratureRule &quad,
                              const std::uint8_t *true_rows = nullptr) {
	std::size_t tc = std::size_t(spec.coherent_time);
	std::size_t n = frame.block_count;
	if (profiles.size() != tc)
		throw std::invalid_argument("one profile per level required");
	for (const auto &p : profiles)
		if (p.length != n)
			throw std::invalid_argument("profile length does not match frame");
	SubchannelEngine engine(spec, quad);
	ScDecoder dec(n);
	std::vector<double> symhat(tc * n, 0.0); // conditioning symbols, row-major
	std::vector<double> llr(n);
	double ycol[max_coherent_time];
	double prefix[max_coherent_time];
	FrameResult r;
	r.decoded_bits.resize(tc);
	for (std::size_t j = 0; j < tc; ++j) {
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t m = 0; m < tc; ++m)
				ycol[m] = frame.rx_at(int(m), i);
			for (std::size_t m = 0; m < j; ++m)
				prefix[m] = symhat[m * n + i];
			llr[i] = engine.stage_llr(ycol, prefix, j);
		}
		const ScResult &sc = dec.decode(llr, profiles[j]);
		r.decoded_bits[j] = extract_info(profiles[j], sc.u_hat);
		for (std::size_t i = 0; i < n; ++i)
			symhat[j * n + i] =
				true_rows ? bpsk(true_rows[j * n + i]) : bpsk(sc.x_hat[i]);
	}
	return r;
}

// ---- parallel scheme ------------------------------------------------------

inline std::vector<std::uint8_t> parallel_encode(
	const std::vector<std::vector<std::uint8_t>> &info_bits,
	const CodeProfile &profile, int coherent_time) {
	if (info_bits.size() != std::size_t(coherent_time))
		throw std::invalid_argument("one info vector per row required");
	std::size_t n = profile.length;
	std::vector<std::uint8_t> rows(std::size_t(coherent_time) * n);
	for (std::size_t j = 0; j < std::size_t(coherent_time); ++j) {
		std::vector<std::uint8_t> z = polar_transform(assemble_u(profile, info_bits[j]));
		std::copy(z.begin(), z.end(), rows.begin() + std::ptrdiff_t(j * n));
	}
	return rows;
}

// Decode one row with receiver-known gains. Rows share nothing, so any
// processing order gives identical results.
inline std::vector<std::uint8_t> parallel_decode_row(const Frame &frame,
                                                     const CodeProfile &profile,
                                                     const FadingSpec &spec, int row) {
	if (frame.gains.empty())
		throw std::logic_error("parallel decoding needs receiver-side gains");
	std::size_t n = frame.block_count;
	std::vector<double> llr(n);
	for (std::size_t i = 0; i < n; ++i)
		llr[i] = csir_llr(frame.rx_at(row, i), frame.gains[i], spec);
	return extract_info(profile, sc_decode(llr, profile).u_hat);
}

inline FrameResult parallel_decode(const Frame &frame, const CodeProfile &profile,
                                   const FadingSpec &spec) {
	FrameResult r;
	r.decoded_bits.resize(std::size_t(frame.coherent_time));
	for (int j = 0; j < frame.coherent_time; ++j)
		r.decoded_bits[std::size_t(j)] = parallel_decode_row(frame, profile, spec, j);
	return r;
}

// ---- interleaved scheme ---------------------------------------------------

// Stream position t maps to row t % T_c, column t / T_c: consecutive stream
// symbols fill one fading block.
inline std::vector<std::uint8_t> bicm_encode(const std::vector<std::uint8_t> &info_bits,
                                             const CodeProfile &profile,
                                             const InterleaverSpec &il,
                                             int coherent_time) {
	std::size_t total = profile.length;
	if (il.permutation.size() != total)
		throw std::invalid_argument("interleaver length does not match code length");
	if (total % std::size_t(coherent_time) != 0)
		throw std::invalid_argument("code length not divisible by coherent_time");
	std::size_t n = total / std::size_t(coherent_time);
	std::vector<std::uint8_t> c = polar_transform(assemble_u(profile, info_bits));
	std::vector<std::uint8_t> s = interleave(c, il);
	std::vector<std::uint8_t> rows(total);
	for (std::size_t t = 0; t < total; ++t) {
		std::size_t row = t % std::size_t(coherent_time);
		std::size_t col = t / std::size_t(coherent_time);
		rows[row * n + col] = s[t];
	}
	return rows;
}

inline FrameResult bicm_decode(const Frame &frame, const CodeProfile &profile,
                               const InterleaverSpec &il, const FadingSpec &spec) {
	if (frame.gains.empty())
		throw std::logic_error("interleaved decoding needs receiver-side gains");
	std::size_t tc = std::size_t(frame.coherent_time);
	std::size_t n = frame.block_count;
	std::size_t total = tc * n;
	if (profile.length != total || il.permutation.size() != total)
		throw std::invalid_argument("profile/interleaver length does not match frame");
	std::vector<double> stream(total);
	for (std::size_t t = 0; t < total; ++t) {
		std::size_t row = t % tc;
		std::size_t col = t / tc;
		stream[t] = csir_llr(frame.rx_at(int(row), col), frame.gains[col], spec);
	}
	std::vector<double> llr = deinterleave(stream, il);
	FrameResult r;
	r.decoded_bits.push_back(extract_info(profile, sc_decode(llr, profile).u_hat));
	return r;
}

// ---- frame-error measurement ----------------------------------------------

struct FerCount {
	long long frames = 0;
	long long frame_errors = 0;
	long long bit_errors = 0;

	double fer() const { return frames ? double(frame_errors) / double(frames) : 0.0; }
	FerCount &operator+=(const FerCount &o) {
		frames += o.frames;
		frame_errors += o.frame_errors;
		bit_errors += o.bit_errors;
		return *this;
	}
};

namespace detail {

// Noiseless override support: transmit with gains recorded, then replace the
// received samples with the clean faded symbols.
inline FadingSpec recording_spec(const FadingSpec &spec, bool noiseless) {
	FadingSpec s = spec;
	if (noiseless && s.csi_mode == CsiMode::cdi)
		s.csi_mode = CsiMode::csir;
	return s;
}

inline void strip_noise(Frame &f) {
	std::size_t n = f.block_count;
	for (std::size_t idx = 0; idx < f.rx.size(); ++idx)
		f.rx[idx] = f.gains[idx % n] * f.tx_symbols[idx];
}

} // namespace detail

inline FerCount measure_mlc_fer(const FadingSpec &spec,
                                const std::vector<CodeProfile> &profiles,
                                const QuadratureRule &quad, long long frames,
                                RngStream rng, bool genie = false,
                                bool noiseless = false) {
	FerCount c;
	std::size_t n = profiles.front().length;
	FadingSpec txspec = detail::recording_spec(spec, noiseless);
	for (long long t = 0; t < frames; ++t) {
		std::vector<std::vector<std::uint8_t>> info(profiles.size());
		for (std::size_t j = 0; j < profiles.size(); ++j)
			info[j] = random_info(profiles[j], rng);
		std::vector<std::uint8_t> rows = mlc_encode(info, profiles);
		Frame f = transmit_frame(rows, n, txspec, rng);
		if (noiseless)
			detail::strip_noise(f);
		FrameResult r = mlc_decode(f, profiles, spec, quad,
		                           genie ? rows.data() : nullptr);
		score_frame(r, info);
		++c.frames;
		c.frame_errors += r.frame_error;
		c.bit_errors += bit_error_count(r, info);
	}
	return c;
}

inline FerCount measure_parallel_fer(const FadingSpec &spec, const CodeProfile &profile,
                                     long long frames, RngStream rng,
                                     bool noiseless = false) {
	FerCount c;
	std::size_t n = profile.length;
	int tc = spec.coherent_time;
	for (long long t = 0; t < frames; ++t) {
		std::vector<std::vector<std::uint8_t>> info;
		info.resize(std::size_t(tc));
		for (auto &v : info)
			v = random_info(profile, rng);
		std::vector<std::uint8_t> rows = parallel_encode(info, profile, tc);
		Frame f = transmit_frame(rows, n, spec, rng);
		if (noiseless)
			detail::strip_noise(f);
		FrameResult r = parallel_decode(f, profile, spec);
		score_frame(r, info);
		++c.frames;
		c.frame_errors += r.frame_error;
		c.bit_errors += bit_error_count(r, info);
	}
	return c;
}

inline FerCount measure_bicm_fer(const FadingSpec &spec, const CodeProfile &profile,
                                 const InterleaverSpec &il, long long frames,
                                 RngStream rng, bool noiseless = false) {
	FerCount c;
	int tc = spec.coherent_time;
	std::size_t n = profile.length / std::size_t(tc);
	for (long long t = 0; t < frames; ++t) {
		std::vector<std::vector<std::uint8_t>> info(1);
		info[0] = random_info(profile, rng);
		std::vector<std::uint8_t> rows = bicm_encode(info[0], profile, il, tc);
		Frame f = transmit_frame(rows, n, spec, rng);
		if (noiseless)
			detail::strip_noise(f);
		FrameResult r = bicm_decode(f, profile, il, spec);
		score_frame(r, info);
		++c.frames;
		c.frame_errors += r.frame_error;
		c.bit_errors += bit_error_count(r, info);
	}
	return c;
}

} // namespace blockfade
