/*
Polar transform, successive-cancellation decoding, and code profiles.

Conventions, fixed across the library:
  - Codeword x = u * G_N over GF(2) with G_N = B_N F^(x n) (bit-reversal
    times the n-fold Kronecker power of [[1,0],[1,1]]); G_N is an involution.
  - The SC recursion pairs adjacent channel positions (2i, 2i+1) and emits
    decisions in natural u order, which matches the transform above.
  - Ties (LLR exactly 0) decode to bit 0.
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "llr.hh"

namespace blockfade {

// Round-trip-safe decimal formatting for serialized reals.
inline std::string format_double(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

inline bool is_power_of_two(std::size_t n) {
	return n != 0 && (n & (n - 1)) == 0;
}

inline int log2_exact(std::size_t n) {
	if (!is_power_of_two(n))
		throw std::invalid_argument("length must be a power of two");
	int b = 0;
	while ((std::size_t(1) << b) < n)
		++b;
	return b;
}

// Permutation sending i to its n-bit reversal.
inline std::vector<std::size_t> bit_reversal_permutation(int n) {
	std::vector<std::size_t> p(std::size_t(1) << n);
	for (std::size_t i = 0; i < p.size(); ++i) {
		std::size_t r = 0;
		for (int b = 0; b < n; ++b)
			r |= ((i >> b) & 1) << (n - 1 - b);
		p[i] = r;
	}
	return p;
}

// x = u * G_N over GF(2); its own inverse.
inline std::vector<std::uint8_t> polar_transform(const std::vector<std::uint8_t> &u) {
	int n = log2_exact(u.size());
	std::size_t N = u.size();
	auto rev = bit_reversal_permutation(n);
	std::vector<std::uint8_t> x(N);
	for (std::size_t i = 0; i < N; ++i)
		x[i] = u[rev[i]] & 1;
	for (std::size_t len = 1; len < N; len <<= 1)
		for (std::size_t blk = 0; blk < N; blk += 2 * len)
			for (std::size_t j = blk; j < blk + len; ++j)
				x[j] ^= x[j + len];
	return x;
}

enum class BitClass : std::uint8_t { info, frozen, det };

// Index classification plus per-index reliability estimates for one code.
struct CodeProfile {
	std::size_t length = 0;
	std::string design = "unset";
	double snr_db = 0.0;
	std::vector<BitClass> cls;
	std::vector<std::uint8_t> frozen_value; // used where cls == frozen
	std::vector<double> z_estimate;

	std::size_t info_count() const {
		std::size_t k = 0;
		for (auto c : cls)
			k += c == BitClass::info;
		return k;
	}
	double rate() const { return double(info_count()) / double(length); }
	std::vector<std::size_t> info_indices() const {
		std::vector<std::size_t> v;
		for (std::size_t i = 0; i < cls.size(); ++i)
			if (cls[i] == BitClass::info)
				v.push_back(i);
		return v;
	}
	// Union bound on frame error: sum of reliability estimates over info bits.
	double union_bound() const {
		double s = 0.0;
		for (std::size_t i = 0; i < cls.size(); ++i)
			if (cls[i] == BitClass::info)
				s += z_estimate[i];
		return s;
	}
};

// Pick the target_info_count most reliable high-entropy indices as
// information bits; remaining high-entropy indices freeze to zero; indices
// outside the mask become deterministic bits. Ties break by lower index.
inline CodeProfile select_sets(const std::vector<double> &reliability,
                               const std::vector<std::uint8_t> &high_entropy_mask,
                               std::size_t target_info_count) {
	std::size_t N = reliability.size();
	if (high_entropy_mask.size() != N)
		throw std::invalid_argument("mask length mismatch");
	std::vector<std::size_t> candidates;
	for (std::size_t i = 0; i < N; ++i)
		if (high_entropy_mask[i])
			candidates.push_back(i);
	if (target_info_count > candidates.size())
		throw std::invalid_argument("target_info_count exceeds high-entropy index count");
	std::stable_sort(candidates.begin(), candidates.end(),
	                 [&](std::size_t a, std::size_t b) {
		                 return reliability[a] < reliability[b];
	                 });
	CodeProfile p;
	p.length = N;
	p.cls.assign(N, BitClass::det);
	p.frozen_value.assign(N, 0);
	p.z_estimate = reliability;
	for (std::size_t i = 0; i < candidates.size(); ++i)
		p.cls[candidates[i]] = i < target_info_count ? BitClass::info : BitClass::frozen;
	return p;
}

inline CodeProfile select_sets(const std::vector<double> &reliability,
                               std::size_t target_info_count) {
	return select_sets(reliability,
	                   std::vector<std::uint8_t>(reliability.size(), 1),
	                   target_info_count);
}

// Exact erasure-probability recursion for the binary erasure channel:
// Z- = 2Z - Z^2, Z+ = Z^2, applied along the bits of each index from the
// most significant down (the order the SC recursion above splits channels).
inline std::vector<double> bec_exact_z(double epsilon, std::size_t N) {
	if (epsilon < 0.0 || epsilon > 1.0)
		throw std::invalid_argument("erasure probability outside [0,1]");
	int n = log2_exact(N);
	std::vector<double> z(N);
	for (std::size_t i = 0; i < N; ++i) {
		double v = epsilon;
		for (int b = n - 1; b >= 0; --b) {
			if ((i >> b) & 1)
				v = v * v;
			else
				v = 2.0 * v - v * v;
		}
		z[i] = v;
	}
	return z;
}

namespace detail {

// Successive-cancellation recursion over a scratch arena. The leaf policy
// maps (index, llr) to the committed bit; decisions come out in natural u
// order while each recursion level returns its partial codeword.
template <class Leaf>
class ScEngine {
public:
	explicit ScEngine(std::size_t N) {
		int n = log2_exact(N);
		llr_buf_.resize(n);
		left_bits_.resize(n);
		right_bits_.resize(n);
		for (int d = 0; d < n; ++d) {
			std::size_t half = N >> (d + 1);
			llr_buf_[d].resize(half);
			left_bits_[d].resize(half);
			right_bits_[d].resize(half);
		}
	}

	void run(const double *llr, std::size_t N, Leaf &leaf, std::uint8_t *x_out) {
		next_index_ = 0;
		recurse(llr, N, 0, leaf, x_out);
	}

private:
	void recurse(const double *L, std::size_t n, int depth, Leaf &leaf,
	             std::uint8_t *x_out) {
		if (n == 1) {
			x_out[0] = leaf(next_index_++, L[0]);
			return;
		}
		std::size_t half = n / 2;
		double *Lh = llr_buf_[depth].data();
		std::uint8_t *lb = left_bits_[depth].data();
		std::uint8_t *rb = right_bits_[depth].data();
		for (std::size_t i = 0; i < half; ++i)
			Lh[i] = boxplus(L[2 * i], L[2 * i + 1]);
		recurse(Lh, half, depth + 1, leaf, lb);
		for (std::size_t i = 0; i < half; ++i)
			Lh[i] = branch_combine(L[2 * i], L[2 * i + 1], lb[i]);
		recurse(Lh, half, depth + 1, leaf, rb);
		for (std::size_t i = 0; i < half; ++i) {
			x_out[2 * i] = lb[i] ^ rb[i];
			x_out[2 * i + 1] = rb[i];
		}
	}

	std::vector<std::vector<double>> llr_buf_;
	std::vector<std::vector<std::uint8_t>> left_bits_;
	std::vector<std::vector<std::uint8_t>> right_bits_;
	std::size_t next_index_ = 0;
};

} // namespace detail

struct ScResult {
	std::vector<std::uint8_t> u_hat;
	std::vector<std::uint8_t> x_hat;
};


namespace detail {

struct GenieLeaf {
	const std::uint8_t *u_true;
	std::uint32_t *errors;
	std::uint8_t operator()(std::size_t i, double v) const {
		if (std::uint8_t(hard_bit(v)) != u_true[i])
			++errors[i];
		return u_true[i];
	}
};

struct ProfileLeaf {
	const CodeProfile *profile;
	std::uint8_t *u_hat;
	std::uint8_t operator()(std::size_t i, double v) const {
		std::uint8_t bit;
		switch (profile->cls[i]) {
		case BitClass::frozen:
			bit = profile->frozen_value[i] & 1;
			break;
		case BitClass::det:
			bit = 0;
			break;
		default:
			bit = std::uint8_t(hard_bit(v));
		}
		u_hat[i] = bit;
		return bit;
	}
};

} // namespace detail

// Genie-aided pass: at every index compare the hard decision against the
// known true bit, record the disagreement, and commit the true bit so later
// indices always see an error-free prefix. Reusable across calls.
class GenieDecoder {
public:
	explicit GenieDecoder(std::size_t N) : N_(N), engine_(N), x_scratch_(N) {}

	// errors[i] += (hard decision at index i != u_true[i]) for each i.
	void accumulate(const std::vector<double> &llr,
	                const std::vector<std::uint8_t> &u_true,
	                std::vector<std::uint32_t> &errors) {
		if (llr.size() != N_ || u_true.size() != N_ || errors.size() != N_)
			throw std::invalid_argument("genie length mismatch");
		detail::GenieLeaf leaf{u_true.data(), errors.data()};
		engine_.run(llr.data(), N_, leaf, x_scratch_.data());
	}

private:
	std::size_t N_;
	detail::ScEngine<detail::GenieLeaf> engine_;
	std::vector<std::uint8_t> x_scratch_;
};

// Reusable SC decoder for frame loops: same behavior as sc_decode without
// per-call workspace allocation.
class ScDecoder {
public:
	explicit ScDecoder(std::size_t N) : N_(N), engine_(N), clamped_(N) {}

	const ScResult &decode(const std::vector<double> &llr, const CodeProfile &profile) {
		if (llr.size() != N_ || profile.length != N_)
			throw std::invalid_argument("llr length does not match profile");
		result_.u_hat.resize(N_);
		result_.x_hat.resize(N_);
		for (std::size_t i = 0; i < N_; ++i)
			clamped_[i] = clamp_llr(llr[i]);
		detail::ProfileLeaf leaf{&profile, result_.u_hat.data()};
		engine_.run(clamped_.data(), N_, leaf, result_.x_hat.data());
		return result_;
	}

private:
	std::size_t N_;
	detail::ScEngine<detail::ProfileLeaf> engine_;
	std::vector<double> clamped_;
	ScResult result_;
};

// Decode one codeword worth of channel LLRs against a profile. Frozen bits
// commit their shared value, deterministic bits commit the uniform-prior
// tie-break (bit 0), information bits commit the hard decision. Non-finite
// LLRs are clamped, never an error.
inline ScResult sc_decode(const std::vector<double> &llr, const CodeProfile &profile) {
	ScDecoder dec(llr.size());
	return dec.decode(llr, profile);
}

inline char bit_class_code(BitClass c) {
	switch (c) {
	case BitClass::info:
		return 'I';
	case BitClass::frozen:
		return 'F';
	default:
		return 'D';
	}
}

inline void write_profile(std::ostream &os, const CodeProfile &p) {
	os << "polarprofile v1 N=" << p.length << " design=" << p.design
	   << " snr_db=" << format_double(p.snr_db) << "\n";
	for (std::size_t i = 0; i < p.length; ++i) {
		os << i << ' ' << bit_class_code(p.cls[i]) << ' ';
		if (p.cls[i] == BitClass::frozen)
			os << int(p.frozen_value[i] & 1);
		else
			os << '-';
		os << ' ' << format_double(p.z_estimate[i]) << "\n";
	}
}

inline void save_profile(const std::string &path, const CodeProfile &p) {
	std::ofstream os(path);
	if (!os)
		throw std::runtime_error("cannot open profile file for writing: " + path);
	write_profile(os, p);
	if (!os.good())
		throw std::runtime_error("write failure on profile file: " + path);
}

inline CodeProfile read_profile(std::istream &is, const std::string &what = "profile") {
	CodeProfile p;
	std::string line;
	if (!std::getline(is, line))
		throw std::runtime_error(what + ": empty input");
	{
		std::istringstream hs(line);
		std::string magic, version, nfield, dfield, sfield;
		hs >> magic >> version >> nfield >> dfield >> sfield;
		if (magic != "polarprofile" || version != "v1" ||
		    nfield.rfind("N=", 0) != 0 || dfield.rfind("design=", 0) != 0 ||
		    sfield.rfind("snr_db=", 0) != 0)
			throw std::runtime_error(what + ": bad header line");
		p.length = std::stoull(nfield.substr(2));
		p.design = dfield.substr(7);
		p.snr_db = std::stod(sfield.substr(7));
	}
	if (!is_power_of_two(p.length))
		throw std::runtime_error(what + ": length is not a power of two");
	p.cls.assign(p.length, BitClass::det);
	p.frozen_value.assign(p.length, 0);
	p.z_estimate.assign(p.length, 0.0);
	std::vector<std::uint8_t> seen(p.length, 0);
	for (std::size_t row = 0; row < p.length; ++row) {
		if (!std::getline(is, line))
			throw std::runtime_error(what + ": truncated after " + std::to_string(row) + " rows");
		std::istringstream ls(line);
		std::size_t idx;
		std::string klass, fval;
		double z;
		if (!(ls >> idx >> klass >> fval >> z) || idx >= p.length || seen[idx])
			throw std::runtime_error(what + ": bad row '" + line + "'");
		seen[idx] = 1;
		if (klass == "I")
			p.cls[idx] = BitClass::info;
		else if (klass == "F")
			p.cls[idx] = BitClass::frozen;
		else if (klass == "D")
			p.cls[idx] = BitClass::det;
		else
			throw std::runtime_error(what + ": bad class '" + klass + "'");
		if (p.cls[idx] == BitClass::frozen) {
			if (fval != "0" && fval != "1")
				throw std::runtime_error(what + ": bad frozen value '" + fval + "'");
			p.frozen_value[idx] = std::uint8_t(fval == "1");
		} else if (fval != "-") {
			throw std::runtime_error(what + ": expected '-' for non-frozen index");
		}
		p.z_estimate[idx] = z;
	}
	return p;
}

inline CodeProfile load_profile(const std::string &path) {
	std::ifstream is(path);
	if (!is)
		throw std::runtime_error("cannot open profile file: " + path);
	return read_profile(is, path);
}

} // namespace blockfade
