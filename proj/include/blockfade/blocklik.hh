/*
Noncoherent block likelihoods and sub-channel LLRs.

For BPSK symbols the T_c-fold Gaussian product inside the gain integral
depends on x only through s = <x, y>, and summing a uniform suffix prior
over x_{j+1..T_c} factors into per-symbol cosh terms:

  p(y | x_{1:j}) = (2 pi sigma^2)^{-T_c/2} e^{-(E + h^2 T_c)/(2 sigma^2)}
                   e^{h s_j / sigma^2} prod_{m>j} cosh(h y_m / sigma^2)

integrated against the fading density. The e^{h s} factor is evaluated by
the even/odd split carried by the quadrature rule (see quadrature.hh); rules
without companion arrays are summed directly, which keeps degenerate test
rules exact. Everything runs in the natural-log domain.
*/

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fading.hh"
#include "llr.hh"
#include "quadrature.hh"

namespace blockfade {

inline constexpr int max_coherent_time = 16;

// Collapsed per-sample statistics of the block likelihood.
struct SufficientStat {
	double inner = 0.0;  // <x, y>
	double energy = 0.0; // ||y||^2
};

inline SufficientStat sufficient_stat(const std::vector<double> &y,
                                      const std::vector<double> &x) {
	if (y.size() != x.size())
		throw std::invalid_argument("length mismatch");
	SufficientStat s;
	for (std::size_t i = 0; i < y.size(); ++i) {
		s.inner += x[i] * y[i];
		s.energy += y[i] * y[i];
	}
	return s;
}

namespace detail {

// Online log-sum-exp accumulator.
class LogSum {
public:
	void add(double a) {
		if (std::isinf(a) && a < 0.0)
			return;
		if (a <= max_) {
			if (a > max_ - 46.0) // below that the term is sub-ulp
				acc_ += std::exp(a - max_);
		} else {
			acc_ = acc_ * std::exp(max_ - a) + 1.0;
			max_ = a;
		}
	}
	double value() const {
		if (acc_ == 0.0)
			return -std::numeric_limits<double>::infinity();
		return max_ + std::log(acc_);
	}

private:
	double max_ = -std::numeric_limits<double>::infinity();
	double acc_ = 0.0;
};

// log(e^{a} + sign * e^{b}) for a >= b expected; guarded for b slightly
// above a from rounding.
inline double signed_combine(double a, double b, bool negative) {
	if (std::isinf(b) && b < 0.0)
		return a;
	if (b > a) {
		if (!negative)
			return b + std::log1p(std::exp(a - b));
		// cancellation beyond rounding cannot happen: |odd| <= even
		return a + std::log1p(-(1.0 - 1e-15));
	}
	double r = std::exp(b - a);
	if (negative)
		r = std::min(r, 1.0 - 1e-16);
	return a + (negative ? std::log1p(-r) : std::log1p(r));
}

} // namespace detail

// Evaluator bound to one fading spec and one quadrature rule. All methods
// are pure and reentrant; per-call scratch lives on the stack (node counts
// up to 256).
class SubchannelEngine {
public:
	static constexpr int max_nodes = 256;

	SubchannelEngine(const FadingSpec &spec, const QuadratureRule &quad)
		: spec_(spec), quad_(quad) {
		spec.validate();
		if (spec.coherent_time > max_coherent_time)
			throw std::invalid_argument("coherent_time exceeds supported maximum");
		if (quad.count > max_nodes)
			throw std::invalid_argument("quadrature rule too large");
		if (quad.count < 1)
			throw std::invalid_argument("empty quadrature rule");
		double tc = double(spec.coherent_time);
		double inv2v = 1.0 / (2.0 * spec.noise_var());
		inv_var_ = 1.0 / spec.noise_var();
		log_norm_ = -0.5 * tc * std::log(2.0 * std::acos(-1.0) * spec.noise_var());
		even_base_.resize(quad.count);
		for (int k = 0; k < quad.count; ++k)
			even_base_[k] = quad.log_weights[k] -
			                quad.nodes[k] * quad.nodes[k] * tc * inv2v;
		if (quad.has_split()) {
			odd_base_.resize(quad.count);
			for (int k = 0; k < quad.count; ++k)
				odd_base_[k] = quad.log_odd_coeff[k] -
				               quad.odd_nodes[k] * quad.odd_nodes[k] * tc * inv2v;
		}
	}

	const FadingSpec &spec() const { return spec_; }
	const QuadratureRule &rule() const { return quad_; }

	// log p(y | x_{1:prefix_len}) with uniform prior over the suffix.
	double log_prefix_likelihood(const double *y, const double *x,
	                             std::size_t prefix_len) const {
		std::size_t tc = std::size_t(spec_.coherent_time);
		if (prefix_len > tc)
			throw std::invalid_argument("prefix longer than coherent_time");
		double s = 0.0, energy = 0.0;
		for (std::size_t m = 0; m < prefix_len; ++m)
			s += x[m] * y[m];
		for (std::size_t m = 0; m < tc; ++m)
			energy += y[m] * y[m];
		double even_sfx[max_nodes], odd_sfx[max_nodes];
		for (int k = 0; k < quad_.count; ++k)
			even_sfx[k] = 0.0;
		if (quad_.has_split())
			for (int k = 0; k < quad_.count; ++k)
				odd_sfx[k] = 0.0;
		for (std::size_t m = prefix_len; m < tc; ++m) {
			for (int k = 0; k < quad_.count; ++k)
				even_sfx[k] += log_cosh(quad_.nodes[k] * y[m] * inv_var_);
			if (quad_.has_split())
				for (int k = 0; k < quad_.count; ++k)
					odd_sfx[k] += log_cosh(quad_.odd_nodes[k] * y[m] * inv_var_);
		}
		return base_term(energy) + gain_sum(s, even_sfx, odd_sfx);
	}

	// log p(y | x) over the full block.
	double log_block_likelihood(const double *y, const double *x) const {
		return log_prefix_likelihood(y, x, std::size_t(spec_.coherent_time));
	}

	// log p(y | x_{1:j}) for every j = 0..T_c in one pass over shared
	// randomness (the chain-rule identity then holds to accumulator
	// precision). x supplies the full block.
	void all_prefix_log_likelihoods(const double *y, const double *x,
	                                double *lp) const {
		std::size_t tc = std::size_t(spec_.coherent_time);
		double prefix_inner[max_coherent_time + 1];
		prefix_inner[0] = 0.0;
		for (std::size_t m = 0; m < tc; ++m)
			prefix_inner[m + 1] = prefix_inner[m] + x[m] * y[m];
		double energy = 0.0;
		for (std::size_t m = 0; m < tc; ++m)
			energy += y[m] * y[m];
		double base = base_term(energy);
		double even_sfx[max_nodes], odd_sfx[max_nodes];
		for (int k = 0; k < quad_.count; ++k)
			even_sfx[k] = 0.0;
		if (quad_.has_split())
			for (int k = 0; k < quad_.count; ++k)
				odd_sfx[k] = 0.0;
		for (std::size_t j = tc;; --j) {
			lp[j] = base + gain_sum(prefix_inner[j], even_sfx, odd_sfx);
			if (j == 0)
				break;
			// widen the marginalized suffix by symbol j
			for (int k = 0; k < quad_.count; ++k)
				even_sfx[k] += log_cosh(quad_.nodes[k] * y[j - 1] * inv_var_);
			if (quad_.has_split())
				for (int k = 0; k < quad_.count; ++k)
					odd_sfx[k] += log_cosh(quad_.odd_nodes[k] * y[j - 1] * inv_var_);
		}
	}

	// LLR of symbol j = prefix_len+1 given y and the decoded prefix symbols.
	double stage_llr(const double *y, const double *decoded_prefix,
	                 std::size_t prefix_len) const {
		std::size_t tc = std::size_t(spec_.coherent_time);
		if (prefix_len >= tc)
			throw std::invalid_argument("decoded prefix leaves no symbol to detect");
		double s_base = 0.0, energy = 0.0;
		for (std::size_t m = 0; m < prefix_len; ++m)
			s_base += decoded_prefix[m] * y[m];
		for (std::size_t m = 0; m < tc; ++m)
			energy += y[m] * y[m];
		double even_sfx[max_nodes], odd_sfx[max_nodes];
		for (int k = 0; k < quad_.count; ++k)
			even_sfx[k] = 0.0;
		if (quad_.has_split())
			for (int k = 0; k < quad_.count; ++k)
				odd_sfx[k] = 0.0;
		for (std::size_t m = prefix_len + 1; m < tc; ++m) {
			for (int k = 0; k < quad_.count; ++k)
				even_sfx[k] += log_cosh(quad_.nodes[k] * y[m] * inv_var_);
			if (quad_.has_split())
				for (int k = 0; k < quad_.count; ++k)
					odd_sfx[k] += log_cosh(quad_.odd_nodes[k] * y[m] * inv_var_);
		}
		double yj = y[prefix_len];
		double lp_plus = gain_sum(s_base + yj, even_sfx, odd_sfx);
		double lp_minus = gain_sum(s_base - yj, even_sfx, odd_sfx);
		return clamp_llr(lp_plus - lp_minus);
	}

private:
	double base_term(double energy) const {
		return log_norm_ - 0.5 * energy * inv_var_;
	}

	// log of the gain integral of e^{h s / sigma^2} times the suffix cosh
	// products captured in the per-node accumulators.
	double gain_sum(double s, const double *even_sfx, const double *odd_sfx) const {
		if (!quad_.has_split()) {
			detail::LogSum ls;
			for (int k = 0; k < quad_.count; ++k)
				ls.add(even_base_[k] + quad_.nodes[k] * s * inv_var_ + even_sfx[k]);
			return ls.value();
		}
		detail::LogSum even;
		for (int k = 0; k < quad_.count; ++k)
			even.add(even_base_[k] + log_cosh(quad_.nodes[k] * s * inv_var_) + even_sfx[k]);
		if (s == 0.0)
			return even.value();
		detail::LogSum odd;
		double abs_s = std::abs(s) * inv_var_;
		for (int k = 0; k < quad_.count; ++k) {
			double z = quad_.odd_nodes[k] * abs_s;
			odd.add(odd_base_[k] + log_sinh(z) + odd_sfx[k]);
		}
		return detail::signed_combine(even.value(), odd.value(), s < 0.0);
	}

	FadingSpec spec_;
	QuadratureRule quad_;
	std::vector<double> even_base_;
	std::vector<double> odd_base_;
	double inv_var_ = 1.0;
	double log_norm_ = 0.0;
};

// Convenience wrappers matching the vector-based call shapes.

inline double block_likelihood(const std::vector<double> &y,
                               const std::vector<double> &x,
                               const FadingSpec &spec, const QuadratureRule &quad) {
	if (y.size() != std::size_t(spec.coherent_time) || x.size() != y.size())
		throw std::invalid_argument("length mismatch with coherent_time");
	SubchannelEngine eng(spec, quad);
	double l = eng.log_block_likelihood(y.data(), x.data());
	double v = std::exp(l);
	return v > 0.0 ? v : std::numeric_limits<double>::min();
}

inline double prefix_likelihood(const std::vector<double> &y,
                                const std::vector<double> &x_prefix,
                                const FadingSpec &spec, const QuadratureRule &quad) {
	if (y.size() != std::size_t(spec.coherent_time))
		throw std::invalid_argument("length mismatch with coherent_time");
	if (x_prefix.size() > y.size())
		throw std::invalid_argument("prefix longer than coherent_time");
	SubchannelEngine eng(spec, quad);
	double l = eng.log_prefix_likelihood(y.data(), x_prefix.data(), x_prefix.size());
	double v = std::exp(l);
	return v > 0.0 ? v : std::numeric_limits<double>::min();
}

inline double stage_llr(const std::vector<double> &y,
                        const std::vector<double> &decoded_prefix,
                        const FadingSpec &spec, const QuadratureRule &quad) {
	if (y.size() != std::size_t(spec.coherent_time))
		throw std::invalid_argument("length mismatch with coherent_time");
	if (decoded_prefix.size() >= y.size())
		throw std::invalid_argument("decoded prefix leaves no symbol to detect");
	SubchannelEngine eng(spec, quad);
	return eng.stage_llr(y.data(), decoded_prefix.data(), decoded_prefix.size());
}

} // namespace blockfade
