/*
Log-likelihood-ratio conventions and stable log-domain primitives.

Convention: positive LLR favors bit 0; BPSK maps bit 0 to +1. Magnitudes are
clamped at llr_max so repeated log-domain updates cannot overflow.
*/

#pragma once

#include <algorithm>
#include <cmath>

namespace blockfade {

inline constexpr double llr_max = 40.0;

inline double clamp_llr(double v) {
	if (std::isnan(v))
		return 0.0;
	return std::clamp(v, -llr_max, llr_max);
}

// log(1 + e^x) without overflow.
inline double log1p_exp(double x) {
	if (x > 38.0)
		return x;
	if (x > 0.0)
		return x + std::log1p(std::exp(-x));
	if (x < -38.0)
		return std::exp(x);
	return std::log1p(std::exp(x));
}

// log(cosh(x)) without overflow.
inline double log_cosh(double x) {
	double a = std::abs(x);
	if (a > 19.0)
		return a - 0.6931471805599453;
	return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}

// log(sinh(x)/x), for x >= 0; smooth through x = 0.
inline double log_sinhc(double x) {
	if (x < 1e-4)
		return std::log1p(x * x / 6.0);
	if (x > 350.0)
		return x - 0.6931471805599453 - std::log(x);
	return std::log(std::sinh(x) / x);
}

// log(sinh(x)) for x > 0.
inline double log_sinh(double x) {
	if (x < 1e-4)
		return std::log(x) + x * x / 6.0;
	if (x > 19.0)
		return x - 0.6931471805599453;
	return std::log(std::sinh(x));
}

// Exact check-node combination log((1+e^{a+b})/(e^a+e^b)) in max-based form.
inline double boxplus(double a, double b) {
	double m = std::min(std::abs(a), std::abs(b));
	double s = (a < 0.0) == (b < 0.0) ? m : -m;
	return s + std::log1p(std::exp(-std::abs(a + b)))
	         - std::log1p(std::exp(-std::abs(a - b)));
}

// Variable-node combination given the decoded upper branch bit.
inline double branch_combine(double a, double b, int upper_bit) {
	return b + (upper_bit ? -a : a);
}

// Hard decision with deterministic tie-break to bit 0.
inline int hard_bit(double llr) { return llr < 0.0 ? 1 : 0; }

// Compensated accumulator for long Monte Carlo sums.
class KahanSum {
public:
	void add(double x) {
		double y = x - c_;
		double t = s_ + y;
		c_ = (t - s_) - y;
		s_ = t;
	}
	double value() const { return s_; }

private:
	double s_ = 0.0;
	double c_ = 0.0;
};

} // namespace blockfade
