/*
Monte Carlo code construction. Per-index reliabilities come from
genie-aided successive cancellation: transmit known random data, decode
with every earlier decision corrected, and count how often each index's
hard decision disagrees with the truth. The symmetric channels involved
let the sampler produce LLRs for the all-zero codeword only; data is
injected by sign flips.

Three users: the merged i.i.d. receiver-CSI channel (interleaved scheme,
and the per-row codes of the parallel scheme), and the T_c noncoherent
stage channels of the multilevel scheme, each conditioned on true
previous-stage symbols.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blocklik.hh"
#include "fading.hh"
#include "mi.hh"
#include "parallel.hh"
#include "polar.hh"
#include "quadrature.hh"
#include "rng.hh"

namespace blockfade {

inline constexpr long long default_construction_samples = 50000;

// Per-index genie error frequencies. The sampler fills an all-zero-codeword
// LLR vector — sampler(llr, rng) — and must be const-callable (it runs from
// several workers at once). Random data u is drawn here, mapped through the
// polar transform, and applied to the LLR signs; the genie pass then scores
// hard decisions against u.
template <class Sampler>
std::vector<double> genie_reliability(const Sampler &sampler, std::size_t length,
                                      long long samples, RngStream rng) {
	if (samples < 100)
		throw std::invalid_argument("reliability estimation needs at least 100 samples");
	if (!is_power_of_two(length))
		throw std::invalid_argument("length must be a power of two");
	BatchPlan plan = plan_batches(samples, default_trial_batch);
	std::vector<std::vector<std::uint32_t>> slots(plan.count());
	parallel_for(plan.count(), [&](std::size_t b) {
		RngStream r = rng.sub(b);
		std::vector<std::uint8_t> u(length);
		std::vector<double> llr(length);
		std::vector<std::uint32_t> errors(length, 0);
		GenieDecoder dec(length);
		for (long long t = 0, n = plan.size(b); t < n; ++t) {
			for (std::size_t i = 0; i < length; ++i)
				u[i] = std::uint8_t(r.coin());
			std::vector<std::uint8_t> c = polar_transform(u);
			sampler(llr, r);
			for (std::size_t i = 0; i < length; ++i)
				if (c[i])
					llr[i] = -llr[i];
			dec.accumulate(llr, u, errors);
		}
		slots[b] = std::move(errors);
	});
	std::vector<double> freq(length, 0.0);
	for (const auto &errors : slots)
		for (std::size_t i = 0; i < length; ++i)
			freq[i] += double(errors[i]);
	for (std::size_t i = 0; i < length; ++i)
		freq[i] /= double(samples);
	return freq;
}

// All-zero-codeword LLR sampler for the merged i.i.d. channel with
// receiver-known gains: fresh gain per symbol.
class CsirSampler {
public:
	explicit CsirSampler(const FadingSpec &spec) : spec_(spec) { spec.validate(); }
	void operator()(std::vector<double> &llr, RngStream &rng) const {
		for (double &l : llr) {
			double h = rng.rayleigh(spec_.rayleigh_sigma_h);
			double y = h + spec_.noise_sigma * rng.gaussian();
			l = csir_llr(y, h, spec_);
		}
	}

private:
	FadingSpec spec_;
};

// All-zero-codeword LLR sampler for stage j of the multilevel scheme:
// every block carries random symbols on the other rows, the stage LLR
// conditions on the true previous-row symbols.
class StageSampler {
public:
	StageSampler(const FadingSpec &spec, const QuadratureRule &quad, int stage)
		: spec_(spec), engine_(spec, quad), stage_(stage) {
		if (stage < 1 || stage > spec.coherent_time)
			throw std::invalid_argument("stage index out of range");
	}

	void operator()(std::vector<double> &llr, RngStream &rng) const {
		int tc = spec_.coherent_time;
		double y[max_coherent_time];
		double x[max_coherent_time];
		for (double &l : llr) {
			double h = rng.rayleigh(spec_.rayleigh_sigma_h);
			for (int m = 0; m < tc; ++m) {
				x[m] = (m == stage_ - 1) ? 1.0 : (rng.coin() ? -1.0 : 1.0);
				y[m] = h * x[m] + spec_.noise_sigma * rng.gaussian();
			}
			l = engine_.stage_llr(y, x, std::size_t(stage_ - 1));
		}
	}

private:
	FadingSpec spec_;
	SubchannelEngine engine_;
	int stage_;
};

// Construct a single code of the given length over the merged i.i.d.
// receiver-CSI channel. Serves the interleaved scheme (length T_c*N) and
// the parallel scheme's per-row code (length N).
inline CodeProfile construct_bicm(const FadingSpec &spec, std::size_t total_length,
                                  double rate, long long samples, RngStream rng,
                                  const std::string &label = "bicm") {
	if (!is_power_of_two(total_length))
		throw std::invalid_argument("code length must be a power of two");
	if (rate < 0.0 || rate > 1.0)
		throw std::invalid_argument("rate outside [0,1]");
	long long k = std::llround(rate * double(total_length));
	CsirSampler sampler(spec);
	std::vector<double> freq = genie_reliability(sampler, total_length, samples, rng);
	CodeProfile p = select_sets(freq, std::size_t(k));
	p.design = label;
	p.snr_db = spec.snr_db();
	return p;
}

// Split k_total across levels proportionally to the weights, totals exact
// by largest-remainder rounding (ties to the lower level).
inline std::vector<std::size_t> allocate_info_bits(const std::vector<double> &weights,
                                                   std::size_t k_total,
                                                   std::size_t per_level_cap) {
	std::size_t levels = weights.size();
	double wsum = 0.0;
	for (double w : weights)
		wsum += w > 0.0 ? w : 0.0;
	std::vector<std::size_t> k(levels, 0);
	if (k_total == 0)
		return k;
	if (wsum <= 0.0)
		throw std::invalid_argument("no level has positive weight");
	std::vector<double> frac(levels);
	std::size_t assigned = 0;
	for (std::size_t j = 0; j < levels; ++j) {
		double ideal = double(k_total) * (weights[j] > 0.0 ? weights[j] : 0.0) / wsum;
		k[j] = std::size_t(std::floor(ideal));
		if (k[j] > per_level_cap)
			k[j] = per_level_cap;
		frac[j] = ideal - std::floor(ideal);
		assigned += k[j];
	}
	if (assigned > k_total)
		throw std::logic_error("over-assignment in rate allocation");
	std::vector<std::size_t> order(levels);
	for (std::size_t j = 0; j < levels; ++j)
		order[j] = j;
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		return frac[a] > frac[b];
	});
	std::size_t left = k_total - assigned;
	for (std::size_t pass = 0; left > 0; ++pass) {
		bool moved = false;
		for (std::size_t j : order) {
			if (left == 0)
				break;
			if (k[j] < per_level_cap) {
				++k[j];
				--left;
				moved = true;
			}
		}
		if (!moved)
			throw std::invalid_argument("rate exceeds total level capacity");
	}
	return k;
}

// Multilevel construction: estimate sub-channel rates once, split the info
// budget proportionally, then build each level on its genie-conditioned
// stage channel.
inline std::vector<CodeProfile> construct_mlc(const FadingSpec &spec, std::size_t N,
                                              double total_rate, long long samples,
                                              RngStream rng,
                                              int quad_nodes = default_quadrature_nodes,
                                              long long mi_samples = default_mi_samples,
                                              const std::string &label = "mlc") {
	spec.validate();
	if (!is_power_of_two(N))
		throw std::invalid_argument("block length must be a power of two");
	if (total_rate < 0.0 || total_rate > 1.0)
		throw std::invalid_argument("rate outside [0,1]");
	int tc = spec.coherent_time;
	double k_exact = total_rate * double(tc) * double(N);
	long long k_total = std::llround(k_exact);
	if (std::abs(k_exact - double(k_total)) > 1e-6)
		throw std::invalid_argument("total_rate * T_c * N must be an integer");

	SubchannelProfile mi = mi_cdi_profile(spec, mi_samples, rng.sub(0), quad_nodes);
	double capacity_bits = mi.sub_sum() * double(N);
	if (double(k_total) > capacity_bits)
		throw std::invalid_argument(
			"infeasible rate: " + std::to_string(k_total) + " info bits requested but estimated capacity is " +
			std::to_string(capacity_bits) + " bits per frame at " + std::to_string(spec.snr_db()) + " dB");

	std::vector<std::size_t> k = allocate_info_bits(mi.sub, std::size_t(k_total), N);

	QuadratureRule quad = make_rayleigh_rule(spec.rayleigh_sigma_h, quad_nodes);
	std::vector<CodeProfile> profiles;
	profiles.reserve(std::size_t(tc));
	for (int j = 1; j <= tc; ++j) {
		StageSampler sampler(spec, quad, j);
		std::vector<double> freq =
			genie_reliability(sampler, N, samples, rng.sub(std::uint64_t(j)));
		CodeProfile p = select_sets(freq, k[std::size_t(j - 1)]);
		p.design = label + ".level" + std::to_string(j);
		p.snr_db = spec.snr_db();
		profiles.push_back(std::move(p));
	}
	return profiles;
}

} // namespace blockfade
