#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <blockfade/blocklik.hh>
#include <blockfade/mi.hh>

using namespace blockfade;

TEST_CASE("coherent capacity endpoints") {
	REQUIRE(coherent_mi(0.0, 1.0) == Catch::Approx(0.0).margin(1e-12));
	REQUIRE(coherent_mi(1.0, 1e-3) == Catch::Approx(1.0).margin(1e-9));
	REQUIRE(coherent_mi(1.0, 1e3) == Catch::Approx(0.0).margin(1e-5));
	REQUIRE_THROWS_AS(coherent_mi(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("unit-gain capacity against a frozen sampled reference") {
	// 0.48594 bits at 0 dB comes from an independent 1e7-draw simulation of
	// 1 - E[log2(1 + exp(-L))] with L the exact channel log ratio.
	auto e = mi_biawgn(1.0);
	REQUIRE(e.kind == "biawgn");
	REQUIRE(e.samples == 0);
	REQUIRE(e.value_bits == Catch::Approx(0.48594).margin(1e-3));
	REQUIRE(e.ci95_halfwidth < 1e-6);
	// 6 dB should be close to one bit, monotone in SNR.
	REQUIRE(mi_biawgn(std::pow(10.0, -6.0 / 20.0)).value_bits > 0.84);
	REQUIRE(mi_biawgn(1.2).value_bits < e.value_bits);
}

TEST_CASE("known-gain fading rate against frozen references") {
	// Frozen from an independent numerical integration of
	// E_h[I(X;Y|h)] over the Rayleigh density.
	struct Ref {
		double snr_db, value;
	};
	for (auto ref : {Ref{5.0, 0.6703}, Ref{11.5, 0.8993}}) {
		auto spec = spec_for_snr_db(ref.snr_db, 1, CsiMode::csir);
		auto e = mi_csir(spec, 100000, RngStream(404, 1));
		REQUIRE(e.kind == "csir");
		REQUIRE(e.value_bits == Catch::Approx(ref.value).margin(3.0 * e.ci95_halfwidth + 2e-3));
		REQUIRE(e.ci95_halfwidth > 0.0);
		REQUIRE(e.ci95_halfwidth < 0.01);
	}
	REQUIRE_THROWS_AS(mi_csir(spec_for_snr_db(0.0), 0, RngStream(1)),
	                  std::invalid_argument);
}

TEST_CASE("rate estimates stay inside the unit interval") {
	for (double db : {-10.0, 0.0, 15.0}) {
		auto e = mi_csir(spec_for_snr_db(db, 1, CsiMode::csir), 20000, RngStream(7, 2));
		REQUIRE(e.value_bits >= 0.0);
		REQUIRE(e.value_bits <= 1.0);
		auto c = mi_cdi_per_symbol(spec_for_snr_db(db, 2), 5000, RngStream(7, 3), 32);
		REQUIRE(c.value_bits >= -c.ci95_halfwidth);
		REQUIRE(c.value_bits <= 1.0);
	}
}

TEST_CASE("distribution-only rates vanish in deep noise") {
	auto spec = spec_for_snr_db(-40.0, 2);
	auto e = mi_cdi_per_symbol(spec, 4000, RngStream(9, 0), 32);
	REQUIRE(std::abs(e.value_bits) < 0.01);
}

TEST_CASE("per-symbol rate is the average of the sub-channel rates") {
	auto spec = spec_for_snr_db(0.0, 3);
	auto p = mi_cdi_profile(spec, 20000, RngStream(21, 5));
	REQUIRE(p.sub.size() == 3);
	REQUIRE(p.coherent_time == 3);
	// Chain rule under common randomness: exact to accumulator precision.
	REQUIRE(p.sub_sum() == Catch::Approx(3.0 * p.per_symbol).margin(1e-9));
}

TEST_CASE("later sub-channels earn more rate") {
	auto spec = spec_for_snr_db(2.0, 3);
	auto p = mi_cdi_profile(spec, 30000, RngStream(22, 1));
	for (std::size_t j = 0; j + 1 < p.sub.size(); ++j) {
		double slack = 2.576 * p.pair_diff_se[j];
		REQUIRE(p.pair_diff[j] >= -slack);
		REQUIRE(p.pair_diff[j] ==
		        Catch::Approx(p.sub[j + 1] - p.sub[j]).margin(1e-9));
	}
}

TEST_CASE("single-symbol blocks have one sub-channel equal to the average") {
	auto spec = spec_for_snr_db(1.0, 1);
	auto p = mi_cdi_profile(spec, 10000, RngStream(23, 2));
	REQUIRE(p.sub.size() == 1);
	REQUIRE(p.sub[0] == p.per_symbol);
	auto s = mi_cdi_subchannel(1, spec, 10000, RngStream(23, 2));
	auto a = mi_cdi_per_symbol(spec, 10000, RngStream(23, 2));
	REQUIRE(s.value_bits == a.value_bits);
	REQUIRE(s.kind == "cdi-subchannel(1)");
	REQUIRE(a.kind == "cdi-per-symbol");
	REQUIRE_THROWS_AS(mi_cdi_subchannel(2, spec, 1000, RngStream(1)),
	                  std::invalid_argument);
	REQUIRE_THROWS_AS(mi_cdi_subchannel(0, spec, 1000, RngStream(1)),
	                  std::invalid_argument);
}

TEST_CASE("gain knowledge can only help") {
	auto spec = spec_for_snr_db(0.0, 2);
	auto cdi = mi_cdi_per_symbol(spec, 50000, RngStream(31, 0));
	auto csir = mi_csir(spec_for_snr_db(0.0, 1, CsiMode::csir), 50000, RngStream(31, 1));
	REQUIRE(csir.value_bits - cdi.value_bits >
	        -(csir.ci95_halfwidth + cdi.ci95_halfwidth));
}

TEST_CASE("fixed-gain engine recovers the coherent capacity") {
	// Replacing the fading rule with a unit point mass and conditioning on the
	// sent symbol turns the per-symbol estimator into the unit-gain capacity.
	auto spec = spec_for_snr_db(0.0, 1);
	auto quad = degenerate_rule(1.0);
	SubchannelEngine eng(spec, quad);
	RngStream r(83, 4);
	detail::MeanVar acc;
	const double inv_ln2 = 1.0 / std::log(2.0);
	for (int i = 0; i < 50000; ++i) {
		double x = r.coin() ? -1.0 : 1.0;
		double y = x + spec.noise_sigma * r.gaussian();
		double lp[2];
		eng.all_prefix_log_likelihoods(&y, &x, lp);
		acc.add((lp[1] - lp[0]) * inv_ln2);
	}
	double ref = coherent_mi(1.0, spec.noise_sigma);
	REQUIRE(acc.mean() == Catch::Approx(ref).margin(3.0 * acc.ci95() + 1e-4));
}

TEST_CASE("estimates are reproducible for a fixed stream") {
	auto spec = spec_for_snr_db(1.5, 2);
	auto a = mi_cdi_profile(spec, 8000, RngStream(55, 9), 32);
	auto b = mi_cdi_profile(spec, 8000, RngStream(55, 9), 32);
	REQUIRE(a.per_symbol == b.per_symbol);
	REQUIRE(a.sub == b.sub);
	auto c = mi_cdi_profile(spec, 8000, RngStream(55, 10), 32);
	REQUIRE(a.per_symbol != c.per_symbol);
}
