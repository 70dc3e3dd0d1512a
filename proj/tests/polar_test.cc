#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <blockfade/llr.hh>
#include <blockfade/polar.hh>
#include <blockfade/rng.hh>

using namespace blockfade;

namespace {

std::vector<std::uint8_t> random_bits(std::size_t n, RngStream &r) {
	std::vector<std::uint8_t> v(n);
	for (auto &b : v)
		b = std::uint8_t(r.coin());
	return v;
}

std::vector<std::uint8_t> xor_bits(std::vector<std::uint8_t> a,
                                   const std::vector<std::uint8_t> &b) {
	for (std::size_t i = 0; i < a.size(); ++i)
		a[i] ^= b[i];
	return a;
}

} // namespace

TEST_CASE("bit reversal permutation is an involution") {
	auto p = bit_reversal_permutation(5);
	REQUIRE(p.size() == 32);
	for (std::size_t i = 0; i < p.size(); ++i) {
		REQUIRE(p[i] < p.size());
		REQUIRE(p[p[i]] == i);
	}
	REQUIRE(p[1] == 16);
	REQUIRE(p[3] == 24);
}

TEST_CASE("length-4 transform rows") {
	// One-hot inputs pick out single generator rows.
	using V = std::vector<std::uint8_t>;
	REQUIRE(polar_transform(V{1, 0, 0, 0}) == V{1, 0, 0, 0});
	REQUIRE(polar_transform(V{0, 1, 0, 0}) == V{1, 0, 1, 0});
	REQUIRE(polar_transform(V{0, 0, 1, 0}) == V{1, 1, 0, 0});
	REQUIRE(polar_transform(V{0, 0, 0, 1}) == V{1, 1, 1, 1});
}

TEST_CASE("transform is linear and self-inverse") {
	RngStream r(12);
	for (int trial = 0; trial < 20; ++trial) {
		auto u = random_bits(64, r);
		auto v = random_bits(64, r);
		REQUIRE(polar_transform(xor_bits(u, v)) ==
		        xor_bits(polar_transform(u), polar_transform(v)));
		REQUIRE(polar_transform(polar_transform(u)) == u);
	}
}

TEST_CASE("erasure recursion closed forms at length 4") {
	const double eps = 0.37;
	auto z = bec_exact_z(eps, 4);
	double zm = 2.0 * eps - eps * eps;
	double zp = eps * eps;
	REQUIRE(z[0] == Catch::Approx(2.0 * zm - zm * zm).epsilon(1e-15));
	REQUIRE(z[1] == Catch::Approx(zm * zm).epsilon(1e-15));
	REQUIRE(z[2] == Catch::Approx(2.0 * zp - zp * zp).epsilon(1e-15));
	REQUIRE(z[3] == Catch::Approx(zp * zp).epsilon(1e-15));
}

TEST_CASE("erasure probability is conserved on average") {
	for (double eps : {0.1, 0.5, 0.83}) {
		auto z = bec_exact_z(eps, 256);
		KahanSum s;
		for (double v : z)
			s.add(v);
		REQUIRE(s.value() / 256.0 == Catch::Approx(eps).epsilon(1e-13));
	}
	REQUIRE_THROWS_AS(bec_exact_z(1.2, 8), std::invalid_argument);
	REQUIRE_THROWS_AS(bec_exact_z(0.5, 12), std::invalid_argument);
}

TEST_CASE("select_sets keeps the most reliable candidates") {
	std::vector<double> rel{0.9, 0.1, 0.5, 0.1, 0.05, 0.7};
	// Not a code length; select_sets itself has no power-of-two requirement.
	auto p = select_sets(rel, 3);
	REQUIRE(p.info_count() == 3);
	// Smallest three erasure estimates: index 4 (.05), then the .1 tie broken
	// toward the lower index, so 1 and 3.
	REQUIRE(p.cls[4] == BitClass::info);
	REQUIRE(p.cls[1] == BitClass::info);
	REQUIRE(p.cls[3] == BitClass::info);
	REQUIRE(p.cls[0] == BitClass::frozen);
	REQUIRE(p.union_bound() == Catch::Approx(0.25));

	std::vector<std::uint8_t> mask{1, 0, 1, 1, 0, 1};
	auto q = select_sets(rel, mask, 2);
	REQUIRE(q.cls[1] == BitClass::det);
	REQUIRE(q.cls[4] == BitClass::det);
	REQUIRE(q.cls[3] == BitClass::info);
	REQUIRE(q.cls[2] == BitClass::info);
	REQUIRE(q.cls[5] == BitClass::frozen);
	REQUIRE_THROWS_AS(select_sets(rel, mask, 5), std::invalid_argument);
}

TEST_CASE("selected sets nest as the rate grows") {
	RngStream r(77);
	std::vector<double> rel(128);
	for (auto &v : rel)
		v = r.uniform();
	auto lo = select_sets(rel, 40);
	auto hi = select_sets(rel, 80);
	for (std::size_t i = 0; i < rel.size(); ++i)
		if (lo.cls[i] == BitClass::info)
			REQUIRE(hi.cls[i] == BitClass::info);
}

TEST_CASE("noiseless successive cancellation inverts the encoder") {
	RngStream r(99);
	const std::size_t N = 256;
	std::vector<double> rel(N);
	for (auto &v : rel)
		v = r.uniform();
	std::vector<std::uint8_t> mask(N, 1);
	for (std::size_t i = 0; i < N; i += 7)
		mask[i] = 0; // a few deterministic positions
	auto profile = select_sets(rel, mask, 100);

	for (int trial = 0; trial < 10; ++trial) {
		std::vector<std::uint8_t> u(N, 0);
		for (std::size_t i = 0; i < N; ++i)
			if (profile.cls[i] == BitClass::info)
				u[i] = std::uint8_t(r.coin());
		auto x = polar_transform(u);
		std::vector<double> llr(N);
		for (std::size_t i = 0; i < N; ++i)
			llr[i] = x[i] ? -llr_max : llr_max;
		auto res = sc_decode(llr, profile);
		REQUIRE(res.u_hat == u);
		REQUIRE(res.x_hat == x);
	}
}

TEST_CASE("genie decoder counts errors against the true input") {
	const std::size_t N = 64;
	RngStream r(5);
	GenieDecoder dec(N);
	std::vector<std::uint32_t> errors(N, 0);

	// Perfect channel: the codeword saturates every decision the right way.
	auto u = random_bits(N, r);
	auto x = polar_transform(u);
	std::vector<double> llr(N);
	for (std::size_t i = 0; i < N; ++i)
		llr[i] = x[i] ? -llr_max : llr_max;
	dec.accumulate(llr, u, errors);
	for (auto e : errors)
		REQUIRE(e == 0);

	// Uninformative channel: every internal value stays at zero, every
	// decision falls to the tie-break bit 0, so exactly the one-bits of the
	// true input are miscounted.
	std::fill(llr.begin(), llr.end(), 0.0);
	dec.accumulate(llr, u, errors);
	for (std::size_t i = 0; i < N; ++i)
		REQUIRE(errors[i] == u[i]);
}

TEST_CASE("profile files round-trip exactly") {
	CodeProfile p;
	p.length = 8;
	p.design = "unit-test";
	p.snr_db = -2.25;
	p.cls = {BitClass::det,  BitClass::frozen, BitClass::frozen, BitClass::info,
	         BitClass::frozen, BitClass::info, BitClass::info,  BitClass::info};
	p.frozen_value = {0, 1, 0, 0, 1, 0, 0, 0};
	p.z_estimate = {0.9, 0.5, 1.0 / 3.0, 1e-17, 0.25, 3.5e-3, 1e-300, 0.0};

	std::ostringstream os;
	write_profile(os, p);
	std::istringstream is(os.str());
	auto q = read_profile(is);
	REQUIRE(q.length == p.length);
	REQUIRE(q.design == p.design);
	REQUIRE(q.snr_db == p.snr_db);
	REQUIRE(q.cls == p.cls);
	REQUIRE(q.z_estimate == p.z_estimate);
	REQUIRE(q.frozen_value[1] == 1);
	REQUIRE(q.frozen_value[4] == 1);
	REQUIRE(q.info_count() == 4);
}

TEST_CASE("malformed profile input is rejected") {
	auto reject = [](const std::string &text) {
		std::istringstream is(text);
		REQUIRE_THROWS_AS(read_profile(is), std::runtime_error);
	};
	reject("");
	reject("wrongmagic v1 N=2 design=x snr_db=0\n0 I - 0.5\n1 F 0 0.5\n");
	reject("polarprofile v1 N=3 design=x snr_db=0\n");
	reject("polarprofile v1 N=2 design=x snr_db=0\n0 I - 0.5\n");          // truncated
	reject("polarprofile v1 N=2 design=x snr_db=0\n0 I - 0.5\n0 F 0 0.5\n"); // duplicate
	reject("polarprofile v1 N=2 design=x snr_db=0\n0 Q - 0.5\n1 F 0 0.5\n"); // bad class
	reject("polarprofile v1 N=2 design=x snr_db=0\n0 I 1 0.5\n1 F 0 0.5\n"); // value on info
	reject("polarprofile v1 N=2 design=x snr_db=0\n0 I - 0.5\n1 F 2 0.5\n"); // bad value
	REQUIRE_THROWS_AS(load_profile("/nonexistent/dir/x.profile"), std::runtime_error);
}

TEST_CASE("profile files survive a disk round trip") {
	RngStream r(3);
	std::vector<double> rel(32);
	for (auto &v : rel)
		v = r.uniform() * 1e-3;
	auto p = select_sets(rel, 20);
	p.length = 32;
	p.design = "disk-check";
	p.snr_db = 4.5;
	std::string path = "polar_test_roundtrip.profile";
	save_profile(path, p);
	auto q = load_profile(path);
	std::remove(path.c_str());
	REQUIRE(q.cls == p.cls);
	REQUIRE(q.z_estimate == p.z_estimate);
	REQUIRE(q.design == p.design);
	REQUIRE(q.snr_db == p.snr_db);
}
