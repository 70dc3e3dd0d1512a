/*
Experiment orchestration: validated configuration, reproducible stream
assignment, CSV output. Every CSV starts with a comment line carrying the
tool version, a hash of the effective configuration, and the seed; given
the same (config, seed) an experiment writes byte-identical output for any
worker count.

Stream layout (base = RngStream(seed)): experiments assign one sub-stream
per (grid point, estimator) so adding points never shifts existing ones.

Data goes to the output file (or stdout for path "-"); progress goes to
stderr.
*/

#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "construct.hh"
#include "fading.hh"
#include "mi.hh"
#include "parallel.hh"
#include "polar.hh"
#include "schemes.hh"

namespace blockfade {

inline constexpr const char *tool_version = "1.0.0";

// File-level failures (unwritable output, missing profile). The CLI maps
// these to exit code 3; configuration errors (std::invalid_argument) map
// to exit code 2.
struct IoError : std::runtime_error {
	explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
	std::string experiment; // rate-curves | subchannel-rates | construct | fer-sweep | bound-check
	int coherent_time = 1;
	std::size_t block_length = 1024;
	std::vector<double> snr_grid_db{0.0};
	double rate = 0.5;
	long long samples = default_mi_samples;
	std::uint64_t seed = 1;
	CsiMode csi_mode = CsiMode::cdi;
	int quadrature_nodes = default_quadrature_nodes;
	std::string output_path = "-";
	std::string scheme = "bicm"; // fer-sweep / bound-check: mlc | parallel | bicm
	std::string profile_path;    // empty = construct on the fly
	long long construct_samples = default_construction_samples;
	bool noiseless = false;
	std::uint64_t interleaver_seed = 1;

	void validate() const {
		static const char *experiments[] = {"rate-curves", "subchannel-rates",
		                                    "construct", "fer-sweep", "bound-check"};
		bool known = false;
		for (const char *e : experiments)
			known = known || experiment == e;
		if (!known)
			throw std::invalid_argument("unknown experiment '" + experiment + "'");
		if (coherent_time < 1 || coherent_time > max_coherent_time)
			throw std::invalid_argument("T_c must be in [1,16]");
		if (!is_power_of_two(block_length))
			throw std::invalid_argument("N must be a power of two");
		if (snr_grid_db.empty())
			throw std::invalid_argument("snr_grid_db must not be empty");
		for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
			if (!(snr_grid_db[i] > snr_grid_db[i - 1]))
				throw std::invalid_argument("snr_grid_db must be strictly increasing");
		if (samples <= 0)
			throw std::invalid_argument("samples must be positive");
		if (rate < 0.0 || rate > 1.0)
			throw std::invalid_argument("rate outside [0,1]");
		if (quadrature_nodes < 4 || quadrature_nodes > SubchannelEngine::max_nodes)
			throw std::invalid_argument("quadrature_nodes outside [4,256]");
		if (scheme != "mlc" && scheme != "parallel" && scheme != "bicm")
			throw std::invalid_argument("scheme must be mlc, parallel, or bicm");
		if (construct_samples < 100)
			throw std::invalid_argument("construct_samples must be at least 100");
	}
};

inline std::string csv_num(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.12g", v);
	return buf;
}

// FNV-1a over the canonical key=value serialization (output path excluded:
// the same experiment written elsewhere is still the same experiment).
inline std::string config_hash(const ExperimentConfig &cfg) {
	std::ostringstream s;
	s << "experiment=" << cfg.experiment << '\n'
	  << "T_c=" << cfg.coherent_time << '\n'
	  << "N=" << cfg.block_length << '\n';
	s << "snr_grid_db=";
	for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
		s << (i ? "," : "") << csv_num(cfg.snr_grid_db[i]);
	s << '\n';
	s << "rate=" << csv_num(cfg.rate) << '\n'
	  << "samples=" << cfg.samples << '\n'
	  << "seed=" << cfg.seed << '\n'
	  << "csi_mode=" << csi_mode_name(cfg.csi_mode) << '\n'
	  << "quadrature_nodes=" << cfg.quadrature_nodes << '\n'
	  << "scheme=" << cfg.scheme << '\n'
	  << "profile=" << cfg.profile_path << '\n'
	  << "construct_samples=" << cfg.construct_samples << '\n'
	  << "noiseless=" << (cfg.noiseless ? 1 : 0) << '\n'
	  << "interleaver_seed=" << cfg.interleaver_seed << '\n';
	std::string text = s.str();
	std::uint64_t h = 1469598103934665603ull;
	for (unsigned char c : text) {
		h ^= c;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
	return buf;
}

// Output sink: a file path, or stdout for "-".
class OutputFile {
public:
	explicit OutputFile(const std::string &path) : path_(path) {
		if (path == "-") {
			out_ = &std::cout;
			return;
		}
		file_.open(path, std::ios::binary | std::ios::trunc);
		if (!file_)
			throw IoError("cannot open output file: " + path);
		out_ = &file_;
	}
	std::ostream &stream() { return *out_; }
	void finish() {
		out_->flush();
		if (out_ == &file_ && !file_)
			throw IoError("write failed: " + path_);
	}

private:
	std::string path_;
	std::ofstream file_;
	std::ostream *out_ = nullptr;
};

inline void write_csv_header(std::ostream &out, const ExperimentConfig &cfg,
                             const char *columns) {
	out << "# blockfade " << tool_version << " config_hash=" << config_hash(cfg)
	    << " seed=" << cfg.seed << '\n'
	    << columns << '\n';
}

inline void write_mi_row(std::ostream &out, const MiEstimate &e, std::uint64_t seed) {
	out << e.kind << ',' << e.coherent_time << ',' << csv_num(e.snr_db) << ','
	    << csv_num(e.value_bits) << ',' << csv_num(e.ci95_halfwidth) << ','
	    << e.samples << ',' << seed << '\n';
}

inline void progress(const std::string &msg) { std::cerr << msg << std::endl; }

// ---- rate curves -----------------------------------------------------------

inline void run_rate_curves(const ExperimentConfig &cfg) {
	cfg.validate();
	OutputFile out(cfg.output_path);
	write_csv_header(out.stream(), cfg, "kind,T_c,snr_db,value_bits,ci95,samples,seed");
	RngStream base(cfg.seed);
	for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
		double snr = cfg.snr_grid_db[s];
		FadingSpec cdi = spec_for_snr_db(snr, cfg.coherent_time, CsiMode::cdi);
		MiEstimate aw = mi_biawgn(cdi.noise_sigma);
		aw.snr_db = snr;
		MiEstimate cs = mi_csir(cdi, cfg.samples, base.sub(4 * s));
		cs.coherent_time = cfg.coherent_time;
		cs.snr_db = snr;
		MiEstimate cd = mi_cdi_per_symbol(cdi, cfg.samples, base.sub(4 * s + 1),
		                                  cfg.quadrature_nodes);
		cd.snr_db = snr;
		write_mi_row(out.stream(), aw, cfg.seed);
		write_mi_row(out.stream(), cs, cfg.seed);
		write_mi_row(out.stream(), cd, cfg.seed);
		progress("rates: " + csv_num(snr) + " dB done (" + std::to_string(s + 1) + "/" +
		         std::to_string(cfg.snr_grid_db.size()) + ")");
	}
	out.finish();
}

// ---- sub-channel rates -----------------------------------------------------

inline void run_subchannel_rates(const ExperimentConfig &cfg) {
	cfg.validate();
	OutputFile out(cfg.output_path);
	write_csv_header(out.stream(), cfg, "kind,T_c,snr_db,value_bits,ci95,samples,seed");
	RngStream base(cfg.seed);
	for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
		double snr = cfg.snr_grid_db[s];
		FadingSpec cdi = spec_for_snr_db(snr, cfg.coherent_time, CsiMode::cdi);
		SubchannelProfile p =
			mi_cdi_profile(cdi, cfg.samples, base.sub(4 * s), cfg.quadrature_nodes);
		for (int j = 1; j <= cfg.coherent_time; ++j) {
			MiEstimate e;
			e.value_bits = p.sub[j - 1];
			e.ci95_halfwidth = p.sub_ci95[j - 1];
			e.samples = p.samples;
			e.kind = subchannel_kind(j);
			e.snr_db = snr;
			e.coherent_time = cfg.coherent_time;
			write_mi_row(out.stream(), e, cfg.seed);
		}
		MiEstimate avg;
		avg.value_bits = p.per_symbol;
		avg.ci95_halfwidth = p.per_symbol_ci95;
		avg.samples = p.samples;
		avg.kind = "cdi-per-symbol";
		avg.snr_db = snr;
		avg.coherent_time = cfg.coherent_time;
		write_mi_row(out.stream(), avg, cfg.seed);
		MiEstimate cs = mi_csir(cdi, cfg.samples, base.sub(4 * s + 1));
		cs.coherent_time = cfg.coherent_time;
		cs.snr_db = snr;
		write_mi_row(out.stream(), cs, cfg.seed);
		progress("subrates: " + csv_num(snr) + " dB done (" + std::to_string(s + 1) +
		         "/" + std::to_string(cfg.snr_grid_db.size()) + ")");
	}
	out.finish();
}

// ---- construction ----------------------------------------------------------

inline std::string profile_stem(const std::string &path) {
	const std::string suffix = ".profile";
	if (path.size() > suffix.size() &&
	    path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
		return path.substr(0, path.size() - suffix.size());
	return path;
}

inline std::string level_profile_path(const std::string &base, int level) {
	return profile_stem(base) + ".level" + std::to_string(level) + ".profile";
}

inline std::string single_profile_path(const std::string &base) {
	return profile_stem(base) + ".profile";
}

namespace detail {

inline void save_profile_io(const std::string &path, const CodeProfile &p) {
	try {
		save_profile(path, p);
	} catch (const std::runtime_error &e) {
		throw IoError(e.what());
	}
}

inline CodeProfile load_profile_io(const std::string &path) {
	try {
		return load_profile(path);
	} catch (const std::invalid_argument &) {
		throw;
	} catch (const std::runtime_error &e) {
		throw IoError(e.what());
	}
}

} // namespace detail

// Builds codes at the first grid SNR and writes profile files. CDI mode
// builds the T_c multilevel codes (one file per level); CSI-R/full builds a
// single code on the merged i.i.d. channel — length T_c*N for the
// interleaved scheme, length N per row for the parallel scheme.
inline void run_construct(const ExperimentConfig &cfg) {
	cfg.validate();
	if (cfg.output_path == "-")
		throw std::invalid_argument("construct needs an output path for profile files");
	double snr = cfg.snr_grid_db.front();
	RngStream base(cfg.seed);
	if (cfg.csi_mode == CsiMode::cdi) {
		FadingSpec spec = spec_for_snr_db(snr, cfg.coherent_time, CsiMode::cdi);
		std::vector<CodeProfile> levels = construct_mlc(
			spec, cfg.block_length, cfg.rate, cfg.construct_samples, base.sub(0),
			cfg.quadrature_nodes, cfg.samples);
		for (int j = 1; j <= cfg.coherent_time; ++j) {
			std::string path = level_profile_path(cfg.output_path, j);
			detail::save_profile_io(path, levels[std::size_t(j - 1)]);
			progress("construct: wrote " + path);
		}
	} else {
		FadingSpec spec = spec_for_snr_db(snr, cfg.coherent_time, cfg.csi_mode);
		std::size_t length = cfg.scheme == "parallel"
		                         ? cfg.block_length
		                         : cfg.block_length * std::size_t(cfg.coherent_time);
		CodeProfile p = construct_bicm(spec, length, cfg.rate, cfg.construct_samples,
		                               base.sub(0), cfg.scheme);
		std::string path = single_profile_path(cfg.output_path);
		detail::save_profile_io(path, p);
		progress("construct: wrote " + path);
	}
}

// ---- frame error sweeps ----------------------------------------------------

struct FerPoint {
	std::string scheme;
	int coherent_time = 1;
	std::size_t block_length = 0;
	double rate = 0.0;
	double snr_db = 0.0;
	FerCount count;
	double union_bound = 0.0;
};

inline void write_fer_row(std::ostream &out, const FerPoint &p, std::uint64_t seed) {
	out << p.scheme << ',' << p.coherent_time << ',' << p.block_length << ','
	    << csv_num(p.rate) << ',' << csv_num(p.snr_db) << ',' << p.count.frames << ','
	    << p.count.frame_errors << ',' << p.count.bit_errors << ','
	    << csv_num(p.union_bound) << ',' << seed << '\n';
}

// One FER measurement at one SNR: construct (or load) the code, run the
// frames in deterministic batches.
inline FerPoint fer_point(const ExperimentConfig &cfg, double snr_db,
                          RngStream construct_stream, RngStream frame_stream) {
	FerPoint pt;
	pt.scheme = cfg.scheme;
	pt.coherent_time = cfg.coherent_time;
	pt.block_length = cfg.block_length;
	pt.snr_db = snr_db;
	long long frames = cfg.samples;
	if (cfg.scheme == "mlc") {
		FadingSpec spec = spec_for_snr_db(snr_db, cfg.coherent_time, CsiMode::cdi);
		std::vector<CodeProfile> levels;
		if (!cfg.profile_path.empty()) {
			for (int j = 1; j <= cfg.coherent_time; ++j)
				levels.push_back(detail::load_profile_io(
					level_profile_path(cfg.profile_path, j)));
			for (const auto &p : levels)
				if (p.length != cfg.block_length)
					throw std::invalid_argument("profile length does not match N");
		} else {
			levels = construct_mlc(spec, cfg.block_length, cfg.rate,
			                       cfg.construct_samples, construct_stream,
			                       cfg.quadrature_nodes, default_mi_samples);
		}
		double k = 0.0;
		for (const auto &p : levels) {
			k += double(p.info_count());
			pt.union_bound += p.union_bound();
		}
		pt.rate = k / double(cfg.coherent_time * cfg.block_length);
		QuadratureRule quad =
			make_rayleigh_rule(spec.rayleigh_sigma_h, cfg.quadrature_nodes);
		pt.count = merge_batches<FerCount>(
			frames, default_frame_batch, [&](long long n, std::size_t b) {
				return measure_mlc_fer(spec, levels, quad, n, frame_stream.sub(b),
				                       false, cfg.noiseless);
			});
		return pt;
	}
	CsiMode mode = cfg.csi_mode == CsiMode::cdi ? CsiMode::csir : cfg.csi_mode;
	FadingSpec spec = spec_for_snr_db(snr_db, cfg.coherent_time, mode);
	std::size_t length = cfg.scheme == "parallel"
	                         ? cfg.block_length
	                         : cfg.block_length * std::size_t(cfg.coherent_time);
	CodeProfile profile;
	if (!cfg.profile_path.empty()) {
		profile = detail::load_profile_io(single_profile_path(cfg.profile_path));
		if (profile.length != length)
			throw std::invalid_argument("profile length does not match scheme geometry");
	} else {
		profile = construct_bicm(spec, length, cfg.rate, cfg.construct_samples,
		                         construct_stream, cfg.scheme);
	}
	pt.union_bound = profile.union_bound();
	if (cfg.scheme == "parallel") {
		pt.union_bound *= double(cfg.coherent_time); // one code per row
		pt.rate = profile.rate();
		pt.count = merge_batches<FerCount>(
			frames, default_frame_batch, [&](long long n, std::size_t b) {
				return measure_parallel_fer(spec, profile, n, frame_stream.sub(b),
				                            cfg.noiseless);
			});
	} else {
		pt.rate = profile.rate();
		InterleaverSpec il = make_interleaver(length, cfg.interleaver_seed);
		pt.count = merge_batches<FerCount>(
			frames, default_frame_batch, [&](long long n, std::size_t b) {
				return measure_bicm_fer(spec, profile, il, n, frame_stream.sub(b),
				                        cfg.noiseless);
			});
	}
	return pt;
}

inline void run_fer_sweep(const ExperimentConfig &cfg) {
	cfg.validate();
	OutputFile out(cfg.output_path);
	write_csv_header(out.stream(), cfg,
	                 "scheme,T_c,N,rate,snr_db,frames,frame_errors,bit_errors,"
	                 "union_bound,seed");
	RngStream base(cfg.seed);
	for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
		FerPoint pt =
			fer_point(cfg, cfg.snr_grid_db[s], base.sub(4 * s), base.sub(4 * s + 1));
		write_fer_row(out.stream(), pt, cfg.seed);
		progress("fer: " + csv_num(cfg.snr_grid_db[s]) + " dB: " +
		         std::to_string(pt.count.frame_errors) + "/" +
		         std::to_string(pt.count.frames) + " frame errors");
	}
	out.finish();
}

// Same measurement as the FER sweep, with the union-bound verdict spelled
// out on stderr for each point.
inline void run_bound_check(const ExperimentConfig &cfg) {
	cfg.validate();
	OutputFile out(cfg.output_path);
	write_csv_header(out.stream(), cfg,
	                 "scheme,T_c,N,rate,snr_db,frames,frame_errors,bit_errors,"
	                 "union_bound,seed");
	RngStream base(cfg.seed);
	for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
		FerPoint pt =
			fer_point(cfg, cfg.snr_grid_db[s], base.sub(4 * s), base.sub(4 * s + 1));
		write_fer_row(out.stream(), pt, cfg.seed);
		double fer = pt.count.fer();
		double se = std::sqrt(fer * (1.0 - fer) / double(pt.count.frames > 0 ? pt.count.frames : 1));
		bool ok = fer <= pt.union_bound + 3.0 * se;
		progress("bound-check: " + csv_num(pt.snr_db) + " dB: fer=" + csv_num(fer) +
		         " bound=" + csv_num(pt.union_bound) + " 3se=" + csv_num(3.0 * se) +
		         (ok ? " -> consistent" : " -> VIOLATION"));
	}
	out.finish();
}

inline void run_experiment(const ExperimentConfig &cfg) {
	cfg.validate();
	if (cfg.experiment == "rate-curves")
		run_rate_curves(cfg);
	else if (cfg.experiment == "subchannel-rates")
		run_subchannel_rates(cfg);
	else if (cfg.experiment == "construct")
		run_construct(cfg);
	else if (cfg.experiment == "fer-sweep")
		run_fer_sweep(cfg);
	else
		run_bound_check(cfg);
}

} // namespace blockfade
