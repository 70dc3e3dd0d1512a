// Command-line front end: subcommands select the experiment, every
// configuration key is available both as a --flag and as a key=value line
// in a --config file (flags win). Data goes to --output_path ("-" =
// stdout), progress to stderr. Exit codes: 0 success, 2 configuration
// error, 3 I/O error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <blockfade/harness.hh>

int main(int argc, char **argv) {
	using namespace blockfade;

	CLI::App app{"polar-coded transmission over block Rayleigh fading channels"};
	app.set_version_flag("--version", std::string("blockfade ") + tool_version);
	app.set_config("--config", "", "flat key=value configuration file");
	app.require_subcommand(1);

	ExperimentConfig cfg;
	std::string csi = "cdi";
	std::string experiment_key; // accepted from config files, subcommand wins

	app.add_option("--experiment", experiment_key,
	               "experiment name (normally chosen by the subcommand)");
	app.add_option("--T_c", cfg.coherent_time, "coherence time (symbols per fading block)");
	app.add_option("--N", cfg.block_length, "fading blocks per frame (power of two)");
	app.add_option("--snr_grid_db", cfg.snr_grid_db, "SNR grid in dB, increasing")
		->delimiter(',');
	app.add_option("--rate", cfg.rate, "code rate in bits per channel use");
	app.add_option("--samples", cfg.samples, "Monte Carlo samples (frames for fer-sweep)");
	app.add_option("--seed", cfg.seed, "base RNG seed");
	app.add_option("--csi_mode", csi, "cdi | csir | full");
	app.add_option("--quadrature_nodes", cfg.quadrature_nodes,
	               "nodes for the fading-gain quadrature");
	app.add_option("--output_path", cfg.output_path, "output file, - for stdout");
	app.add_option("--scheme", cfg.scheme, "mlc | parallel | bicm");
	app.add_option("--profile", cfg.profile_path,
	               "existing code profile path (else construct on the fly)");
	app.add_option("--construct_samples", cfg.construct_samples,
	               "genie trials per constructed code");
	app.add_flag("--noiseless", cfg.noiseless, "disable channel noise (pipeline check)");
	app.add_option("--interleaver_seed", cfg.interleaver_seed,
	               "seed of the frame interleaver permutation");

	struct Sub {
		const char *name;
		const char *experiment;
		const char *help;
	};
	const Sub subs[] = {
		{"rates", "rate-curves", "achievable-rate curves over the SNR grid"},
		{"subrates", "subchannel-rates", "per-sub-channel rates plus references"},
		{"construct", "construct", "build code profiles and write profile files"},
		{"fer", "fer-sweep", "frame/bit error rates over the SNR grid"},
		{"bound-check", "bound-check", "FER run with union-bound verdicts"},
	};
	for (const Sub &s : subs)
		app.add_subcommand(s.name, s.help)->fallthrough();

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForVersion &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return 2;
	}

	for (const Sub &s : subs)
		if (app.got_subcommand(s.name))
			cfg.experiment = s.experiment;

	int rc = 0;
	try {
		cfg.csi_mode = parse_csi_mode(csi);
		run_experiment(cfg);
	} catch (const IoError &e) {
		std::cerr << "i/o error: " << e.what() << std::endl;
		rc = 3;
	} catch (const std::invalid_argument &e) {
		std::cerr << "config error: " << e.what() << std::endl;
		rc = 2;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << std::endl;
		rc = 1;
	}
	return rc;
}
