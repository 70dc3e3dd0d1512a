/*
Frame-error-rate runs for the three coding schemes at a common rate 3/4,
each constructing its code on the fly at every grid SNR and recording the
per-code union bound alongside the measured counts:

  - interleaved single code over the receiver-CSI channel (T_c=2, N=512,
    code length 1024),
  - one code per row with shared gains (T_c=2, N=1024),
  - multilevel code on the distribution-only channel (T_c=2, N=512).

    demo_fer [out_dir] [frames]

One CSV per scheme lands in out_dir (default "."). The default 2000
frames per point resolves error rates down to about 1e-3.
*/

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <blockfade/harness.hh>

int main(int argc, char **argv) {
	std::string dir = argc > 1 ? argv[1] : ".";
	long long frames = argc > 2 ? std::atoll(argv[2]) : 2000;
	try {
		blockfade::ExperimentConfig bicm;
		bicm.experiment = "fer-sweep";
		bicm.scheme = "bicm";
		bicm.csi_mode = blockfade::CsiMode::csir;
		bicm.coherent_time = 2;
		bicm.block_length = 512;
		bicm.rate = 0.75;
		bicm.snr_grid_db = {8.0, 9.0, 10.0, 11.0, 12.0};
		bicm.samples = frames;
		bicm.construct_samples = 20000;
		bicm.seed = 7;
		bicm.output_path = dir + "/fer_bicm.csv";
		blockfade::run_experiment(bicm);

		blockfade::ExperimentConfig par = bicm;
		par.scheme = "parallel";
		par.block_length = 1024;
		par.output_path = dir + "/fer_parallel.csv";
		blockfade::run_experiment(par);

		blockfade::ExperimentConfig mlc = bicm;
		mlc.scheme = "mlc";
		mlc.csi_mode = blockfade::CsiMode::cdi;
		mlc.block_length = 512;
		mlc.snr_grid_db = {10.0, 11.0, 12.0, 13.0, 14.0};
		mlc.construct_samples = 5000;
		mlc.output_path = dir + "/fer_mlc.csv";
		blockfade::run_experiment(mlc);
	} catch (const blockfade::IoError &e) {
		std::cerr << "error: " << e.what() << std::endl;
		return 3;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << std::endl;
		return 2;
	}
	return 0;
}
