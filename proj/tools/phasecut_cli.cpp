#include "phasecut/harness.hpp"
#include "phasecut/pdb.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

void add_config_flags(CLI::App* cmd, phasecut::ExperimentConfig& cfg) {
  cmd->add_option("--pdb", cfg.pdb_path, "PDB file (default: builtin blobs)");
  cmd->add_option("--n", cfg.side, "image side length");
  cmd->add_option("--masks", cfg.masks, "number of masks");
  cmd->add_option("--filter-res", cfg.filter_res, "mask block size");
  cmd->add_option("--osf", cfg.osf, "Fourier oversampling factor");
  cmd->add_option("--alpha", cfg.alpha, "Poisson noise level (0 = none)");
  cmd->add_option("--kept", cfg.kept, "largest observations kept (0 = all)");
  cmd->add_option("--method", cfg.method, "solver method");
  cmd->add_option("--nu", cfg.nu, "BCD regularization");
  cmd->add_option("--cycles", cfg.cycles, "solver cycles");
  cmd->add_option("--rank", cfg.rank, "low-rank factor width");
  cmd->add_option("--fienup-iters", cfg.fienup_iters, "Fienup iterations");
  cmd->add_option("--beta", cfg.beta, "Fienup relaxation in (0,1]");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.out_path, "output path");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

std::string result_csv(const phasecut::ExperimentConfig& cfg,
                       const phasecut::ExperimentResult& r) {
  std::ostringstream row;
  row.precision(17);
  row << "seed,masks,filter_res,osf,alpha,kept,method,obs_mse,img_residual,"
         "recovered,obj_final,time_sdp_s,time_refine_s,eig_ratio\n"
      << cfg.seed << ',' << cfg.masks << ',' << cfg.filter_res << ','
      << cfg.osf << ',' << cfg.alpha << ',' << cfg.kept << ',' << cfg.method
      << ',' << r.obs_mse << ',' << r.img_residual << ','
      << (r.recovered ? 1 : 0) << ',' << r.obj_final << ',' << r.time_sdp_s
      << ',' << r.time_refine_s << ',' << r.eig_ratio << '\n';
  return row.str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval for coded-diffraction imaging"};
  app.require_subcommand(1);

  phasecut::ExperimentConfig cfg;
  std::vector<int> masks_grid, res_grid, osf_grid;
  std::vector<double> alpha_grid;
  std::vector<std::uint64_t> seeds;
  bool timings = false;

  CLI::App* density = app.add_subcommand("density", "rasterize a molecule");
  add_config_flags(density, cfg);

  CLI::App* simulate =
      app.add_subcommand("simulate", "emit observations and ground truth");
  add_config_flags(simulate, cfg);

  CLI::App* solve = app.add_subcommand("solve", "run one reconstruction");
  add_config_flags(solve, cfg);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a benchmark grid");
  add_config_flags(sweep_cmd, cfg);
  sweep_cmd->add_option("--masks-grid", masks_grid, "mask counts")
      ->delimiter(',');
  sweep_cmd->add_option("--res-grid", res_grid, "mask resolutions")
      ->delimiter(',');
  sweep_cmd->add_option("--alpha-grid", alpha_grid, "noise levels")
      ->delimiter(',');
  sweep_cmd->add_option("--osf-grid", osf_grid, "oversampling factors")
      ->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds, "seed list")->delimiter(',');
  sweep_cmd->add_flag("--timings", timings,
                      "record wall times (breaks CSV byte determinism)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (density->parsed()) {
      const phasecut::ComplexImage img = phasecut::load_density(cfg);
      if (cfg.out_path.empty())
        throw std::runtime_error("density requires --out");
      phasecut::write_image(img, cfg.out_path);
    } else if (simulate->parsed()) {
      phasecut::validate_config(cfg);
      const phasecut::ComplexImage x = phasecut::load_density(cfg);
      const phasecut::MaskSet masks =
          phasecut::make_masks(cfg.masks, cfg.side, cfg.filter_res,
                               phasecut::stream_seed(cfg.seed, 1));
      const phasecut::MaskedFourierOperator op(masks, cfg.osf);
      const auto [b_noisy, b_clean] = phasecut::simulate_observations(
          op, x, cfg.alpha, phasecut::stream_seed(cfg.seed, 2));
      std::ostringstream text;
      text.precision(17);
      text << "b_noisy,b_clean\n";
      for (int i = 0; i < b_noisy.size(); ++i)
        text << b_noisy.values[i] << ',' << b_clean.values[i] << '\n';
      if (cfg.out_path.empty()) {
        std::cout << text.str();
      } else {
        emit(text.str(), cfg.out_path);
        phasecut::write_image(x, cfg.out_path + ".truth.csv");
      }
    } else if (solve->parsed()) {
      const phasecut::ExperimentResult r = phasecut::run_pipeline(cfg);
      std::cout << result_csv(cfg, r);
      if (!cfg.out_path.empty())
        phasecut::write_image(r.reconstruction, cfg.out_path);
    } else if (sweep_cmd->parsed()) {
      phasecut::SweepSpec spec;
      spec.base = cfg;
      if (!masks_grid.empty()) spec.masks_grid = masks_grid;
      if (!res_grid.empty()) spec.res_grid = res_grid;
      if (!alpha_grid.empty()) spec.alpha_grid = alpha_grid;
      if (!osf_grid.empty()) spec.osf_grid = osf_grid;
      if (!seeds.empty()) spec.seeds = seeds;
      spec.include_timings = timings;
      emit(phasecut::sweep(spec), cfg.out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
