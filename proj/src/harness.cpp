#include "phasecut/harness.hpp"

#include "phasecut/bcd.hpp"
#include "phasecut/greedy.hpp"
#include "phasecut/pdb.hpp"
#include "phasecut/rng.hpp"
#include "phasecut/structured.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace phasecut {
namespace {

constexpr double kRecoveryThreshold = 1e-4;
constexpr int kStructuredObsCap = 512;  // dense 2n x 2n solves beyond this are not desk scale
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool ends_with_pgm(const std::string& path) {
  if (path.size() < 4) return false;
  std::string tail = path.substr(path.size() - 4);
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tail == ".pgm";
}

Eigen::VectorXcd random_phase_start(const Eigen::VectorXd& b,
                                    std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd y(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double theta = kTwoPi * rng.uniform();
    y[i] = b[i] * std::complex<double>(std::cos(theta), std::sin(theta));
  }
  return y;
}

PhaseVector embed_phase(const PhaseVector& u_small,
                        const SupportSelection* support, int full_size) {
  if (!support) return u_small;
  Eigen::VectorXcd u = Eigen::VectorXcd::Ones(full_size);
  for (int i = 0; i < support->size(); ++i)
    u[support->indices[i]] = u_small.values[i];
  return make_phase_vector(std::move(u));
}

ComplexImage image_from_real_vector(const Eigen::VectorXd& x, int side) {
  Eigen::MatrixXcd values =
      Eigen::Map<const Eigen::MatrixXd>(x.data(), side, side)
          .cast<std::complex<double>>();
  return make_image(std::move(values), false);
}

} // namespace

// splitmix64 finalizer, so mask / noise / init draws never share a stream.
std::uint64_t stream_seed(std::uint64_t seed, int stream) {
  std::uint64_t z =
      seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::vector<std::string>& supported_methods() {
  static const std::vector<std::string> methods = {
      "gs",           "fienup",        "greedy",
      "phasecut-bcd", "phasecut-bcdlr", "phasecut-bcdlr+refine",
      "phasecut-real", "phasecut-real-nonneg", "phasecut-plus"};
  return methods;
}

ComplexImage load_density(const ExperimentConfig& config) {
  if (config.pdb_path.empty()) return synthetic_blob_density(config.side);
  const std::vector<Atom> atoms = parse_pdb_file(config.pdb_path);
  return project_density(atoms, config.side,
                         default_density_sigma(config.side));
}

void validate_config(const ExperimentConfig& config) {
  const auto& methods = supported_methods();
  if (std::find(methods.begin(), methods.end(), config.method) ==
      methods.end())
    throw std::invalid_argument("unknown method: " + config.method);
  if (config.side <= 0) throw std::invalid_argument("side must be positive");
  if (config.masks < 1) throw std::invalid_argument("need at least one mask");
  if (config.filter_res < 1 || config.side % config.filter_res != 0)
    throw std::invalid_argument("filter_res must divide side");
  if (config.osf < 1) throw std::invalid_argument("osf must be >= 1");
  if (config.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  const long grid = static_cast<long>(config.osf) * config.side;
  const long total_obs = static_cast<long>(config.masks) * grid * grid;
  if (config.kept < 0 || config.kept > total_obs)
    throw std::invalid_argument("kept out of range");
  if (config.rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (config.cycles < 0) throw std::invalid_argument("cycles must be >= 0");
  if (config.fienup_iters < 0)
    throw std::invalid_argument("fienup_iters must be >= 0");
  if (!(config.beta > 0.0 && config.beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(config.nu > 0.0 && config.nu < 1.0))
    throw std::invalid_argument("nu must lie in (0, 1)");

  const bool real_method = config.method == "phasecut-real" ||
                           config.method == "phasecut-real-nonneg";
  if (real_method) {
    const long effective = config.kept > 0 ? config.kept : total_obs;
    if (effective > kStructuredObsCap)
      throw std::invalid_argument(
          "structured solver above dense-scale cap: reduce kept or the grid");
  }
  if (config.method == "phasecut-plus") {
    if (config.kept > 0)
      throw std::invalid_argument(
          "phasecut-plus needs the full observation grid (kept must be 0)");
    if (total_obs > kStructuredObsCap)
      throw std::invalid_argument(
          "structured solver above dense-scale cap: reduce the grid");
  }
}

std::pair<ObservationVector, ObservationVector> simulate_observations(
    const MaskedFourierOperator& op, const ComplexImage& x, double alpha,
    std::uint64_t seed) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  const Eigen::VectorXd clean = op.apply_A(x.values).cwiseAbs();
  ObservationVector b_clean =
      make_observations(op.mask_count(), op.side(), op.osf(), clean);
  if (alpha == 0.0) return {b_clean, b_clean};
  Rng rng(seed);
  Eigen::VectorXd noisy(clean.size());
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    const double mean = clean[i] * clean[i] / alpha;
    noisy[i] = std::sqrt(std::max(0.0, alpha * rng.poisson(mean)));
  }
  ObservationVector b_noisy =
      make_observations(op.mask_count(), op.side(), op.osf(), std::move(noisy));
  return {std::move(b_noisy), std::move(b_clean)};
}

ExperimentResult run_pipeline(const ExperimentConfig& config) {
  validate_config(config);

  ExperimentResult result;
  result.ground_truth = load_density(config);

  const MaskSet masks = make_masks(config.masks, config.side,
                                   config.filter_res, stream_seed(config.seed, 1));
  const MaskedFourierOperator op(masks, config.osf);
  auto [b_noisy, b_clean] = simulate_observations(
      op, result.ground_truth, config.alpha, stream_seed(config.seed, 2));
  const Eigen::VectorXd& b = b_noisy.values;

  // Support truncation applies to the coordinate solvers and the real
  // embeddings; GS / Fienup always run on the full observation vector.
  const bool use_support = config.kept > 0 && config.kept < op.n();
  SupportSelection support;
  std::unique_ptr<MatrixAccess> access;
  if (config.method == "greedy" || config.method == "phasecut-bcd" ||
      config.method == "phasecut-bcdlr" ||
      config.method == "phasecut-bcdlr+refine") {
    if (use_support) {
      support = select_support(b, config.kept);
      access = std::make_unique<TruncatedMAccess>(
          make_truncated(op, b, support));
    } else {
      access = std::make_unique<OperatorMAccess>(op, b);
    }
  }
  const SupportSelection* sel = use_support && access ? &support : nullptr;
  Eigen::VectorXd b_eff = b;
  if (sel) {
    b_eff.setZero();
    for (int i : sel->indices) b_eff[i] = b[i];
  }

  BcdOptions bcd_opts;
  bcd_opts.nu = config.nu;
  bcd_opts.cycles = config.cycles;

  ComplexImage xhat;
  const auto t_solve = std::chrono::steady_clock::now();

  if (config.method == "gs" || config.method == "fienup") {
    const Eigen::VectorXcd y0 = random_phase_start(b, stream_seed(config.seed, 3));
    GreedyResult gr =
        config.method == "gs"
            ? gerchberg_saxton(op, b, y0, config.fienup_iters)
            : fienup(op, b, y0, config.beta, config.fienup_iters);
    result.solver_objective = gr.trace.objective;
    xhat = make_image(op.apply_A_dagger(gr.y));
    result.time_sdp_s = seconds_since(t_solve);
  } else if (config.method == "phasecut-real" ||
             config.method == "phasecut-real-nonneg") {
    std::vector<int> rows;
    const std::vector<int>* row_ptr = nullptr;
    Eigen::VectorXd b_rows = b;
    if (use_support) {
      support = select_support(b, config.kept);
      rows = support.indices;
      row_ptr = &rows;
      b_rows.resize(support.size());
      for (int i = 0; i < support.size(); ++i)
        b_rows[i] = b[support.indices[i]];
    }
    const Eigen::MatrixXcd a = build_dense_A(op, row_ptr);
    const RealEmbedding emb = build_real_embedding(a, b_rows);
    const RealSolveResult rs = config.method == "phasecut-real"
                                   ? solve_phasecut_real(emb)
                                   : solve_phasecut_real_nonneg(emb);
    result.solver_objective = {rs.objective};
    xhat = image_from_real_vector(rs.x, config.side);
    result.time_sdp_s = seconds_since(t_solve);
  } else if (config.method == "phasecut-plus") {
    const Eigen::MatrixXcd m = op.materialize_dense(b);
    const PlusSolveResult ps =
        solve_phasecut_plus(m, b, separable_toeplitz_slices(op));
    result.solver_objective = {ps.objective};
    xhat = reconstruct_signal(op, b, normalize_phases(ps.u));
    result.time_sdp_s = seconds_since(t_solve);
  } else {
    // Coordinate solvers over (possibly truncated) M.
    PhaseVector u_small;
    if (config.method == "greedy") {
      GreedyPhaseResult gp = greedy_phase(
          *access,
          make_phase_vector(Eigen::VectorXcd::Ones(access->size())),
          config.cycles);
      u_small = std::move(gp.u);
      result.solver_objective = gp.trace.objective;
    } else if (config.method == "phasecut-bcd") {
      FullLift full = bcd_full(*access, bcd_opts);
      u_small = extract_phase(full.u_matrix);
      result.solver_objective = full.trace.objective;
    } else {
      LowRankLift lr = bcd_lowrank(*access, bcd_opts, config.rank);
      u_small = extract_phase_factor(lr.factor);
      result.solver_objective = lr.trace.objective;
      result.eig_ratio = lr.eig_ratio;
    }
    result.time_sdp_s = seconds_since(t_solve);

    const auto t_refine = std::chrono::steady_clock::now();
    if (config.method == "phasecut-bcdlr+refine") {
      GreedyPhaseResult gp = greedy_phase(*access, u_small, 5);
      u_small = std::move(gp.u);
      result.refine_objective = gp.trace.objective;
      const PhaseVector u_full = embed_phase(u_small, sel, op.n());
      const Eigen::VectorXcd y0 =
          b.cast<std::complex<double>>().cwiseProduct(u_full.values);
      GreedyResult fr = fienup(op, b, y0, config.beta, config.fienup_iters);
      result.refine_objective.insert(result.refine_objective.end(),
                                     fr.trace.objective.begin(),
                                     fr.trace.objective.end());
      xhat = make_image(op.apply_A_dagger(fr.y));
      result.time_refine_s = seconds_since(t_refine);
    } else {
      PhaseVector u_full = embed_phase(u_small, sel, op.n());
      xhat = reconstruct_signal(op, b_eff, u_full);
    }
  }

  // Metrics on the full clean observations, plus the final phase objective.
  const Eigen::VectorXcd ax = op.apply_A(xhat.values);
  const double clean_norm2 = b_clean.values.squaredNorm();
  result.obs_mse =
      (ax.cwiseAbs() - b_clean.values).squaredNorm() / clean_norm2;
  result.recovered = result.obs_mse < kRecoveryThreshold;
  result.img_residual = align_global_phase(xhat, result.ground_truth).second;
  const PhaseVector u_final = normalize_phases(ax);
  const Eigen::VectorXcd y_final =
      b.cast<std::complex<double>>().cwiseProduct(u_final.values);
  const Eigen::VectorXcd range_resid =
      y_final - op.apply_A(op.apply_A_dagger(y_final));
  result.obj_final = range_resid.squaredNorm() / b.squaredNorm();
  result.reconstruction = std::move(xhat);
  return result;
}

std::string sweep(const SweepSpec& spec) {
  std::ostringstream csv;
  csv << "seed,masks,filter_res,osf,alpha,kept,method,obs_mse,img_residual,"
         "recovered,obj_final,time_sdp_s,time_refine_s,eig_ratio\n";

  for (int masks : spec.masks_grid)
    for (int res : spec.res_grid)
      for (double alpha : spec.alpha_grid)
        for (int osf : spec.osf_grid) {
          double sum_mse = 0.0, sum_resid = 0.0, sum_obj = 0.0,
                 sum_eig = 0.0, sum_tsdp = 0.0, sum_tref = 0.0;
          int recovered_count = 0;
          for (std::uint64_t seed : spec.seeds) {
            ExperimentConfig cfg = spec.base;
            cfg.masks = masks;
            cfg.filter_res = res;
            cfg.alpha = alpha;
            cfg.osf = osf;
            cfg.seed = seed;
            ExperimentResult r = run_pipeline(cfg);
            const double tsdp = spec.include_timings ? r.time_sdp_s : 0.0;
            const double tref = spec.include_timings ? r.time_refine_s : 0.0;
            csv << seed << ',' << masks << ',' << res << ',' << osf << ','
                << format_double(alpha) << ',' << cfg.kept << ','
                << cfg.method << ',' << format_double(r.obs_mse) << ','
                << format_double(r.img_residual) << ','
                << (r.recovered ? 1 : 0) << ','
                << format_double(r.obj_final) << ',' << format_double(tsdp)
                << ',' << format_double(tref) << ','
                << format_double(r.eig_ratio) << '\n';
            sum_mse += r.obs_mse;
            sum_resid += r.img_residual;
            sum_obj += r.obj_final;
            sum_eig += r.eig_ratio;
            sum_tsdp += tsdp;
            sum_tref += tref;
            recovered_count += r.recovered ? 1 : 0;
          }
          const double count = static_cast<double>(spec.seeds.size());
          csv << -1 << ',' << masks << ',' << res << ',' << osf << ','
              << format_double(alpha) << ',' << spec.base.kept << ','
              << spec.base.method << ',' << format_double(sum_mse / count)
              << ',' << format_double(sum_resid / count) << ','
              << format_double(recovered_count / count) << ','
              << format_double(sum_obj / count) << ','
              << format_double(sum_tsdp / count) << ','
              << format_double(sum_tref / count) << ','
              << format_double(sum_eig / count) << '\n';
        }
  return csv.str();
}

void write_image(const ComplexImage& x, const std::string& path) {
  const int side = x.side();
  if (ends_with_pgm(path)) {
    const Eigen::MatrixXd mag = x.values.cwiseAbs();
    const double maxv = mag.maxCoeff();
    const double scale = maxv > 0.0 ? maxv / 65535.0 : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "P5\n# scale " << format_double(scale)
        << " (magnitude = pixel * scale)\n"
        << side << ' ' << side << "\n65535\n";
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) {
        const double v = scale > 0.0 ? mag(r, c) / scale : 0.0;
        const unsigned q = static_cast<unsigned>(
            std::min(65535.0, std::max(0.0, std::round(v))));
        const unsigned char bytes[2] = {
            static_cast<unsigned char>(q >> 8),
            static_cast<unsigned char>(q & 0xff)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
      }
    if (!out) throw std::runtime_error("write failed: " + path);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "N,OSF\n" << side << ",1\n";
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c) out << ',';
      out << format_double(x.values(r, c).real()) << ','
          << format_double(x.values(r, c).imag());
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ComplexImage read_image(const std::string& path) {
  if (ends_with_pgm(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + path);
    double scale = 1.0 / 65535.0;
    auto next_token = [&]() {
      std::string tok;
      while (in >> tok) {
        if (tok[0] != '#') return tok;
        std::string rest;
        if (tok == "#") {
          in >> rest;
          if (rest == "scale") in >> scale;
        }
        std::string line;
        std::getline(in, line);
      }
      throw std::runtime_error("truncated PGM header: " + path);
    };
    const int width = std::stoi(next_token());
    const int height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (width != height || maxval != 65535)
      throw std::runtime_error("unsupported PGM geometry: " + path);
    in.get(); // single whitespace after maxval
    Eigen::MatrixXcd values(height, width);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        unsigned char bytes[2];
        if (!in.read(reinterpret_cast<char*>(bytes), 2))
          throw std::runtime_error("truncated PGM data: " + path);
        const unsigned q = (static_cast<unsigned>(bytes[0]) << 8) | bytes[1];
        values(r, c) = q * scale;
      }
    return make_image(std::move(values), true);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "N,OSF") throw std::runtime_error("bad image header: " + path);
  std::string dims;
  std::getline(in, dims);
  int side = 0, osf = 0;
  if (std::sscanf(dims.c_str(), "%d,%d", &side, &osf) != 2 || side <= 0)
    throw std::runtime_error("bad image dimensions: " + path);
  Eigen::MatrixXcd values(side, side);
  std::string line;
  for (int r = 0; r < side; ++r) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated image data: " + path);
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < side; ++c) {
      double re = 0.0, im = 0.0;
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("short image row: " + path);
      re = std::stod(cell);
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("short image row: " + path);
      im = std::stod(cell);
      values(r, c) = {re, im};
    }
  }
  return make_image(std::move(values), false);
}

} // namespace phasecut
