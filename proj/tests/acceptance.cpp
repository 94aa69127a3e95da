// Acceptance gate: one check per shipped claim, each printing a single
// PASS/FAIL line. Exit status is the number of failed criteria.

#include "phasecut/bcd.hpp"
#include "phasecut/greedy.hpp"
#include "phasecut/harness.hpp"
#include "phasecut/operator.hpp"
#include "phasecut/pdb.hpp"
#include "phasecut/reference.hpp"
#include "phasecut/structured.hpp"

#include "sdp_reference.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace phasecut;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s: %2d %-38s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ExperimentConfig blob16_config(const std::string& method) {
  ExperimentConfig cfg;
  cfg.side = 16;
  cfg.filter_res = 1;
  cfg.osf = 2;
  cfg.method = method;
  cfg.kept = 1024;  // dominant observations, as in the large-grid benchmark
  cfg.cycles = 20;
  cfg.rank = 2;
  cfg.fienup_iters = 3000;
  return cfg;
}

// --- criterion 1 & 2: operator oracle and M properties ----------------------

void criteria_operator() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  double worst_herm = 0.0;
  double worst_eig = 0.0;
  Rng rng(424242);
  for (int side : {2, 4})
    for (int k : {1, 2, 3})
      for (int osf : {1, 2}) {
        const MaskSet masks = make_masks(k, side, 1, 1000 + side + 10 * k + osf);
        const MaskedFourierOperator op(masks, osf);
        const Eigen::MatrixXcd a = reference::dense_A(masks, osf);
        const Eigen::MatrixXcd a_pinv = testutil::pinv(a);

        const Eigen::MatrixXcd x = testutil::random_complex(side, side, rng);
        worst = std::max(worst, (op.apply_A(x) - a * testutil::flatten(x))
                                    .cwiseAbs()
                                    .maxCoeff());
        const Eigen::VectorXcd y =
            testutil::flatten(testutil::random_complex(op.n(), 1, rng));
        worst = std::max(
            worst, (testutil::flatten(op.apply_A_dagger(y)) - a_pinv * y)
                       .cwiseAbs()
                       .maxCoeff());

        const Eigen::VectorXd b = testutil::random_nonneg(op.n(), rng);
        const Eigen::MatrixXcd m_ref =
            b.asDiagonal() *
            (Eigen::MatrixXcd::Identity(op.n(), op.n()) - a * a_pinv) *
            b.asDiagonal();
        const Eigen::VectorXcd v =
            testutil::flatten(testutil::random_complex(op.n(), 1, rng));
        worst = std::max(worst,
                         (op.apply_M(b, v) - m_ref * v).cwiseAbs().maxCoeff());
        for (int i = 0; i < op.n(); ++i)
          worst = std::max(worst, (op.extract_M_column(b, i) - m_ref.col(i))
                                      .cwiseAbs()
                                      .maxCoeff());

        const Eigen::MatrixXcd m_dense = op.materialize_dense(b);
        worst_herm = std::max(
            worst_herm, (m_dense - m_dense.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m_dense);
        const double inf_norm = m_dense.cwiseAbs().rowwise().sum().maxCoeff();
        worst_eig = std::max(worst_eig, -eig.eigenvalues().minCoeff() -
                                            1e-8 * inf_norm);
      }
  const double elapsed = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof(detail), "max dev %.2e, %.1f s", worst, elapsed);
  report(1, "operator matches dense oracles", worst < 1e-10 && elapsed < 10.0,
         detail);
  std::snprintf(detail, sizeof(detail), "hermiticity %.2e, psd slack %.2e",
                worst_herm, worst_eig);
  report(2, "M hermitian and PSD", worst_herm < 1e-12 && worst_eig <= 0.0,
         detail);
}

// --- criterion 3: BCD soundness ---------------------------------------------

void criterion_bcd() {
  Rng rng(7171);
  bool monotone = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_u64() % 13);
    const DenseAccess access(testutil::random_psd(n, rng));
    BcdOptions opts;
    opts.cycles = 3;
    opts.trace_updates = true;
    opts.nu = 1e-12; // exact block minimizer in the nu -> 0 limit
    const double tol = 1e-10 * access.diagonal().sum();
    const FullLift full = bcd_full(access, opts);
    for (size_t i = 1; i < full.trace.objective.size(); ++i)
      monotone = monotone &&
                 full.trace.objective[i] <= full.trace.objective[i - 1] + tol;
  }

  bool full_rank_match = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 8 + static_cast<int>(rng.next_u64() % 9);
    const DenseAccess access(testutil::random_psd(n, rng));
    BcdOptions opts;
    opts.cycles = 40;
    const double scale = access.diagonal().sum();
    const double gap = std::abs(bcd_full(access, opts).trace.objective.back() -
                                bcd_lowrank(access, opts, n)
                                    .trace.objective.back()) /
                       scale;
    worst_gap = std::max(worst_gap, gap);
    full_rank_match = full_rank_match && gap < 1e-6;
  }

  bool near_reference = true;
  double worst_ref = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXcd m = testutil::random_psd(8, rng);
    const DenseAccess access(m);
    BcdOptions opts;
    opts.cycles = 300;
    opts.nu = 1e-4;
    opts.early_stop = true;
    const double scale = m.diagonal().real().sum();
    const double gap = std::abs(bcd_full(access, opts).trace.objective.back() -
                                testutil::sdp_reference_optimum(m)) /
                       scale;
    worst_ref = std::max(worst_ref, gap);
    near_reference = near_reference && gap < 1e-3;
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "monotone=%d, r=n gap %.2e, ref gap %.2e", monotone ? 1 : 0,
                worst_gap, worst_ref);
  report(3, "BCD soundness", monotone && full_rank_match && near_reference,
         detail);
}

// --- criteria 4-7: scaled experiment reproductions --------------------------

void criterion_noiseless_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> prob;
  for (int masks = 1; masks <= 4; ++masks) {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ExperimentConfig cfg = blob16_config("phasecut-bcdlr+refine");
      cfg.masks = masks;
      cfg.seed = seed;
      if (run_pipeline(cfg).recovered) ++recovered;
    }
    prob.push_back(recovered / 20.0);
  }
  bool nondecreasing = true;
  for (size_t i = 1; i < prob.size(); ++i)
    nondecreasing = nondecreasing && prob[i] >= prob[i - 1];
  const double elapsed = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "p(recover) = %.2f %.2f %.2f %.2f, %.0f s", prob[0], prob[1],
                prob[2], prob[3], elapsed);
  report(4, "noiseless recovery vs mask count",
         nondecreasing && prob[2] >= 0.8 && elapsed < 600.0, detail);
}

void criterion_fienup_local_minima() {
  int fienup_stuck_sdp_fine = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ExperimentConfig fi = blob16_config("fienup");
    fi.masks = 2;
    fi.seed = seed;
    ExperimentConfig sdp = blob16_config("phasecut-bcdlr+refine");
    sdp.masks = 2;
    sdp.seed = seed;
    const ExperimentResult rf = run_pipeline(fi);
    const ExperimentResult rs = run_pipeline(sdp);
    if (rf.obs_mse > 1e-4 && rs.obs_mse < 1e-4) ++fienup_stuck_sdp_fine;
  }
  char detail[64];
  std::snprintf(detail, sizeof(detail), "%d / 50 seeds", fienup_stuck_sdp_fine);
  report(5, "fienup-only local minima exist", fienup_stuck_sdp_fine > 0,
         detail);
}

void criterion_noise_stability() {
  const std::vector<double> alphas = {0.0, 1e-3, 1e-2};
  std::vector<double> med;
  for (double alpha : alphas) {
    std::vector<double> mses;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      // small grid so the unit-mass density keeps the Poisson rates
      // b^2/alpha of order one at these alpha values; on larger grids both
      // alphas sit in the saturated regime and the log-mse gap collapses
      ExperimentConfig cfg = blob16_config("phasecut-bcdlr+refine");
      cfg.side = 4;
      cfg.kept = 0;
      cfg.masks = 2;
      cfg.alpha = alpha;
      cfg.seed = seed;
      mses.push_back(run_pipeline(cfg).obs_mse);
    }
    med.push_back(median(mses));
  }
  const double gap = std::log10(med[2]) - std::log10(med[1]);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "median mse %.2e %.2e %.2e, log gap %.2f", med[0], med[1],
                med[2], gap);
  report(6, "noise stability ordering",
         med[0] < med[1] && med[1] < med[2] && gap >= 0.5 && gap <= 2.0,
         detail);
}

void criterion_mask_resolution() {
  std::vector<double> med;
  for (int res : {1, 8}) {
    std::vector<double> mses;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ExperimentConfig cfg = blob16_config("phasecut-bcdlr+refine");
      cfg.masks = 3;
      cfg.filter_res = res;
      cfg.seed = seed;
      mses.push_back(run_pipeline(cfg).obs_mse);
    }
    med.push_back(median(mses));
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "median mse r=1 %.2e, r=8 %.2e",
                med[0], med[1]);
  report(7, "coarse masks degrade recovery", med[1] >= med[0], detail);
}

// --- criterion 8: Bochner checks --------------------------------------------

void criterion_bochner() {
  Rng rng(31337);
  double worst_slack = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 4 + static_cast<int>(rng.next_u64() % 29);
    const Eigen::VectorXd x = testutil::random_nonneg(p, rng);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(p);
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < p; ++j)
        y[k] += x[j] * std::polar(1.0, -2.0 * M_PI * k * j / p);
    y /= std::sqrt(static_cast<double>(p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(build_toeplitz(y));
    worst_slack = std::max(worst_slack, -eig.eigenvalues().minCoeff() -
                                            1e-8 * y[0].real());
  }
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
  bad[0] = 1.0;
  bad[1] = -0.5;
  Eigen::VectorXcd yb = Eigen::VectorXcd::Zero(8);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      yb[k] += bad[j] * std::polar(1.0, -2.0 * M_PI * k * j / 8.0);
  yb /= std::sqrt(8.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bad_eig(build_toeplitz(yb));
  const double bad_min = bad_eig.eigenvalues().minCoeff();
  char detail[96];
  std::snprintf(detail, sizeof(detail), "psd slack %.2e, counterexample %.2e",
                worst_slack, bad_min);
  report(8, "Bochner toeplitz characterization",
         worst_slack <= 0.0 && bad_min < -1e-4, detail);
}

// --- criterion 9: structured relaxations ------------------------------------

// Shared refinement applied to both arms of the paired comparison: the SDP
// lift is rarely rank-one at this scale, so recovery is judged after the
// same greedy + Fienup polish in each case.
bool refined_recovery(const MaskedFourierOperator& op,
                      const Eigen::VectorXd& b_full,
                      const Eigen::MatrixXcd& xhat) {
  const Eigen::VectorXcd ax = op.apply_A(xhat);
  PhaseVector u;
  u.values.resize(ax.size());
  for (int i = 0; i < ax.size(); ++i) {
    const double mag = std::abs(ax[i]);
    u.values[i] =
        mag > 1e-12 ? ax[i] / mag : std::complex<double>(1, 0);
  }
  const OperatorMAccess access(op, b_full);
  u = greedy_phase(access, u, 5).u;
  const Eigen::VectorXcd y0 =
      u.values.cwiseProduct(b_full.cast<std::complex<double>>());
  const GreedyResult fr = fienup(op, b_full, y0, 0.95, 3000);
  const Eigen::VectorXcd bh = op.apply_A(op.apply_A_dagger(fr.y));
  return (bh.cwiseAbs() - b_full).squaredNorm() / b_full.squaredNorm() < 1e-4;
}

void criterion_structured() {
  double worst_pair = 0.0, worst_psd = 0.0, worst_floor = 0.0;
  int real_recovered = 0, complex_recovered = 0;
  const int seeds = 5;
  SplitOptions split;
  split.tolerance = 1e-8;
  split.max_iterations = 20000;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    // 16x16 image, support-truncated to a dense-scale observation set
    ExperimentConfig cfg = blob16_config("phasecut-real");
    cfg.osf = 1;
    cfg.masks = 2;
    cfg.kept = 128;
    cfg.seed = seed;

    const ComplexImage x = load_density(cfg);
    const MaskSet masks =
        make_masks(cfg.masks, cfg.side, cfg.filter_res, stream_seed(seed, 1));
    const MaskedFourierOperator op(masks, cfg.osf);
    const Eigen::VectorXd b_full = op.apply_A(x.values).cwiseAbs();
    const SupportSelection support = select_support(b_full, cfg.kept);
    Eigen::VectorXd b1(support.size());
    for (int i = 0; i < support.size(); ++i)
      b1[i] = b_full[support.indices[i]];
    const Eigen::MatrixXcd a = build_dense_A(op, &support.indices);
    const RealEmbedding emb = build_real_embedding(a, b1);

    const RealSolveResult rr = solve_phasecut_real(emb, split);
    const int n = emb.n;
    for (int i = 0; i < n; ++i)
      worst_pair = std::max(
          worst_pair,
          std::abs(rr.v_matrix(i, i) + rr.v_matrix(n + i, n + i) - 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rr.v_matrix);
    worst_psd = std::max(worst_psd, -eig.eigenvalues().minCoeff());

    const RealSolveResult rn = solve_phasecut_real_nonneg(emb, split);
    const Eigen::MatrixXd g = emb.pinv_a2 * emb.b2.asDiagonal();
    const Eigen::MatrixXd floor_mat = g * rn.v_matrix * g.transpose();
    worst_floor = std::max(worst_floor, -floor_mat.minCoeff());

    // paired recovery: real embedding vs complex full-lift BCD, with the
    // same refinement applied to both reconstructions
    if (refined_recovery(
            op, b_full,
            testutil::unflatten(rr.x.cast<std::complex<double>>(), cfg.side)))
      ++real_recovered;

    ExperimentConfig ccfg = cfg;
    ccfg.method = "phasecut-bcd";
    ccfg.cycles = 50;
    const ExperimentResult cres = run_pipeline(ccfg);
    if (refined_recovery(op, b_full, cres.reconstruction.values))
      ++complex_recovered;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "pair %.1e, psd %.1e, floor %.1e, recov %d vs %d", worst_pair,
                worst_psd, worst_floor, real_recovered, complex_recovered);
  report(9, "structured relaxations",
         worst_pair <= 1e-6 && worst_psd <= 1e-6 && worst_floor <= 1e-6 &&
             real_recovered >= complex_recovered,
         detail);
}

// --- criterion 10: desk-scale 128x128 run -----------------------------------

void criterion_table3(const std::string& pdb_path) {
  bool ok = true;
  char detail[160];
  std::string parts;
  for (int masks : {3, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.pdb_path = pdb_path;
    cfg.side = 128;
    cfg.masks = masks;
    cfg.osf = 2;
    cfg.kept = 1000;
    cfg.method = "phasecut-bcdlr+refine";
    cfg.rank = 2;
    cfg.cycles = 20;
    cfg.fienup_iters = 5000;
    cfg.seed = 1;
    const ExperimentResult res = run_pipeline(cfg);
    const double elapsed = seconds_since(t0);
    char part[80];
    std::snprintf(part, sizeof(part), "k=%d obj %.2e (%.0f s) ", masks,
                  res.obj_final, elapsed);
    parts += part;
    ok = ok && res.obj_final <= 1e-3 && elapsed < 900.0;
  }
  std::snprintf(detail, sizeof(detail), "%s", parts.c_str());
  report(10, "128x128 refined objective", ok, detail);
}

// --- criterion 11: determinism ----------------------------------------------

void criterion_determinism() {
  SweepSpec spec;
  spec.base = blob16_config("phasecut-bcdlr+refine");
  spec.base.fienup_iters = 500;
  spec.masks_grid = {2, 3};
  spec.res_grid = {1};
  spec.alpha_grid = {0.0, 1e-3};
  spec.osf_grid = {2};
  spec.seeds = {1, 2, 3};
  const std::string a = sweep(spec);
  const std::string b = sweep(spec);
  char detail[64];
  std::snprintf(detail, sizeof(detail), "%zu bytes", a.size());
  report(11, "sweep CSV byte determinism", !a.empty() && a == b, detail);
}

} // namespace

int main(int argc, char** argv) {
  const std::string pdb_path =
      argc > 1 ? argv[1] : std::string(PHASECUT_DATA_DIR) + "/caffeine.pdb";
  criteria_operator();
  criterion_bcd();
  criterion_noiseless_recovery();
  criterion_fienup_local_minima();
  criterion_noise_stability();
  criterion_mask_resolution();
  criterion_bochner();
  criterion_structured();
  criterion_table3(pdb_path);
  criterion_determinism();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
