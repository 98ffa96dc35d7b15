// Command-line surface: closed-form bound tables, DDT and capacity Monte
// Carlo sweeps, and the face-recognition pipeline, all emitted as CSV with
// a reproducible '#' metadata header.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "grasscap/bounds.hpp"
#include "grasscap/empirical.hpp"
#include "grasscap/experiments.hpp"
#include "grasscap/report.hpp"

namespace {

using namespace grasscap;

// Applies config-file values to options the user did not pass on the command
// line (or through the environment): flags win, then env, then config.
class ConfigLayer {
 public:
  explicit ConfigLayer(const std::string& path) {
    if (!path.empty()) values_ = parse_config_file(path);
  }

  template <typename T, typename Parse>
  void apply(const CLI::Option* opt, const std::string& key, T& target,
             Parse parse) const {
    if (opt != nullptr && opt->count() > 0) return;
    const auto it = values_.find(key);
    if (it == values_.end()) return;
    try {
      target = parse(it->second);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("config key '" + key + "': " + e.what());
    }
  }

  void apply_double(const CLI::Option* opt, const std::string& key,
                    double& target) const {
    apply(opt, key, target,
          [](const std::string& s) { return std::stod(s); });
  }
  void apply_i64(const CLI::Option* opt, const std::string& key,
                 std::int64_t& target) const {
    apply(opt, key, target,
          [](const std::string& s) { return std::stoll(s); });
  }
  void apply_index(const CLI::Option* opt, const std::string& key,
                   Index& target) const {
    apply(opt, key, target, [](const std::string& s) {
      return static_cast<Index>(std::stoll(s));
    });
  }
  void apply_int(const CLI::Option* opt, const std::string& key,
                 int& target) const {
    apply(opt, key, target,
          [](const std::string& s) { return std::stoi(s); });
  }
  void apply_u64(const CLI::Option* opt, const std::string& key,
                 std::uint64_t& target) const {
    apply(opt, key, target,
          [](const std::string& s) { return std::stoull(s); });
  }
  void apply_string(const CLI::Option* opt, const std::string& key,
                    std::string& target) const {
    apply(opt, key, target, [](const std::string& s) { return s; });
  }
  void apply_bool(const CLI::Option* opt, const std::string& key,
                  bool& target) const {
    apply(opt, key, target, [](const std::string& s) {
      return s == "1" || s == "true" || s == "yes";
    });
  }

 private:
  std::map<std::string, std::string> values_;
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    throw std::runtime_error(out_path + ": cannot open output file");
  out << text;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key=value config file; command-line flags win");
    out_opt =
        cmd->add_option("--out", out_path, "output CSV path (default stdout)");
    seed_opt = cmd->add_option("--seed", seed, "master seed")
                   ->envname("GRASSCAP_SEED");
    threads_opt =
        cmd->add_option("--threads", threads,
                        "max worker threads; never changes the results");
  }

  ConfigLayer layer() const { return ConfigLayer(config_path); }

  void finish(const ConfigLayer& cfg) {
    cfg.apply_u64(seed_opt, "seed", seed);
    cfg.apply_int(threads_opt, "threads", threads);
    cfg.apply_string(out_opt, "out", out_path);
    require(threads >= 1, "--threads must be >= 1");
  }
};

// ---- bounds ----------------------------------------------------------------

struct BoundsCmd {
  CommonFlags common;
  BoundsReport report;
  std::string sigma2_text;
  std::string r_text;
  CLI::Option* kappa_opt = nullptr;
  CLI::Option* sg_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* rg_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->footer(
        "CSV: '# key=value' metadata, then table=capacity with columns\n"
        "  sigma2,c_lin_lower,c_lin_upper,c_aff_lower,c_aff_upper\n"
        "and table=ddt with columns\n"
        "  r,d_lin_lower,d_lin_conjecture,d_lin_upper,d_affine");
    common.attach(cmd);
    report.sigma2_grid = {0.01};
    report.m = 3;
    report.k = 1;
    report.r_grid = {0.0, 0.5, 1.0, 1.5, 2.0};
    kappa_opt = cmd->add_option("--kappa", report.kappa,
                                "dimension ratio k/M, in (0, 1)");
    sg_opt = cmd->add_option("--sigma2-grid", sigma2_text,
                             "comma-separated noise powers");
    m_opt = cmd->add_option("--m", report.m, "features M for DDT curves");
    k_opt = cmd->add_option("--k", report.k, "subspace dim k for DDT curves");
    rg_opt = cmd->add_option("--r-grid", r_text,
                             "comma-separated discrimination gains");
  }

  int run() {
    ConfigLayer cfg = common.layer();
    cfg.apply_double(kappa_opt, "kappa", report.kappa);
    cfg.apply_index(m_opt, "m", report.m);
    cfg.apply_index(k_opt, "k", report.k);
    cfg.apply_string(sg_opt, "sigma2_grid", sigma2_text);
    cfg.apply_string(rg_opt, "r_grid", r_text);
    common.finish(cfg);
    if (!sigma2_text.empty()) report.sigma2_grid = parse_double_list(sigma2_text);
    if (!r_text.empty()) report.r_grid = parse_double_list(r_text);

    require(report.kappa > 0.0 && report.kappa < 1.0,
            "--kappa must lie in (0, 1)");
    require(!report.sigma2_grid.empty(), "--sigma2-grid must not be empty");
    for (double s : report.sigma2_grid)
      require(s > 0.0, "--sigma2-grid entries must be positive");
    require(report.k >= 1 && report.k < report.m, "--k must satisfy 1 <= k < m");
    require(!report.r_grid.empty(), "--r-grid must not be empty");
    for (double r : report.r_grid)
      require(r >= 0.0, "--r-grid entries must be >= 0");

    std::ostringstream buf;
    write_bounds_csv(buf, report);
    emit(common.out_path, buf.str());
    return 0;
  }
};

// ---- ddt -------------------------------------------------------------------

struct DdtCmd {
  CommonFlags common;
  SweepConfig config;
  std::string mode_text = "linear";
  std::string sigma2_text;
  std::string r_text;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* sg_opt = nullptr;
  CLI::Option* rl_opt = nullptr;
  CLI::Option* ens_opt = nullptr;
  CLI::Option* sig_opt = nullptr;
  CLI::Option* cap_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->footer(
        "CSV: '# key=value' metadata, then one row per grid point with columns\n"
        "  r,sigma2,l,m,n,k,errors,trials,p_hat,ci_low,ci_high,l_clamped,skipped\n"
        "and table=slopes with columns\n"
        "  r,d_hat,std_err,rows_used,d_conjecture,d_affine");
    common.attach(cmd);
    config.mode = SweepMode::ddt_linear;
    config.n = 3;
    config.m = 3;
    config.k = 1;
    config.sigma2_grid = {1e-1, 1e-2, 1e-3, 1e-4};
    config.r_list = {0.0, 0.75, 1.5, 1.8};
    mode_opt =
        cmd->add_option("--mode", mode_text, "class family: linear | affine")
            ->check(CLI::IsMember({"linear", "affine"}));
    n_opt = cmd->add_option("--n", config.n, "ambient dimension N");
    m_opt = cmd->add_option("--m", config.m, "features M");
    k_opt = cmd->add_option("--k", config.k, "subspace dimension k");
    sg_opt = cmd->add_option("--sigma2-grid", sigma2_text,
                             "comma-separated noise powers");
    rl_opt = cmd->add_option("--r-list", r_text,
                             "comma-separated discrimination gains");
    ens_opt = cmd->add_option("--ensembles", config.ensembles_per_point,
                              "class-set realizations per grid point");
    sig_opt = cmd->add_option("--signals", config.signals_per_ensemble,
                              "observations per realization");
    cap_opt = cmd->add_option("--l-cap", config.l_cap,
                              "skip grid points demanding more classes");
  }

  int run() {
    ConfigLayer cfg = common.layer();
    cfg.apply_string(mode_opt, "mode", mode_text);
    cfg.apply_index(n_opt, "n", config.n);
    cfg.apply_index(m_opt, "m", config.m);
    cfg.apply_index(k_opt, "k", config.k);
    cfg.apply_string(sg_opt, "sigma2_grid", sigma2_text);
    cfg.apply_string(rl_opt, "r_list", r_text);
    cfg.apply_i64(ens_opt, "ensembles", config.ensembles_per_point);
    cfg.apply_i64(sig_opt, "signals", config.signals_per_ensemble);
    cfg.apply_i64(cap_opt, "l_cap", config.l_cap);
    common.finish(cfg);
    if (!sigma2_text.empty()) config.sigma2_grid = parse_double_list(sigma2_text);
    if (!r_text.empty()) config.r_list = parse_double_list(r_text);
    require(mode_text == "linear" || mode_text == "affine",
            "--mode must be linear or affine");
    config.mode =
        mode_text == "affine" ? SweepMode::ddt_affine : SweepMode::ddt_linear;
    config.master_seed = common.seed;
    require(!config.sigma2_grid.empty(), "--sigma2-grid must not be empty");
    for (double s : config.sigma2_grid)
      require(s > 0.0, "--sigma2-grid entries must be positive");
    require(!config.r_list.empty(), "--r-list must not be empty");
    for (double r : config.r_list)
      require(r >= 0.0, "--r-list entries must be >= 0");

    const std::vector<SweepRow> rows = run_ddt_sweep(config, common.threads);
    std::ostringstream buf;
    write_ddt_csv(buf, config, rows);
    emit(common.out_path, buf.str());
    return 0;
  }
};

// ---- capacity ----------------------------------------------------------

struct CapacityCmd {
  CommonFlags common;
  SweepConfig config;
  std::string rho_text;
  std::string m_text;
  CLI::Option* nu_opt = nullptr;
  CLI::Option* kappa_opt = nullptr;
  CLI::Option* rl_opt = nullptr;
  CLI::Option* mg_opt = nullptr;
  CLI::Option* s2_opt = nullptr;
  CLI::Option* ens_opt = nullptr;
  CLI::Option* sig_opt = nullptr;
  CLI::Option* cap_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->footer(
        "CSV: '# key=value' metadata (including the closed-form capacity\n"
        "bounds at the configured kappa and sigma2), then one row per grid\n"
        "point with columns\n"
        "  rho,sigma2,l,m,n,k,errors,trials,p_hat,ci_low,ci_high,l_clamped,"
        "skipped");
    common.attach(cmd);
    config.mode = SweepMode::capacity;
    config.nu = 2.0;
    config.kappa = 0.25;
    config.rho_list = {0.25};
    config.m_grid = {4, 8, 12, 16};
    config.sigma2 = 1e-3;
    nu_opt = cmd->add_option("--nu", config.nu, "ambient ratio N/M, >= 1");
    kappa_opt = cmd->add_option("--kappa", config.kappa,
                                "subspace ratio k/M, in (0, 1)");
    rl_opt = cmd->add_option("--rho-list", rho_text,
                             "comma-separated classification rates");
    mg_opt =
        cmd->add_option("--m-grid", m_text, "comma-separated feature counts");
    s2_opt = cmd->add_option("--sigma2", config.sigma2, "noise power");
    ens_opt = cmd->add_option("--ensembles", config.ensembles_per_point,
                              "class-set realizations per grid point");
    sig_opt = cmd->add_option("--signals", config.signals_per_ensemble,
                              "observations per realization");
    cap_opt = cmd->add_option("--l-cap", config.l_cap,
                              "skip grid points demanding more classes");
  }

  int run() {
    ConfigLayer cfg = common.layer();
    cfg.apply_double(nu_opt, "nu", config.nu);
    cfg.apply_double(kappa_opt, "kappa", config.kappa);
    cfg.apply_string(rl_opt, "rho_list", rho_text);
    cfg.apply_string(mg_opt, "m_grid", m_text);
    cfg.apply_double(s2_opt, "sigma2", config.sigma2);
    cfg.apply_i64(ens_opt, "ensembles", config.ensembles_per_point);
    cfg.apply_i64(sig_opt, "signals", config.signals_per_ensemble);
    cfg.apply_i64(cap_opt, "l_cap", config.l_cap);
    common.finish(cfg);
    if (!rho_text.empty()) config.rho_list = parse_double_list(rho_text);
    if (!m_text.empty()) config.m_grid = parse_index_list(m_text);
    config.master_seed = common.seed;
    require(config.nu >= 1.0, "--nu must be >= 1");
    require(config.kappa > 0.0 && config.kappa < 1.0,
            "--kappa must lie in (0, 1)");
    require(config.sigma2 > 0.0, "--sigma2 must be positive");
    require(!config.rho_list.empty(), "--rho-list must not be empty");
    for (double rho : config.rho_list)
      require(rho >= 0.0, "--rho-list entries must be >= 0");
    require(!config.m_grid.empty(), "--m-grid must not be empty");

    const std::vector<SweepRow> rows =
        run_capacity_sweep(config, common.threads);
    std::ostringstream buf;
    write_capacity_csv(buf, config, rows);
    emit(common.out_path, buf.str());
    return 0;
  }
};

// ---- faces ---------------------------------------------------------------

struct FacesCmd {
  CommonFlags common;
  FaceExperimentConfig config;
  SyntheticCorpusConfig synth;
  std::string data_dir;
  bool synthetic = false;
  std::string m_text;
  std::string l_text;
  CLI::Option* data_opt = nullptr;
  CLI::Option* synth_opt = nullptr;
  CLI::Option* mg_opt = nullptr;
  CLI::Option* lg_opt = nullptr;
  CLI::Option* km_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* am_opt = nullptr;
  CLI::Option* cls_opt = nullptr;
  CLI::Option* ipc_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* s2_opt = nullptr;
  CLI::Option* kt_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->footer(
        "CSV: '# key=value' metadata, then table=errors with columns\n"
        "  m,l,errors,trials,p_hat\n"
        "and table=classes with columns\n"
        "  m,sigma2_hat,max_l_empirical,predicted_classes");
    common.attach(cmd);
    config.m_grid = {5, 10, 15, 20, 30, 40};
    config.l_grid = {2, 4, 6, 8, 10};
    data_opt = cmd->add_option(
        "--data", data_dir, "corpus root: one subdirectory of P5 PGMs per class");
    synth_opt = cmd->add_flag("--synthetic", synthetic,
                              "generate a synthetic corpus instead");
    mg_opt =
        cmd->add_option("--m-grid", m_text, "comma-separated feature counts");
    lg_opt =
        cmd->add_option("--l-grid", l_text, "comma-separated class counts");
    km_opt =
        cmd->add_option("--k-model", config.k_model, "estimated subspace rank");
    tau_opt = cmd->add_option("--tau", config.tau,
                              "error threshold defining 'discriminable'");
    am_opt = cmd->add_flag("--affine-means", config.affine_means,
                           "subtract and classify with per-class means");
    cls_opt = cmd->add_option("--classes", synth.num_classes,
                              "synthetic: number of classes");
    ipc_opt = cmd->add_option("--images-per-class", synth.images_per_class,
                              "synthetic: samples per class");
    n_opt = cmd->add_option("--n", synth.n, "synthetic: ambient dimension");
    s2_opt = cmd->add_option("--sigma2", synth.sigma2,
                             "synthetic: generative noise power");
    kt_opt = cmd->add_option("--k-true", synth.k, "synthetic: generative rank");
  }

  int run() {
    ConfigLayer cfg = common.layer();
    cfg.apply_string(data_opt, "data", data_dir);
    cfg.apply_bool(synth_opt, "synthetic", synthetic);
    cfg.apply_string(mg_opt, "m_grid", m_text);
    cfg.apply_string(lg_opt, "l_grid", l_text);
    cfg.apply_index(km_opt, "k_model", config.k_model);
    cfg.apply_double(tau_opt, "tau", config.tau);
    cfg.apply_bool(am_opt, "affine_means", config.affine_means);
    cfg.apply_index(cls_opt, "classes", synth.num_classes);
    cfg.apply_index(ipc_opt, "images_per_class", synth.images_per_class);
    cfg.apply_index(n_opt, "n", synth.n);
    cfg.apply_double(s2_opt, "sigma2", synth.sigma2);
    cfg.apply_index(kt_opt, "k_true", synth.k);
    common.finish(cfg);
    if (!m_text.empty()) config.m_grid = parse_index_list(m_text);
    if (!l_text.empty()) config.l_grid = parse_index_list(l_text);
    config.seed = common.seed;
    require(synthetic || !data_dir.empty(),
            "--data directory or --synthetic is required");

    LabeledImageSet set;
    std::string source;
    if (synthetic) {
      synth.seed = common.seed;
      set = make_synthetic_corpus(synth);
      source = "synthetic";
    } else {
      require(std::filesystem::is_directory(data_dir),
              "--data: not a directory: " + data_dir);
      set = load_image_dir(data_dir);
      source = data_dir;
    }
    const FaceExperimentResult result = run_face_experiment(set, config);
    std::ostringstream buf;
    write_faces_csv(buf, config, result, source);
    emit(common.out_path, buf.str());
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "grasscap: subspace-classification bounds, Monte Carlo sweeps, and the "
      "face-recognition pipeline"};
  app.require_subcommand(1);

  auto bounds = std::make_shared<BoundsCmd>();
  auto ddt = std::make_shared<DdtCmd>();
  auto capacity = std::make_shared<CapacityCmd>();
  auto faces = std::make_shared<FacesCmd>();
  std::function<int()> runner;

  auto* bounds_cmd = app.add_subcommand(
      "bounds", "closed-form capacity bounds and DDT curves as CSV");
  bounds->attach(bounds_cmd);
  bounds_cmd->callback([&runner, bounds]() {
    runner = [bounds]() { return bounds->run(); };
  });

  auto* ddt_cmd = app.add_subcommand(
      "ddt", "Monte Carlo misclassification sweep over (sigma2, r) with "
             "fitted error-decay slopes");
  ddt->attach(ddt_cmd);
  ddt_cmd->callback(
      [&runner, ddt]() { runner = [ddt]() { return ddt->run(); }; });

  auto* capacity_cmd = app.add_subcommand(
      "capacity", "Monte Carlo sweep over M at scaled dimensions "
                  "N = floor(nu M), k = floor(kappa M), L = floor(2^(rho M))");
  capacity->attach(capacity_cmd);
  capacity_cmd->callback([&runner, capacity]() {
    runner = [capacity]() { return capacity->run(); };
  });

  auto* faces_cmd = app.add_subcommand(
      "faces", "subspace face-recognition experiment over (M, L), from a "
               "PGM directory tree or a synthetic corpus");
  faces->attach(faces_cmd);
  faces_cmd->callback(
      [&runner, faces]() { runner = [faces]() { return faces->run(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return runner();
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}
