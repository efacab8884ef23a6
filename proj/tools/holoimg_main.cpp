#include "holoimg/config.hpp"
#include "holoimg/errors.hpp"
#include "holoimg/experiment.hpp"
#include "holoimg/forward.hpp"
#include "holoimg/imaging.hpp"
#include "holoimg/io.hpp"
#include "holoimg/moments.hpp"
#include "holoimg/recovery.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace holoimg;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out = "out";
  bool full = false;
};

std::optional<std::uint64_t> env_u64(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != std::string(v).size()) throw 0;
    return x;
  } catch (...) {
    throw ValidationError(std::string(name) + " must be a non-negative integer, got '" + v + "'");
  }
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << text;
}

fs::path make_out(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

ExperimentConfig load_config(const Globals& g) {
  if (g.config.empty()) throw ValidationError("--config is required");
  ExperimentConfig cfg = parse_experiment_config(read_text(g.config));
  if (g.seed) {
    cfg.run.seed = *g.seed;
    cfg.medium.seed = *g.seed;
  }
  return cfg;
}

Protocol parse_protocol(const std::string& name) {
  if (name == "hermitian") return Protocol::hermitian;
  if (name == "ordered") return Protocol::ordered;
  if (name == "reference_row") return Protocol::reference_row;
  throw ValidationError("unknown protocol '" + name + "'; valid: hermitian, ordered, reference_row");
}

void write_image_bundle(const fs::path& dir, const std::string& stem, const FunctionalResult& fr) {
  write_image_csv((dir / (stem + ".csv")).string(), fr.image);
  write_image_pgm((dir / (stem + ".pgm")).string(), fr.image);
  write_image_sidecar((dir / (stem + ".txt")).string(), fr.image);
  write_peaks_csv((dir / (stem + "_peaks.csv")).string(), fr.peaks);
}

void print_matches(std::ostream& os, const std::string& label, const FunctionalResult& fr) {
  os << label << ' ' << fr.image.functional << ":";
  for (const auto& m : fr.matches) {
    os << " [" << m.scatterer + 1 << ": d=" << std::setprecision(3) << m.distance
       << " fwhm=" << m.fwhm.cross_range << 'x' << m.fwhm.range << ']';
  }
  os << '\n';
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::uint64_t realization = 0;
  std::string receivers = "center";
  std::string protocol = "hermitian";
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  const ExperimentConfig cfg = load_config(g);
  const fs::path dir = make_out(g.out);
  const Medium medium = make_medium(cfg, a.realization);
  const ArrayGeometry geo = cfg.geometry();
  const FrequencyGrid grid = cfg.grid();
  const auto p = response_multi(cfg.scene(), geo, medium, grid);
  write_matrix_binary((dir / "response.holomat").string(), p.matrix(), grid.frequencies_thz());
  for (std::size_t l = 0; l < p.frequencies(); ++l) {
    write_matrix_binary((dir / ("block_" + std::to_string(l + 1) + ".holomat")).string(),
                        p.block(l), {grid.frequency_thz(l)});
  }
  if (medium.field()) write_field((dir / "field.holofield").string(), *medium.field());

  std::vector<std::size_t> receivers;
  if (a.receivers == "center") {
    receivers.push_back(cfg.receiver());
  } else if (a.receivers == "all") {
    for (std::size_t r = 1; r <= geo.receiver_count(); ++r) receivers.push_back(r);
  } else {
    throw ValidationError("--receivers must be 'center' or 'all'");
  }
  const Protocol protocol = parse_protocol(a.protocol);
  const std::size_t ns = p.sources() * p.frequencies();
  const auto fs_list = protocol_illuminations(ns, protocol);
  std::vector<IntensityRecord> records;
  records.reserve(fs_list.size() * receivers.size());
  for (std::size_t r : receivers) {
    SimulatedOracle oracle =
        SimulatedOracle::from_response(p, r, cfg.run.noise_snr_db, cfg.run.seed ^ r);
    const auto values = oracle.measure_batch(fs_list);
    for (std::size_t k = 0; k < fs_list.size(); ++k) records.push_back({fs_list[k], r, values[k]});
  }
  write_intensity_records((dir / "intensities.csv").string(), records);
  write_text(dir / "config.json", serialize_experiment_config(cfg));
  std::cout << "response " << p.receivers() << " x " << ns << ", " << records.size()
            << " intensity records (" << a.protocol << ", " << receivers.size()
            << " receiver(s)) -> " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct RecoverArgs {
  std::string intensities;
  std::string mode = "mr";
  std::size_t receiver = 0;
  std::string truth;
};

void require_complete(const ReplayOracle& oracle, const std::vector<Illumination>& needed) {
  std::vector<std::string> missing;
  std::size_t count = 0;
  for (const auto& f : needed) {
    if (!oracle.has(f)) {
      if (missing.size() < 50) missing.push_back(f.tag());
      ++count;
    }
  }
  if (count == 0) return;
  std::string msg = std::to_string(count) + " measurement(s) missing for receiver " +
                    std::to_string(oracle.receiver()) + ":";
  for (const auto& m : missing) msg += " " + m;
  if (count > missing.size()) msg += " ...";
  throw ValidationError(msg);
}

double relative_error(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

int cmd_recover(const Globals& g, const RecoverArgs& a) {
  const ExperimentConfig cfg = load_config(g);
  const fs::path dir = make_out(g.out);
  const ArrayGeometry geo = cfg.geometry();
  const FrequencyGrid grid = cfg.grid();
  const std::size_t n = geo.size();
  const std::size_t s = grid.size();
  const std::size_t ns = n * s;
  const auto records = read_intensity_records(a.intensities);
  std::optional<CMatrix> truth;
  if (!a.truth.empty()) truth = read_matrix_binary(a.truth).matrix;
  std::ostringstream report;
  report << std::setprecision(6);

  if (a.mode == "mr") {
    const std::size_t r = a.receiver ? a.receiver : cfg.receiver();
    ReplayOracle oracle(records, ns, r);
    require_complete(oracle, protocol_illuminations(ns, Protocol::hermitian));
    const auto mr = recover_Mr(oracle, n, s);
    write_matrix_binary((dir / ("mr_" + std::to_string(r) + ".holomat")).string(), mr.m,
                        grid.frequencies_thz());
    report << "receiver " << r << ": recovered M_r from " << mr.measurements << " measurements\n";
    if (truth) {
      const CVector row = truth->row(static_cast<Eigen::Index>(r - 1)).transpose();
      const CMatrix t = row.conjugate() * row.transpose();
      report << "recovery error " << relative_error(mr.m, t) << '\n';
    }
  } else if (a.mode == "full") {
    if (!geo.colocated()) {
      throw ValidationError(
          "full M needs reciprocity between source and receiver indices, which only holds "
          "for a colocated array; this configuration has separate receivers");
    }
    std::vector<CMatrix> mrs;
    for (std::size_t r = 1; r <= n; ++r) {
      ReplayOracle oracle(records, ns, r);
      require_complete(oracle, protocol_illuminations(ns, Protocol::hermitian));
      mrs.push_back(recover_Mr(oracle, n, s).m);
    }
    const CMatrix m = recover_full_M(mrs, n, s, geo.colocated());
    write_matrix_binary((dir / "m_full.holomat").string(), m, grid.frequencies_thz());
    report << "recovered full M (" << ns << " x " << ns << ")\n";
    if (truth) report << "recovery error " << relative_error(m, truth->adjoint() * *truth) << '\n';
  } else if (a.mode == "row") {
    if (!geo.colocated()) {
      throw ValidationError(
          "the phase-referenced response needs reciprocity, which only holds for a "
          "colocated array; this configuration has separate receivers");
    }
    std::vector<CVector> rows;
    for (std::size_t r = 1; r <= n; ++r) {
      ReplayOracle oracle(records, ns, r);
      require_complete(oracle, protocol_illuminations(ns, Protocol::reference_row));
      rows.push_back(recover_reference_row(oracle, 1).row);
    }
    const CMatrix phat = recover_phase_referenced_response(rows, n, s);
    write_matrix_binary((dir / "response_phase_referenced.holomat").string(), phat,
                        grid.frequencies_thz());
    report << "recovered phase-referenced response (" << n << " x " << ns << ")\n";
    if (truth) {
      const Complex c = phat.conjugate().cwiseProduct(*truth).sum();
      report << "recovery error (up to global phase) "
             << relative_error(phat * (c / std::abs(c)), *truth) << '\n';
    }
  } else {
    throw ValidationError("unknown --mode '" + a.mode + "'; valid: mr, row, full");
  }
  write_text(dir / "recover_report.txt", report.str());
  std::cout << report.str();
  return 0;
}

// ---------------------------------------------------------------------------

struct ImageArgs {
  std::string input;
  std::string functional;
  std::optional<double> x_d;
  std::optional<double> omega_d;
  std::size_t receiver = 0;
  bool conjugate_pairing = false;
  std::string kind = "auto";
};

int cmd_image(const Globals& g, const ImageArgs& a) {
  const ExperimentConfig cfg = load_config(g);
  const fs::path dir = make_out(g.out);
  const ArrayGeometry geo = cfg.geometry();
  const FrequencyGrid grid = cfg.grid();
  const ImageWindow iw = cfg.image_window();
  const std::size_t n = geo.size();
  const std::size_t ns = n * grid.size();
  const std::size_t r = a.receiver ? a.receiver : cfg.receiver();
  const MatrixFile in = read_matrix_binary(a.input);
  const auto rows = static_cast<std::size_t>(in.matrix.rows());
  const auto cols = static_cast<std::size_t>(in.matrix.cols());
  if (cols != ns) {
    throw ValidationError("input has " + std::to_string(cols) + " columns but N*S = " +
                          std::to_string(ns));
  }
  bool is_mr = false;
  if (a.kind == "mr") {
    is_mr = true;
  } else if (a.kind == "auto") {
    if (rows == ns && ns == geo.receiver_count()) {
      throw ValidationError("a square N x N input could be M_r or a response; pass --input-kind");
    }
    is_mr = rows == ns;
  } else if (a.kind != "response") {
    throw ValidationError("--input-kind must be auto, mr or response");
  }
  if (is_mr && rows != ns) throw ValidationError("M_r input must be N*S x N*S");
  const double x_d = a.x_d.value_or(cfg.run.x_d_over_a * geo.aperture());
  const double omega_d = a.omega_d.value_or(cfg.run.omega_d_over_b * grid.bandwidth());
  const std::string& f = a.functional;
  const bool masked = f == "srint" || f == "cint";
  if ((a.x_d || a.omega_d) && !masked) {
    throw ValidationError("mask thresholds apply only to srint and cint, not '" + f + "'");
  }

  std::optional<ImageMap> img;
  if (f == "interf" || f == "srint") {
    CMatrix mr;
    if (is_mr) {
      mr = in.matrix;
    } else {
      if (rows != geo.receiver_count()) {
        throw ValidationError("input is neither M_r (N*S x N*S) nor a response (receivers x N*S)");
      }
      const CVector row = in.matrix.row(static_cast<Eigen::Index>(r - 1)).transpose();
      mr = row.conjugate() * row.transpose();
    }
    const CMatrix g0r = model_matrix_g0r(geo, grid, iw, r);
    img = f == "interf" ? image_interf(mr, g0r, iw)
                        : image_srint(mr, build_mask(geo, grid, x_d, omega_d), g0r, iw);
  } else if (f == "km" || f == "cint" || f == "music" || f == "signal") {
    if (is_mr || rows != geo.receiver_count()) {
      throw ValidationError("functional '" + f +
                            "' needs a response matrix (receivers x N*S), not a single-receiver M_r");
    }
    const MultiFreqResponse p(in.matrix, n, grid);
    const std::size_t m_est =
        cfg.run.signal_rank ? cfg.run.signal_rank
                            : (cfg.scatterers.empty() ? estimate_signal_rank(p.block(0))
                                                      : cfg.scatterers.size());
    SubspaceOptions opts;
    opts.conjugate_pairing = a.conjugate_pairing;
    if (f == "km") {
      img = image_km(p, geo, iw);
    } else if (f == "cint") {
      img = image_cint(p, x_d, omega_d, geo, iw);
    } else if (f == "music") {
      img = music_image(interferometric_blocks(p), grid, m_est, geo.sources(), iw, opts);
    } else {
      img = signal_image(interferometric_blocks(p), grid, m_est, geo.sources(), iw, opts);
    }
  } else {
    throw ValidationError("unknown functional '" + f +
                          "'; valid functionals: km, interf, srint, cint, music, signal");
  }
  img->seed = cfg.run.seed;
  FunctionalResult fr{*img, {}, {}};
  fr.peaks = extract_peaks(fr.image, cfg.run.peak_threshold, cfg.run.peak_separation);
  fr.matches = match_peaks(fr.image, fr.peaks, cfg.scatterers);
  write_image_bundle(dir, f, fr);
  std::ofstream fw(dir / (f + "_fwhm.csv"));
  fw << "peak,x,z,value,fwhm_cross_range,fwhm_range,cross_range_clipped,range_clipped\n";
  for (std::size_t k = 0; k < fr.peaks.size(); ++k) {
    const auto res = resolution_metrics(fr.image, fr.peaks[k].index);
    fw << k + 1 << ',' << fr.peaks[k].position.x() << ',' << fr.peaks[k].position.y() << ','
       << fr.peaks[k].value << ',' << res.cross_range << ',' << res.range << ','
       << res.cross_range_clipped << ',' << res.range_clipped << '\n';
  }
  std::cout << f << ": " << fr.peaks.size() << " peaks -> " << dir.string() << '\n';
  if (!cfg.scatterers.empty()) print_matches(std::cout, "match", fr);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_moments(const Globals& g, MomentConfig mc) {
  if (g.seed) mc.seed = *g.seed;
  const fs::path dir = make_out(g.out);
  const MomentReport rep = run_moments(mc);
  write_moments_csv((dir / "moments.csv").string(), rep);
  std::cout << std::setprecision(5) << "epsilon " << rep.epsilon << "  sigma " << rep.sigma
            << "  omega0*tau_c " << rep.tau_c << "  Omega_d/omega0 " << rep.omega_d
            << "  X_d/lambda0 " << rep.x_d << '\n';
  for (const auto& w : rep.regime.warnings) std::cout << "warning: " << w << '\n';
  for (const auto& row : rep.rows) {
    std::cout << std::left << std::setw(32) << row.quantity << " theory " << std::setw(12)
              << row.theory << " estimate " << std::setw(12) << row.estimate << " z "
              << row.z << '\n';
  }
  std::cout << (rep.passes() ? "all |z| <= 3\n" : "some |z| > 3\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string preset;
  std::string route;
  bool dump_config = false;
  std::optional<std::size_t> realizations;
};

int cmd_experiment(const Globals& g, const ExperimentArgs& a) {
  Preset preset = make_preset(a.preset, g.full);
  if (!g.config.empty()) preset.config = parse_experiment_config(read_text(g.config));
  if (g.seed) {
    preset.config.run.seed = *g.seed;
    preset.config.medium.seed = *g.seed;
  }
  if (a.realizations) preset.config.run.realizations = *a.realizations;
  const fs::path dir = make_out(g.out);
  write_text(dir / "config.json", serialize_experiment_config(preset.config));
  if (a.dump_config) {
    std::cout << serialize_experiment_config(preset.config) << '\n';
    return 0;
  }
  std::cout << preset.name << ": " << preset.description << (g.full ? " (full scale)" : "")
            << '\n';
  if (preset.name == "moments") {
    MomentConfig mc;
    mc.realizations = g.full ? 2000 : 500;
    return cmd_moments(g, mc);
  }
  const DataRoute route = parse_data_route(a.route.empty() ? preset.route : a.route);
  std::vector<std::pair<std::string, ExperimentConfig>> scenes;
  if (!preset.off_grid_only) scenes.emplace_back("on_grid", preset.config);
  if (preset.off_grid_only) {
    scenes.emplace_back("off_grid", preset.config);
  } else if (preset.off_grid_variant) {
    scenes.emplace_back("off_grid", shift_off_grid(preset.config));
  }

  std::ofstream summary(dir / "summary.csv");
  summary << "scene,realization,functional,scatterer,true_x,true_z,peak_x,peak_z,dx,dz,"
             "distance,fwhm_cross_range,fwhm_range\n";
  summary << std::setprecision(10);
  for (const auto& [label, cfg] : scenes) {
    const std::size_t reps = cfg.medium.random ? std::max<std::size_t>(1, cfg.run.realizations) : 1;
    for (std::size_t k = 0; k < reps; ++k) {
      const PipelineResult res = run_pipeline(cfg, k, route);
      for (const auto& fr : res.images) {
        const std::string stem =
            label + "_r" + std::to_string(k + 1) + "_" + fr.image.functional;
        write_image_bundle(dir, stem, fr);
        for (const auto& m : fr.matches) {
          summary << label << ',' << k + 1 << ',' << fr.image.functional << ',' << m.scatterer + 1
                  << ',' << m.truth.x() << ',' << m.truth.y() << ',' << m.peak.position.x() << ','
                  << m.peak.position.y() << ',' << m.dx << ',' << m.dz << ',' << m.distance << ','
                  << m.fwhm.cross_range << ',' << m.fwhm.range << '\n';
        }
        print_matches(std::cout, label + " r" + std::to_string(k + 1), fr);
      }
      if (res.recovery.mr_error) std::cout << "  M_r recovery error " << *res.recovery.mr_error << '\n';
      if (res.recovery.response_error) {
        std::cout << "  response recovery error " << *res.recovery.response_error << '\n';
      }
      std::cout << "  " << res.recovery.measurements << " intensity measurements, "
                << std::setprecision(3) << res.seconds << " s\n";
    }
  }
  std::cout << "outputs -> " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic array imaging: simulate, recover, image"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  int jobs = 0;
  app.add_option("--config", g.config, "Experiment configuration (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for media and noise (env HOLOIMG_SEED)");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads (env HOLOIMG_JOBS)")
                       ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("--full", g.full, "Full-scale presets (81 elements) instead of desk-scale ones");

  auto* sim = app.add_subcommand("simulate", "Synthesize responses and intensity records");
  SimulateArgs sa;
  sim->add_option("--realization", sa.realization, "Medium realization index");
  sim->add_option("--receivers", sa.receivers, "center | all")->capture_default_str();
  sim->add_option("--protocol", sa.protocol, "hermitian | ordered | reference_row")
      ->capture_default_str();

  auto* rec = app.add_subcommand("recover", "Recover interferometric data from intensities");
  RecoverArgs ra;
  rec->add_option("--intensities", ra.intensities, "Intensity records CSV")->required();
  rec->add_option("--mode", ra.mode, "mr | row | full")->capture_default_str();
  rec->add_option("--receiver", ra.receiver, "1-based receiver (default: array centre)");
  rec->add_option("--truth", ra.truth, "Ground-truth response for an error report");

  auto* img = app.add_subcommand("image", "Form an image from M_r or a response matrix");
  ImageArgs ia;
  img->add_option("--input", ia.input, "Matrix file (.holomat)")->required();
  img->add_option("--functional", ia.functional, "km | interf | srint | cint | music | signal")
      ->required();
  img->add_option("--x-d", ia.x_d, "Cross-range mask threshold, lambda0");
  img->add_option("--omega-d", ia.omega_d, "Frequency mask threshold, units of f0");
  img->add_option("--receiver", ia.receiver, "1-based receiver (default: array centre)");
  img->add_option("--input-kind", ia.kind, "auto | mr | response")->capture_default_str();
  img->add_flag("--conjugate-pairing", ia.conjugate_pairing,
                "Pair steering vectors with eigenvectors through V^H g0");

  auto* mom = app.add_subcommand("moments", "Monte Carlo check of travel-time moments");
  MomentConfig mc;
  mom->add_option("--epsilon", mc.epsilon)->capture_default_str();
  mom->add_option("--corr-len", mc.corr_len, "lambda0")->capture_default_str();
  mom->add_option("--realizations", mc.realizations)->capture_default_str();

  auto* exp = app.add_subcommand("experiment", "Run a preset end to end");
  ExperimentArgs ea;
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : " | ") + n;
  exp->add_option("preset", ea.preset, names)->required();
  exp->add_option("--route", ea.route, "phases | intensities (default: preset's)");
  exp->add_option("--realizations", ea.realizations, "Medium realizations");
  exp->add_flag("--dump-config", ea.dump_config, "Print the preset configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    g.seed = env_u64("HOLOIMG_SEED");
    if (auto j = env_u64("HOLOIMG_JOBS")) g.jobs = static_cast<int>(*j);
    if (*seed_opt) g.seed = seed;
    if (*jobs_opt) g.jobs = jobs;
    if (g.jobs) {
      if (*g.jobs < 1) throw ValidationError("jobs must be >= 1");
      omp_set_num_threads(*g.jobs);
    }
    if (sim->parsed()) return cmd_simulate(g, sa);
    if (rec->parsed()) return cmd_recover(g, ra);
    if (img->parsed()) return cmd_image(g, ia);
    if (mom->parsed()) return cmd_moments(g, mc);
    if (exp->parsed()) return cmd_experiment(g, ea);
  } catch (const ParseError& e) {
    std::cerr << "config error at " << (e.key_path().empty() ? "<root>" : e.key_path()) << ": "
              << e.detail() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
