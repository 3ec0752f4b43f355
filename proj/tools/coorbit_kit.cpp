// coorbit-kit: batch front-end over the library. Every run is driven by one
// JSON config and lands its outputs plus a manifest in --out. Exit codes:
// 0 pass, 1 a configured check failed, 2 usage or config error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <coorbit/coorbit.hpp>
#include <coorbit/io.hpp>

namespace {

using namespace coorbit;
using io::Json;

constexpr const char* kToolVersion = "0.1.0";

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  long seed = -1;  // >= 0 overrides the seeds in the config
  int threads = 1;
};

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Log-spaced radii along the positive and negative coordinate axes.
std::vector<Vec> radial_probe(int dim, double r_lo, double r_hi, int count) {
  require(r_lo > 0.0 && r_hi > r_lo && count >= 2, "probe radii must satisfy 0 < lo < hi");
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (count - 1));
    for (int a = 0; a < dim; ++a)
      for (int s : {-1, 1}) {
        Vec xi = Vec::Zero(dim);
        xi(a) = s * r;
        pts.push_back(xi);
      }
  }
  return pts;
}

std::vector<GroupSample> haar_from_config(const DilationGroup& g, const Json& j) {
  const int count = j.at("count").get<int>();
  if (j.at("lo").is_array()) {
    const Vec lo = io::vec_from_json(j.at("lo"));
    return haar_samples(g, lo, io::vec_from_json(j.at("hi")),
                        std::vector<int>(static_cast<std::size_t>(lo.size()), count));
  }
  return haar_samples(g, j.at("lo").get<double>(), j.at("hi").get<double>(), count);
}

WellSpreadSet wellspread_from_config(const DilationGroup& g, const Json& j) {
  if (j.at("lo").is_array())
    return well_spread(g, io::vec_from_json(j.at("lo")), io::vec_from_json(j.at("hi")),
                       io::vec_from_json(j.at("step")));
  return well_spread(g, j.at("lo").get<double>(), j.at("hi").get<double>(),
                     j.at("step").get<double>());
}

Window window_from_config(const Json& j, const FreqGrid& grid, const DilationGroup& g) {
  Window w =
      build_bump_window(grid, io::freqset_from_json(j.at("core")), j.at("margin").get<double>());
  if (j.contains("normalize")) {
    const Json& n = j.at("normalize");
    const Json& pr = n.at("probe");
    // e.g. a dyadic Littlewood-Paley profile normalized over the cyclic
    // subgroup while the run itself samples the continuous group
    const DilationGroup ng = n.contains("group") ? io::group_from_json(n.at("group")) : g;
    w = normalize_calderon(w, ng, haar_from_config(ng, n.at("chart")),
                           radial_probe(grid.dim, pr.at("lo").get<double>(),
                                        pr.at("hi").get<double>(), pr.at("count").get<int>()));
  }
  return w;
}

Signal signal_from_config(const Json& j, const FreqGrid& grid, long seed_override) {
  if (j.contains("file")) return io::read_signal(j.at("file").get<std::string>());
  long seed = j.at("seed").get<long>();
  if (seed_override >= 0) seed = seed_override;
  return random_band_signal(grid, io::freqset_from_json(j.at("band")),
                            static_cast<unsigned>(seed));
}

std::vector<Signal> suite_from_config(const Json& j, const FreqGrid& grid, long seed_override) {
  const int count = j.at("count").get<int>();
  require(count >= 1, "suite needs at least one signal");
  long base = j.at("seed").get<long>();
  if (seed_override >= 0) base = seed_override;
  const FrequencySet band = io::freqset_from_json(j.at("band"));
  std::vector<Signal> suite;
  for (int i = 0; i < count; ++i)
    suite.push_back(random_band_signal(grid, band, static_cast<unsigned>(base + i)));
  return suite;
}

void write_manifest(const Options& o, const std::string& command, const Json& config,
                    const Json& outputs, const Json& tolerances, bool pass) {
  Json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["config"] = config;
  m["seed_override"] = o.seed >= 0 ? Json(o.seed) : Json(nullptr);
  m["outputs"] = outputs;
  m["tolerances"] = tolerances;
  m["pass"] = pass;
  io::atomic_write(o.out_dir + "/manifest.json", m.dump(2) + "\n");
}

// ---- check-group ------------------------------------------------------------

int cmd_check_group(const Options& o, const Json& config) {
  const DilationGroup g = io::group_from_json(config);
  const std::string kind = config.at("kind").get<std::string>();

  bool verdict = true;
  bool have_predicate = true;
  PredicateResult pr{true, false};
  if (kind == "one_parameter") {
    pr = one_parameter_admissibility(io::mat_from_json(config.at("matrix")));
  } else if (kind == "cyclic") {
    pr = expansivity(io::mat_from_json(config.at("matrix")));
  } else if (kind == "diag2param") {
    pr.value = is_integrably_admissible_two_param(config.at("alpha").get<double>(),
                                                  config.at("beta").get<double>());
  } else {
    have_predicate = false;  // similitude, explicit: decided by the probes
  }

  const Json probe = config.value("probe", Json::object());
  const double inner = probe.value("inner", 1.0);
  const double outer = probe.value("outer", 2.0);
  const FrequencySet C = g.dim() == 1 ? FrequencySet::symmetric_band(inner, outer)
                                      : FrequencySet::annulus(g.dim(), inner, outer);
  const double lo = probe.value("chart_lo", -3.0);
  const double hi = probe.value("chart_hi", 3.0);
  std::vector<GroupSample> samples;
  if (g.chart_dim() == 1) {
    samples = haar_samples(g, lo, hi, probe.value("chart_count", 121));
  } else {
    const int cd = g.chart_dim();
    samples = haar_samples(g, Vec::Constant(cd, lo), Vec::Constant(cd, hi),
                           std::vector<int>(static_cast<std::size_t>(cd),
                                            probe.value("chart_count", 33)));
  }
  const auto region = radial_probe(g.dim(), probe.value("region_lo", 0.25),
                                   probe.value("region_hi", 8.0), probe.value("region_count", 33));

  const TransporterReport tr = transporter_probe(g, C, C, samples);
  const OrbitCoverReport oc = orbit_covers(g, C, region, samples);

  Json report;
  report["kind"] = kind;
  if (have_predicate) {
    verdict = pr.value;
    report["predicate"] = Json{{"value", pr.value}, {"borderline", pr.borderline}};
  } else {
    verdict = tr.bounded && oc.covered_fraction >= probe.value("coverage_threshold", 0.95);
  }
  report["verdict"] = verdict;
  report["transporter"] = Json{{"hit_count", tr.hits.size()},
                               {"bounded", tr.bounded},
                               {"param_radius", tr.param_radius}};
  report["orbit_cover"] = Json{{"covered_fraction", oc.covered_fraction}};
  io::atomic_write(o.out_dir + "/check-group.json", report.dump(2) + "\n");
  return verdict ? 0 : 1;
}

// ---- pipeline commands --------------------------------------------------------

struct BapuKit {
  WellSpreadSet ws;
  Cover cover;
  Bapu bapu;
};

BapuKit bapu_from_config(const Json& config, const FreqGrid& grid, const DilationGroup& g,
                         const Window& w) {
  BapuKit kit{wellspread_from_config(g, config.at("wellspread")), {}, {}};
  const Json& jb = config.at("base_set");
  const FrequencySet Q = jb.at("kind").get<std::string>() == "window_pullback"
                             ? pullback_support(kit.ws, w.support)
                             : io::freqset_from_json(jb);
  kit.cover = induced_cover(kit.ws, Q);
  const CellPartition cp =
      partition_cells(kit.ws, haar_from_config(g, config.at("partition_samples")));
  kit.bapu = build_bapu(w, cp, kit.cover, grid);
  return kit;
}

int cmd_bapu(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const BapuKit kit = bapu_from_config(config, grid, g, w);
  const BapuReport rep = verify_bapu(kit.bapu, io::freqset_from_json(config.at("verify_region")));

  const Json thr = config.value("thresholds", Json::object());
  const double max_defect = thr.value("partition_defect", 1e-3);
  const double max_leakage = thr.value("support_leakage", 1e-10);
  const bool pass = rep.max_partition_defect < max_defect && rep.support_leakage < max_leakage &&
                    !rep.out_of_cover && std::isfinite(rep.C_Phi) && rep.C_Phi > 0.0;

  io::write_bapu(o.out_dir, kit.bapu);
  io::write_cover(o.out_dir + "/cover.json", kit.cover);
  Json report;
  report["max_partition_defect"] = rep.max_partition_defect;
  report["support_leakage"] = rep.support_leakage;
  report["C_Phi"] = rep.C_Phi;
  report["out_of_cover"] = rep.out_of_cover;
  report["pass"] = pass;
  io::atomic_write(o.out_dir + "/bapu-report.json", report.dump(2) + "\n");

  Json outputs = Json::array({"bapu.json", "cover.json", "bapu-report.json"});
  for (std::size_t i = 0; i < kit.bapu.phis.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "phi_%04zu.c128", i);
    outputs.push_back(name);
  }
  write_manifest(o, "bapu", config, outputs,
                 Json{{"partition_defect", max_defect}, {"support_leakage", max_leakage}}, pass);
  return pass ? 0 : 1;
}

int cmd_cwt(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const Signal f = signal_from_config(config.at("signal"), grid, o.seed);
  GTransform t = cwt(f, w, haar_from_config(g, config.at("samples")));
  t.window_id = config.at("window").value("id", "window");
  t.signal_id = config.at("signal").value("id", "signal");
  io::write_gtransform(o.out_dir + "/gtransform.c128", t);

  std::size_t flagged = 0;
  for (char c : t.flagged) flagged += c != 0;
  Json tol;
  tol["flagged_slices"] = flagged;
  write_manifest(o, "cwt", config, Json::array({"gtransform.c128"}), tol, true);
  return 0;
}

int cmd_coorbit_norm(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const Signal f = signal_from_config(config.at("signal"), grid, o.seed);
  const NormSpec spec = io::normspec_from_json(config.at("spec"));
  const GTransform t = cwt(f, w, haar_from_config(g, config.at("samples")));

  std::vector<std::string> warnings;
  const double value = mixed_norm(t, spec, &warnings);
  io::atomic_write(
      o.out_dir + "/coorbit-norm.json",
      io::norm_report_json(value, spec.p, spec.q, spec.v0, 0.0, warnings).dump(2) + "\n");
  write_manifest(o, "coorbit-norm", config, Json::array({"coorbit-norm.json"}), Json::object(),
                 true);
  return 0;
}

int cmd_decomp_norm(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const Signal f = signal_from_config(config.at("signal"), grid, o.seed);
  const NormSpec spec = io::normspec_from_json(config.at("spec"));
  const BapuKit kit = bapu_from_config(config, grid, g, w);
  const ModerateWeight u = transplant_weight(kit.cover, spec.v0, spec.q);
  const NormResult r = decomposition_norm(f, kit.bapu, u, spec.p, spec.q);

  io::atomic_write(
      o.out_dir + "/decomp-norm.json",
      io::norm_report_json(r.value, spec.p, spec.q, spec.v0, r.truncation_mass, r.warnings)
              .dump(2) +
          "\n");
  write_manifest(o, "decomp-norm", config, Json::array({"decomp-norm.json"}), Json::object(),
                 true);
  return 0;
}

int cmd_besov_norm(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const Mat A = io::mat_from_json(config.at("A"));
  const double alpha = config.at("alpha").get<double>();
  const double p = io::num_from_json(config.at("p"));
  const double q = io::num_from_json(config.at("q"));
  const Json& jp = config.at("profile");
  const Window phi =
      build_bump_window(grid, io::freqset_from_json(jp.at("core")), jp.at("margin").get<double>());
  const Signal f = signal_from_config(config.at("signal"), grid, o.seed);
  const NormResult r = besov_norm(f, A, alpha, p, q, phi);

  io::atomic_write(o.out_dir + "/besov-norm.json",
                   io::norm_report_json(r.value, p, q, GroupWeight::det_power(alpha), r.truncation_mass,
                                        r.warnings)
                           .dump(2) +
                       "\n");
  write_manifest(o, "besov-norm", config, Json::array({"besov-norm.json"}), Json::object(), true);
  return 0;
}

int cmd_reproduce_test(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const auto samples = haar_from_config(g, config.at("samples"));
  const auto suite = suite_from_config(config.at("signals"), grid, o.seed);
  const double threshold = config.value("threshold", 1e-2);

  bool pass = true;
  Json rows = Json::array();
  for (const Signal& f : suite) {
    const ReproducingReport rep = reproducing_residual(g, f, w, w, samples);
    pass = pass && rep.residual < threshold && rep.coverage_ok;
    rows.push_back(Json{{"residual", rep.residual},
                        {"rhs_norm", rep.rhs_norm},
                        {"coverage_ok", rep.coverage_ok}});
  }
  Json report;
  report["threshold"] = threshold;
  report["signals"] = rows;
  report["pass"] = pass;
  io::atomic_write(o.out_dir + "/reproduce-test.json", report.dump(2) + "\n");
  write_manifest(o, "reproduce-test", config, Json::array({"reproduce-test.json"}),
                 Json{{"threshold", threshold}}, pass);
  return pass ? 0 : 1;
}

int cmd_frame_sweep(const Options& o, const Json& config) {
  const FreqGrid grid = io::grid_from_json(config.at("grid"));
  const DilationGroup g = io::group_from_json(config.at("group"));
  const Window w = window_from_config(config.at("window"), grid, g);
  const WellSpreadSet ws = wellspread_from_config(g, config.at("lattice"));
  const auto quad = haar_from_config(g, config.at("quad"));
  const auto suite = suite_from_config(config.at("suite"), grid, o.seed);
  const NormSpec spec = io::normspec_from_json(config.at("spec"));

  std::vector<double> spacings, a_hats, b_hats;
  std::string csv = "a,A_hat,B_hat\n";
  for (const Json& ja : config.at("spacings")) {
    const double a = ja.get<double>();
    const SamplingSet X = make_sampling_set(ws, a, grid);
    const FrameBounds fb = frame_bounds(suite, w, X, quad, spec);
    spacings.push_back(a);
    a_hats.push_back(fb.A_hat);
    b_hats.push_back(fb.B_hat);
    csv += g17(a) + "," + g17(fb.A_hat) + "," + g17(fb.B_hat) + "\n";
  }
  io::atomic_write(o.out_dir + "/frame-sweep.csv", csv);

  bool pass = true;
  Json tol = Json::object();
  if (config.contains("ratio_check")) {
    const Json& rc = config.at("ratio_check");
    const double at = rc.at("spacing").get<double>();
    const double max_ratio = rc.at("max_ratio").get<double>();
    bool found = false;
    for (std::size_t i = 0; i < spacings.size(); ++i)
      if (spacings[i] == at) {
        found = true;
        pass = pass && a_hats[i] > 0.0 && b_hats[i] / a_hats[i] <= max_ratio;
      }
    require(found, "ratio_check spacing is not in the sweep");
    tol["ratio_check"] = rc;
  }
  if (config.value("monotone_check", false)) {
    // lower bound should decay as the sampling thins out
    std::vector<std::size_t> order(spacings.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return spacings[i] < spacings[j]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      pass = pass && a_hats[order[i]] < a_hats[order[i - 1]];
    tol["monotone_check"] = true;
  }
  write_manifest(o, "frame-sweep", config, Json::array({"frame-sweep.csv"}), tol, pass);
  return pass ? 0 : 1;
}

int cmd_quasinorm_equiv(const Options& o, const Json& config) {
  const Json params = config.value("params", Json::object());
  const double r_lo = params.value("r_lo", 1e-4);
  const double r_hi = params.value("r_hi", 1e4);
  const int rpd = params.value("radii_per_decade", 32);
  const int rdirs = params.value("random_directions", 8);
  long seed = params.value("seed", 42L);
  if (o.seed >= 0) seed = o.seed;
  const Json sample_manifest{{"r_lo", r_lo},
                             {"r_hi", r_hi},
                             {"radii_per_decade", rpd},
                             {"random_directions", rdirs},
                             {"seed", seed}};

  bool pass = true;
  Json rows = Json::array();
  int index = 0;
  for (const Json& jc : config.at("cases")) {
    const QuasiNorm q1 = build_quasinorm(io::mat_from_json(jc.at("A1")));
    const QuasiNorm q2 = build_quasinorm(io::mat_from_json(jc.at("A2")));
    const EquivalenceReport rep =
        equivalence_test(q1, q2, r_lo, r_hi, rpd, rdirs, static_cast<unsigned>(seed));
    Json row = io::equivalence_json(rep, sample_manifest);
    row["label"] = jc.value("label", "case" + std::to_string(index));
    if (jc.contains("expect")) {
      const std::string expect = jc.at("expect").get<std::string>();
      require(expect == "equivalent" || expect == "not-equivalent",
              "expect must be 'equivalent' or 'not-equivalent'");
      row["expected"] = expect;
      pass = pass && (rep.equivalent == (expect == "equivalent"));
    }
    rows.push_back(row);
    ++index;
  }
  Json report;
  report["cases"] = rows;
  report["pass"] = pass;
  io::atomic_write(o.out_dir + "/equivalence.json", report.dump(2) + "\n");
  write_manifest(o, "quasinorm-equiv", config, Json::array({"equivalence.json"}), sample_manifest,
                 pass);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coorbit-kit: config-driven runs of the wavelet coorbit toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Options o;
  const std::vector<std::pair<std::string, int (*)(const Options&, const Json&)>> commands = {
      {"check-group", cmd_check_group},   {"bapu", cmd_bapu},
      {"cwt", cmd_cwt},                   {"coorbit-norm", cmd_coorbit_norm},
      {"decomp-norm", cmd_decomp_norm},   {"besov-norm", cmd_besov_norm},
      {"reproduce-test", cmd_reproduce_test}, {"frame-sweep", cmd_frame_sweep},
      {"quasinorm-equiv", cmd_quasinorm_equiv}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sc = app.add_subcommand(name, "");
    sc->add_option("--config", o.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sc->add_option("--out", o.out_dir, "output directory");
    sc->add_option("--seed", o.seed, "override the seeds in the config");
    sc->add_option("--threads", o.threads, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    coorbit::par::set_threads(o.threads);
    const Json config = Json::parse(coorbit::io::read_file(o.config_path));
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(o, config);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const coorbit::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
