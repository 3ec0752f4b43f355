#pragma once

// Disk formats. Sample containers are a single compact JSON header line
// followed by raw little-endian complex128 data; covers, norm reports, and
// equivalence reports are plain JSON; coefficient sets and residual logs are
// CSV. Every writer lands atomically (temp file + rename) so readers never
// observe a partial file.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <coorbit/bapu.hpp>
#include <coorbit/common.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/frames.hpp>
#include <coorbit/frequency_set.hpp>
#include <coorbit/grid.hpp>
#include <coorbit/group.hpp>
#include <coorbit/norms.hpp>
#include <coorbit/quasinorm.hpp>
#include <coorbit/signal.hpp>
#include <coorbit/transform.hpp>
#include <coorbit/window.hpp>

static_assert(std::endian::native == std::endian::little,
              "sample containers are little-endian on disk");

namespace coorbit {
namespace io {

using Json = nlohmann::json;

inline void atomic_write(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    require(out.good(), "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

// ---- JSON scalars and linear algebra ------------------------------------

// JSON has no infinity literal; exponents and degenerate ratios round-trip
// through strings.
inline Json json_num(double x) {
  if (std::isfinite(x)) return Json(x);
  if (std::isnan(x)) return Json("nan");
  return Json(x > 0 ? "inf" : "-inf");
}

inline double num_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  require(j.is_string(), "expected a number or 'inf'");
  const std::string s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  fail("unrecognized numeric string '" + s + "'");
}

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vec vec_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "expected a nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline Json mat_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline Mat mat_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "expected a matrix as an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  require(cols > 0, "matrix rows must be nonempty");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(static_cast<Eigen::Index>(j[r].size()) == cols, "ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

// ---- sample containers (windows, signals, partition members) ------------

inline Json grid_header(const FreqGrid& g) {
  Json h;
  h["dim"] = g.dim;
  Json n = Json::array(), sp = Json::array(), of = Json::array();
  for (int a = 0; a < g.dim; ++a) {
    n.push_back(g.n[a]);
    sp.push_back(g.dxi[a]);
    of.push_back(g.offset[a]);
  }
  h["n"] = n;
  h["spacing"] = sp;
  h["offset"] = of;
  h["dtype"] = "c128";
  return h;
}

inline FreqGrid grid_from_header(const Json& h) {
  require(h.at("dtype").get<std::string>() == "c128", "unsupported dtype");
  const int dim = h.at("dim").get<int>();
  require(dim >= 1 && dim <= 3, "dim must be 1, 2, or 3");
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> dxi{1.0, 1.0, 1.0}, offset{0.0, 0.0, 0.0};
  const Json &jn = h.at("n"), &js = h.at("spacing"), &jo = h.at("offset");
  require(static_cast<int>(jn.size()) == dim && static_cast<int>(js.size()) == dim &&
              static_cast<int>(jo.size()) == dim,
          "header axis arrays must match dim");
  for (int a = 0; a < dim; ++a) {
    n[a] = jn[a].get<int>();
    dxi[a] = js[a].get<double>();
    offset[a] = jo[a].get<double>();
  }
  return FreqGrid::make(dim, n, dxi, offset);
}

inline std::string sample_container(const FreqGrid& g, const std::vector<cplx>& v) {
  require(v.size() == g.total(), "sample count does not match the grid");
  std::string out = grid_header(g).dump();
  out += '\n';
  out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(cplx));
  return out;
}

inline void write_samples(const std::string& path, const FreqGrid& g,
                          const std::vector<cplx>& v) {
  atomic_write(path, sample_container(g, v));
}

inline std::pair<FreqGrid, std::vector<cplx>> read_samples(const std::string& path) {
  const std::string data = read_file(path);
  const std::size_t nl = data.find('\n');
  require(nl != std::string::npos, path + ": missing header line");
  const FreqGrid g = grid_from_header(Json::parse(data.substr(0, nl)));
  const std::size_t need = g.total() * sizeof(cplx);
  require(data.size() - nl - 1 == need, path + ": payload size does not match the header");
  std::vector<cplx> v(g.total());
  std::memcpy(v.data(), data.data() + nl + 1, need);
  return {g, v};
}

inline void write_signal(const std::string& path, const Signal& f) {
  write_samples(path, f.grid, f.fhat);
}

// The container stores samples only; the declared band is not persisted, so
// a loaded signal carries the full grid box until the caller narrows it.
inline Signal read_signal(const std::string& path) {
  auto [g, v] = read_samples(path);
  Vec lo(g.dim), hi(g.dim);
  for (int a = 0; a < g.dim; ++a) {
    lo(a) = g.freq_lo(a);
    hi(a) = g.freq_hi(a);
  }
  return Signal{g, std::move(v), FrequencySet::box(lo, hi)};
}

inline void write_window(const std::string& path, const Window& w) {
  write_samples(path, w.grid, w.fhat);
}

// ---- cover and bapu exports ----------------------------------------------

inline Json cover_json(const Cover& c) {
  Json members = Json::array();
  for (const CoverMember& m : c.members) {
    Json e;
    e["index"] = m.index;
    e["matrix"] = mat_json(m.h);
    members.push_back(e);
  }
  Json out;
  out["members"] = members;
  out["neighbors"] = c.neighbors;
  out["N_Q"] = c.N_Q;
  return out;
}

inline void write_cover(const std::string& path, const Cover& c) {
  atomic_write(path, cover_json(c).dump(2) + "\n");
}

// One container file per partition member plus a manifest naming them.
inline void write_bapu(const std::string& dir, const Bapu& b) {
  Json indices = Json::array(), files = Json::array(), l1 = Json::array();
  for (std::size_t i = 0; i < b.phis.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "phi_%04zu.c128", i);
    std::vector<cplx> v(b.phis[i].size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = cplx(b.phis[i][n], 0.0);
    write_samples(dir + "/" + name, b.grid, v);
    indices.push_back(i);
    files.push_back(name);
    l1.push_back(b.l1_bounds[i]);
  }
  Json m;
  m["indices"] = indices;
  m["files"] = files;
  m["l1_bounds"] = l1;
  m["C_Phi"] = b.C_Phi;
  atomic_write(dir + "/bapu.json", m.dump(2) + "\n");
}

// ---- transform export -----------------------------------------------------

// Same single-file layout as the sample container: one manifest line, then
// the slices in sample-major order.
inline void write_gtransform(const std::string& path, const GTransform& t) {
  Json m = grid_header(t.grid);
  Json samples = Json::array();
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    Json s;
    s["param"] = vec_json(t.samples[i].param);
    s["matrix"] = mat_json(t.samples[i].h);
    s["weight"] = t.samples[i].weight;
    s["flagged"] = t.flagged.empty() ? false : static_cast<bool>(t.flagged[i]);
    samples.push_back(s);
  }
  m["samples"] = samples;
  if (!t.window_id.empty()) m["window_id"] = t.window_id;
  if (!t.signal_id.empty()) m["signal_id"] = t.signal_id;
  std::string out = m.dump();
  out += '\n';
  for (const auto& slice : t.coeffs)
    out.append(reinterpret_cast<const char*>(slice.data()), slice.size() * sizeof(cplx));
  atomic_write(path, out);
}

// ---- reports ---------------------------------------------------------------

inline Json weight_json(const GroupWeight& w) {
  Json j;
  j["scale"] = w.scale;
  j["det_exp"] = w.det_exp;
  j["op_exp"] = w.op_exp;
  j["inv_op_exp"] = w.inv_op_exp;
  return j;
}

inline Json norm_report_json(double value, double p, double q, const GroupWeight& w,
                             double truncation_mass,
                             const std::vector<std::string>& warnings) {
  Json j;
  j["value"] = json_num(value);
  j["p"] = json_num(p);
  j["q"] = json_num(q);
  j["weight"] = weight_json(w);
  j["truncation_mass"] = truncation_mass;
  j["warnings"] = warnings;
  return j;
}

inline Json equivalence_json(const EquivalenceReport& r, const Json& sample_manifest) {
  Json j;
  j["ratio_lo"] = json_num(r.ratio_lo);
  j["ratio_hi"] = json_num(r.ratio_hi);
  j["slope_per_decade"] = r.slope_per_decade;
  j["verdict"] = r.equivalent ? "equivalent" : "not-equivalent";
  j["basis"] = "empirical";
  j["samples"] = sample_manifest;
  return j;
}

// ---- CSV -------------------------------------------------------------------

namespace detail {
inline void append_g17(std::string& s, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  s += buf;
}
}  // namespace detail

// Columns: scale index j, lattice index k, chart parameter of h_j, the point
// coordinates, and the coefficient.
inline std::string sequence_csv(const SequenceData& sd, const SamplingSet& X) {
  const int cd = X.lattice.chart_dim();
  const int d = X.lattice.group.dim();
  std::string s = "j,k";
  for (int a = 0; a < cd; ++a) s += ",hparam" + std::to_string(a);
  for (int a = 0; a < d; ++a) s += ",x" + std::to_string(a);
  s += ",re,im\n";
  for (const SequenceEntry& e : sd.entries) {
    s += std::to_string(e.j);
    s += ',';
    s += std::to_string(e.k);
    const Vec& p = X.lattice.params[static_cast<std::size_t>(e.j)];
    for (int a = 0; a < cd; ++a) {
      s += ',';
      detail::append_g17(s, p(a));
    }
    for (int a = 0; a < d; ++a) {
      s += ',';
      detail::append_g17(s, e.x(a));
    }
    s += ',';
    detail::append_g17(s, e.c.real());
    s += ',';
    detail::append_g17(s, e.c.imag());
    s += '\n';
  }
  return s;
}

inline void write_sequence_csv(const std::string& path, const SequenceData& sd,
                               const SamplingSet& X) {
  atomic_write(path, sequence_csv(sd, X));
}

inline std::string residual_csv(const std::vector<double>& residuals) {
  std::string s = "iteration,residual\n";
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    s += std::to_string(i);
    s += ',';
    detail::append_g17(s, residuals[i]);
    s += '\n';
  }
  return s;
}

inline void write_residual_csv(const std::string& path, const std::vector<double>& r) {
  atomic_write(path, residual_csv(r));
}

// ---- config parsing --------------------------------------------------------

inline DilationGroup group_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "one_parameter") return DilationGroup::one_parameter(mat_from_json(j.at("matrix")));
  if (kind == "cyclic") return DilationGroup::cyclic(mat_from_json(j.at("matrix")));
  if (kind == "similitude") return DilationGroup::similitude(j.at("dim").get<int>());
  if (kind == "diag2param")
    return DilationGroup::diag_two_param(j.at("alpha").get<double>(), j.at("beta").get<double>());
  if (kind == "explicit") {
    std::vector<std::pair<Mat, double>> samples;
    for (const Json& s : j.at("samples"))
      samples.emplace_back(mat_from_json(s.at("matrix")), s.value("weight", 1.0));
    return DilationGroup::explicit_sampled(std::move(samples), j.at("dim").get<int>());
  }
  fail("unknown group kind '" + kind + "'");
}

inline FrequencySet freqset_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const bool open = j.value("open", false);
  if (kind == "box") return FrequencySet::box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")), open);
  if (kind == "interval")
    return FrequencySet::interval(j.at("lo").get<double>(), j.at("hi").get<double>(), open);
  if (kind == "annulus")
    return FrequencySet::annulus(j.at("dim").get<int>(), j.at("inner").get<double>(),
                                 j.at("outer").get<double>(), open);
  if (kind == "symmetric_band")
    return FrequencySet::symmetric_band(j.at("inner").get<double>(), j.at("outer").get<double>(), open);
  fail("unknown frequency set kind '" + kind + "'");
}

inline FreqGrid grid_from_json(const Json& j) {
  const Json& jn = j.at("n");
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> dxi{1.0, 1.0, 1.0}, offset{0.0, 0.0, 0.0};
  int dim;
  if (jn.is_array()) {
    dim = static_cast<int>(jn.size());
    require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2, or 3");
    const Json& js = j.at("spacing");
    require(js.is_array() && static_cast<int>(js.size()) == dim, "spacing must match n");
    for (int a = 0; a < dim; ++a) {
      n[a] = jn[a].get<int>();
      dxi[a] = js[a].get<double>();
    }
    if (j.contains("offset"))
      for (int a = 0; a < dim; ++a) offset[a] = j.at("offset")[a].get<double>();
  } else {
    dim = 1;
    n[0] = jn.get<int>();
    dxi[0] = j.at("spacing").get<double>();
    offset[0] = j.value("offset", 0.0);
  }
  return FreqGrid::make(dim, n, dxi, offset);
}

inline GroupWeight weight_from_json(const Json& j) {
  GroupWeight w;
  w.scale = j.value("scale", 1.0);
  w.det_exp = j.value("det_exp", 0.0);
  w.op_exp = j.value("op_exp", 0.0);
  w.inv_op_exp = j.value("inv_op_exp", 0.0);
  return w;
}

inline NormSpec normspec_from_json(const Json& j) {
  NormSpec s;
  s.p = num_from_json(j.at("p"));
  s.q = num_from_json(j.at("q"));
  if (j.contains("weight")) s.v0 = weight_from_json(j.at("weight"));
  return s;
}

}  // namespace io
}  // namespace coorbit
