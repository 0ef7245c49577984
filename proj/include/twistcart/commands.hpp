#pragma once

// Command implementations behind the CLI. Each returns a JSON report and
// an exit code: 0 pass, 1 property failure, 2 input error, 3 unstable window.

#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "twistcart/cartan.hpp"
#include "twistcart/corpus.hpp"
#include "twistcart/elliptic_grid.hpp"
#include "twistcart/gc_linalg.hpp"
#include "twistcart/grid_io.hpp"
#include "twistcart/json_io.hpp"
#include "twistcart/spectral.hpp"

namespace twistcart::cli {

inline constexpr const char* report_schema = "twistcart.report/1";

struct Report {
  json body;
  int exit_code = 0;
};

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Parse, "sha256 failed");
  std::ostringstream os;
  os << std::hex;
  for (unsigned int i = 0; i < len; ++i) {
    os.width(2);
    os.fill('0');
    os << static_cast<int>(md[i]);
  }
  return os.str();
}

inline json input_entry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return json{{"path", path}, {"sha256", sha256_hex(bytes)}};
}

inline json new_report(const std::string& command) {
  return json{{"schema", report_schema}, {"command", command}, {"inputs", json::array()}};
}

inline json parity_json(const ParityDims& d) { return json{{"even", d[0]}, {"odd", d[1]}}; }

inline json graded_json(const std::map<int, ParityDims>& m) {
  json o = json::object();
  for (const auto& [p, d] : m) o[std::to_string(p)] = json::array({d[0], d[1]});
  return o;
}

// Runs a command body, turning library errors into exit codes 2 and 3.
inline Report guarded(const std::string& command, const std::function<Report()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    json r = new_report(command);
    r["error"] = json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
    return {r, e.kind() == ErrorKind::UnstableWindow ? 3 : 2};
  }
}

struct ModelArgs {
  std::string model;
  std::optional<int> rank, polycap;
  std::optional<std::string> eta;
};

struct Loaded {
  CartanComplex complex;
  Twisting eta;
  bool has_eta = false;
};

inline Loaded load_inputs(const ModelArgs& a, json& report) {
  report["inputs"].push_back(input_entry(a.model));
  ModelFile mf = corpus::load_model(a.model);
  int rank = a.rank.value_or(mf.rank), cap = a.polycap.value_or(mf.poly_cap);
  Loaded l{build_cartan(mf.model, rank, cap), Twisting{}, false};
  if (a.eta) {
    report["inputs"].push_back(input_entry(*a.eta));
    l.eta = make_twisting(mf.model, corpus::load_eta_for(mf.model, rank, *a.eta));
    l.has_eta = true;
  }
  report["window"] = json{{"W", l.complex.window}, {"polyCap", l.complex.cap}, {"rank", l.complex.rank},
                          {"topFormDegree", l.complex.model.top_degree()}};
  return l;
}

inline Report cmd_cohomology(const ModelArgs& a) {
  return guarded("cohomology", [&] {
    json r = new_report("cohomology");
    Loaded l = load_inputs(a, r);
    json untw = json::object();
    for (const auto& [n, d] : untwisted_dims(l.complex)) untw[std::to_string(n)] = d;
    json res{{"model", l.complex.model.name}, {"untwisted", untw}};
    if (l.has_eta) {
      TwistedResult t = twisted_cohomology(l.complex, l.eta);
      res["twisted"] = json{{"even", t.cohomology.dims[0]},
                            {"odd", t.cohomology.dims[1]},
                            {"rawEven", t.cohomology.raw[0]},
                            {"rawOdd", t.cohomology.raw[1]}};
      res["etaExact"] = is_exact(l.complex, l.eta.total());
      r["stable"] = t.stable;
    }
    r["results"] = res;
    return Report{r, 0};
  });
}

struct SpectralArgs {
  ModelArgs model;
  std::string filtration = "F";
  int maxpage = -1;
};

inline Report cmd_spectral(const SpectralArgs& a) {
  return guarded("spectral", [&] {
    json r = new_report("spectral");
    Loaded l = load_inputs(a.model, r);
    FiltrationKind kind;
    if (a.filtration == "F") kind = FiltrationKind::F;
    else if (a.filtration == "L") kind = FiltrationKind::L;
    else throw Error(ErrorKind::Parse, "filtration must be F or L");
    Filtration f = make_filtration(l.complex, l.eta, kind);
    SpectralResult s = pages(f, a.maxpage);
    ConvergenceReport c = convergence_check(f, s);
    json pg = json::array();
    for (const auto& p : s.pages) pg.push_back(json{{"r", p.r}, {"verified", p.verified}, {"dims", graded_json(p.dims)}});
    json res{{"kind", kind_name(kind)}, {"pages", pg}, {"eInfinity", graded_json(s.e_inf)},
             {"eInfinityTotal", parity_json(c.e_inf)}, {"twisted", parity_json(c.twisted)},
             {"converged", c.converged}, {"stabilized", c.stabilized}, {"pagesVerified", c.pages_verified}};
    res["collapse_page"] = s.collapse_page ? json(*s.collapse_page) : json(nullptr);
    if (kind == FiltrationKind::F) {
      PageLabels lb = page_labels(l.complex, s);
      res["hgPages"] = lb.hg_pages;
      res["etaPage"] = lb.eta_page ? json(*lb.eta_page) : json(nullptr);
      res["collapse"] = lb.collapses_at_hg;
    } else {
      res["collapse"] = s.collapse_page && *s.collapse_page <= 1;
      res["expectedE1"] = graded_json(expected_l_e1(l.complex, l.eta));
    }
    r["results"] = res;
    r["stable"] = true;
    return Report{r, c.converged && c.pages_verified ? 0 : 1};
  });
}

inline json inclusion_json(const std::vector<InclusionCheck>& v) {
  json a = json::array();
  for (const auto& c : v) {
    json e{{"p", c.p}, {"holds", c.holds}};
    if (!c.holds) e["witness"] = c.witness;
    a.push_back(e);
  }
  return a;
}

inline Report cmd_cofinality(const ModelArgs& a) {
  return guarded("spectral cofinality", [&] {
    json r = new_report("spectral cofinality");
    Loaded l = load_inputs(a, r);
    CofinalityReport c = cofinality(l.complex);
    r["results"] = json{{"n", c.n},
                        {"holds", c.holds},
                        {"lower", inclusion_json(c.lower)},
                        {"upper", inclusion_json(c.upper)},
                        {"asWrittenHolds", c.as_written_holds},
                        {"lowerAsWritten", inclusion_json(c.lower_as_written)},
                        {"upperAsWritten", inclusion_json(c.upper_as_written)}};
    return Report{r, c.holds ? 0 : 1};
  });
}

inline json cvec_json(const CVec& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

inline Report cmd_gc(const std::string& sub, const std::string& path) {
  return guarded("gc " + sub, [&] {
    json r = new_report("gc " + sub);
    r["inputs"].push_back(input_entry(path));
    json j = read_json_file(path);
    json res;
    int code = 0;
    try {
      if (sub == "check") {
        GCCheck c = is_gc(rmatrix_from_json(j.at("J")));
        res = json{{"ok", c.ok}, {"failures", c.failures}};
        code = c.ok ? 0 : 1;
      } else if (sub == "eigen") {
        RMat jm = rmatrix_from_json(j.at("J"));
        auto l = i_eigenspace(jm);
        json basis = json::array();
        for (const auto& v : l) basis.push_back(cvec_json(v));
        bool round = gc_from_isotropic(l) == jm;
        res = json{{"dimension", complex_rank(l)}, {"basis", basis}, {"roundTrip", round}};
        code = round ? 0 : 1;
      } else if (sub == "gk") {
        GKTriple t = corpus::triple_from_json(j);
        auto [j1, j2] = gk_from_triple(t);
        GKPairCheck c = check_gk_pair(j1, j2);
        GKTriple back = extract_bihermitian(j1, j2);
        bool recovered = back.g == t.g && back.iplus == t.iplus && back.iminus == t.iminus && back.b == t.b;
        res = json{{"J1", matrix_to_json(j1)}, {"J2", matrix_to_json(j2)}, {"j1IsGC", c.j1_gc}, {"j2IsGC", c.j2_gc},
                   {"commute", c.commute}, {"gInvolution", c.g_involution}, {"positiveDefinite", c.positive},
                   {"recovered", recovered}};
        code = c.ok() && recovered ? 0 : 1;
      } else if (sub == "moment") {
        HamiltonianPointData h = corpus::hamiltonian_from_json(j);
        json rs = json::array();
        bool zero = true;
        for (const auto& m : moment_residual(h)) {
          rs.push_back(json{{"condition", vector_to_json(m.condition)}, {"poisson", vector_to_json(m.poisson)},
                            {"conditionZero", m.condition_zero()}, {"poissonZero", m.poisson_zero()}});
          zero = zero && m.condition_zero() && m.poisson_zero();
        }
        res = json{{"samples", rs}, {"zero", zero}};
        code = zero ? 0 : 1;
      } else if (sub == "bracket") {
        ModelFile m = corpus::load_model(corpus::resolve(path, j.at("model").get<std::string>()));
        EqForm hf = form_from_json(m.model, 0, j.at("H"));
        std::map<std::size_t, Rational> acc;
        for (const auto& [k, x] : hf.terms) acc[k.first] += x;
        QVec h = QVec::from_map(acc);
        RVec x = rvector_from_json(j.at("X")), y = rvector_from_json(j.at("Y"));
        res = json{{"bracket", vector_to_json(courant_bracket_const(x, y, m.model, h))},
                   {"integrable", constant_gk_integrable(h)}};
      } else {
        throw Error(ErrorKind::Parse, "unknown gc subcommand " + sub);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
    r["results"] = res;
    return Report{r, code};
  });
}

struct EllipticArgs {
  std::string sub;
  std::string sample = "z2";
  double h = 1.0 / 64;
  double extent = 0.5;
  double radius = 0.5;  // ball radius as a fraction of the extent
  int dim = 2;
  bool warped = false;
  // field files; a J file fixes the grid
  std::optional<std::string> jfield, field, f, g;
};

inline Report cmd_elliptic(const EllipticArgs& a) {
  return guarded("elliptic " + a.sub, [&] {
    json r = new_report("elliptic " + a.sub);
    if (a.warped && a.jfield) throw Error(ErrorKind::Parse, "--warped and --jfield are exclusive");
    if (a.f.has_value() != a.g.has_value()) throw Error(ErrorKind::Parse, "--f and --g go together");
    WarpedChart w;
    auto pull = [&](const PlaneFunction& f) -> PlaneFunction {
      if (!a.warped) return f;
      return [f, w](const std::vector<double>& p) {
        auto q = w.phi(p[0], p[1]);
        return f({q[0], q[1]});
      };
    };
    // a loaded file fixes the grid; every other input must sit on the same one
    std::optional<AlmostComplexField> loaded;
    if (a.jfield) {
      r["inputs"].push_back(input_entry(*a.jfield));
      loaded = load_j_field(*a.jfield);
    }
    std::map<std::string, ScalarField> files;
    for (const auto* path : {&a.f, &a.g, &a.field})
      if (*path && !files.count(**path)) {
        r["inputs"].push_back(input_entry(**path));
        files.emplace(**path, load_scalar_field(**path));
      }
    ChartGrid g = loaded           ? loaded->grid
                  : !files.empty() ? files.begin()->second.grid
                                   : ChartGrid::cube(a.dim, a.h, a.extent);
    if (a.warped && g.dim != 2) throw Error(ErrorKind::DimensionMismatch, "warped chart is two dimensional");
    AlmostComplexField j = loaded      ? *loaded
                           : a.warped ? sample_j(g, [&](const std::vector<double>& p) { return w.j(p); })
                                      : sample_j(g, [&](const std::vector<double>&) { return standard_j(g.dim); });
    auto scalar = [&](const std::optional<std::string>& path, const PlaneFunction& fallback) {
      if (!path) return sample_scalar(g, pull(fallback));
      const ScalarField& f = files.at(*path);
      detail::same_grid(g, f.grid);
      return f;
    };
    // ball centered in the grid, radius a fraction of the shortest half-width
    std::vector<int> mid(g.dim);
    int half = g.hi[0] - g.lo[0];
    for (int k = 0; k < g.dim; ++k) {
      mid[k] = (g.lo[k] + g.hi[k]) / 2;
      half = std::min(half, std::min(mid[k] - g.lo[k], g.hi[k] - mid[k]));
    }
    Ball ball{mid, a.radius * half};
    json res{{"h", g.h}, {"extent", (g.hi[0] - g.lo[0]) * g.h / 2}, {"dim", g.dim}, {"warped", a.warped}};
    int code = 0;
    if (a.sub == "rc") {
      if (g.dim != 2 && !a.f) throw Error(ErrorKind::DimensionMismatch, "samples are two dimensional");
      auto [f, gg] = a.f ? std::make_pair(PlaneFunction{}, PlaneFunction{}) : plane_pair(a.sample);
      ScalarField sf = scalar(a.f, f), sg = scalar(a.g, gg);
      res["sample"] = a.f ? json(nullptr) : json(a.sample);
      res["rcResidual"] = rc_residual(j, sf, sg);
      res["operatorResidual"] = operator_residual(j, sf, ball);
    } else if (a.sub == "coeffs") {
      CoefficientField cf = elliptic_coefficients(j);
      const std::vector<int>& center = mid;
      const Coefficients& c = cf.c[g.flat(center)];
      double dev = 0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (cf.defined[i])
          for (int p = 0; p < g.dim; ++p)
            for (int q = 0; q < g.dim; ++q) dev = std::max(dev, std::fabs(cf.c[i].a[p][q] - (p == q ? 2.0 : 0.0)));
      res["aCenter"] = c.a;
      res["bCenter"] = c.b;
      res["maxDeviationFrom2I"] = dev;
      res["positiveDefiniteRadius"] = positive_definite_region(cf, center);
    } else if (a.sub == "maxcheck") {
      if (g.dim != 2 && !a.field) throw Error(ErrorKind::DimensionMismatch, "samples are two dimensional");
      MaxPrincipleReport m = max_principle_check(scalar(a.field, a.field ? PlaneFunction{} : plane_function(a.sample)), ball);
      res["sample"] = a.field ? json(nullptr) : json(a.sample);
      res["supInterior"] = m.sup_interior;
      res["supBoundary"] = m.sup_boundary;
      res["infInterior"] = m.inf_interior;
      res["infBoundary"] = m.inf_boundary;
      res["pass"] = m.pass;
      code = m.pass ? 0 : 1;
    } else {
      throw Error(ErrorKind::Parse, "unknown elliptic subcommand " + a.sub);
    }
    r["results"] = res;
    return Report{r, code};
  });
}

// Plain-text rendering: one "path: value" line per leaf.
inline void flatten(const json& j, const std::string& prefix, std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << ": " << j.dump() << "\n";
  }
}

inline std::string table(const json& j) {
  std::ostringstream os;
  flatten(j, "", os);
  return os.str();
}

}  // namespace twistcart::cli
