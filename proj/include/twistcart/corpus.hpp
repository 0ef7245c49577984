#pragma once

// Shipped example data: torus models, the trivial-circle counterexample,
// weight-k representation pairs, small cochain complexes and maps, and
// pointwise generalized complex samples. Builders here are the source of
// truth; write_corpus serializes them and load_* read them back.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "twistcart/cartan.hpp"
#include "twistcart/dg_core.hpp"
#include "twistcart/gc_linalg.hpp"
#include "twistcart/json_io.hpp"

namespace twistcart::corpus {

// iota[a][i] = iota_a(theta_(i+1)), a constant.
inline CDGAModel torus_model(int n, const std::vector<std::vector<Rational>>& iota, std::string name = "") {
  if (n < 1) throw Error(ErrorKind::InvalidModel, "torus needs n >= 1");
  std::vector<Generator> gens;
  for (int i = 1; i <= n; ++i) gens.push_back({"theta" + std::to_string(i), 1, 1});
  if (name.empty()) name = "T" + std::to_string(n);
  CDGAModel m = free_algebra(name, gens);
  for (const auto& row : iota) {
    if (row.size() != static_cast<std::size_t>(n))
      throw Error(ErrorKind::InvalidContraction, "contraction row needs one value per generator");
    std::vector<QVec> vals;
    for (const auto& x : row) vals.push_back(is_zero(x) ? QVec{} : QVec{{{0, x}}});
    m.contractions.push_back(extend_derivation(m, vals, -1));
  }
  try {
    validate_model(m);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidContraction, std::string("Cartan identity fails: ") + e.what());
  }
  return m;
}

inline std::vector<std::vector<Rational>> zero_contractions(int rank, int n) {
  return std::vector<std::vector<Rational>>(rank, std::vector<Rational>(n, Rational(0)));
}

inline CDGAModel point_model(int rank) {
  CDGAModel m = free_algebra("pt", {});
  for (int a = 0; a < rank; ++a) m.contractions.push_back(QMat(1, 1));
  validate_model(m);
  return m;
}

// Circle with weight-k rotation: iota(theta) = k.
inline CDGAModel weight_circle(int k) {
  return torus_model(1, {{Rational(k)}}, "S1_weight" + std::to_string(k));
}

inline EqForm form_term(const CDGAModel& m, const std::string& label, const Multi& poly, const Rational& c = 1) {
  auto i = m.find_label(label);
  if (!i) throw Error(ErrorKind::Parse, "unknown basis element '" + label + "'");
  EqForm f;
  f.add({*i, poly}, c);
  return f;
}

struct Example {
  CartanComplex complex;
  Twisting eta;
};

// Trivial circle action on the circle, twisted by theta (x) x.
inline Example trivial_circle_example(int cap = 3) {
  CDGAModel m = torus_model(1, zero_contractions(1, 1), "S1_trivial");
  Example e{build_cartan(m, 1, cap), make_twisting(m, form_term(m, "theta1", {1}))};
  return e;
}

struct WeightPair {
  int k = 0;
  CartanPair pair;
  EqForm euler;  // k x on the point
};

// Zero section of the weight-k line over a point: N = pt, A = circle bundle.
inline WeightPair weight_rep_pair(int k, int cap = 4) {
  if (k == 0) throw Error(ErrorKind::ZeroWeight, "weight must be nonzero");
  CDGAModel big = point_model(1), small = weight_circle(k);
  QMat r = algebra_map(big, small, {});
  WeightPair w{k, build_pair(big, small, r, 1, cap), EqForm{}};
  w.euler.add({0, {1}}, Rational(k));
  return w;
}

inline ConePair weight_rep_cone(int k, int cap = 4) { return pair_view(weight_rep_pair(k, cap).pair).pair; }

struct EulerDiagram {
  int window = 0;
  QVec tau;  // Thom class, cone basis
  bool tau_found = false;
  bool tau_cocycle = false;
  bool euler_matches = false;  // j(tau) = Eul
  bool commutes = false;       // j(x^q tau) = x^q Eul for every checked q
  std::vector<int> powers;
};

inline EulerDiagram euler_diagram(const WeightPair& w) {
  const CartanPair& p = w.pair;
  PairView v = pair_view(p);
  TwistedCone tc = twisted_cone(v.pair, QMat(p.big.size(), p.big.size()), QMat(p.small.size(), p.small.size()));
  EulerDiagram out;
  out.window = cone_window(p);
  WindowedCohomology h = windowed_cohomology(tc.t, out.window);

  auto cone_index_a = [&](const EqKey& key) { return tc.amap[v.small.to_total[p.small.index.at(key)]]; };
  auto cone_index_n = [&](const EqKey& key) { return tc.nmap[v.big.to_total[p.big.index.at(key)]]; };
  std::size_t theta = cone_index_a({*p.small.model.find_label("theta1"), {0}});

  for (const auto& rep : h.representatives) {
    if (rep.degree != 1) continue;
    std::map<std::size_t, Rational> part;
    for (const auto& [i, x] : rep.vector.entries)
      if (tc.t.degree[i] == 1) part[i] = x;
    QVec t = QVec::from_map(part);
    Rational c = t.get(theta);
    if (is_zero(c)) continue;
    out.tau = scale(t, Rational(1 / c));
    out.tau_found = true;
    break;
  }
  if (!out.tau_found) return out;
  out.tau_cocycle = tc.t.delta.apply(out.tau).empty();

  auto split = [&](const QVec& cone) {
    EqForm n, a;
    for (std::size_t j = 0; j < p.big.size(); ++j) n.add(p.big.basis[j], cone.get(cone_index_n(p.big.basis[j])));
    for (std::size_t j = 0; j < p.small.size(); ++j) a.add(p.small.basis[j], cone.get(cone_index_a(p.small.basis[j])));
    return std::make_pair(n, a);
  };
  auto join = [&](const EqForm& n, const EqForm& a) {
    std::map<std::size_t, Rational> acc;
    for (const auto& [key, x] : n.terms) acc[cone_index_n(key)] += x;
    for (const auto& [key, x] : a.terms) acc[cone_index_a(key)] += x;
    return QVec::from_map(acc);
  };

  auto [tn, ta] = split(out.tau);
  out.euler_matches = tn == w.euler;
  out.commutes = true;
  for (int q = 0; q + 1 <= p.big.cap; ++q) {
    EqForm xq;
    xq.add({0, {q}}, 1);
    EqForm nq = eq_mul(p.big.model, xq, tn, p.big.cap);
    EqForm aq = eq_mul(p.small.model, restrict_form(p, xq), ta, p.small.cap);
    QVec moved = join(nq, aq);
    bool ok = tc.t.delta.apply(moved).empty();
    EqForm j_image = split(moved).first;
    EqForm rhs = eq_mul(p.big.model, xq, w.euler, p.big.cap);
    ok = ok && is_exact(p.big, j_image - rhs);
    out.powers.push_back(q);
    if (!ok) out.commutes = false;
  }
  return out;
}

// Subtorus T2 = {theta3 = const} inside T3, circle rotating theta1.
inline CartanPair subtorus_pair(int cap = 3) {
  CDGAModel big = torus_model(3, {{1, 0, 0}}, "T3_rotation");
  CDGAModel small = torus_model(2, {{1, 0}}, "T2_rotation");
  QMat r = algebra_map(big, small, {QVec::unit(*small.find_label("theta1")), QVec::unit(*small.find_label("theta2")), QVec{}});
  return build_pair(big, small, r, 1, cap);
}

// Cochain complexes for dg_core.
inline CochainComplex make_complex(const std::map<int, std::vector<std::string>>& labels,
                                   const std::map<int, std::vector<std::vector<Rational>>>& d) {
  CochainComplex c;
  c.labels = labels;
  for (const auto& [n, rows] : d) c.d[n] = QMat::from_dense(rows);
  c.validate();
  return c;
}

inline CochainComplex two_term_acyclic() { return make_complex({{0, {"a"}}, {1, {"b"}}}, {{0, {{1}}}}); }

inline CochainComplex three_term_acyclic() {
  return make_complex({{0, {"u"}}, {1, {"v1", "v2"}}, {2, {"w"}}}, {{0, {{1}, {1}}}, {1, {{1, -1}}}});
}

inline CochainComplex t2_complex() {
  return make_complex({{0, {"1"}}, {1, {"theta1", "theta2"}}, {2, {"theta1*theta2"}}}, {});
}

// T2 plus an acyclic summand e -> f in degrees 1, 2.
inline CochainComplex t2_plus_acyclic() {
  return make_complex({{0, {"1"}}, {1, {"theta1", "theta2", "e"}}, {2, {"theta1*theta2", "f"}}},
                      {{1, {{0, 0, 0}, {0, 0, 1}}}});
}

inline ChainMap make_map(const CochainComplex& s, const CochainComplex& t,
                         const std::map<int, std::vector<std::vector<Rational>>>& comps, int shift = 0) {
  ChainMap m;
  m.source = s;
  m.target = t;
  m.shift = shift;
  for (const auto& [n, rows] : comps) m.f[n] = QMat::from_dense(rows);
  m.validate();
  return m;
}

struct NamedMap {
  std::string name;
  ChainMap map;
  bool quasi_iso = true;
};

inline std::vector<NamedMap> chain_maps() {
  CochainComplex t2 = t2_complex(), big = t2_plus_acyclic();
  std::vector<NamedMap> out;
  out.push_back({"t2_identity", identity_map(t2), true});
  out.push_back({"t2_retract_inclusion", make_map(t2, big, {{0, {{1}}}, {1, {{1, 0}, {0, 1}, {0, 0}}}, {2, {{1}, {0}}}}), true});
  out.push_back({"t2_retract_projection",
                 make_map(big, t2, {{0, {{1}}}, {1, {{1, 0, 0}, {0, 1, 0}}}, {2, {{1, 0}}}}), true});
  out.push_back({"t2_sheared_inclusion", make_map(t2, big, {{0, {{1}}}, {1, {{1, 0}, {0, 1}, {0, 0}}}, {2, {{1}, {1}}}}), true});
  out.push_back({"t2_zero", make_map(t2, t2, {}), false});
  return out;
}

// Generalized complex point data.
struct GCSample {
  std::string name;
  RMat j;
  bool valid = true;
};

struct TripleSample {
  std::string name;
  GKTriple triple;
};

struct HamiltonianSample {
  std::string name;
  HamiltonianPointData data;
};

struct GCExamples {
  std::vector<GCSample> structures;
  std::vector<TripleSample> triples;
  std::vector<HamiltonianSample> hamiltonian;
};

inline RMat std_omega(std::size_t n) {
  RMat w(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    w(2 * i, 2 * i + 1) = 1;
    w(2 * i + 1, 2 * i) = -1;
  }
  return w;
}

inline RMat std_complex(std::size_t n) {
  RMat c(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    c(2 * i, 2 * i + 1) = -1;
    c(2 * i + 1, 2 * i) = 1;
  }
  return c;
}

// Left and right multiplication by x i + y j + z k on H = R^4, basis (1, i, j, k).
inline RMat quaternion_left(const Rational& x, const Rational& y, const Rational& z) {
  RMat li{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
  RMat lj{{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
  RMat lk{{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
  return x * li + y * lj + z * lk;
}

inline RMat quaternion_right(const Rational& x, const Rational& y, const Rational& z) {
  RMat ri{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
  RMat rj{{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
  RMat rk{{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}};
  return x * ri + y * rj + z * rk;
}

// Rotation of R^(2n) in each plane, moment map |z|^2 / 2, sampled at p.
inline HamiltonianPointData symplectic_rotation_sample(std::size_t n, const RVec& p) {
  RMat w = std_omega(n);
  HamiltonianPointData h;
  h.j = j_symplectic(w);
  RMat winv = inverse(w);
  for (std::size_t a = 0; a < n; ++a) {
    RVec dmu(2 * n, Rational(0));
    dmu[2 * a] = p[2 * a];
    dmu[2 * a + 1] = p[2 * a + 1];
    MomentSample s{dmu, winv.apply(dmu), RVec(2 * n, Rational(0))};
    h.samples.push_back(s);
  }
  return h;
}

inline GCExamples gc_point_examples() {
  GCExamples g;
  for (std::size_t n : {1, 2, 3}) g.structures.push_back({"symplectic_n" + std::to_string(n), j_symplectic(std_omega(n))});
  for (std::size_t n : {1, 2}) g.structures.push_back({"complex_n" + std::to_string(n), j_complex(std_complex(n))});
  RMat b{{0, 1, Rational(1, 2), 0}, {-1, 0, 0, 2}, {Rational(-1, 2), 0, 0, -1}, {0, -2, 1, 0}};
  g.structures.push_back({"symplectic_n2_btransform", b_transform(j_symplectic(std_omega(2)), b)});
  g.structures.push_back({"complex_n2_btransform", b_transform(j_complex(std_complex(2)), b)});
  g.structures.push_back({"identity_nonexample", RMat::identity(4), false});

  g.triples.push_back({"euclidean_r2", GKTriple{RMat::identity(2), std_complex(1), std_complex(1), RMat(2, 2)}});
  g.triples.push_back({"euclidean_r4_opposite", GKTriple{RMat::identity(4), std_complex(2), -std_complex(2), RMat(4, 4)}});
  RMat s{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 2, 1}, {0, 0, 0, 1}};
  RMat si = inverse(s);
  RMat bq{{0, 1, 0, 0}, {-1, 0, Rational(1, 2), 0}, {0, Rational(-1, 2), 0, 2}, {0, 0, -2, 0}};
  g.triples.push_back({"quaternion_r4_sheared",
                       GKTriple{s.transpose() * s, si * quaternion_left(Rational(1, 3), Rational(2, 3), Rational(2, 3)) * s,
                                si * quaternion_right(0, 0, 1) * s, bq}});

  g.hamiltonian.push_back({"symplectic_rotation_r2", symplectic_rotation_sample(1, {1, 0})});
  g.hamiltonian.push_back({"symplectic_rotation_r4", symplectic_rotation_sample(2, {1, 2, Rational(1, 2), -3})});
  return g;
}

// Named (model, twisting) pairs used throughout the acceptance suite.
struct TwistingSample {
  std::string name;
  std::string model;  // corpus model name
  EqForm eta;
  bool exact = false;
};

struct ModelSample {
  std::string name;
  CDGAModel model;
  int rank = 0;
  int cap = 1;
  std::string notes;
};

inline std::vector<ModelSample> models() {
  std::vector<ModelSample> m;
  m.push_back({"pt_r1", point_model(1), 1, 4, "point with a trivial circle action"});
  m.push_back({"t2", torus_model(2, {}, "T2"), 0, 1, "two-torus, no group"});
  m.push_back({"t3", torus_model(3, {}, "T3"), 0, 1, "three-torus, no group"});
  m.push_back({"s1_free", torus_model(1, {{1}}, "S1_free"), 1, 4, "circle acting on itself"});
  m.push_back({"s1_trivial", torus_model(1, zero_contractions(1, 1), "S1_trivial"), 1, 3, "trivial circle action on the circle"});
  m.push_back({"s1_weight2", weight_circle(2), 1, 4, "unit circle of the weight-2 line"});
  m.push_back({"s1_weight3", weight_circle(3), 1, 4, "unit circle of the weight-3 line"});
  m.push_back({"t2_rotation", torus_model(2, {{1, 0}}, "T2_rotation"), 1, 3, "circle rotating the first factor of T2"});
  m.push_back({"t3_rotation", torus_model(3, {{1, 0, 0}}, "T3_rotation"), 1, 3, "circle rotating the first factor of T3"});
  m.push_back({"t3_trivial_r1", torus_model(3, zero_contractions(1, 3), "T3_trivial"), 1, 3, "trivial circle action on T3"});
  m.push_back({"t3_free_r3", torus_model(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, "T3_free"), 3, 2, "T3 acting on itself"});
  return m;
}

inline ModelSample find_model(const std::string& name) {
  for (auto& m : models())
    if (m.name == name) return m;
  throw Error(ErrorKind::Parse, "no corpus model named " + name);
}

inline std::vector<TwistingSample> twistings() {
  std::vector<TwistingSample> t;
  CDGAModel t3 = torus_model(3, {});
  t.push_back({"t3_volume", "t3", form_term(t3, "theta1*theta2*theta3", {}), false});
  t.push_back({"t3_zero", "t3", EqForm{}, true});
  CDGAModel t3r = find_model("t3_trivial_r1").model;
  t.push_back({"t3_trivial_r1_volume", "t3_trivial_r1", form_term(t3r, "theta1*theta2*theta3", {0}), false});
  CDGAModel s1 = find_model("s1_trivial").model;
  t.push_back({"s1_trivial_theta_x", "s1_trivial", form_term(s1, "theta1", {1}), false});
  t.push_back({"s1_trivial_zero", "s1_trivial", EqForm{}, true});
  CDGAModel rot = find_model("t3_rotation").model;
  t.push_back({"t3_rotation_exact", "t3_rotation", eq_dG(rot, 1, form_term(rot, "theta1*theta2", {0})), true});
  CDGAModel rot2 = find_model("t2_rotation").model;
  t.push_back({"t2_rotation_exact", "t2_rotation", eq_dG(rot2, 1, form_term(rot2, "theta1*theta2", {0})), true});
  CDGAModel fr = find_model("t3_free_r3").model;
  t.push_back({"t3_free_r3_exact", "t3_free_r3", eq_dG(fr, 3, form_term(fr, "theta1*theta2", {0, 0, 0})), true});
  t.push_back({"s1_free_zero", "s1_free", EqForm{}, true});
  return t;
}

inline CartanComplex build_sample(const ModelSample& m) { return build_cartan(m.model, m.rank, m.cap); }

// Serialization and the manifest.
inline json pair_to_json(const std::string& big, const std::string& small, const QMat& r, int rank, int cap) {
  return json{{"big", big + ".json"}, {"small", small + ".json"}, {"restriction", triplets_to_json(r)},
              {"rank", rank}, {"polyCap", cap}};
}

inline json triple_to_json(const GKTriple& t) {
  return json{{"kind", "gk"}, {"g", matrix_to_json(t.g)}, {"Iplus", matrix_to_json(t.iplus)},
              {"Iminus", matrix_to_json(t.iminus)}, {"b", matrix_to_json(t.b)}};
}

inline GKTriple triple_from_json(const json& j) {
  GKTriple t{rmatrix_from_json(j.at("g")), rmatrix_from_json(j.at("Iplus")), rmatrix_from_json(j.at("Iminus")),
             rmatrix_from_json(j.at("b"))};
  validate_triple(t);
  return t;
}

inline json hamiltonian_to_json(const HamiltonianPointData& h) {
  json samples = json::array();
  for (const auto& s : h.samples)
    samples.push_back(json{{"dmu", vector_to_json(s.dmu)}, {"xiM", vector_to_json(s.xi_m)}, {"alpha", vector_to_json(s.alpha)}});
  json iso = json::array();
  for (const auto& v : h.isotropy) iso.push_back(vector_to_json(v));
  return json{{"kind", "moment"}, {"J", matrix_to_json(h.j)}, {"samples", samples}, {"isotropy", iso}};
}

inline HamiltonianPointData hamiltonian_from_json(const json& j) {
  HamiltonianPointData h;
  h.j = rmatrix_from_json(j.at("J"));
  require_gc(h.j);
  for (const auto& s : j.at("samples"))
    h.samples.push_back({rvector_from_json(s.at("dmu")), rvector_from_json(s.at("xiM")), rvector_from_json(s.at("alpha"))});
  for (const auto& v : j.value("isotropy", json::array())) h.isotropy.push_back(rvector_from_json(v));
  return h;
}

inline json chain_map_to_json(const std::string& source, const std::string& target, const ChainMap& m, bool qi) {
  json comps = json::object();
  for (const auto& [n, c] : m.f) comps[std::to_string(n)] = triplets_to_json(c);
  return json{{"source", source + ".json"}, {"target", target + ".json"}, {"shift", m.shift},
              {"components", comps}, {"quasiIso", qi}};
}

inline std::string default_dir() {
  if (const char* env = std::getenv("TWISTCART_CORPUS")) return env;
#ifdef TWISTCART_CORPUS_DIR
  return TWISTCART_CORPUS_DIR;
#else
  return "corpus";
#endif
}

inline constexpr int corpus_version = 1;

inline void write_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "models");
  fs::create_directories(fs::path(dir) / "twistings");
  fs::create_directories(fs::path(dir) / "pairs");
  fs::create_directories(fs::path(dir) / "complexes");
  fs::create_directories(fs::path(dir) / "gc");
  json entries = json::array();
  auto entry = [&](const std::string& name, const std::string& kind, const std::string& file, const std::string& notes) {
    entries.push_back(json{{"name", name}, {"kind", kind}, {"file", file}, {"notes", notes}});
  };

  for (const auto& m : models()) {
    std::string f = "models/" + m.name + ".json";
    write_json_file((fs::path(dir) / f).string(), model_to_json(m.model, m.rank, m.cap));
    entry(m.name, "cdga", f, m.notes);
  }
  for (const auto& t : twistings()) {
    ModelSample m = find_model(t.model);
    std::string f = "twistings/" + t.name + ".json";
    write_json_file((fs::path(dir) / f).string(),
                    json{{"model", "../models/" + t.model + ".json"}, {"exact", t.exact}, {"terms", form_to_json(m.model, t.eta)}});
    entry(t.name, "twisting", f, t.exact ? "exact twisting" : "twisting with nonzero class");
  }
  for (int k : {1, 2, 3}) {
    WeightPair w = weight_rep_pair(k);
    std::string small = k == 1 ? "s1_free" : "s1_weight" + std::to_string(k);
    std::string f = "pairs/weight" + std::to_string(k) + ".json";
    json j = pair_to_json("../models/pt_r1", "../models/" + small, w.pair.restriction, 1, w.pair.big.cap);
    j["euler"] = form_to_json(w.pair.big.model, w.euler);
    write_json_file((fs::path(dir) / f).string(), j);
    entry("weight" + std::to_string(k), "pair", f, "zero section of the weight-" + std::to_string(k) + " complex line over a point");
  }
  {
    CartanPair p = subtorus_pair();
    write_json_file((fs::path(dir) / "pairs/t3_t2_subtorus.json").string(),
                    pair_to_json("../models/t3_rotation", "../models/t2_rotation", p.restriction, 1, p.big.cap));
    entry("t3_t2_subtorus", "pair", "pairs/t3_t2_subtorus.json", "subtorus theta3 = const, circle rotating theta1");
  }
  std::vector<std::pair<std::string, CochainComplex>> complexes{
      {"two_term_acyclic", two_term_acyclic()},
      {"three_term_acyclic", three_term_acyclic()},
      {"t2_exterior", t2_complex()},
      {"t2_plus_acyclic", t2_plus_acyclic()}};
  for (const auto& [name, c] : complexes) {
    std::string f = "complexes/" + name + ".json";
    write_json_file((fs::path(dir) / f).string(), complex_to_json(c));
    entry(name, "complex", f, "cochain complex");
  }
  auto complex_name = [&](const CochainComplex& c) {
    for (const auto& [name, d] : complexes)
      if (d.labels == c.labels && complex_to_json(d) == complex_to_json(c)) return name;
    throw Error(ErrorKind::Parse, "chain map endpoint is not a shipped complex");
  };
  for (const auto& m : chain_maps()) {
    std::string f = "complexes/map_" + m.name + ".json";
    write_json_file((fs::path(dir) / f).string(),
                    chain_map_to_json(complex_name(m.map.source), complex_name(m.map.target), m.map, m.quasi_iso));
    entry(m.name, "chainmap", f, m.quasi_iso ? "quasi-isomorphism" : "not a quasi-isomorphism");
  }
  GCExamples g = gc_point_examples();
  for (const auto& s : g.structures) {
    std::string f = "gc/" + s.name + ".json";
    write_json_file((fs::path(dir) / f).string(), json{{"kind", "gc"}, {"J", matrix_to_json(s.j)}, {"valid", s.valid}});
    entry(s.name, "gc-point", f, s.valid ? "generalized complex structure" : "non-example");
  }
  for (const auto& t : g.triples) {
    std::string f = "gc/" + t.name + ".json";
    write_json_file((fs::path(dir) / f).string(), triple_to_json(t.triple));
    entry(t.name, "gc-point", f, "bi-Hermitian triple");
  }
  for (const auto& h : g.hamiltonian) {
    std::string f = "gc/" + h.name + ".json";
    write_json_file((fs::path(dir) / f).string(), hamiltonian_to_json(h.data));
    entry(h.name, "gc-point", f, "Hamiltonian point data, alpha = 0");
  }
  {
    CDGAModel t3 = torus_model(3, {});
    json jb{{"kind", "bracket"}, {"model", "../models/t3.json"}, {"H", form_to_json(t3, form_term(t3, "theta1*theta2*theta3", {}))},
            {"X", vector_to_json(RVec{1, 0, 0, 0, 0, 0})}, {"Y", vector_to_json(RVec{0, 1, 0, 0, 0, 0})}};
    write_json_file((fs::path(dir) / "gc/t3_volume_bracket.json").string(), jb);
    entry("t3_volume_bracket", "gc-point", "gc/t3_volume_bracket.json", "constant Courant bracket on T3 with H = volume");
  }
  for (const auto& s : {"z2", "z3", "exp"}) entry(std::string("holomorphic_") + s, "grid", "", "generated in code");
  entry("non_holomorphic_bump", "grid", "", "generated in code, 1 - x^2 - y^2");
  write_json_file((fs::path(dir) / "manifest.json").string(), json{{"version", corpus_version}, {"entries", entries}});
}

// Loading.
struct LoadedTwisting {
  ModelFile model;
  EqForm eta;
  bool exact = false;
};

inline std::string resolve(const std::string& base_file, const std::string& rel) {
  return (std::filesystem::path(base_file).parent_path() / rel).lexically_normal().string();
}

inline ModelFile load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

inline LoadedTwisting load_twisting(const std::string& path) {
  json j = read_json_file(path);
  try {
    LoadedTwisting t;
    t.model = load_model(resolve(path, j.at("model").get<std::string>()));
    t.eta = form_from_json(t.model.model, t.model.rank, j.at("terms"));
    t.exact = j.value("exact", false);
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline EqForm load_eta_for(const CDGAModel& m, int rank, const std::string& path) {
  json j = read_json_file(path);
  try {
    return form_from_json(m, rank, j.is_array() ? j : j.at("terms"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline CartanPair load_pair(const std::string& path) {
  json j = read_json_file(path);
  try {
    ModelFile big = load_model(resolve(path, j.at("big").get<std::string>()));
    ModelFile small = load_model(resolve(path, j.at("small").get<std::string>()));
    QMat r = triplets_from_json(j.at("restriction"), small.model.size(), big.model.size());
    return build_pair(big.model, small.model, r, j.value("rank", big.rank), j.value("polyCap", big.poly_cap));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline ChainMap load_chain_map(const std::string& path) {
  json j = read_json_file(path);
  try {
    ChainMap m;
    m.source = complex_from_json(read_json_file(resolve(path, j.at("source").get<std::string>())));
    m.target = complex_from_json(read_json_file(resolve(path, j.at("target").get<std::string>())));
    m.shift = j.value("shift", 0);
    for (const auto& [key, t] : j.at("components").items()) {
      int n = std::stoi(key);
      m.f[n] = triplets_from_json(t, m.target.dim(n + m.shift), m.source.dim(n));
    }
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

struct ManifestEntry {
  std::string name, kind, file, notes;
};

inline std::vector<ManifestEntry> load_manifest(const std::string& dir) {
  json j = read_json_file((std::filesystem::path(dir) / "manifest.json").string());
  if (j.value("version", 0) != corpus_version) throw Error(ErrorKind::Parse, "unsupported corpus version");
  std::vector<ManifestEntry> out;
  for (const auto& e : j.at("entries"))
    out.push_back({e.at("name").get<std::string>(), e.at("kind").get<std::string>(), e.at("file").get<std::string>(),
                   e.value("notes", std::string())});
  return out;
}

// Loads every entry and runs its validator; returns the number checked.
inline std::size_t validate_corpus(const std::string& dir) {
  std::size_t n = 0;
  for (const auto& e : load_manifest(dir)) {
    std::string path = (std::filesystem::path(dir) / e.file).string();
    if (e.kind == "cdga") {
      ModelFile m = load_model(path);
      build_cartan(m.model, m.rank, m.poly_cap);
    } else if (e.kind == "twisting") {
      LoadedTwisting t = load_twisting(path);
      CartanComplex c = build_cartan(t.model.model, t.model.rank, t.model.poly_cap);
      if (!is_closed(c, t.eta)) throw Error(ErrorKind::NotClosed, e.name + " is not closed");
    } else if (e.kind == "pair") {
      load_pair(path);
    } else if (e.kind == "complex") {
      complex_from_json(read_json_file(path));
    } else if (e.kind == "chainmap") {
      load_chain_map(path);
    } else if (e.kind == "gc-point") {
      json j = read_json_file(path);
      std::string k = j.at("kind").get<std::string>();
      if (k == "gc") {
        bool ok = is_gc(rmatrix_from_json(j.at("J"))).ok;
        if (ok != j.value("valid", true)) throw Error(ErrorKind::NotGC, e.name + " has the wrong validity flag");
      } else if (k == "gk") {
        triple_from_json(j);
      } else if (k == "moment") {
        hamiltonian_from_json(j);
      } else if (k == "bracket") {
        ModelFile m = load_model(resolve(path, j.at("model").get<std::string>()));
        form_from_json(m.model, m.rank, j.at("H"));
      }
    } else if (e.kind == "grid") {
      // generated in code
    } else {
      throw Error(ErrorKind::Parse, "unknown corpus kind " + e.kind);
    }
    ++n;
  }
  return n;
}

}  // namespace twistcart::corpus
