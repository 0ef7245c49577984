// twistcart: command-line front end over the library commands.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "twistcart/commands.hpp"

using namespace twistcart;

namespace {

void add_model_options(CLI::App* app, cli::ModelArgs& a, bool with_eta) {
  app->add_option("model", a.model, "model JSON file")->required();
  app->add_option("--rank", a.rank, "torus rank (defaults to the file's)");
  app->add_option("--polycap", a.polycap, "polynomial degree cap D (defaults to the file's)");
  if (with_eta) app->add_option("--eta", a.eta, "twisting JSON file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted equivariant cohomology, generalized complex linear algebra and elliptic grid checks"};
  app.require_subcommand(1);
  bool table = false;
  app.add_flag("--table", table, "print a plain-text table instead of JSON");

  cli::ModelArgs coh;
  auto* c_coh = app.add_subcommand("cohomology", "untwisted and twisted windowed cohomology");
  add_model_options(c_coh, coh, true);

  cli::SpectralArgs sargs;
  auto* c_spectral = app.add_subcommand("spectral", "spectral sequence of the F or L filtration");
  c_spectral->add_option("model", sargs.model.model, "model JSON file");
  c_spectral->add_option("--rank", sargs.model.rank, "torus rank");
  c_spectral->add_option("--polycap", sargs.model.polycap, "polynomial degree cap D");
  c_spectral->add_option("--eta", sargs.model.eta, "twisting JSON file");
  c_spectral->add_option("--filtration", sargs.filtration, "F or L")->check(CLI::IsMember({"F", "L"}));
  c_spectral->add_option("--maxpage", sargs.maxpage, "last page to compute");
  cli::ModelArgs cof;
  auto* c_cof = c_spectral->add_subcommand("cofinality", "inclusions between the F and L filtrations");
  add_model_options(c_cof, cof, false);

  std::string gc_path;
  auto* c_gc = app.add_subcommand("gc", "pointwise generalized complex checks");
  c_gc->require_subcommand(1);
  for (const char* name : {"check", "eigen", "gk", "moment", "bracket"})
    c_gc->add_subcommand(name)->add_option("data", gc_path, "data JSON file")->required();

  cli::EllipticArgs ell;
  auto* c_ell = app.add_subcommand("elliptic", "finite-difference checks on chart grids");
  c_ell->require_subcommand(1);
  for (const char* name : {"rc", "coeffs", "maxcheck"}) {
    auto* s = c_ell->add_subcommand(name);
    s->set_help_flag("--help", "print this help");
    s->add_option("--sample", ell.sample, "sample name");
    s->add_option("--h", ell.h, "grid spacing");
    s->add_option("--extent", ell.extent, "half width of the cube");
    s->add_option("--radius", ell.radius, "ball radius as a fraction of the extent");
    s->add_option("--dim", ell.dim, "chart dimension");
    s->add_flag("--warped", ell.warped, "use the warped chart structure");
    s->add_option("--jfield", ell.jfield, "J field file (header + CSV); fixes the grid");
    if (std::string(name) == "rc") {
      s->add_option("--f", ell.f, "scalar field file for f");
      s->add_option("--g", ell.g, "scalar field file for g");
    }
    if (std::string(name) == "maxcheck") s->add_option("--field", ell.field, "scalar field file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  cli::Report rep;
  if (c_coh->parsed()) {
    rep = cli::cmd_cohomology(coh);
  } else if (c_cof->parsed()) {
    rep = cli::cmd_cofinality(cof);
  } else if (c_spectral->parsed()) {
    if (sargs.model.model.empty()) {
      std::cerr << "spectral: model file required\n";
      return 2;
    }
    rep = cli::cmd_spectral(sargs);
  } else if (c_gc->parsed()) {
    rep = cli::cmd_gc(c_gc->get_subcommands().front()->get_name(), gc_path);
  } else {
    ell.sub = c_ell->get_subcommands().front()->get_name();
    rep = cli::cmd_elliptic(ell);
  }

  if (rep.body.contains("error")) std::cerr << rep.body["error"]["message"].get<std::string>() << "\n";
  if (table) std::cout << cli::table(rep.body);
  else std::cout << rep.body.dump(2) << "\n";
  return rep.exit_code;
}
