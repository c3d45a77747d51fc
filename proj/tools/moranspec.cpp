// moranspec: command-line front end for the Moran spectral toolkit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "moranspec/cli.hpp"

namespace {

// Reads a whole file; "-" is stdin.
bool slurp(const std::string& path, std::string& out) {
  if (path == "-") {
    out.assign(std::istreambuf_iterator<char>(std::cin), {});
    return true;
  }
  std::ifstream f(path);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace moranspec;
  CLI::App app{"Spectral analysis of planar Moran measures"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::string config_path, xi_text, box_text = "8";
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "YAML config file ('-' for stdin)")
        ->required();
  };

  auto* validate = app.add_subcommand("validate", "check existence hypotheses");
  add_config(validate);

  auto* classify = app.add_subcommand("classify", "decide spectrality");
  add_config(classify);
  classify->add_flag("--check", opt.check, "exit 1 on a NotSpectral verdict");

  auto* hadamard = app.add_subcommand("hadamard", "verify a Hadamard triple");
  add_config(hadamard);

  auto* zero = app.add_subcommand("zero", "exact zero certificate for mu^");
  add_config(zero);
  zero->add_option("--xi", xi_text, "point a/b,c/d")->required();

  auto* fourier = app.add_subcommand("fourier", "evaluate mu^ with error bound");
  add_config(fourier);
  fourier->add_option("--xi", xi_text, "point x,y (rational or decimal)")
      ->required();
  fourier->add_option("--eps", opt.eps, "truncation tolerance");

  auto* spectrum = app.add_subcommand("spectrum", "build and check a spectrum");
  add_config(spectrum);
  spectrum->add_option("--kind", opt.kind, "tower | lattice")
      ->check(CLI::IsMember({"tower", "lattice"}));
  spectrum->add_option("--depth", opt.depth, "tower depth k");
  spectrum->add_option("--box", box_text, "lattice box B");
  spectrum->add_option("--eps", opt.eps, "Fourier tolerance for Q");
  spectrum->add_option("--samples", opt.samples, "completeness sample count");
  spectrum->add_option("--seed", opt.seed, "sample seed");
  spectrum->add_option("--cap", opt.cap, "point cap");
  spectrum->add_option("--out", opt.out, "CSV of spectrum points");

  auto* oracle = app.add_subcommand("oracle", "finite-level unitarity oracle");
  add_config(oracle);
  oracle->add_option("--depth", opt.depth, "level n (<= 4)");

  auto* emit = app.add_subcommand("emit", "write attractor or |mu^| CSV data");
  emit->add_option("target", opt.target, "attractor | fourier")
      ->required()
      ->check(CLI::IsMember({"attractor", "fourier"}));
  add_config(emit);
  emit->add_option("--depth", opt.depth, "attractor depth");
  emit->add_option("--grid", opt.grid, "grid resolution N");
  emit->add_option("--box", box_text, "grid box B");
  emit->add_option("--eps", opt.eps, "Fourier tolerance");
  emit->add_option("--cap", opt.cap, "point cap");
  emit->add_option("--out", opt.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_invalid;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (!xi_text.empty()) {
    opt.xi = parse_rational_pair(xi_text);
    if (!opt.xi) {
      std::cerr << "error: --xi expects x,y with rational components\n";
      return exit_invalid;
    }
  }
  if (auto b = parse_rational(box_text); b && *b > 0) {
    opt.box = *b;
  } else {
    std::cerr << "error: --box expects a positive rational\n";
    return exit_invalid;
  }

  std::string text;
  if (!slurp(config_path, text)) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return exit_invalid;
  }
  const Report r = run_command(command, text, opt);
  std::cout << r.render();
  return r.exit_code;
}
