#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dnls/io/experiment.hpp"

int main(int argc, char** argv) {
  using namespace dnls::io;

  CLI::App app{"Discrete nonlinear Schrodinger experiment driver"};
  app.set_help_flag("-h,--help", "Show usage");

  std::string kind;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;

  std::string kinds;
  for (const auto& k : kind_names()) kinds += (kinds.empty() ? "" : " | ") + k;

  app.add_option("kind", kind, "Experiment: " + kinds)->required()->check(CLI::IsMember(kind_names()));
  app.add_option("--config", config, "Experiment configuration file")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides [output] directory)");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides [problem] seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  RunRequest req;
  req.kind = parse_kind(kind);
  req.config = config;
  if (*out_opt) req.out = std::filesystem::path(out);
  if (*seed_opt) req.seed = seed;
  return run(req, std::cerr);
}
