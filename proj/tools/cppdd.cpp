#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cppdd/errors.hpp"
#include "cppdd/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cppdd::UsageError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPPDD unanimous-release aggregation: setup and experiment driver"};
  app.require_subcommand(1);

  std::string setup_config, setup_out;
  auto* setup = app.add_subcommand("setup", "run coordinator setup, write packet + envelopes");
  setup->add_option("--config", setup_config, "JSON config file")->required();
  setup->add_option("--out", setup_out, "output directory")->required();

  std::string run_experiment, run_config, run_out;
  auto* run = app.add_subcommand("run", "run an experiment, write CSV reports");
  run->add_option("--experiment", run_experiment,
                  "correctness | detection | scalability | recovery | accounting");
  run->add_option("--config", run_config, "JSON config file")->required();
  run->add_option("--out", run_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (setup->parsed()) {
      return cppdd::harness::run_setup(read_file(setup_config), setup_out);
    }
    auto doc = nlohmann::json::parse(read_file(run_config));
    if (!run_experiment.empty()) doc["experiment"] = run_experiment;
    auto cfg = cppdd::harness::parse_experiment_config(doc.dump());
    return cppdd::harness::run_experiment(cfg, run_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const cppdd::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
