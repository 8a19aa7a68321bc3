#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "penny/cli.hpp"

int main(int argc, char** argv) {
  using namespace penny::cli;
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const ExperimentConfig config = parse_config(args);
    const RunResult result = run(config);
    if (config.out.empty()) std::cout << result.artifact;
    return result.status;
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const penny::Error& e) {
    std::cout << error_record(e).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json j = Json::object();
    j["error"] = e.what();
    j["code"] = "internal";
    std::cout << j.dump() << "\n";
    return 2;
  }
}
