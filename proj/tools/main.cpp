#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "hscale/orfun.hpp"

int main(int argc, char** argv) {
  try {
    const auto cfg = hscale::cli::parse_cli(argc, argv);
    return hscale::cli::run_experiment(cfg);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return hscale::cli::kExitConfig;
  } catch (const hscale::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return hscale::cli::kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return hscale::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hscale::cli::kExitConfig;
  }
}
