#include <iostream>
#include <string>
#include <vector>

#include "simpl_tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto outcome = simpl::cli::dispatch(args, std::cout, std::cerr);
  return outcome.exit_code;
}
