#include <vector>

#include "tscf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tscf::cli::run(args);
}
