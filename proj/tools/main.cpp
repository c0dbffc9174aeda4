#include <vector>

#include "relfeat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relfeat::cli_dispatch(args);
}
