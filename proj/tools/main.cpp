#include <string>
#include <vector>

#include "emperor/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return emperor::run_cli(args);
}
