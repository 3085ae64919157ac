#include <string>
#include <vector>

#include "semunit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return semunit::run(args);
}
