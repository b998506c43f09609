#include <string>
#include <vector>

#include "freqstrat/experiments.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return freqstrat::run_cli(args);
}
