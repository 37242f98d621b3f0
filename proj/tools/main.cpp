#include <string>
#include <vector>

#include "sentclust/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sentclust::cli::run(std::move(args));
}
