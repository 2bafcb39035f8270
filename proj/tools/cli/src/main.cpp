#include <iostream>
#include <string>
#include <vector>

#include "metricforge/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return metricforge::cli::run(args, std::cout, std::cerr);
}
