#include <iostream>
#include <string>
#include <vector>

#include <eof2q/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eof2q::cli::run(std::move(args), std::cout, std::cerr);
}
