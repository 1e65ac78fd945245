#include "statcert/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return statcert::cli::runCli(argc, argv, std::cout, std::cerr);
}
