#include <iostream>

#include "hdpd/interface/cli.h"

int main(int argc, char** argv) {
  return hdpd::interface::RunCli(argc, argv, std::cout, std::cerr);
}
