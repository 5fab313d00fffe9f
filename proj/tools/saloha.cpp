// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "saloha/commands.hpp"

int main(int argc, char** argv) {
  return saloha::cli_main(argc, argv, std::cout, std::cerr);
}
