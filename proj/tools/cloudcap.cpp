// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "cloudcap/cli.hpp"

int main(int argc, char** argv) { return cloudcap::run_cli(argc, argv, std::cout, std::cerr); }
