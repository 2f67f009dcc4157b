// SPDX-License-Identifier: Apache-2.0
#include "fracsob/cli.hpp"

int main(int argc, char** argv)
{
  return fracsob::cli::run(argc, argv);
}
