// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace fracsob::cli
{

/// Runs the command-line driver; returns the process exit status
/// (0 success, 1 validation error, 2 numerical non-convergence).
int run(int argc, char** argv);

}  // namespace fracsob::cli
