// SPDX-License-Identifier: Apache-2.0
#include "dissem/cli.hpp"

int main(int argc, char** argv) { return dissem::cli::cli_dispatch(argc, argv); }
