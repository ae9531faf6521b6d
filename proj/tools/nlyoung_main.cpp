// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/cli.hpp"

int main(int argc, char** argv) { return nly::cli::run(argc, argv); }
