// Copyright 2026 The riesz-smc authors
// SPDX-License-Identifier: Apache-2.0

#include "riesz_smc/experiments.hpp"

int main(int argc, char** argv) { return riesz_smc::cli_main(argc, argv); }
