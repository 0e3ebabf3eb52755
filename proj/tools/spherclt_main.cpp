// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/experiments.hpp"

int main(int argc, char** argv) { return spherclt::cli_main(argc, argv); }
