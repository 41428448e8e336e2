// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/cli.hpp"

int main(int argc, char** argv) { return qramp::run_cli(argc, argv); }
