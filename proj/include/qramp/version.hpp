// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace qramp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qramp
