// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPHERCLT_VERSION_HPP
#define SPHERCLT_VERSION_HPP

namespace spherclt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spherclt

#endif  // SPHERCLT_VERSION_HPP
