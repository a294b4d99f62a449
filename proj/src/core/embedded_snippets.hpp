/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string_view>
#include <vector>

namespace triage::embedded {

struct EmbeddedFile {
    std::string_view name;
    std::string_view text;
};

/// Contents of data/snippets, compiled in by the build.
const std::vector<EmbeddedFile>& snippet_files();

} // namespace triage::embedded
