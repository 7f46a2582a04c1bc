/*
 * Copyright 2026 The morphfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MORPHFIT_MODEL_IO_HPP
#define MORPHFIT_MODEL_IO_HPP

#include <filesystem>
#include <string>

#include "morphfit/shape_model.hpp"

namespace morphfit {

inline constexpr const char* kModelFormatTag = "morphfit-gpmm-v1";

/// Text header (tag, sizes, free-form description) followed by a little-endian
/// binary payload: vertices, faces, mean, eigenvalues, basis (column-major).
/// Output is a pure function of the model and description.
void save_model(const LowRankGP& model, const std::filesystem::path& path, const std::string& description = {});

/// Throws FormatError on a wrong tag or truncated payload.
LowRankGP load_model(const std::filesystem::path& path, std::string* description = nullptr);

}  // namespace morphfit

#endif  // MORPHFIT_MODEL_IO_HPP
