// Copyright (c) 2026 The stamdct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "stamdct/types.hpp"

namespace stamdct {

/// Reads a RIFF/WAVE file. Only PCM 16-bit mono at 16 kHz is accepted; sample
/// values are preserved exactly (no normalization).
Waveform read_wav(const std::string& path);

/// Writes PCM 16-bit mono. Samples are rounded to the nearest integer, ties
/// away from zero. Samples outside [-32768, 32767] are an error: the caller
/// is expected to clamp first.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace stamdct
