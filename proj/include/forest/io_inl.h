/* Copyright 2026 The Forest Calibration Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef FOREST_IO_INL_H_
#define FOREST_IO_INL_H_

#include "forest/status.h"

namespace forest::io {

template <typename Fn>
auto WithLineContext(const JsonLinesReader& reader, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(reader.Context(e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(reader.Context(e.what()));
  }
}

}  // namespace forest::io

#endif  // FOREST_IO_INL_H_
