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
#ifndef FOREST_MASK_H_
#define FOREST_MASK_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

// Run-length encoded binary grid. Runs are row-major and alternate
// 0,1,0,1,... starting with a (possibly empty) run of zeros; they sum to
// height * width.
//
// Text form: "<height>x<width>:<c0>,<c1>,...", e.g. "2x2:1,3" is a 2x2 grid
// whose first pixel is 0 and remaining three are 1.
class RleMask {
 public:
  RleMask() = default;
  // Throws ValidationError when the runs do not cover the grid exactly.
  RleMask(int height, int width, std::vector<uint32_t> counts);

  static RleMask FromDense(int height, int width, std::span<const uint8_t> bits);
  static RleMask Parse(std::string_view text);

  int height() const { return height_; }
  int width() const { return width_; }
  const std::vector<uint32_t>& counts() const { return counts_; }

  std::vector<uint8_t> ToDense() const;
  std::string ToString() const;
  int64_t Area() const;

  bool operator==(const RleMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<uint32_t> counts_;
};

// Intersection and union computed by merging runs; no decoding.
// Masks must share dimensions. Union of zero gives IoU 0.
double MaskIoU(const RleMask& a, const RleMask& b);

}  // namespace forest

#endif  // FOREST_MASK_H_
