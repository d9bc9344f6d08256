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
#include "forest/mask.h"

#include <algorithm>
#include <charconv>

#include "forest/status.h"

namespace forest {
namespace {

template <typename T>
T ParseNumber(std::string_view s, std::string_view whole) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    ThrowValidation("malformed RLE mask '", whole, "'");
  }
  return value;
}

}  // namespace

RleMask::RleMask(int height, int width, std::vector<uint32_t> counts)
    : height_(height), width_(width), counts_(std::move(counts)) {
  if (height_ < 0 || width_ < 0) {
    ThrowValidation("mask dimensions must be non-negative, got ", height_, "x",
                    width_);
  }
  int64_t total = 0;
  for (uint32_t c : counts_) total += c;
  if (total != static_cast<int64_t>(height_) * width_) {
    ThrowValidation("RLE runs sum to ", total, " but grid is ", height_, "x",
                    width_);
  }
}

RleMask RleMask::FromDense(int height, int width, std::span<const uint8_t> bits) {
  if (static_cast<int64_t>(bits.size()) != static_cast<int64_t>(height) * width) {
    ThrowValidation("dense mask has ", bits.size(), " cells, expected ",
                    height, "x", width);
  }
  std::vector<uint32_t> counts;
  uint8_t current = 0;
  uint32_t run = 0;
  for (uint8_t b : bits) {
    const uint8_t v = b ? 1 : 0;
    if (v != current) {
      counts.push_back(run);
      run = 0;
      current = v;
    }
    ++run;
  }
  counts.push_back(run);
  return RleMask(height, width, std::move(counts));
}

RleMask RleMask::Parse(std::string_view text) {
  const size_t x = text.find('x');
  const size_t colon = text.find(':');
  if (x == std::string_view::npos || colon == std::string_view::npos || x > colon) {
    ThrowValidation("malformed RLE mask '", text, "'");
  }
  const int h = ParseNumber<int>(text.substr(0, x), text);
  const int w = ParseNumber<int>(text.substr(x + 1, colon - x - 1), text);
  std::vector<uint32_t> counts;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const size_t comma = rest.find(',');
    counts.push_back(ParseNumber<uint32_t>(rest.substr(0, comma), text));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return RleMask(h, w, std::move(counts));
}

std::vector<uint8_t> RleMask::ToDense() const {
  std::vector<uint8_t> bits;
  bits.reserve(static_cast<size_t>(height_) * width_);
  uint8_t v = 0;
  for (uint32_t c : counts_) {
    bits.insert(bits.end(), c, v);
    v ^= 1;
  }
  return bits;
}

std::string RleMask::ToString() const {
  std::string out = std::to_string(height_) + "x" + std::to_string(width_) + ":";
  for (size_t i = 0; i < counts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(counts_[i]);
  }
  return out;
}

int64_t RleMask::Area() const {
  int64_t area = 0;
  for (size_t i = 1; i < counts_.size(); i += 2) area += counts_[i];
  return area;
}

double MaskIoU(const RleMask& a, const RleMask& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    ThrowValidation("mask IoU on mismatched grids ", a.height(), "x", a.width(),
                    " vs ", b.height(), "x", b.width());
  }
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  size_t ia = 0, ib = 0;
  int64_t left_a = ca.empty() ? 0 : ca[0];
  int64_t left_b = cb.empty() ? 0 : cb[0];
  int64_t inter = 0;
  while (ia < ca.size() && ib < cb.size()) {
    if (left_a == 0) {
      if (++ia < ca.size()) left_a = ca[ia];
      continue;
    }
    if (left_b == 0) {
      if (++ib < cb.size()) left_b = cb[ib];
      continue;
    }
    const int64_t step = std::min(left_a, left_b);
    if ((ia & 1) && (ib & 1)) inter += step;
    left_a -= step;
    left_b -= step;
  }
  const int64_t uni = a.Area() + b.Area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace forest
