// Copyright 2026 The ProsodyBench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROSODYBENCH_SRC_FFT_H_
#define PROSODYBENCH_SRC_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace prosodybench::internal {

// Real-input FFT of a fixed size backed by FFTW. Plans are created once per
// size under a global lock and shared; Forward/Inverse are thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // input.size() == size(), output.size() == bins().
  void Forward(std::span<const double> input,
               std::span<std::complex<double>> output) const;
  // Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> input,
               std::span<double> output) const;

 private:
  std::size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
};

// Symmetric Hann window.
std::vector<double> HannWindow(std::size_t length);

}  // namespace prosodybench::internal

#endif  // PROSODYBENCH_SRC_FFT_H_
