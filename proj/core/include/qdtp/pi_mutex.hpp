// Copyright 2026 The QDTP Authors
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


#pragma once

#include <pthread.h>

namespace qdtp {

/// Mutex with priority inheritance. A real-time thread blocked on it lends
/// its priority to the holder, so an ordinary thread cannot stall the pacer
/// while it holds the lock. Meets the Lockable requirements.
class PiMutex {
 public:
  PiMutex();
  ~PiMutex();
  PiMutex(const PiMutex&) = delete;
  PiMutex& operator=(const PiMutex&) = delete;

  void lock();
  void unlock() noexcept;
  bool try_lock() noexcept;

 private:
  pthread_mutex_t mu_;
};

}  // namespace qdtp
