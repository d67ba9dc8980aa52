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


#include "qdtp/pi_mutex.hpp"

#include <system_error>

namespace qdtp {

PiMutex::PiMutex() {
  pthread_mutexattr_t attr;
  pthread_mutexattr_init(&attr);
  // Falls back to a plain mutex where priority inheritance is unsupported.
  pthread_mutexattr_setprotocol(&attr, PTHREAD_PRIO_INHERIT);
  const int rc = pthread_mutex_init(&mu_, &attr);
  pthread_mutexattr_destroy(&attr);
  if (rc != 0) throw std::system_error(rc, std::generic_category(), "pthread_mutex_init");
}

PiMutex::~PiMutex() { pthread_mutex_destroy(&mu_); }

void PiMutex::lock() {
  const int rc = pthread_mutex_lock(&mu_);
  if (rc != 0) throw std::system_error(rc, std::generic_category(), "pthread_mutex_lock");
}

void PiMutex::unlock() noexcept { pthread_mutex_unlock(&mu_); }

bool PiMutex::try_lock() noexcept { return pthread_mutex_trylock(&mu_) == 0; }

}  // namespace qdtp
