// Copyright 2026 The carmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace carmkit {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Factoring effort budget exhausted before a complete factorization.
class FactorizationTimeout : public Error {
  public:
    using Error::Error;
};

/// An operation required gcd(a, m) = 1 and the argument was not a unit.
class NotAUnit : public Error {
  public:
    using Error::Error;
};

/// An operation required a square-free modulus.
class NotSquarefree : public Error {
  public:
    using Error::Error;
};

/// A requested bound exceeds the configured ceiling.
class LimitExceeded : public Error {
  public:
    using Error::Error;
};

/// Group order (or search state space) exceeds the configured bound.
class GroupTooLarge : public Error {
  public:
    using Error::Error;
};

/// A discrete-log component exceeds the exhaustive-search bound.
class DiscreteLogBudget : public Error {
  public:
    using Error::Error;
};

/// No qualifying object exists for the requested construction.
class Infeasible : public Error {
  public:
    using Error::Error;
};

/// Sequence too long for the exhaustive enumeration regime.
class TooLong : public Error {
  public:
    using Error::Error;
};

/// Pool smaller than the requested sample/product size.
class PoolTooSmall : public Error {
  public:
    using Error::Error;
};

/// Generic effort budget hit (time, memory, enumeration count).
class BudgetExceeded : public Error {
  public:
    using Error::Error;
};

/// Every configured attempt failed; the message lists each attempt and why.
class Exhausted : public Error {
  public:
    using Error::Error;
};

}  // namespace carmkit
