// Copyright 2026 The ctxrec Authors
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

#include <stdexcept>
#include <string>

namespace ctxrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Taxonomy loading.
class ParseError : public Error {
 public:
  using Error::Error;
};
class CycleError : public Error {
 public:
  using Error::Error;
};
class MultiRootError : public Error {
 public:
  using Error::Error;
};
class MultiParentError : public Error {
 public:
  using Error::Error;
};
class UnknownConcept : public Error {
 public:
  using Error::Error;
};

// Clustering.
class TooFewCases : public Error {
 public:
  using Error::Error;
};
class EmptyCluster : public Error {
 public:
  using Error::Error;
};

// Bandit.
class EmptyCandidates : public Error {
 public:
  using Error::Error;
};

// Simulation and CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};
class UnknownDoc : public Error {
 public:
  using Error::Error;
};
class ExhaustedPool : public Error {
 public:
  using Error::Error;
};
class LabelMismatch : public Error {
 public:
  using Error::Error;
};
class UnknownPolicy : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxrec
