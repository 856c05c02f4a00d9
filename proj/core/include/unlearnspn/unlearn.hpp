// Copyright 2026 The unlearnspn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "unlearnspn/learn.hpp"
#include "unlearnspn/spn.hpp"

namespace unlearnspn {

// The operation the learner would choose at a node once one of its rows is
// gone, computed from the node's recorded state and the surviving rows.
// Stored analyzers are updated by their removal routines; analyzers that
// were never stored are fitted with the node seed only if a case needs them.
struct Revision {
  Decision decision;  // as the learner would record it on the survivors
  bool clustering_changed = false;    // stored clustering, if consulted
  bool independence_changed = false;  // stored variable split, if consulted
};

Revision Revise(const NodeState& state, RowId row, const DataView& survivors,
                const LearnConfig& config);

enum class UnlearnAction : std::uint8_t {
  kSkipped = 0,           // the row never reached this node
  kStateUpdated = 1,      // bookkeeping only, children handled separately
  kLeafUpdated = 2,
  kWeightsUpdated = 3,    // sum node count decremented
  kRetrainedSubtree = 4,  // operation or split changed; relearned
  kNaiveFactorized = 5,   // operation changed to a naive factorization
  kNewLeavesAdded = 6,    // more variables became constant under a split
};

std::string_view ActionName(UnlearnAction action);

struct ActionRecord {
  std::string path;
  UnlearnAction action = UnlearnAction::kSkipped;
  Op op_old = Op::kCreateLeaf;
  Op op_new = Op::kCreateLeaf;
};

struct RemovalOutcome {
  std::vector<RowId> rows;  // removed, in application order
  std::vector<ActionRecord> actions;
};

struct UnlearnOptions {
  // Fault injection for mutation tests: leave sum node counts untouched.
  bool skip_weight_update = false;
};

// Removes `row` from `spn` in place. Throws Error(kRowAbsent) for a row that
// never existed or is already removed and Error(kExhausted) when it is the
// last live row; the model is untouched in both cases.
RemovalOutcome UnlearnSpn(Spn& spn, RowId row, const UnlearnOptions& options = {});

// Removes every row of `rows` in ascending order. All rows are checked before
// anything changes.
RemovalOutcome UnlearnBatch(Spn& spn, std::vector<RowId> rows,
                            const UnlearnOptions& options = {});

}  // namespace unlearnspn
