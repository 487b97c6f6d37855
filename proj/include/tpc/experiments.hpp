// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-model experiments shared by the command-line tool and the acceptance
// suite.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "tpc/eval.hpp"
#include "tpc/optim.hpp"

namespace tpc {

using ProgressFn = std::function<void(const std::string&)>;

/// One model per concept level 1..6, each trained on its own corpus and
/// scored on that corpus's last `held_out` snippets.
struct OmValidationSetup {
  ModelConfig model = ModelConfig::tiny();
  TrainPlan plan = default_plan();
  std::int64_t per_level_count = 5000;
  std::int64_t held_out = 200;
  std::uint64_t seed = 1;
  GenerateOptions decode;
  int threads = 1;

  static TrainPlan default_plan() {
    TrainPlan p;
    p.total_iters = 3000;
    p.batch_size = 32;
    p.log_interval = 100;
    return p;
  }
};

/// Writes level<k>_log.csv, level<k>.ckpt, om_validation.csv and
/// om_validation.txt into out_dir when it is non-empty.
OmValidationTable run_om_validation(const OmValidationSetup& setup,
                                    const std::filesystem::path& out_dir = {},
                                    const ProgressFn& progress = {});

}  // namespace tpc
