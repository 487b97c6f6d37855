// Copyright (c) 2026, The TinyPy Curriculum Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tpc/experiments.hpp"

#include <cstdio>
#include <span>
#include <vector>

#include "tpc/checkpoint.hpp"
#include "tpc/corpus.hpp"
#include "tpc/error.hpp"
#include "tpc/grammar.hpp"
#include "tpc/train.hpp"

namespace tpc {

OmValidationTable run_om_validation(const OmValidationSetup& setup,
                                    const std::filesystem::path& out_dir,
                                    const ProgressFn& progress) {
  if (setup.held_out < 1 || setup.per_level_count <= setup.held_out) {
    throw Error(ErrorKind::InvalidConfig, "per_level_count must exceed the held-out count");
  }
  setup.plan.validate();
  const auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  std::vector<OmValidationRow> rows;
  for (int level = 1; level <= 6; ++level) {
    const auto lv = static_cast<std::uint64_t>(level);
    const auto corpus =
        generate_corpus(concept_profile(level), setup.per_level_count, derive_seed(setup.seed, 0x0a11, lv));
    const std::span<const AnnotatedSnippet> all(corpus);
    const auto n_test = static_cast<std::size_t>(setup.held_out);
    const auto train_part = all.first(corpus.size() - n_test);
    const auto test_part = all.last(n_test);
    const auto stream = tokenize(render_stream(train_part));

    TrainState st = start_training(init_params<float>(setup.model, derive_seed(setup.seed, 0x1a1, lv)),
                                   setup.plan, derive_seed(setup.seed, 0x57a9, lv), level);
    TrainHooks hooks;
    hooks.on_log = [&](const TrainLogRow& r) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "om-validate: level %d iter %lld loss %.4f", level,
                    static_cast<long long>(r.iter), r.train_loss);
      say(buf);
    };
    const TrainLog log = train(st, setup.plan, stream, {}, hooks);

    OmValidationRow row;
    row.concept_level = level;
    row.mean_om = mean_om(all);
    row.exec = execution_tally_params(st.params, test_part, setup.decode, setup.threads);
    char buf[128];
    std::snprintf(buf, sizeof buf, "om-validate: level %d mean OM %.3f exec acc %.2f%%", level,
                  row.mean_om, 100.0 * row.exec.fraction());
    say(buf);
    rows.push_back(row);

    if (!out_dir.empty()) {
      write_file(out_dir / ("level" + std::to_string(level) + "_log.csv"), log.csv());
      save_checkpoint({std::move(st), {{"concept_level", std::to_string(level)}}},
                      out_dir / ("level" + std::to_string(level) + ".ckpt"));
    }
  }
  OmValidationTable table = om_validation(rows);
  if (!out_dir.empty()) {
    write_file(out_dir / "om_validation.csv", table.csv());
    write_file(out_dir / "om_validation.txt", table.table());
  }
  return table;
}

}  // namespace tpc
