/*
 * Copyright 2026 The staticcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Walks the forest count table through harmonization and prints every
// intermediate matrix, the final relation and its CVPAI2.
//
//   harmonize_example [counts.csv [overrides.csv]]

#include <cstdio>
#include <iostream>
#include <string>

#include "staticcolor/compare.hpp"

using namespace staticcolor;

int main(int argc, char** argv) {
  const std::string data = STATICCOLOR_DATA_DIR;
  const std::string counts_path = argc > 1 ? argv[1] : data + "/compare/forest_counts.csv";
  const std::string overrides_path = argc > 2 ? argv[2] : data + "/compare/forest_overrides.csv";
  try {
    const ContingencyTable table = load_counts_csv(counts_path);
    const HarmonizationTrace tr = harmonize(table, 0.09, 0.06);
    auto show = [&](const char* title, const auto& m) {
      std::cout << "# " << title << "\n" << matrix_csv(table.test, table.reference, m) << "\n";
    };
    std::cout << "# counts\n" << to_csv(table) << "\n";
    show("joint probability", tr.joint);
    show("p(reference | test)", tr.given_test);
    show("p(reference | test) >= TH1", tr.given_test_cut);
    show("p(test | reference)", tr.given_ref);
    show("p(test | reference) >= TH2", tr.given_ref_cut);
    show("candidate relation", tr.candidate);

    const OverrideResult result =
        apply_overrides(tr, load_overrides(overrides_path, table.test, table.reference));
    for (const auto& e : result.audit) {
      std::cout << "override " << e.test_name << " / " << e.reference_name << ": " << int(e.before)
                << " -> " << int(e.after) << " (" << e.note << ")\n";
    }
    std::cout << "\n# relation\n" << to_csv(result.relation) << "\n";
    std::printf("CVPAI2 = %.6f\n", cvpai2(result.relation));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
