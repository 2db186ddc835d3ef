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

#pragma once

#include <string>
#include <string_view>

#include "staticcolor/errors.hpp"
#include "staticcolor/rule_parser.hpp"

namespace staticcolor {

/// Builtin copy of data/rules/specl.rules (kept identical by a unit test).
inline constexpr std::string_view kSpeclRules = R"SPECL(
# Spectral pre-classification of surface reflectance signatures: 19 classes.
# Thresholds are reflectance in [0,1] at Landsat TM central wavelengths.
# Evaluation: every rule is tested; the highest-index rule that fires wins.
#
# Clauses wrapped in `requires b5 (...)` / `requires b7 (...)` are only
# evaluated when that band is present; otherwise they are left out of the
# enclosing AND/OR. b5 is required by rules 1, 2 and 10, so in practice the
# b5 guards only matter for derived rule files that declare b5 optional.
#
# Pseudo-colors are arbitrary and non-normative.

bands: b1@0.48, b2@0.56, b3@0.66, b4@0.83, b5@1.6, b7@2.2?
policy last-match

rule 1 "Snow/ice" color #E8F4FF {
  b4 / b3 <= 1.3 AND b3 >= 0.2 AND b5 <= 0.12
}
rule 2 "Cloud" color #FFFFFF {
  b4 >= 0.25 AND 0.85 <= b1 / b4 <= 1.15 AND b4 / b5 >= 0.9 AND b5 >= 0.2
}
rule 3 "Bright bare soil / sand / cloud" color #F0D8A8 {
  b4 >= 0.15 AND 1.3 <= b4 / b3 <= 3.0
}
rule 4 "Dark bare soil" color #8C6A3C {
  b4 >= 0.15 AND 1.3 <= b4 / b3 <= 3.0 AND b2 <= 0.10
}
rule 5 "Average vegetation" color #3CA03C {
  b4 / b3 >= 3.0 AND (b2 / b3 >= 0.8 OR b3 <= 0.15) AND 0.28 <= b4 <= 0.45
}
rule 6 "Bright vegetation" color #64DC50 {
  b4 / b3 >= 3.0 AND (b2 / b3 >= 0.8 OR b3 <= 0.15) AND b4 >= 0.45
}
rule 7 "Dark vegetation" color #1E6428 {
  b4 / b3 >= 3.0 AND (b2 / b3 >= 0.8 OR b3 <= 0.15) AND b3 <= 0.08 AND b4 <= 0.28
}
# The source table prints `b3 >= 8.0`, which no reflectance can satisfy; the
# neighboring rules use 0.08, so 0.08 is used here. The builtin rule set
# "specl-printed" keeps 8.0.
rule 8 "Yellow vegetation" color #C8C83C {
  b4 / b3 >= 2.0 AND b2 >= b3 AND b3 >= 0.08 AND requires b5 (b4 / b5 >= 1.5)
}
rule 9 "Mix of vegetation / soil" color #A0A050 {
  2.0 <= b4 / b3 <= 3.0 AND 0.05 <= b3 <= 0.15 AND b4 >= 0.15
}
rule 10 "Asphalt / dark sand" color #505050 {
  b4 / b3 <= 1.6 AND 0.05 <= b3 <= 0.20 AND requires b5 (0.05 <= b4 <= 0.20) AND 0.05 <= b5 <= 0.25 AND requires b5 (b5 / b4 >= 0.7)
}
rule 11 "Sand / bare soil / cloud" color #DCC88C {
  b4 / b3 <= 2.0 AND b4 >= 0.15 AND requires b5 (b5 >= 0.15)
}
rule 12 "Bright sand / bare soil / cloud" color #FAEBC8 {
  b4 / b3 <= 2.0 AND b4 >= 0.15 AND (b4 >= 0.25 OR requires b5 (b5 >= 0.30))
}
rule 13 "Dry vegetation / soil" color #B4A064 {
  (1.7 <= b4 / b3 <= 2.0 AND b4 >= 0.25) OR requires b7 (1.4 <= b4 / b3 <= 2.0 AND b7 / b5 <= 0.83)
}
rule 14 "Sparse veg. / soil" color #96965A {
  (1.4 <= b4 / b3 <= 1.7 AND b4 >= 0.25) OR requires b7 (1.4 <= b4 / b3 <= 2.0 AND b7 / b5 <= 0.83 AND b5 / b4 >= 1.2)
}
rule 15 "Turbid water" color #2878B4 {
  b4 <= 0.11 AND requires b5 (b5 <= 0.05)
}
rule 16 "Clear water" color #0A2878 {
  b4 <= 0.02 AND requires b5 (b5 <= 0.02)
}
rule 17 "Clear water over sand" color #3CA0C8 {
  b3 >= 0.02 AND b3 >= b4 + 0.005 AND requires b5 (b5 <= 0.02)
}
class 18 "Shadow" color #282828
fallback 19 "Not classified (outliers)" color #FF00FF
)SPECL";

/// The default 19-class rule set.
inline RuleSet specl_rules() { return parse_rules(kSpeclRules); }

/// Variant with the yellow-vegetation threshold exactly as printed in the
/// source table (`b3 >= 8.0`), which makes that rule unsatisfiable.
inline RuleSet specl_printed_rules() {
  std::string text(kSpeclRules);
  const std::string_view from = "b3 >= 0.08 AND requires b5";
  const auto at = text.find(from);
  if (at == std::string::npos) throw ConfigError("builtin rule text changed unexpectedly");
  text.replace(at, 10, "b3 >= 8.0");
  return parse_rules(text);
}

/// Resolves `builtin:specl`, `builtin:specl-printed` or a rule-file path.
inline RuleSet rules_from_spec(const std::string& spec) {
  if (spec == "builtin:specl") return specl_rules();
  if (spec == "builtin:specl-printed") return specl_printed_rules();
  return load_rules(spec);
}

}  // namespace staticcolor
