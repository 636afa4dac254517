#pragma once

// Line-oriented scenario files.
//
//   # comment
//   [flow]                 repeatable; one section per flow (or per group with count=)
//   alpha = 200
//   fwd_prop = 0.05
//   [fwd_link]
//   capacity = 10000
//   buffer = 1000
//   [sim]
//   duration = 60
//
// [flow], [fwd_link] and [sim] are required. [bwd_link] defaults to a copy of
// the forward link; [cross] and [reno] are optional.

#include <cstdint>
#include <string>
#include <string_view>

#include "dca/model.hpp"

namespace dca {

// Throws Error with code Parse (with line number), UnknownKey or
// MissingSection. Cross-field rules are left to validate_scenario.
ScenarioSpec parse_scenario(std::string_view text);

// Reads and parses a file; Io on failure to read.
ScenarioSpec load_scenario(const std::string& path);

// Canonical text form: every field spelled out, one [flow] per flow, numbers
// printed exactly. parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const ScenarioSpec& spec);

// 64-bit FNV-1a over the canonical text, as 16 hex digits.
std::string spec_hash(const ScenarioSpec& spec);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace dca
