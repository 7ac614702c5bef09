#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tailopt/machines.hpp"

namespace tailopt {

/// Parses a line-oriented machine document:
///
///     type mealy | om | nfa
///     inputs <sym>+
///     outputs <sym>+            (not for nfa)
///     states <name>+
///     initial <name>
///     trans s0 a s1 0           (mealy)
///     trans s0 a { s0 s1 } 0    (om; omitted pairs are undefined)
///     trans s0 a { s1 }         (nfa; omitted pairs have no successors)
///
/// `#` starts a comment. Braces need not be separated by whitespace.
/// Throws ParseError.
AnyMachine parse_machine(std::string_view text);

MealyMachine parse_mealy(std::string_view text);
ObservationMachine parse_om(std::string_view text);
Nfa parse_nfa(std::string_view text);

/// Canonical form: declarations in fixed order, transitions in
/// (state index, symbol index) order, successor sets ascending.
std::string serialize_machine(const MealyMachine& m);
std::string serialize_machine(const ObservationMachine& m);
std::string serialize_machine(const Nfa& m);
std::string serialize_machine(const AnyMachine& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace tailopt
