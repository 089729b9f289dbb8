#pragma once

// Rendering of check reports and verdicts, and the exit-code mapping.

#include <string>

#include "prhl/checker.hpp"

namespace prhl {

enum class Format { text, machine };

/// Text starts with "ACCEPT (bounded: none)", "ACCEPT (bounded: ...)" or
/// "REJECT"; machine is a JSON document.
std::string emit_report(const CheckReport& r, Format f);
std::string emit_verdict(const Verdict& v, Format f);

/// 0 accepted with every side condition decided, 1 rejected, 2 accepted
/// only up to bounds.
int exit_code(const CheckReport& r);
/// 0 valid, 1 invalid, 2 unknown.
int exit_code(const Verdict& v);

}  // namespace prhl
