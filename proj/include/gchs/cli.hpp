#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gchs/audit.hpp"

namespace gchs::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kNumeric = 3, kForcedFailure = 4 };

/// Entry point shared by the gchs binary and the tests. Data goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV with header identity_id,class,samples,rejected,max_residual,mean_residual,sign_note,verdict.
void write_audit_csv(const AuditReport& report, std::ostream& out);

}  // namespace gchs::cli
