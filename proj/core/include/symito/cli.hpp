#pragma once

#include <string>
#include <vector>

#include "symito/config.hpp"

namespace symito {

/// Exit codes: 0 all configured checks pass, 1 a check failed,
/// 2 configuration error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

/// Versioned identity-report CSV (header pinned by golden tests).
void write_identity_csv(const std::vector<IdentityRunRow>& rows,
                        const std::string& file);

}  // namespace symito
