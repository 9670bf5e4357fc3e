#pragma once

#include <string>
#include <vector>

namespace trdevdiv {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Full invariant suite behind the `verify` subcommand: the duality identity,
// the inf-sup sandwich, the interpolation/endpoint operator bounds, the
// extremal-constant run with random-sample margins and chain dominance, the
// identity-tensor violation, the near-identity decay sweep, the algebraic
// proof-chain identity, and the lambda-robust elasticity sweep.  Each check
// returns one line; the suite passes iff every check passes.
std::vector<CheckResult> run_verification_suite();

// Pretty-prints results ("PASS <name> -- <detail>") and returns the count of
// failures.
int report_results(const std::vector<CheckResult>& results);

}  // namespace trdevdiv
