#pragma once

#include <string>

namespace reebfol {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        default: return "INCONCLUSIVE";
    }
}

// CLI exit status for a verdict.
inline int exit_code(Verdict v) { return v == Verdict::Pass ? 0 : v == Verdict::Fail ? 1 : 2; }

}  // namespace reebfol
