#pragma once

#include <stdexcept>
#include <string>

namespace pxa {

// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void expect(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace pxa
