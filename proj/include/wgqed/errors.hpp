#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

enum class NumericalErrorCode { singular_solve, unreachable_target };

class NumericalError : public std::runtime_error {
public:
  NumericalError(NumericalErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  NumericalErrorCode code() const { return code_; }

private:
  NumericalErrorCode code_;
};

}  // namespace wgqed
