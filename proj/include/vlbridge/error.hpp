#pragma once

#include <stdexcept>
#include <string>

namespace vlb {

enum class ErrorCode {
  kInvalidArgument = 1,
  kConfig,
  kIo,
  kParse,
  kRemote,
  kDegenerate,
  kCheckFailed,
  kRuntime,
};

// Every failure raised by the library carries one of these codes so the
// C surface can map it onto a stable status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace vlb
