#pragma once

#include <stdexcept>
#include <string>

namespace awarekit {

/// Domain error carrying a stable machine-readable code (used verbatim by the HTTP API).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline Error bad_class(const std::string& m) { return Error("bad_class", m); }
inline Error bad_block(const std::string& m) { return Error("bad_block", m); }
inline Error bad_channel(const std::string& m) { return Error("bad_channel", m); }
inline Error bad_param(const std::string& m) { return Error("bad_param", m); }

}  // namespace awarekit
