#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfk {

enum class Errc {
  io,                 // file cannot be opened, read or written
  format,             // malformed or incomplete header / record
  corrupt_file,       // payload size disagrees with header
  unsupported,        // valid but unsupported variant (element type, compression)
  empty_mask,
  bounds,
  parse,
  empty_session,
  session_alignment,
  parameter,
  schema,
  undefined_metric,
  calibration,
  configuration,
  degenerate_test,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace gfk
