#include "gfk/error.hpp"

namespace gfk {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::io: return "io";
    case Errc::format: return "format";
    case Errc::corrupt_file: return "corrupt_file";
    case Errc::unsupported: return "unsupported";
    case Errc::empty_mask: return "empty_mask";
    case Errc::bounds: return "bounds";
    case Errc::parse: return "parse";
    case Errc::empty_session: return "empty_session";
    case Errc::session_alignment: return "session_alignment";
    case Errc::parameter: return "parameter";
    case Errc::schema: return "schema";
    case Errc::undefined_metric: return "undefined_metric";
    case Errc::calibration: return "calibration";
    case Errc::configuration: return "configuration";
    case Errc::degenerate_test: return "degenerate_test";
  }
  return "unknown";
}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gfk
