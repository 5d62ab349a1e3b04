#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace starseg {

enum class Errc {
  kInvalidArgument,
  kPadTooLarge,
  kCropTooLarge,
  kIoError,
  kUnsupportedFormat,
  kCorruptFile,
  kInvalidLevel,
  kImageTooSmall,
  kTooFewLevels,
  kDimensionMismatch,
  kEmptyInput,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace starseg
