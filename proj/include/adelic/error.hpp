#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adelic {

/// Exception carrying the name of the module that raised it; what() reads
/// "<module>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string_view module, std::string_view message)
      : std::runtime_error(std::string(module) + ": " + std::string(message)),
        module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace adelic
