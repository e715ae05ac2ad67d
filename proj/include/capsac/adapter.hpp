#pragma once

#include <stdexcept>
#include <string>

#include <capsac/model.hpp>

namespace capsac {

// Hook for the upstream public instance files. Their on-disk layout has not
// been inspected yet, so this deliberately refuses instead of guessing;
// once the format is known, map it onto the native JSON schema here.
inline Instance import_public_instance(const std::string& /*text*/) {
  throw std::runtime_error(
      "public instance import not wired yet: inspect the upstream file layout "
      "and extend import_public_instance, or convert the file to the native "
      "JSON schema by hand");
}

}  // namespace capsac
