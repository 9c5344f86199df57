#pragma once

#include <map>
#include <string>
#include <vector>

#include "slowfast/system.hpp"

namespace slowfast {

struct CatalogEntry {
    std::string id;
    std::string description;
    std::map<std::string, double> defaults;
};

/// Built-in systems, keyed by string id. Unknown parameter names throw
/// ConfigError; omitted parameters take their defaults. User-defined systems
/// enter through the library API, not through the catalog.
SlowFastSystem make_system(const std::string& id,
                           const std::map<std::string, double>& params = {});

std::vector<CatalogEntry> catalog_entries();
std::vector<std::string> catalog_ids();

}  // namespace slowfast
