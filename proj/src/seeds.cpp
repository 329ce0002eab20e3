#include "milboundary/seeds.hpp"

namespace milb {

std::unique_ptr<Refiner> make_refiner(const std::string& spec) {
  if (spec == "identity") return std::make_unique<IdentityRefiner>();
  if (spec.rfind("majority:", 0) == 0) {
    const int k = std::stoi(spec.substr(9));
    return std::make_unique<MajorityRefiner>(k);
  }
  throw ConfigError("seeds.refiner", "unknown refiner '" + spec + "'");
}

}  // namespace milb
