#include "rmflab/oracle.hpp"

#include <string>

#include "rmflab/errors.hpp"
#include "rmflab/sieve.hpp"

namespace rmflab {

int sign_of_prime(const SignOracle& oracle, std::uint64_t p) {
  if (!is_prime(p)) throw ParameterError("sign_of_prime: " + std::to_string(p) + " is not prime");
  return oracle.sign(p);
}

}  // namespace rmflab
