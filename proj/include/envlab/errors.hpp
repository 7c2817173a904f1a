#ifndef ENVLAB_ERRORS_HPP
#define ENVLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace envlab {

// Base class for all library errors. The CLI maps subclasses to exit codes:
// input problems -> 2, cap violations -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class CycleError : public Error {
 public:
  explicit CycleError(const std::string& msg) : Error(msg) {}
};

class DuplicateNameError : public Error {
 public:
  explicit DuplicateNameError(const std::string& msg) : Error(msg) {}
};

class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& cap, long long limit, long long requested)
      : Error("cap '" + cap + "' exceeded: limit " + std::to_string(limit) +
              ", requested " + std::to_string(requested)),
        cap_name(cap),
        limit(limit),
        requested(requested) {}
  std::string cap_name;
  long long limit;
  long long requested;
};

class NotALattice : public Error {
 public:
  explicit NotALattice(const std::string& msg) : Error(msg) {}
};

class NotOpenMap : public Error {
 public:
  explicit NotOpenMap(const std::string& msg) : Error(msg) {}
};

class NotContinuous : public Error {
 public:
  explicit NotContinuous(const std::string& msg) : Error(msg) {}
};

class NotAnEnvelope : public Error {
 public:
  explicit NotAnEnvelope(const std::string& msg) : Error(msg) {}
};

class NotASection : public Error {
 public:
  explicit NotASection(const std::string& msg) : Error(msg) {}
};

class NotJoinPreserving : public Error {
 public:
  explicit NotJoinPreserving(const std::string& msg) : Error(msg) {}
};

class NotABundle : public Error {
 public:
  explicit NotABundle(const std::string& msg) : Error(msg) {}
};

class BranchCapExceeded : public CapExceeded {
 public:
  BranchCapExceeded(long long limit, long long requested)
      : CapExceeded("branches", limit, requested) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class ArithmeticOverflow : public Error {
 public:
  explicit ArithmeticOverflow(const std::string& msg) : Error(msg) {}
};

// Caps are configuration, never silent truncation: exceeding one raises
// CapExceeded with the cap name and the offending size.
struct Config {
  // Maximum number of ground elements of a space whose opens get enumerated.
  int cap_opens = 16;
  // Maximum |Y| for the monad multiplication (works over O^2(Y) as a space).
  int cap_mu = 3;
  // Maximum number of continuous maps materialised by exponential().
  int cap_exponential = 4096;
  // Maximum number of elements of any materialised lattice (L_f, O^2(Y), ...).
  int cap_lattice = 4096;
  // Maximum number of affine branches per piece in real composites.
  int cap_branches = 64;
  // Sentinel returned by local_modulus when any radius works (constant map).
  long long modulus_max_delta_num = 1;
  long long modulus_max_delta_den = 1;
};

}  // namespace envlab

#endif  // ENVLAB_ERRORS_HPP
