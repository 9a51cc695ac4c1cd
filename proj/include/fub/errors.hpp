#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fub {

/// Malformed or inconsistent spec file. `locator` names the offending
/// field/element (e.g. "A[0][1]") when known.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string locator, const std::string& message)
      : std::runtime_error(locator.empty() ? message : locator + ": " + message),
        locator_(std::move(locator)) {}
  const std::string& locator() const { return locator_; }

 private:
  std::string locator_;
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

/// No diagonal rescaling of the Schur factor certifies the required
/// similarity-norm bound. The caller may supply a transform explicitly
/// through the spec file ("options.transform").
class UnsupportedSpectrum : public std::runtime_error {
 public:
  explicit UnsupportedSpectrum(const std::string& message) : std::runtime_error(message) {}
};

class AlphabetTooSmall : public std::runtime_error {
 public:
  explicit AlphabetTooSmall(const std::string& message) : std::runtime_error(message) {}
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(int depth, std::uint64_t budget)
      : std::runtime_error("enumeration budget exceeded at depth " + std::to_string(depth) +
                           ": generating tuple count q^k exceeds " + std::to_string(budget)),
        depth_(depth),
        budget_(budget) {}
  int depth() const { return depth_; }
  std::uint64_t budget() const { return budget_; }

 private:
  int depth_;
  std::uint64_t budget_;
};

/// The separation loop exhausted its iteration cap without certifying a
/// split. Consistent with the reachable closure being connected.
class NoSeparationWithinBudget : public std::runtime_error {
 public:
  explicit NoSeparationWithinBudget(int k_max)
      : std::runtime_error("no certified separation found within k_max = " + std::to_string(k_max) +
                           " iterations; the reachable closure may be connected "
                           "(raise k_max to search deeper)"),
        k_max_(k_max) {}
  int k_max() const { return k_max_; }

 private:
  int k_max_;
};

class NotInvertible : public std::runtime_error {
 public:
  explicit NotInvertible(const std::string& message) : std::runtime_error(message) {}
};

/// Quotient transition is ambiguous: two representatives of one class move
/// to different classes under the same letter.
class NotWellDefined : public std::runtime_error {
 public:
  NotWellDefined(int class_id, int letter, int target_a, int target_b)
      : std::runtime_error("quotient map not well defined: class " + std::to_string(class_id) +
                           ", letter " + std::to_string(letter) + " reaches classes " +
                           std::to_string(target_a) + " and " + std::to_string(target_b)),
        class_id_(class_id),
        letter_(letter) {}
  int class_id() const { return class_id_; }
  int letter() const { return letter_; }

 private:
  int class_id_;
  int letter_;
};

/// A successor of a class representative lies outside every class,
/// falsifying invariance of the candidate relation.
class UnclassifiableSuccessor : public std::runtime_error {
 public:
  UnclassifiableSuccessor(int class_id, int letter)
      : std::runtime_error("successor of class " + std::to_string(class_id) + " under letter " +
                           std::to_string(letter) + " lies outside every class"),
        class_id_(class_id),
        letter_(letter) {}
  int class_id() const { return class_id_; }
  int letter() const { return letter_; }

 private:
  int class_id_;
  int letter_;
};

class DigestMismatch : public std::runtime_error {
 public:
  DigestMismatch(const std::string& expected, const std::string& actual)
      : std::runtime_error("artifact was computed from a different spec: artifact digest " +
                           expected + ", spec digest " + actual) {}
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace fub
