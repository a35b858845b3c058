#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "campl/types.hpp"

namespace campl {

/// Raised when two types cannot be made equal. Carries both sides as they
/// stood when the clash was found.
struct UnifyError {
  std::string left;
  std::string right;
  bool occurs = false;
  bool sequential = false;

  std::string message() const;
};

/// Mutable substitution over inference variables, with an occurs check.
class Unifier {
 public:
  ChanType fresh_chan();
  SeqType fresh_seq();

  /// Follows variable bindings at the head only.
  ChanType resolve(const ChanType& t) const;
  SeqType resolve(const SeqType& t) const;

  /// Applies the substitution everywhere.
  ChanType zonk(const ChanType& t) const;
  SeqType zonk(const SeqType& t) const;
  ProcSignature zonk(const ProcSignature& sig) const;

  /// Extends the substitution or returns the clash; on failure the
  /// substitution may be partially extended.
  std::optional<UnifyError> unify(const ChanType& a, const ChanType& b);
  std::optional<UnifyError> unify(const SeqType& a, const SeqType& b);

 private:
  void unify_chan(const ChanType& a, const ChanType& b);
  void unify_seq(const SeqType& a, const SeqType& b);
  void unify_sig(const ProcSignature& a, const ProcSignature& b);
  bool occurs_chan(int id, const ChanType& t) const;
  bool occurs_seq(int id, const SeqType& t) const;
  bool occurs_chan_in(int id, const SeqType& t) const;
  bool occurs_seq_in(int id, const ChanType& t) const;

  std::vector<std::optional<ChanType>> chans_;
  std::vector<std::optional<SeqType>> seqs_;
};

struct ChanConstraint {
  ChanType left;
  ChanType right;
  SourcePos pos;
};

struct SeqConstraint {
  SeqType left;
  SeqType right;
  SourcePos pos;
};

using Constraint = std::variant<ChanConstraint, SeqConstraint>;

struct ConstraintFailure {
  UnifyError error;
  SourcePos pos;
};

/// Most general unifier of a constraint set, or the first clash in order.
std::variant<Unifier, ConstraintFailure> solve_constraints(
    const std::vector<Constraint>& constraints, Unifier start = {});

}  // namespace campl
