#include "campl/unify.hpp"

namespace campl {

namespace {

struct Clash {
  UnifyError error;
};

}  // namespace

std::string UnifyError::message() const {
  if (occurs) return "infinite type: " + left + " occurs in " + right;
  return "cannot match " + left + " with " + right;
}

ChanType Unifier::fresh_chan() {
  chans_.emplace_back();
  return ChanType::var(static_cast<int>(chans_.size()) - 1);
}

SeqType Unifier::fresh_seq() {
  seqs_.emplace_back();
  return SeqType::var(static_cast<int>(seqs_.size()) - 1);
}

ChanType Unifier::resolve(const ChanType& t) const {
  ChanType cur = t;
  while (cur.kind() == ChanType::Kind::Var) {
    auto id = static_cast<std::size_t>(cur.var_id());
    if (id >= chans_.size() || !chans_[id]) break;
    cur = *chans_[id];
  }
  return cur;
}

SeqType Unifier::resolve(const SeqType& t) const {
  SeqType cur = t;
  while (cur.kind() == SeqType::Kind::Var) {
    auto id = static_cast<std::size_t>(cur.var_id());
    if (id >= seqs_.size() || !seqs_[id]) break;
    cur = *seqs_[id];
  }
  return cur;
}

ChanType Unifier::zonk(const ChanType& t) const {
  ChanType r = resolve(t);
  switch (r.kind()) {
    case ChanType::Kind::Put: return ChanType::put(zonk(r.message()), zonk(r.rest()));
    case ChanType::Kind::Get: return ChanType::get(zonk(r.message()), zonk(r.rest()));
    case ChanType::Kind::Tensor: return ChanType::tensor(zonk(r.left()), zonk(r.right()));
    case ChanType::Kind::Par: return ChanType::par(zonk(r.left()), zonk(r.right()));
    case ChanType::Kind::Neg: return ChanType::neg(zonk(r.inner()));
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto: {
      std::vector<SeqType> args;
      for (const auto& a : r.args()) args.push_back(zonk(a));
      return r.kind() == ChanType::Kind::Proto ? ChanType::proto(r.name(), std::move(args))
                                               : ChanType::coproto(r.name(), std::move(args));
    }
    default: return r;
  }
}

SeqType Unifier::zonk(const SeqType& t) const {
  SeqType r = resolve(t);
  if (r.kind() == SeqType::Kind::Store) return SeqType::store(zonk(r.signature()));
  return r;
}

ProcSignature Unifier::zonk(const ProcSignature& sig) const {
  ProcSignature out;
  for (const auto& s : sig.seq_params) out.seq_params.push_back(zonk(s));
  for (const auto& c : sig.input_chans) out.input_chans.push_back(zonk(c));
  for (const auto& c : sig.output_chans) out.output_chans.push_back(zonk(c));
  return out;
}

std::optional<UnifyError> Unifier::unify(const ChanType& a, const ChanType& b) {
  try {
    unify_chan(a, b);
  } catch (const Clash& c) {
    return c.error;
  }
  return std::nullopt;
}

std::optional<UnifyError> Unifier::unify(const SeqType& a, const SeqType& b) {
  try {
    unify_seq(a, b);
  } catch (const Clash& c) {
    return c.error;
  }
  return std::nullopt;
}

void Unifier::unify_chan(const ChanType& a0, const ChanType& b0) {
  ChanType a = resolve(a0), b = resolve(b0);
  if (a.kind() == ChanType::Kind::Var && b.kind() == ChanType::Kind::Var &&
      a.var_id() == b.var_id())
    return;
  if (a.kind() != ChanType::Kind::Var && b.kind() == ChanType::Kind::Var) std::swap(a, b);
  if (a.kind() == ChanType::Kind::Var) {
    if (occurs_chan(a.var_id(), b)) throw Clash{{render(zonk(a)), render(zonk(b)), true, false}};
    auto id = static_cast<std::size_t>(a.var_id());
    if (id >= chans_.size()) chans_.resize(id + 1);
    chans_[id] = b;
    return;
  }
  auto clash = [&] { return Clash{{render(zonk(a)), render(zonk(b)), false, false}}; };
  if (a.kind() != b.kind()) throw clash();
  switch (a.kind()) {
    case ChanType::Kind::Put:
    case ChanType::Kind::Get:
      unify_seq(a.message(), b.message());
      unify_chan(a.rest(), b.rest());
      return;
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par:
      unify_chan(a.left(), b.left());
      unify_chan(a.right(), b.right());
      return;
    case ChanType::Kind::Neg: unify_chan(a.inner(), b.inner()); return;
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      if (a.name() != b.name() || a.args().size() != b.args().size()) throw clash();
      for (std::size_t i = 0; i < a.args().size(); ++i) unify_seq(a.args()[i], b.args()[i]);
      return;
    case ChanType::Kind::StateVar:
      if (a.name() != b.name()) throw clash();
      return;
    default: return;
  }
}

void Unifier::unify_seq(const SeqType& a0, const SeqType& b0) {
  SeqType a = resolve(a0), b = resolve(b0);
  if (a.kind() == SeqType::Kind::Var && b.kind() == SeqType::Kind::Var && a.var_id() == b.var_id())
    return;
  if (a.kind() != SeqType::Kind::Var && b.kind() == SeqType::Kind::Var) std::swap(a, b);
  if (a.kind() == SeqType::Kind::Var) {
    if (occurs_seq(a.var_id(), b)) throw Clash{{render(zonk(a)), render(zonk(b)), true, true}};
    auto id = static_cast<std::size_t>(a.var_id());
    if (id >= seqs_.size()) seqs_.resize(id + 1);
    seqs_[id] = b;
    return;
  }
  if (a.kind() != b.kind()) throw Clash{{render(zonk(a)), render(zonk(b)), false, true}};
  if (a.kind() == SeqType::Kind::TypeVar && a.name() != b.name())
    throw Clash{{render(a), render(b), false, true}};
  if (a.kind() == SeqType::Kind::Store) {
    try {
      unify_sig(a.signature(), b.signature());
    } catch (const Clash&) {
      throw Clash{{render(zonk(a)), render(zonk(b)), false, true}};
    }
  }
}

void Unifier::unify_sig(const ProcSignature& a, const ProcSignature& b) {
  if (a.seq_params.size() != b.seq_params.size() || a.input_chans.size() != b.input_chans.size() ||
      a.output_chans.size() != b.output_chans.size())
    throw Clash{};
  for (std::size_t i = 0; i < a.seq_params.size(); ++i) unify_seq(a.seq_params[i], b.seq_params[i]);
  for (std::size_t i = 0; i < a.input_chans.size(); ++i)
    unify_chan(a.input_chans[i], b.input_chans[i]);
  for (std::size_t i = 0; i < a.output_chans.size(); ++i)
    unify_chan(a.output_chans[i], b.output_chans[i]);
}

bool Unifier::occurs_chan(int id, const ChanType& t0) const {
  ChanType t = resolve(t0);
  switch (t.kind()) {
    case ChanType::Kind::Var: return t.var_id() == id;
    case ChanType::Kind::Put:
    case ChanType::Kind::Get: return occurs_chan_in(id, t.message()) || occurs_chan(id, t.rest());
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par: return occurs_chan(id, t.left()) || occurs_chan(id, t.right());
    case ChanType::Kind::Neg: return occurs_chan(id, t.inner());
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      for (const auto& a : t.args())
        if (occurs_chan_in(id, a)) return true;
      return false;
    default: return false;
  }
}

bool Unifier::occurs_chan_in(int id, const SeqType& t0) const {
  SeqType t = resolve(t0);
  if (t.kind() != SeqType::Kind::Store) return false;
  const auto& sig = t.signature();
  for (const auto& s : sig.seq_params)
    if (occurs_chan_in(id, s)) return true;
  for (const auto* list : {&sig.input_chans, &sig.output_chans})
    for (const auto& c : *list)
      if (occurs_chan(id, c)) return true;
  return false;
}

bool Unifier::occurs_seq(int id, const SeqType& t0) const {
  SeqType t = resolve(t0);
  if (t.kind() == SeqType::Kind::Var) return t.var_id() == id;
  if (t.kind() != SeqType::Kind::Store) return false;
  const auto& sig = t.signature();
  for (const auto& s : sig.seq_params)
    if (occurs_seq(id, s)) return true;
  for (const auto* list : {&sig.input_chans, &sig.output_chans})
    for (const auto& c : *list)
      if (occurs_seq_in(id, c)) return true;
  return false;
}

bool Unifier::occurs_seq_in(int id, const ChanType& t0) const {
  ChanType t = resolve(t0);
  switch (t.kind()) {
    case ChanType::Kind::Put:
    case ChanType::Kind::Get: return occurs_seq(id, t.message()) || occurs_seq_in(id, t.rest());
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par: return occurs_seq_in(id, t.left()) || occurs_seq_in(id, t.right());
    case ChanType::Kind::Neg: return occurs_seq_in(id, t.inner());
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      for (const auto& a : t.args())
        if (occurs_seq(id, a)) return true;
      return false;
    default: return false;
  }
}

std::variant<Unifier, ConstraintFailure> solve_constraints(
    const std::vector<Constraint>& constraints, Unifier start) {
  for (const auto& c : constraints) {
    std::optional<UnifyError> err;
    SourcePos pos;
    if (const auto* cc = std::get_if<ChanConstraint>(&c)) {
      err = start.unify(cc->left, cc->right);
      pos = cc->pos;
    } else {
      const auto& sc = std::get<SeqConstraint>(c);
      err = start.unify(sc.left, sc.right);
      pos = sc.pos;
    }
    if (err) return ConstraintFailure{*err, pos};
  }
  return start;
}

}  // namespace campl
